"""Synthetic "speech-like" corpora from a slot-filling micro-grammar.

Every word has a fixed random base vector (its "acoustics", keyed by the word
string and a lexicon seed, so separate corpora share the same mapping). An
utterance emits 2-4 frames per word, each the base plus Gaussian emission
noise; an optional additive-noise knob simulates the noisy condition. Tags
come straight from the template slots, so every utterance carries its own
gold annotation.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, replace

import numpy as np

from .corpus import AnnotatedUtterance, Corpus

SLOT_LABELS = {
    "toloc": "toloc.city_name",
    "fromloc": "fromloc.city_name",
    "stoploc": "stoploc.city_name",
    "day": "depart_date.day_name",
    "airline": "airline_name",
    "class": "class_type",
    "period": "depart_time.period_of_day",
    "cost": "cost_relative",
}

_SLOT_RE = re.compile(r"\{(\w+)\}")

_CITIES = [
    "atlanta", "baltimore", "boston", "chicago", "cleveland", "dallas",
    "denver", "detroit", "houston", "kansas city", "las vegas", "long beach",
    "memphis", "milwaukee", "nashville", "new york", "oakland", "orlando",
    "philadelphia", "phoenix", "pittsburgh", "reno", "salt lake city",
    "san francisco", "seattle", "tampa",
]

_FILLERS = {
    "toloc": _CITIES,
    "fromloc": _CITIES,
    "stoploc": _CITIES,
    "day": ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"],
    "airline": ["delta", "united", "continental", "northwest", "lufthansa",
                "american airlines", "us air", "twa", "air canada"],
    "class": ["first class", "coach", "business class", "economy"],
    "period": ["morning", "afternoon", "evening", "night"],
    "cost": ["cheapest", "lowest", "most expensive", "least expensive"],
}

_ATIS_TEMPLATES = [
    "i want a flight to {toloc} from {fromloc}",
    "i want a flight to {toloc} from {fromloc} that makes a stop in {stoploc}",
    "show me {cost} flights from {fromloc} to {toloc}",
    "list all flights from {fromloc} to {toloc} on {day}",
    "i need a {class} ticket on {airline} to {toloc}",
    "what {airline} flights leave {fromloc} in the {period}",
    "find the {cost} fare from {fromloc} to {toloc} on {day}",
    "does {airline} fly from {fromloc} to {toloc}",
    "book a {class} seat to {toloc} for {day} {period}",
    "are there {period} flights from {fromloc} to {toloc} with a stop in {stoploc}",
]

_CHATTER_TEMPLATES = [
    "thank you very much goodbye",
    "hello i am looking for some flight information",
    "tell me about ground transportation in {toloc}",
    "what time is it in {toloc}",
    "how much does a round trip ticket cost",
    "is there a direct flight to {toloc} from {fromloc}",
    "i would like to make a reservation for a flight to {toloc} from {fromloc} on this coming {day}",
    "please repeat that",
    "yes that one sounds fine",
    "can you list the airlines that fly into {toloc}",
]


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class Template:
    text: str
    weight: float = 1.0

    @property
    def parts(self) -> list[str]:
        return self.text.split()

    @property
    def slots(self) -> list[str]:
        return [m.group(1) for m in _SLOT_RE.finditer(self.text)]


@dataclass(frozen=True)
class TemplateSet:
    name: str
    templates: tuple[Template, ...]
    fillers: dict[str, list[str]]

    def __post_init__(self):
        for template in self.templates:
            for slot in template.slots:
                if slot not in self.fillers:
                    raise TemplateError(
                        f"template {template.text!r} references unknown slot {slot!r}"
                    )

    def label_probabilities(self) -> dict[str, float]:
        """Expected per-utterance count of each entity label under sampling."""
        total = sum(t.weight for t in self.templates)
        probs: dict[str, float] = {}
        for template in self.templates:
            for slot in template.slots:
                label = SLOT_LABELS[slot]
                probs[label] = probs.get(label, 0.0) + template.weight / total
        return probs

    def words(self) -> list[str]:
        """Every word that can occur: template literals plus all filler words."""
        vocab: set[str] = set()
        for template in self.templates:
            for part in template.parts:
                if not _SLOT_RE.fullmatch(part):
                    vocab.add(part)
        for pool in self.fillers.values():
            for filler in pool:
                vocab.update(filler.split())
        return sorted(vocab)

    def label_tokens(self) -> list[str]:
        labels = sorted({SLOT_LABELS[s] for t in self.templates for s in t.slots})
        return [f"{prefix}{label}" for label in labels for prefix in ("B-", "I-")]


TEMPLATE_SETS = {
    "atis": TemplateSet("atis", tuple(Template(t) for t in _ATIS_TEMPLATES), _FILLERS),
    "wide": TemplateSet("wide", tuple(Template(t) for t in _ATIS_TEMPLATES + _CHATTER_TEMPLATES),
                        _FILLERS),
}


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_utterances: int = 100
    feature_dim: int = 16
    frames_per_word: tuple[int, int] = (2, 4)
    emission_noise_sigma: float = 0.1
    additive_noise_sigma: float = 0.0  # >0 simulates the noisy condition
    template_set: str = "atis"
    heldout_fraction: float = 0.1  # fraction of each filler pool reserved for test
    exclude_heldout: bool = False  # True for training corpora
    lexicon_seed: int = 101  # corpora sharing this share word acoustics
    id_prefix: str = "u"

    def __post_init__(self):
        if self.feature_dim < 2:
            raise ValueError("feature_dim must be >= 2")
        if self.n_utterances < 1:
            raise ValueError("n_utterances must be >= 1")
        if self.emission_noise_sigma < 0 or self.additive_noise_sigma < 0:
            raise ValueError("noise sigmas must be >= 0")
        lo, hi = self.frames_per_word
        if lo < 1 or hi < lo:
            raise ValueError(f"bad frames_per_word range {self.frames_per_word}")

    @property
    def templates(self) -> TemplateSet:
        return TEMPLATE_SETS[self.template_set]


def heldout_fillers(template_set: TemplateSet, fraction: float) -> dict[str, list[str]]:
    """Per slot: the last floor(fraction*n) fillers of the sorted pool.

    Small pools (days, classes, ...) keep full coverage; only the open-class
    pools lose some values from training, mirroring unseen entity values.
    """
    held: dict[str, list[str]] = {}
    for slot, pool in template_set.fillers.items():
        k = int(len(pool) * fraction)
        held[slot] = sorted(pool)[len(pool) - k:] if k else []
    return held


def _training_pools(cfg: SynthConfig) -> dict[str, list[str]]:
    tset = cfg.templates
    if not cfg.exclude_heldout:
        return dict(tset.fillers)
    held = heldout_fillers(tset, cfg.heldout_fraction)
    return {slot: [f for f in pool if f not in held[slot]]
            for slot, pool in tset.fillers.items()}


def word_base_vector(word: str, feature_dim: int, lexicon_seed: int) -> np.ndarray:
    digest = hashlib.blake2b(word.encode("utf-8"), digest_size=8).digest()
    rng = np.random.default_rng([lexicon_seed, int.from_bytes(digest, "little")])
    return rng.standard_normal(feature_dim)


class _Lexicon:
    """Caches base vectors for one (feature_dim, lexicon_seed) pair."""

    def __init__(self, feature_dim, lexicon_seed):
        self.feature_dim = feature_dim
        self.lexicon_seed = lexicon_seed
        self._cache: dict[str, np.ndarray] = {}

    def base(self, word: str) -> np.ndarray:
        vec = self._cache.get(word)
        if vec is None:
            vec = word_base_vector(word, self.feature_dim, self.lexicon_seed)
            self._cache[word] = vec
        return vec


def _pick_template(tset: TemplateSet, rng: np.random.Generator) -> Template:
    total = sum(t.weight for t in tset.templates)
    r = rng.random() * total
    acc = 0.0
    for template in tset.templates:
        acc += template.weight
        if r < acc:
            return template
    return tset.templates[-1]


def generate_utterance(cfg: SynthConfig, index: int,
                       pools: dict[str, list[str]] | None = None,
                       lexicon: _Lexicon | None = None) -> AnnotatedUtterance:
    """Utterance `index` of the corpus; depends only on (cfg, index)."""
    pools = pools if pools is not None else _training_pools(cfg)
    lexicon = lexicon or _Lexicon(cfg.feature_dim, cfg.lexicon_seed)
    rng = np.random.default_rng([cfg.seed, index])
    template = _pick_template(cfg.templates, rng)

    words: list[str] = []
    tags: list[str] = []
    for part in template.parts:
        m = _SLOT_RE.fullmatch(part)
        if m is None:
            words.append(part)
            tags.append("O")
            continue
        slot = m.group(1)
        pool = pools[slot]
        filler = pool[rng.integers(len(pool))]
        label = SLOT_LABELS[slot]
        for j, word in enumerate(filler.split()):
            words.append(word)
            tags.append(("B-" if j == 0 else "I-") + label)

    lo, hi = cfg.frames_per_word
    blocks = []
    for word in words:
        k = int(rng.integers(lo, hi + 1))
        blocks.append(lexicon.base(word)
                      + cfg.emission_noise_sigma * rng.standard_normal((k, cfg.feature_dim)))
    features = np.concatenate(blocks, axis=0)
    if cfg.additive_noise_sigma > 0:
        features = features + cfg.additive_noise_sigma * rng.standard_normal(features.shape)
    return AnnotatedUtterance(f"{cfg.id_prefix}{index:05d}", words, tags, features)


def generate_corpus(cfg: SynthConfig) -> Corpus:
    pools = _training_pools(cfg)
    lexicon = _Lexicon(cfg.feature_dim, cfg.lexicon_seed)
    return Corpus([generate_utterance(cfg, i, pools, lexicon)
                   for i in range(cfg.n_utterances)])


def train_test_configs(cfg: SynthConfig, n_train: int, n_test: int) -> tuple[SynthConfig, SynthConfig]:
    """Disjoint-id train/test configs; test draws from the full filler pools."""
    train_cfg = replace(cfg, n_utterances=n_train, exclude_heldout=True,
                        id_prefix="train-")
    test_cfg = replace(cfg, n_utterances=n_test, exclude_heldout=False,
                       id_prefix="test-", seed=cfg.seed + 100003)
    return train_cfg, test_cfg


def add_noise(features: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    """features + N(0, sigma^2) elementwise; sigma=0 returns the input unchanged."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return features
    rng = np.random.default_rng(seed)
    return features + sigma * rng.standard_normal(features.shape)


def corpus_with_noise(corpus: Corpus, sigma: float, seed: int) -> Corpus:
    """Noisy copy of a corpus, one derived noise stream per utterance."""
    noisy = []
    for i, utt in enumerate(corpus):
        feats = utt.features
        if feats is not None:
            feats = add_noise(feats, sigma, seed + i)
        noisy.append(AnnotatedUtterance(utt.id, list(utt.words), list(utt.tags), feats))
    return Corpus(noisy)
