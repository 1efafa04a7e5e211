"""The four training-target variants and their inverse (token sequence -> entities).

Variants, for "i want a flight to dallas/B-toloc.city_name ...":

    full        i want a flight to dallas ...
    labeled     i want a flight to dallas B-toloc.city_name ...
    spoken      dallas B-toloc.city_name reno B-fromloc.city_name ...
    alphabetic  same as spoken but entities sorted by label (bytewise,
                ties kept in spoken order)

Label tokens are the BIO tags themselves; a word emits at most one following
label token. End-of-sequence handling is the attention trainer's concern and
is not part of these sequences.
"""

from __future__ import annotations

import enum

from .corpus import AnnotatedUtterance, Entity, TAG_OUTSIDE, extract_entities


class TargetVariant(enum.Enum):
    FULL_TRANSCRIPT = "full"
    TRANSCRIPT_WITH_LABELS = "labeled"
    ENTITIES_SPOKEN = "spoken"
    ENTITIES_ALPHABETIC = "alphabetic"

    @classmethod
    def from_name(cls, name: str) -> "TargetVariant":
        for variant in cls:
            if variant.value == name:
                return variant
        raise ValueError(f"unknown target variant {name!r}; expected one of "
                         + ", ".join(v.value for v in cls))


class MalformedSequenceError(ValueError):
    pass


def is_label_token(token: str) -> bool:
    return token.startswith(("B-", "I-")) and len(token) > 2


def _entity_token_runs(utt: AnnotatedUtterance) -> list[list[str]]:
    """Per entity, its interleaved word/label tokens: [w1, B-x, w2, I-x, ...]."""
    runs = []
    for i, (word, tag) in enumerate(zip(utt.words, utt.tags)):
        if tag == TAG_OUTSIDE:
            continue
        if tag.startswith("B-"):
            runs.append([word, tag])
        else:
            runs[-1].extend([word, tag])
    return runs


def make_target(utt: AnnotatedUtterance, variant: TargetVariant) -> list[str]:
    if variant is TargetVariant.FULL_TRANSCRIPT:
        return list(utt.words)
    if variant is TargetVariant.TRANSCRIPT_WITH_LABELS:
        tokens = []
        for word, tag in zip(utt.words, utt.tags):
            tokens.append(word)
            if tag != TAG_OUTSIDE:
                tokens.append(tag)
        return tokens
    runs = _entity_token_runs(utt)
    if variant is TargetVariant.ENTITIES_ALPHABETIC:
        # key = the entity's label; Python's sort is stable, so equal labels
        # keep spoken order
        runs = sorted(runs, key=lambda run: run[1][2:])
    tokens = []
    for run in runs:
        tokens.extend(run)
    return tokens


def entities_of_target(tokens: list[str], strict: bool = True) -> list[Entity]:
    """Reconstruct (label, value) pairs from an entity-variant token sequence.

    Plain words with no following label token contribute nothing (so the
    labeled variant also round-trips). In strict mode a label token with no
    preceding word raises; in lenient mode (for decoded hypotheses) it is
    dropped.
    """
    entities: list[Entity] = []
    pending_word: str | None = None
    pending_pos = -1
    open_label: str | None = None  # label of entities[-1] while it can still grow
    for pos, token in enumerate(tokens):
        if is_label_token(token):
            if pending_word is None:
                if strict:
                    raise MalformedSequenceError(
                        f"label token {token!r} at position {pos} has no preceding word"
                    )
                continue
            label = token[2:]
            if token.startswith("I-") and open_label == label:
                entities[-1].value += "_" + pending_word
            else:
                entities.append(Entity(label, pending_word, pending_pos))
                open_label = label
            pending_word = None
        else:
            if pending_word is not None:
                open_label = None  # an unlabeled word breaks the current run
            pending_word = token
            pending_pos = pos
    return entities


def format_target_line(utt_id: str, tokens: list[str]) -> str:
    return utt_id + "\t" + " ".join(tokens)


def parse_target_line(line: str) -> tuple[str, list[str]]:
    raw = line.rstrip("\n")
    if "\t" not in raw:
        raise MalformedSequenceError(f"expected id<TAB>tokens, got {raw!r}")
    utt_id, rest = raw.split("\t", 1)
    return utt_id, rest.split()
