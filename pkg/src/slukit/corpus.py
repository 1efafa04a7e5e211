"""BIO-annotated utterances: parsing, validation, entity extraction, corpus I/O.

A corpus lives in a directory:

    corpus.tsv          one utterance per line, ``id<TAB>word[/TAG] ...``
    features/<id>.txt   optional, first line ``T d`` then T rows of d floats

A bare word carries the implicit tag ``O``; entity words are written
``word/B-label`` or ``word/I-label``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

TAG_OUTSIDE = "O"


class CorpusError(Exception):
    """Base error for corpus parsing/validation/IO problems."""


class ParseError(CorpusError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class ValidationError(CorpusError):
    pass


def is_valid_tag(tag: str) -> bool:
    if tag == TAG_OUTSIDE:
        return True
    if len(tag) < 3 or tag[:2] not in ("B-", "I-"):
        return False
    label = tag[2:]
    return bool(label) and not any(ch.isspace() for ch in label)


@dataclass
class Entity:
    """One (label, value) pair; multi-word values are joined with ``_``."""

    label: str
    value: str
    position: int  # index of the entity's first word in the utterance

    def pair(self) -> tuple[str, str]:
        return (self.label, self.value)


@dataclass
class AnnotatedUtterance:
    id: str
    words: list[str]
    tags: list[str]
    features: np.ndarray | None = None  # T x d float64, the stand-in "audio"

    def validate(self, repair: bool = True) -> "AnnotatedUtterance":
        """Check invariants; optionally repair stray I- tags to B- in place."""
        if len(self.words) != len(self.tags):
            raise ValidationError(
                f"utterance {self.id!r}: {len(self.words)} words vs {len(self.tags)} tags"
            )
        if not self.words:
            raise ValidationError(f"utterance {self.id!r}: empty token list")
        prev = TAG_OUTSIDE
        for i, tag in enumerate(self.tags):
            if not is_valid_tag(tag):
                raise ValidationError(f"utterance {self.id!r}: malformed tag {tag!r}")
            if tag.startswith("I-"):
                label = tag[2:]
                if prev not in (f"B-{label}", f"I-{label}"):
                    if repair:
                        self.tags[i] = f"B-{label}"
                    else:
                        raise ValidationError(
                            f"utterance {self.id!r}: stray {tag!r} at word {i} "
                            f"has no matching B-/I- predecessor"
                        )
            prev = self.tags[i]
        return self


@dataclass
class Corpus:
    utterances: list[AnnotatedUtterance] = field(default_factory=list)

    @property
    def label_inventory(self) -> list[str]:
        labels = {t[2:] for u in self.utterances for t in u.tags if t != TAG_OUTSIDE}
        return sorted(labels)

    def __len__(self):
        return len(self.utterances)

    def __iter__(self):
        return iter(self.utterances)

    def by_id(self, utt_id: str) -> AnnotatedUtterance:
        for u in self.utterances:
            if u.id == utt_id:
                return u
        raise KeyError(utt_id)


def parse_annotated(line: str, line_no: int | None = None, repair: bool = True) -> AnnotatedUtterance:
    """Parse one ``id<TAB>word[/TAG] ...`` line into a validated utterance.

    Words are lowercased; tags are kept verbatim. With ``repair`` on (default),
    a stray ``I-x`` token becomes ``B-x``; otherwise it is rejected.
    """
    raw = line.rstrip("\n")
    if "\t" not in raw:
        raise ParseError("expected id<TAB>tokens", line=line_no, column=1)
    utt_id, rest = raw.split("\t", 1)
    if not utt_id:
        raise ParseError("empty utterance id", line=line_no, column=1)
    words: list[str] = []
    tags: list[str] = []
    column = len(utt_id) + 2  # 1-based char offset of the current token
    for token in rest.split():
        column = raw.index(token, column - 1) + 1
        if "/" in token:
            word, tag = token.rsplit("/", 1)
            if not word:
                raise ParseError(f"token {token!r} has no word part", line=line_no, column=column)
            if not is_valid_tag(tag):
                raise ParseError(f"malformed tag in token {token!r}", line=line_no, column=column)
        else:
            word, tag = token, TAG_OUTSIDE
        words.append(word.lower())
        tags.append(tag)
        column += len(token)
    if not words:
        raise ParseError("no tokens after id", line=line_no, column=len(utt_id) + 2)
    try:
        return AnnotatedUtterance(utt_id, words, tags).validate(repair=repair)
    except ValidationError as exc:
        raise ParseError(str(exc), line=line_no) from exc


def serialize_annotated(utt: AnnotatedUtterance) -> str:
    """Inverse of parse_annotated: the tag ``O`` is left implicit."""
    parts = []
    for word, tag in zip(utt.words, utt.tags):
        if "/" in word or any(ch.isspace() for ch in word):
            raise ValidationError(f"word {word!r} cannot be serialized")
        parts.append(word if tag == TAG_OUTSIDE else f"{word}/{tag}")
    return utt.id + "\t" + " ".join(parts)


def extract_entities(utt: AnnotatedUtterance) -> list[Entity]:
    """Entities in spoken order; consecutive B/I runs of one label form one entity."""
    entities: list[Entity] = []
    run_words: list[str] = []
    run_label = None
    run_start = -1

    def flush():
        nonlocal run_words, run_label
        if run_label is not None:
            entities.append(Entity(run_label, "_".join(run_words), run_start))
        run_words, run_label = [], None

    for i, (word, tag) in enumerate(zip(utt.words, utt.tags)):
        if tag == TAG_OUTSIDE:
            flush()
        elif tag.startswith("B-"):
            flush()
            run_label, run_words, run_start = tag[2:], [word], i
        else:  # I- continuing the current run (validation guarantees the label matches)
            run_words.append(word)
    flush()
    return entities


def write_features(path: str, features: np.ndarray) -> None:
    arr = np.asarray(features, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{arr.shape[0]} {arr.shape[1]}\n")
        for row in arr:
            fh.write(" ".join(repr(v) for v in row.tolist()) + "\n")


def read_features(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ParseError(f"bad feature header in {path}", line=1)
        t, d = int(header[0]), int(header[1])
        rows = []
        for i in range(t):
            vals = fh.readline().split()
            if len(vals) != d:
                raise ParseError(f"feature row has {len(vals)} values, expected {d}", line=i + 2)
            rows.append([float(v) for v in vals])
    return np.array(rows, dtype=np.float64).reshape(t, d)


def corpus_file(path: str) -> str:
    return path if path.endswith(".tsv") else os.path.join(path, "corpus.tsv")


def read_corpus(path: str, require_features: bool = False, repair: bool = True) -> Corpus:
    """Load a corpus directory (or bare .tsv file for text-only corpora)."""
    tsv = corpus_file(path)
    feat_dir = os.path.join(os.path.dirname(tsv), "features")
    seen: set[str] = set()
    utterances = []
    with open(tsv, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            utt = parse_annotated(line, line_no=line_no, repair=repair)
            if utt.id in seen:
                raise CorpusError(f"duplicate utterance id {utt.id!r} (line {line_no})")
            seen.add(utt.id)
            feat_path = os.path.join(feat_dir, f"{utt.id}.txt")
            if os.path.exists(feat_path):
                utt.features = read_features(feat_path)
            elif require_features:
                raise CorpusError(f"missing feature file for utterance {utt.id!r}: {feat_path}")
            utterances.append(utt)
    return Corpus(utterances)


def write_corpus(corpus: Corpus, path: str) -> None:
    """Write corpus.tsv (and features/ for utterances that have features)."""
    os.makedirs(path, exist_ok=True)
    seen: set[str] = set()
    feat_dir = os.path.join(path, "features")
    with open(os.path.join(path, "corpus.tsv"), "w", encoding="utf-8") as fh:
        for utt in corpus:
            if utt.id in seen:
                raise CorpusError(f"duplicate utterance id {utt.id!r}")
            seen.add(utt.id)
            fh.write(serialize_annotated(utt) + "\n")
            if utt.features is not None:
                os.makedirs(feat_dir, exist_ok=True)
                write_features(os.path.join(feat_dir, f"{utt.id}.txt"), utt.features)
