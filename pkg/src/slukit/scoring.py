"""Strict bag-of-entities precision/recall/F1.

A hypothesis entity counts only when both its label and its full value match
a reference entity exactly; there is no partial credit, and entity order
never matters. Counts are micro-averaged over the corpus.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .corpus import Entity

EntityBag = Counter  # multiset of (label, value) pairs


def bag_of(entities: Iterable[Entity | tuple[str, str]]) -> EntityBag:
    pairs = []
    for e in entities:
        pairs.append(e.pair() if isinstance(e, Entity) else (e[0], e[1]))
    return Counter(pairs)


def score_pair(ref: EntityBag, hyp: EntityBag) -> tuple[int, int, int]:
    """(tp, fp, fn) for one utterance: tp is the multiset intersection size."""
    tp = sum((ref & hyp).values())
    fp = sum(hyp.values()) - tp
    fn = sum(ref.values()) - tp
    return tp, fp, fn


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    # Empty denominators: a side with nothing to get wrong scores 1.0, unless
    # the other side shows it missed/invented something.
    if tp + fp == 0:
        precision = 1.0 if fn == 0 else 0.0
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        recall = 1.0 if fp == 0 else 0.0
    else:
        recall = tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


@dataclass
class PRF1Report:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    per_label: dict[str, tuple[int, int, int]] = field(default_factory=dict)

    @property
    def precision(self) -> float:
        return _prf(self.tp, self.fp, self.fn)[0]

    @property
    def recall(self) -> float:
        return _prf(self.tp, self.fp, self.fn)[1]

    @property
    def f1(self) -> float:
        return _prf(self.tp, self.fp, self.fn)[2]

    def as_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "per_label": {
                label: {"tp": c[0], "fp": c[1], "fn": c[2]}
                for label, c in sorted(self.per_label.items())
            },
        }


def _restrict(bag: EntityBag, label: str) -> EntityBag:
    return Counter({pair: n for pair, n in bag.items() if pair[0] == label})


def score_corpus(refs: list[EntityBag], hyps: list[EntityBag]) -> PRF1Report:
    """Micro-averaged report over aligned reference/hypothesis bag lists."""
    if len(refs) != len(hyps):
        raise ValueError(f"length mismatch: {len(refs)} references vs {len(hyps)} hypotheses")
    report = PRF1Report()
    labels = {pair[0] for bag in refs for pair in bag} | {pair[0] for bag in hyps for pair in bag}
    per_label = {label: [0, 0, 0] for label in labels}
    for ref, hyp in zip(refs, hyps):
        tp, fp, fn = score_pair(ref, hyp)
        report.tp += tp
        report.fp += fp
        report.fn += fn
        for label in labels:
            ltp, lfp, lfn = score_pair(_restrict(ref, label), _restrict(hyp, label))
            counts = per_label[label]
            counts[0] += ltp
            counts[1] += lfp
            counts[2] += lfn
    report.per_label = {label: tuple(c) for label, c in per_label.items()}
    return report
