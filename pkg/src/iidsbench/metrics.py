"""Confusion counting, precision/recall/F1, per-group recall, fold means.

Zero-denominator metrics are undefined, represented as None (never
substituted with 0 or 1), and fold averaging runs over the defined folds
only, reporting how many there were. The malicious class is positive
everywhere except the benign column, which scores benign traffic as its
own positive class (tn/(tn+fp)).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dataset import BENIGN, LEVEL_ATTACK, AttackTaxonomy, LabeledRecord
from .splitting import ScenarioSpec

BENIGN_GROUP = 0


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(predicted, truth) -> ConfusionCounts:
    """Tally outcomes of binary predictions; True means malicious."""
    pred = np.asarray(predicted, dtype=bool)
    true = np.asarray(truth, dtype=bool)
    if pred.shape != true.shape:
        raise ValueError(f"length mismatch: {pred.shape} predictions vs {true.shape} labels")
    if pred.size == 0:
        raise ValueError("empty prediction set")
    tp = int(np.sum(pred & true))
    fp = int(np.sum(pred & ~true))
    tn = int(np.sum(~pred & ~true))
    fn = int(np.sum(~pred & true))
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def precision(c: ConfusionCounts) -> float | None:
    if c.tp + c.fp == 0:
        return None
    return c.tp / (c.tp + c.fp)


def recall(c: ConfusionCounts) -> float | None:
    if c.tp + c.fn == 0:
        return None
    return c.tp / (c.tp + c.fn)


def f1(p: float | None, r: float | None) -> float | None:
    if p is None or r is None or p + r == 0:
        return None
    return 2 * p * r / (p + r)


@dataclass(frozen=True)
class GroupRecallRow:
    """Recall per group for one evaluated fold. Groups are the benign column
    (id 0) plus every unit of the taxonomy at the row's level; a group whose
    records never appear in the test set holds None.
    """

    scenario: ScenarioSpec | None
    fold: int
    level: str
    values: dict[int, float | None]
    precision: float | None
    recall: float | None
    f1: float | None

    def with_context(self, scenario: ScenarioSpec, fold: int) -> "GroupRecallRow":
        return replace(self, scenario=scenario, fold=fold)


def per_group_recall(
    predictions,
    records: tuple[LabeledRecord, ...] | list[LabeledRecord],
    taxonomy: AttackTaxonomy,
    level: str = LEVEL_ATTACK,
) -> GroupRecallRow:
    """Score one fold's test set. predictions[i] is the binary verdict for
    records[i] (True = malicious). Malicious groups score the fraction of
    their records predicted malicious; the benign column scores the fraction
    of benign records predicted benign.
    """
    if len(predictions) != len(records):
        raise ValueError(
            f"length mismatch: {len(predictions)} predictions vs {len(records)} records"
        )
    pred = np.asarray(predictions, dtype=bool)
    truth = np.array([r.is_malicious for r in records], dtype=bool)

    values: dict[int, float | None] = {}
    benign_total = 0
    benign_kept = 0
    group_total: dict[int, int] = {}
    group_hit: dict[int, int] = {}
    for verdict, rec in zip(pred.tolist(), records):
        if rec.attack_type == BENIGN:
            benign_total += 1
            benign_kept += 0 if verdict else 1
            continue
        group = rec.attack_type if level == LEVEL_ATTACK else taxonomy.category_of(rec.attack_type)
        group_total[group] = group_total.get(group, 0) + 1
        group_hit[group] = group_hit.get(group, 0) + (1 if verdict else 0)

    values[BENIGN_GROUP] = benign_kept / benign_total if benign_total else None
    for unit in taxonomy.unit_ids(level):
        total = group_total.get(unit, 0)
        values[unit] = group_hit[unit] / total if total else None

    counts = confusion(pred, truth)
    p = precision(counts)
    r = recall(counts)
    return GroupRecallRow(
        scenario=None,
        fold=-1,
        level=level,
        values=values,
        precision=p,
        recall=r,
        f1=f1(p, r),
    )


@dataclass(frozen=True)
class AggregatedRow:
    scenario: ScenarioSpec
    level: str
    group_means: dict[int, float | None]
    defined_folds: dict[int, int]
    precision: float | None
    precision_folds: int
    n_folds: int


def _mean_defined(values: list[float | None]) -> tuple[float | None, int]:
    defined = [v for v in values if v is not None]
    if not defined:
        return None, 0
    return sum(defined) / len(defined), len(defined)


def aggregate_folds(rows: list[GroupRecallRow]) -> AggregatedRow:
    """Arithmetic mean over the folds where each value is defined. All rows
    must belong to one scenario.
    """
    if not rows:
        raise ValueError("no fold rows to aggregate")
    scenario = rows[0].scenario
    if scenario is None:
        raise ValueError("fold rows lack a scenario")
    for row in rows[1:]:
        if row.scenario != scenario:
            raise ValueError(f"mixed scenarios: {scenario} and {row.scenario}")
    groups = rows[0].values.keys()
    for row in rows[1:]:
        if row.values.keys() != groups:
            raise ValueError("fold rows disagree on the group set")

    group_means: dict[int, float | None] = {}
    defined_folds: dict[int, int] = {}
    for group in groups:
        mean, count = _mean_defined([row.values[group] for row in rows])
        group_means[group] = mean
        defined_folds[group] = count
    precision_mean, precision_count = _mean_defined([row.precision for row in rows])
    return AggregatedRow(
        scenario=scenario,
        level=rows[0].level,
        group_means=group_means,
        defined_folds=defined_folds,
        precision=precision_mean,
        precision_folds=precision_count,
        n_folds=len(rows),
    )
