"""Shared builders for hand-sized datasets used across the test modules."""

from __future__ import annotations

import numpy as np
import pytest

from iidsbench.dataset import (
    AttackCategory,
    AttackSpec,
    AttackTaxonomy,
    AttackType,
    Dataset,
    FeatureSchema,
    LabeledRecord,
    SyntheticConfig,
    generate_synthetic,
)


def flat_taxonomy(type_ids: list[int]) -> AttackTaxonomy:
    """Each attack type in its own category, category id = type id."""
    return AttackTaxonomy(
        types={t: AttackType(f"attack-{t}", t) for t in type_ids},
        categories={t: AttackCategory(f"A{t}", f"category-{t}") for t in type_ids},
    )


def tiny_dataset(
    labels: list[int],
    features: list[list[float]] | None = None,
    taxonomy: AttackTaxonomy | None = None,
) -> Dataset:
    """Dataset built directly from a label list; features default to the
    record index so rows stay distinguishable.
    """
    n = len(labels)
    if features is None:
        features = [[float(i), float(i % 3)] for i in range(n)]
    if taxonomy is None:
        taxonomy = flat_taxonomy(sorted({t for t in labels if t != 0}) or [1])
    schema = FeatureSchema(
        feature_names=tuple(f"f{j}" for j in range(len(features[0]))),
        feature_kinds=tuple("numeric" for _ in features[0]),
    )
    records = tuple(
        LabeledRecord(i, tuple(float(v) for v in features[i]), labels[i]) for i in range(n)
    )
    return Dataset(schema=schema, records=records, taxonomy=taxonomy)


def separable_config(
    benign: int = 300,
    per_attack: int = 50,
    attack_ids: tuple[int, ...] = (1, 2),
    offset: float = 10.0,
    dim: int = 4,
    seed: int = 11,
) -> SyntheticConfig:
    return SyntheticConfig(
        benign_count=benign,
        attacks=tuple(
            AttackSpec(t, per_attack, (idx % dim,), offset)
            for idx, t in enumerate(attack_ids)
        ),
        base_dim=dim,
        noise_scale=1.0,
        seed=seed,
    )


@pytest.fixture
def separable_dataset() -> Dataset:
    return generate_synthetic(separable_config())


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
