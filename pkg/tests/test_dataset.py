"""Dataset ingestion, taxonomy, stats, synthetic generation."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from iidsbench.dataset import (
    AttackSpec,
    AttackTaxonomy,
    Dataset,
    FeatureSchema,
    LabeledRecord,
    SyntheticConfig,
    builtin_taxonomy,
    dataset_stats,
    dataset_to_csv,
    generate_synthetic,
    load_taxonomy,
    parse_dataset,
    synthetic_config_from_dict,
    synthetic_config_to_dict,
    taxonomy_to_csv,
    validate_dataset,
    write_dataset,
)
from iidsbench.errors import DatasetError, TaxonomyError

from conftest import flat_taxonomy, tiny_dataset


# -- builtin taxonomy -------------------------------------------------------

CATEGORY_COUNTS = {1: 4, 2: 7, 3: 5, 4: 12, 5: 3, 6: 1, 7: 3}


def test_builtin_taxonomy_shape():
    tax = builtin_taxonomy()
    assert len(tax.types) == 35
    assert len(tax.categories) == 7
    assert tax.category_type_counts() == CATEGORY_COUNTS
    assert sum(CATEGORY_COUNTS.values()) == 35


def test_builtin_category_abbreviations():
    tax = builtin_taxonomy()
    abbrs = [tax.categories[c].abbreviation for c in sorted(tax.categories)]
    assert abbrs == ["NMRI", "CMRI", "MSCI", "MPCI", "MFCI", "DoS", "Recon"]
    assert len(
        [t for t in tax.types.values() if t.category == 4]
    ) == 12  # MPCI
    assert len([t for t in tax.types.values() if t.category == 6]) == 1  # DoS


def test_builtin_sequential_ids():
    # ids run 1..35 grouped by category in Table order; attack 3 therefore
    # sits in category 1, not 3 (see the decisions ledger for the rationale)
    tax = builtin_taxonomy()
    assert sorted(tax.types) == list(range(1, 36))
    assert tax.category_of(1) == 1
    assert tax.category_of(3) == 1
    assert tax.category_of(4) == 1
    assert tax.category_of(5) == 2
    assert tax.category_of(17) == 4
    assert tax.category_of(32) == 6
    assert tax.category_of(35) == 7


def test_unit_labels():
    tax = builtin_taxonomy()
    assert tax.unit_label("category", 4) == "MPCI"
    assert tax.unit_label("attack", 1) == "1.1"
    assert tax.unit_label("attack", 17) == "4.1"
    assert tax.unit_label("attack", 28) == "4.12"
    assert tax.unit_label("attack", 35) == "7.3"


def test_taxonomy_referential_integrity():
    from iidsbench.dataset import AttackCategory, AttackType

    with pytest.raises(TaxonomyError):
        AttackTaxonomy(
            types={1: AttackType("a", 9)},
            categories={1: AttackCategory("X", "x")},
        )


def test_load_taxonomy_round_trip(tmp_path):
    tax = builtin_taxonomy()
    path = tmp_path / "tax.csv"
    path.write_text(taxonomy_to_csv(tax))
    again = load_taxonomy(path)
    assert again.types == tax.types
    assert again.categories == tax.categories


def test_load_taxonomy_dangling_category(tmp_path):
    path = tmp_path / "tax.csv"
    path.write_text(
        "kind,id,name,category,abbreviation\n"
        "category,1,cat one,,C1\n"
        "attack,1,atk one,9,\n"
    )
    with pytest.raises(TaxonomyError, match="9"):
        load_taxonomy(path)


def test_load_taxonomy_duplicate_attack(tmp_path):
    path = tmp_path / "tax.csv"
    path.write_text(
        "kind,id,name,category,abbreviation\n"
        "category,1,cat one,,C1\n"
        "attack,1,atk one,1,\n"
        "attack,1,atk dup,1,\n"
    )
    with pytest.raises(TaxonomyError, match="duplicate"):
        load_taxonomy(path)


# -- parsing ----------------------------------------------------------------


def test_parse_four_row_file(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text(
        "f0,f1,attack_type\n"
        "1.0,2.0,0\n"
        "1.5,2.5,0\n"
        "9.0,2.0,3\n"
        "9.5,2.5,3\n"
    )
    d = parse_dataset(path)
    assert len(d.records) == 4
    assert [r.attack_type for r in d.records] == [0, 0, 3, 3]
    assert sum(r.is_malicious for r in d.records) == 2
    # sequential Table-order ids put attack 3 in category 1 (NMRI)
    assert d.taxonomy.category_of(3) == 1
    assert d.records[2].features == (9.0, 2.0)


def test_parse_empty_file(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("f0,attack_type\n")
    with pytest.raises(DatasetError, match="empty"):
        parse_dataset(path)


def test_parse_wrong_arity_names_line(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("f0,f1,attack_type\n1.0,2.0,0\n1.0,0\n")
    with pytest.raises(DatasetError, match="line 3"):
        parse_dataset(path)


def test_parse_bad_float_names_line_and_column(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("f0,attack_type\n1.0,0\nnope,1\n")
    with pytest.raises(DatasetError) as err:
        parse_dataset(path)
    assert "line 3" in str(err.value)
    assert "f0" in str(err.value)


def test_parse_unknown_attack_id(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("f0,attack_type\n1.0,0\n2.0,99\n")
    with pytest.raises(DatasetError, match="99"):
        parse_dataset(path)


def test_parse_negative_attack_id(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("f0,attack_type\n1.0,0\n2.0,-1\n")
    with pytest.raises(DatasetError, match="-1"):
        parse_dataset(path)


def test_parse_missing_numeric_imputes_median_and_flags(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("f0,attack_type\n1.0,0\n,0\n3.0,1\n5.0,1\n")
    d = parse_dataset(path)
    assert d.schema.feature_names == ("f0", "missing_any")
    # median of present values {1, 3, 5}
    assert d.records[1].features == (3.0, 1.0)
    assert d.records[0].features == (1.0, 0.0)


def test_parse_categorical_first_occurrence_codes(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("mode,attack_type\nauto,0\nmanual,0\nauto,1\n")
    schema_path = tmp_path / "schema.json"
    schema_path.write_text(json.dumps({"features": [{"name": "mode", "kind": "categorical"}]}))
    d = parse_dataset(path, schema_source=schema_path)
    assert d.schema.categorical_codes["mode"] == ("auto", "manual")
    assert [r.features[0] for r in d.records] == [0.0, 1.0, 0.0]


def test_round_trip_write_parse(tmp_path):
    cfg = SyntheticConfig(
        benign_count=40,
        attacks=(AttackSpec(1, 10, (0,), 4.0), AttackSpec(2, 10, (1,), 4.0)),
        base_dim=3,
        seed=3,
    )
    d = generate_synthetic(cfg)
    path = tmp_path / "d.csv"
    write_dataset(d, path)
    tax_path = tmp_path / "tax.csv"
    tax_path.write_text(taxonomy_to_csv(d.taxonomy))
    again = parse_dataset(path, taxonomy=load_taxonomy(tax_path))
    assert len(again.records) == len(d.records)
    for a, b in zip(d.records, again.records):
        assert a.attack_type == b.attack_type
        # 9 significant digits survive the trip exactly
        for x, y in zip(a.features, b.features):
            assert y == float(f"{x:.9g}")
    # emitted text is a fixed point of the round trip
    assert dataset_to_csv(again) == path.read_text()


# -- validation -------------------------------------------------------------


def test_validate_clean_dataset():
    d = tiny_dataset([0, 0, 0, 0, 1, 1, 2, 2, 0, 1])
    assert validate_dataset(d) == []


def test_validate_unknown_attack_type():
    d = tiny_dataset([0, 0, 1, 99], taxonomy=flat_taxonomy([1]))
    findings = validate_dataset(d)
    assert len(findings) == 1
    assert findings[0].record_index == 3
    assert "99" in findings[0].message


def test_validate_all_benign():
    d = tiny_dataset([0, 0, 0], taxonomy=flat_taxonomy([1]))
    findings = validate_dataset(d)
    assert len(findings) == 1
    assert "no malicious" in findings[0].message


def test_validate_reports_all_violations():
    d = tiny_dataset([0, 99, 98], taxonomy=flat_taxonomy([1]))
    kinds = {f.record_index for f in validate_dataset(d) if f.record_index is not None}
    assert kinds == {1, 2}


# -- stats ------------------------------------------------------------------


def test_stats_counts():
    d = tiny_dataset([0] * 8 + [1] * 2)
    s = dataset_stats(d)
    assert s.total == 10
    assert s.benign_count == 8
    assert s.malicious_count == 2
    assert s.malicious_fraction == 0.2
    assert s.per_type == {1: 2}


def test_stats_match_synthetic_config():
    cfg = SyntheticConfig(
        benign_count=50,
        attacks=(AttackSpec(1, 7, (0,), 3.0), AttackSpec(4, 11, (1,), 3.0)),
        base_dim=2,
        seed=9,
    )
    s = dataset_stats(generate_synthetic(cfg))
    assert s.total == 68
    assert s.benign_count == 50
    assert s.per_type == {1: 7, 4: 11}


# -- synthetic generation ---------------------------------------------------


def test_synthetic_deterministic():
    cfg = SyntheticConfig(
        benign_count=100, attacks=(AttackSpec(1, 20, (0,), 5.0),), base_dim=3, seed=7
    )
    a = generate_synthetic(cfg)
    b = generate_synthetic(cfg)
    assert len(a.records) == 120
    assert [r.features for r in a.records] == [r.features for r in b.records]
    assert [r.attack_type for r in a.records] == [r.attack_type for r in b.records]


def test_synthetic_overlap_group_shares_shift():
    cfg = SyntheticConfig(
        benign_count=400,
        attacks=(
            AttackSpec(1, 100, (2,), 5.0, overlap_group=1),
            AttackSpec(2, 100, (2,), 5.0, overlap_group=1),
        ),
        base_dim=4,
        noise_scale=1.0,
        seed=5,
    )
    d = generate_synthetic(cfg)
    x = d.feature_matrix()
    y = d.labels()
    tol = 3.0 * cfg.noise_scale / math.sqrt(100)
    for t in (1, 2):
        assert abs(x[y == t, 2].mean() - 5.0) < tol
    assert abs(x[y == 0, 2].mean()) < 3.0 * cfg.noise_scale / math.sqrt(400)


def test_synthetic_zero_offset_indistinguishable():
    cfg = SyntheticConfig(
        benign_count=500,
        attacks=(AttackSpec(1, 500, (0,), 0.0),),
        base_dim=2,
        seed=13,
    )
    d = generate_synthetic(cfg)
    x = d.feature_matrix()
    y = d.labels()
    diff = abs(x[y == 1, 0].mean() - x[y == 0, 0].mean())
    stderr = math.sqrt(1.0 / 500 + 1.0 / 500)
    assert diff < 3.0 * stderr


def test_synthetic_config_validation_names_field():
    with pytest.raises(DatasetError, match="benign_count"):
        generate_synthetic(SyntheticConfig(0, (AttackSpec(1, 5, (0,), 1.0),), 2))
    with pytest.raises(DatasetError, match="signature"):
        generate_synthetic(SyntheticConfig(5, (AttackSpec(1, 5, (9,), 1.0),), 2))
    with pytest.raises(DatasetError, match="overlap_group"):
        generate_synthetic(
            SyntheticConfig(
                5,
                (
                    AttackSpec(1, 5, (0,), 1.0, overlap_group=1),
                    AttackSpec(2, 5, (1,), 1.0, overlap_group=1),
                ),
                2,
            )
        )
    with pytest.raises(DatasetError, match="duplicate attack_type"):
        generate_synthetic(
            SyntheticConfig(5, (AttackSpec(1, 5, (0,), 1.0), AttackSpec(1, 5, (0,), 1.0)), 2)
        )


def test_synthetic_config_json_round_trip():
    cfg = SyntheticConfig(
        benign_count=10,
        attacks=(AttackSpec(1, 5, (0, 1), 2.5, overlap_group=3, name="probe"),),
        base_dim=4,
        noise_scale=0.5,
        seed=42,
    )
    assert synthetic_config_from_dict(synthetic_config_to_dict(cfg)) == cfg
    with pytest.raises(DatasetError):
        synthetic_config_from_dict({"benign_count": 10})
