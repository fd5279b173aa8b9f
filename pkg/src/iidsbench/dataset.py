"""Labeled ICS traffic datasets and the two-level attack taxonomy.

A dataset is an ordered sequence of labeled feature rows. Order is capture
order and is load-bearing: windowed classifiers consume rows relative to
it. Each record carries an attack_type id, 0 meaning benign; nonzero ids
resolve through an AttackTaxonomy to a coarser category id.

The module covers four jobs: parsing/writing the CSV exchange format,
validating invariants, summarizing label composition, and generating
synthetic datasets with planted attack signatures for controlled
experiments.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DatasetError, TaxonomyError
from .validation import Violation

NUMERIC = "numeric"
CATEGORICAL = "categorical"
FEATURE_KINDS = (NUMERIC, CATEGORICAL)

DEFAULT_LABEL_COLUMN = "attack_type"
BENIGN = 0

SCHEMA_INFER_NUMERIC = "infer-numeric"
SCHEMA_GAS_PIPELINE = "embedded-gas-pipeline"

MISSING_FLAG_NAME = "missing_any"
UNKNOWN_CATEGORY_TEXT = "__unknown__"

LEVEL_ATTACK = "attack"
LEVEL_CATEGORY = "category"
LEVELS = (LEVEL_ATTACK, LEVEL_CATEGORY)


# ---------------------------------------------------------------------------
# Schema and records


@dataclass(frozen=True)
class FeatureSchema:
    """Column layout of a dataset: ordered feature names, per-feature kind,
    and the label column. Categorical columns carry their code book: the
    category texts in first-occurrence order, so text i encodes as code i.
    Codes at or past the book length are the reserved "unknown" code.
    """

    feature_names: tuple[str, ...]
    feature_kinds: tuple[str, ...]
    label_column: str = DEFAULT_LABEL_COLUMN
    categorical_codes: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.feature_names:
            raise DatasetError("schema has no features")
        if len(self.feature_names) != len(self.feature_kinds):
            raise DatasetError("schema feature names and kinds differ in length")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise DatasetError("schema feature names are not unique")
        if any(not n for n in self.feature_names):
            raise DatasetError("schema contains an empty feature name")
        for kind in self.feature_kinds:
            if kind not in FEATURE_KINDS:
                raise DatasetError(f"unknown feature kind {kind!r}")
        if self.label_column in self.feature_names:
            raise DatasetError(f"label column {self.label_column!r} collides with a feature")
        for name in self.categorical_codes:
            if name not in self.feature_names:
                raise DatasetError(f"code book for unknown feature {name!r}")
            if self.kind_of(name) != CATEGORICAL:
                raise DatasetError(f"code book for non-categorical feature {name!r}")

    @property
    def num_features(self) -> int:
        return len(self.feature_names)

    def kind_of(self, name: str) -> str:
        return self.feature_kinds[self.feature_names.index(name)]

    def cardinalities(self) -> tuple[int, ...]:
        """Code-book size per feature position; 0 for numeric columns."""
        out = []
        for name, kind in zip(self.feature_names, self.feature_kinds):
            if kind == CATEGORICAL:
                out.append(len(self.categorical_codes.get(name, ())))
            else:
                out.append(0)
        return tuple(out)


@dataclass(frozen=True)
class LabeledRecord:
    index: int
    features: tuple[float, ...]
    attack_type: int

    @property
    def is_malicious(self) -> bool:
        return self.attack_type != BENIGN


# ---------------------------------------------------------------------------
# Taxonomy


@dataclass(frozen=True)
class AttackType:
    name: str
    category: int


@dataclass(frozen=True)
class AttackCategory:
    abbreviation: str
    name: str


@dataclass(frozen=True)
class AttackTaxonomy:
    """Two-level map: attack-type id -> AttackType carrying a category id."""

    types: dict[int, AttackType]
    categories: dict[int, AttackCategory]

    def __post_init__(self) -> None:
        if not self.types:
            raise TaxonomyError("taxonomy has no attack types")
        for tid, at in self.types.items():
            if tid <= 0:
                raise TaxonomyError(f"attack type id must be positive, got {tid}")
            if at.category not in self.categories:
                raise TaxonomyError(
                    f"attack type {tid} references missing category {at.category}"
                )
        for cid in self.categories:
            if cid <= 0:
                raise TaxonomyError(f"category id must be positive, got {cid}")

    def category_of(self, attack_type: int) -> int:
        if attack_type == BENIGN:
            return BENIGN
        try:
            return self.types[attack_type].category
        except KeyError:
            raise TaxonomyError(f"unknown attack type id {attack_type}") from None

    def category_type_counts(self) -> dict[int, int]:
        """Number of attack types per category id."""
        counts = {cid: 0 for cid in sorted(self.categories)}
        for at in self.types.values():
            counts[at.category] += 1
        return counts

    def unit_ids(self, level: str) -> list[int]:
        if level == LEVEL_ATTACK:
            return sorted(self.types)
        if level == LEVEL_CATEGORY:
            return sorted(self.categories)
        raise TaxonomyError(f"unknown aggregation level {level!r}")

    def unit_label(self, level: str, unit: int) -> str:
        """Short display label: category abbreviation, or "cat.pos" for an
        attack type (position = 1-based rank of its id within the category).
        """
        if level == LEVEL_CATEGORY:
            return self.categories[unit].abbreviation
        cat = self.category_of(unit)
        members = sorted(t for t, a in self.types.items() if a.category == cat)
        return f"{cat}.{members.index(unit) + 1}"

    def type_id_lookup(self) -> np.ndarray:
        """Dense array mapping attack_type id -> category id (0 -> 0)."""
        out = np.zeros(max(self.types) + 1, dtype=np.int64)
        for tid, at in self.types.items():
            out[tid] = at.category
        return out


# Gas-pipeline categories: (abbreviation, descriptive name, number of attack
# types). Attack-type ids 1..35 are assigned contiguously in this category
# order; see docs/gas_pipeline.md for the mapping rationale.
_GAS_PIPELINE_CATEGORIES = (
    (1, "NMRI", "Naive Malicious Response Injection", 4),
    (2, "CMRI", "Complex Malicious Response Injection", 7),
    (3, "MSCI", "Malicious State Command Injection", 5),
    (4, "MPCI", "Malicious Parameter Command Injection", 12),
    (5, "MFCI", "Malicious Function Code Injection", 3),
    (6, "DoS", "Denial of Service", 1),
    (7, "Recon", "Reconnaissance", 3),
)

TAXONOMY_BUILTIN = "builtin"


def builtin_taxonomy() -> AttackTaxonomy:
    """The bundled gas-pipeline taxonomy: 35 attack types in 7 categories."""
    categories = {}
    types = {}
    next_id = 1
    for cid, abbr, name, count in _GAS_PIPELINE_CATEGORIES:
        categories[cid] = AttackCategory(abbr, name)
        for pos in range(1, count + 1):
            types[next_id] = AttackType(f"{abbr}-{pos}", cid)
            next_id += 1
    return AttackTaxonomy(types, categories)


_TAXONOMY_HEADER = ("kind", "id", "name", "category", "abbreviation")


def load_taxonomy(source: str | Path) -> AttackTaxonomy:
    """Load a taxonomy: the literal string "builtin", or a CSV path whose
    rows carry a kind column distinguishing category and attack rows.
    """
    if source == TAXONOMY_BUILTIN:
        return builtin_taxonomy()
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TaxonomyError(f"cannot read taxonomy file {path}: {exc}") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise TaxonomyError(f"{path}: empty taxonomy file")
    header = tuple(h.strip() for h in rows[0])
    if header != _TAXONOMY_HEADER:
        raise TaxonomyError(
            f"{path}: expected header {','.join(_TAXONOMY_HEADER)}, got {','.join(header)}"
        )
    categories: dict[int, AttackCategory] = {}
    types: dict[int, AttackType] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(_TAXONOMY_HEADER):
            raise TaxonomyError(f"{path}: line {lineno}: expected {len(_TAXONOMY_HEADER)} fields")
        kind, id_text, name, category_text, abbr = (cell.strip() for cell in row)
        try:
            ident = int(id_text)
        except ValueError:
            raise TaxonomyError(f"{path}: line {lineno}: bad id {id_text!r}") from None
        if kind == "category":
            if ident in categories:
                raise TaxonomyError(f"{path}: line {lineno}: duplicate category id {ident}")
            if not abbr:
                raise TaxonomyError(f"{path}: line {lineno}: category {ident} lacks abbreviation")
            categories[ident] = AttackCategory(abbr, name)
        elif kind == "attack":
            if ident in types:
                raise TaxonomyError(f"{path}: line {lineno}: duplicate attack id {ident}")
            try:
                category = int(category_text)
            except ValueError:
                raise TaxonomyError(
                    f"{path}: line {lineno}: bad category ref {category_text!r}"
                ) from None
            types[ident] = AttackType(name, category)
        else:
            raise TaxonomyError(f"{path}: line {lineno}: unknown row kind {kind!r}")
    return AttackTaxonomy(types, categories)  # referential checks live in __post_init__


def taxonomy_to_csv(tax: AttackTaxonomy) -> str:
    lines = [",".join(_TAXONOMY_HEADER)]
    for cid in sorted(tax.categories):
        cat = tax.categories[cid]
        lines.append(f"category,{cid},{cat.name},,{cat.abbreviation}")
    for tid in sorted(tax.types):
        at = tax.types[tid]
        lines.append(f"attack,{tid},{at.name},{at.category},")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Dataset


@dataclass(frozen=True, eq=False)
class Dataset:
    schema: FeatureSchema
    records: tuple[LabeledRecord, ...]
    taxonomy: AttackTaxonomy

    def __len__(self) -> int:
        return len(self.records)

    def feature_matrix(self) -> np.ndarray:
        """Records stacked as a float64 matrix in capture order. Cached."""
        cached = self.__dict__.get("_matrix")
        if cached is None:
            cached = np.array([r.features for r in self.records], dtype=np.float64)
            object.__setattr__(self, "_matrix", cached)
        return cached

    def labels(self) -> np.ndarray:
        cached = self.__dict__.get("_labels")
        if cached is None:
            cached = np.array([r.attack_type for r in self.records], dtype=np.int64)
            object.__setattr__(self, "_labels", cached)
        return cached

    def binary_labels(self) -> np.ndarray:
        return self.labels() != BENIGN

    def category_labels(self) -> np.ndarray:
        lookup = self.taxonomy.type_id_lookup()
        return lookup[self.labels()]


def validate_dataset(d: Dataset) -> list[Violation]:
    """Check every record- and dataset-level invariant; report all findings."""
    findings: list[Violation] = []
    width = d.schema.num_features
    known = d.taxonomy.types
    benign = malicious = 0
    for position, rec in enumerate(d.records):
        if rec.index != position:
            findings.append(
                Violation("index", f"record index {rec.index} at position {position}", position)
            )
        if len(rec.features) != width:
            findings.append(
                Violation(
                    "arity",
                    f"expected {width} features, found {len(rec.features)}",
                    position,
                )
            )
        if rec.attack_type < 0:
            findings.append(
                Violation("label", f"negative attack_type {rec.attack_type}", position)
            )
        elif rec.attack_type == BENIGN:
            benign += 1
        elif rec.attack_type not in known:
            findings.append(
                Violation(
                    "label",
                    f"attack_type {rec.attack_type} absent from taxonomy",
                    position,
                )
            )
        else:
            malicious += 1
    if benign == 0:
        findings.append(Violation("composition", "dataset has no benign records"))
    if malicious == 0:
        findings.append(Violation("composition", "dataset has no malicious records"))
    return findings


@dataclass(frozen=True)
class StatsSummary:
    total: int
    benign_count: int
    malicious_count: int
    malicious_fraction: float
    per_type: dict[int, int]
    per_category: dict[int, int]

    @property
    def attack_type_count(self) -> int:
        return len(self.per_type)

    @property
    def category_count(self) -> int:
        return len(self.per_category)


def dataset_stats(d: Dataset) -> StatsSummary:
    """Label composition: totals plus per-type and per-category record counts
    for the types actually present.
    """
    labels = d.labels()
    malicious_mask = labels != BENIGN
    malicious = int(malicious_mask.sum())
    per_type: dict[int, int] = {}
    per_category: dict[int, int] = {}
    values, counts = np.unique(labels[malicious_mask], return_counts=True)
    for tid, count in zip(values.tolist(), counts.tolist()):
        per_type[tid] = count
        cid = d.taxonomy.category_of(tid)
        per_category[cid] = per_category.get(cid, 0) + count
    return StatsSummary(
        total=len(labels),
        benign_count=len(labels) - malicious,
        malicious_count=malicious,
        malicious_fraction=malicious / len(labels) if len(labels) else 0.0,
        per_type=dict(sorted(per_type.items())),
        per_category=dict(sorted(per_category.items())),
    )


# ---------------------------------------------------------------------------
# CSV exchange format

# Converted gas-pipeline export: feature columns in capture order plus the
# attack_type label column. Kind assignments follow docs/gas_pipeline.md;
# a sidecar schema file overrides them when an export deviates.
_GAS_PIPELINE_COLUMNS = (
    ("command_address", CATEGORICAL),
    ("response_address", CATEGORICAL),
    ("command_memory", NUMERIC),
    ("response_memory", NUMERIC),
    ("command_memory_count", NUMERIC),
    ("response_memory_count", NUMERIC),
    ("comm_read_function", CATEGORICAL),
    ("comm_write_fun", CATEGORICAL),
    ("resp_read_fun", CATEGORICAL),
    ("resp_write_fun", CATEGORICAL),
    ("sub_function", CATEGORICAL),
    ("command_length", NUMERIC),
    ("resp_length", NUMERIC),
    ("gain", NUMERIC),
    ("reset", NUMERIC),
    ("deadband", NUMERIC),
    ("cycle_time", NUMERIC),
    ("rate", NUMERIC),
    ("setpoint", NUMERIC),
    ("control_mode", CATEGORICAL),
    ("control_scheme", CATEGORICAL),
    ("pump", CATEGORICAL),
    ("solenoid", CATEGORICAL),
    ("crc_rate", NUMERIC),
    ("measurement", NUMERIC),
    ("time", NUMERIC),
)


def _schema_request(schema_source: str | Path, header: list[str]) -> tuple[list[str], list[str]]:
    """Resolve (names, kinds) for the requested schema against a CSV header."""
    if schema_source == SCHEMA_INFER_NUMERIC:
        names = [h for h in header if h != DEFAULT_LABEL_COLUMN]
        return names, [NUMERIC] * len(names)
    if schema_source == SCHEMA_GAS_PIPELINE:
        return [n for n, _ in _GAS_PIPELINE_COLUMNS], [k for _, k in _GAS_PIPELINE_COLUMNS]
    path = Path(schema_source)
    try:
        spec = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DatasetError(f"cannot read schema file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DatasetError(f"schema file {path} is not valid JSON: {exc}") from exc
    try:
        features = spec["features"]
        names = [f["name"] for f in features]
        kinds = [f["kind"] for f in features]
    except (KeyError, TypeError) as exc:
        raise DatasetError(f"schema file {path} missing feature entries: {exc}") from exc
    return names, kinds


def parse_dataset(
    path: str | Path,
    schema_source: str | Path = SCHEMA_INFER_NUMERIC,
    taxonomy: AttackTaxonomy | None = None,
) -> Dataset:
    """Parse a dataset CSV: header row naming columns, one record per row,
    attack_type label column holding integer ids (0 = benign).

    schema_source picks the column interpretation: "infer-numeric" (every
    non-label column is numeric), "embedded-gas-pipeline", or the path of a
    sidecar schema JSON. Missing numeric cells are imputed with the column
    median computed over this file, and a missing_any flag feature is
    appended when any cell was missing. Categorical text encodes to integer
    codes in first-occurrence order; the code book lands in the schema.
    """
    if taxonomy is None:
        taxonomy = builtin_taxonomy()
    path = Path(path)
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DatasetError(f"cannot read dataset {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        names, kinds = _schema_request(schema_source, header)
        if DEFAULT_LABEL_COLUMN not in header:
            raise DatasetError(f"{path}: missing label column {DEFAULT_LABEL_COLUMN!r}")
        positions = []
        for name in names:
            if name not in header:
                raise DatasetError(f"{path}: schema column {name!r} absent from header")
            positions.append(header.index(name))
        label_pos = header.index(DEFAULT_LABEL_COLUMN)

        code_books: dict[str, list[str]] = {
            n: [] for n, k in zip(names, kinds) if k == CATEGORICAL
        }
        rows: list[list[float]] = []
        labels: list[int] = []
        missing: list[tuple[int, int]] = []  # (row position, feature position)
        for row in reader:
            line = reader.line_num
            if len(row) != len(header):
                raise DatasetError(
                    f"{path}: line {line}: expected {len(header)} fields, found {len(row)}"
                )
            values: list[float] = []
            for fpos, (name, kind, col) in enumerate(zip(names, kinds, positions)):
                text = row[col].strip()
                if kind == NUMERIC:
                    if not text:
                        missing.append((len(rows), fpos))
                        values.append(np.nan)
                        continue
                    try:
                        values.append(float(text))
                    except ValueError:
                        raise DatasetError(
                            f"{path}: line {line}: column {name!r}: "
                            f"unparseable numeric value {text!r}"
                        ) from None
                else:
                    book = code_books[name]
                    try:
                        values.append(float(book.index(text)))
                    except ValueError:
                        book.append(text)
                        values.append(float(len(book) - 1))
            label_text = row[label_pos].strip()
            try:
                label = int(label_text)
            except ValueError:
                raise DatasetError(
                    f"{path}: line {line}: unparseable attack_type {label_text!r}"
                ) from None
            if label < 0:
                raise DatasetError(f"{path}: line {line}: negative attack_type {label}")
            if label != BENIGN and label not in taxonomy.types:
                raise DatasetError(f"{path}: line {line}: unknown attack_type id {label}")
            rows.append(values)
            labels.append(label)

    if not rows:
        raise DatasetError(f"{path}: no data rows")

    if missing:
        matrix = np.asarray(rows, dtype=np.float64)
        for fpos in sorted({f for _, f in missing}):
            column = matrix[:, fpos]
            observed = column[~np.isnan(column)]
            median = float(np.median(observed)) if observed.size else 0.0
            column[np.isnan(column)] = median
        flag_name = MISSING_FLAG_NAME
        while flag_name in names:
            flag_name += "_"
        flagged = {r for r, _ in missing}
        names = names + [flag_name]
        kinds = kinds + [NUMERIC]
        rows = [
            list(matrix[i]) + [1.0 if i in flagged else 0.0] for i in range(len(rows))
        ]

    schema = FeatureSchema(
        feature_names=tuple(names),
        feature_kinds=tuple(kinds),
        label_column=DEFAULT_LABEL_COLUMN,
        categorical_codes={n: tuple(book) for n, book in code_books.items()},
    )
    records = tuple(
        LabeledRecord(i, tuple(float(v) for v in row), label)
        for i, (row, label) in enumerate(zip(rows, labels))
    )
    return Dataset(schema=schema, records=records, taxonomy=taxonomy)


def _format_numeric(value: float) -> str:
    return "%.9g" % value


def dataset_to_csv(d: Dataset) -> str:
    """Render the CSV exchange text: numeric cells at 9 significant digits,
    categorical cells as their code-book text, LF line endings.
    """
    schema = d.schema
    out = [",".join([*schema.feature_names, schema.label_column])]
    books = [
        schema.categorical_codes.get(name, ()) if kind == CATEGORICAL else None
        for name, kind in zip(schema.feature_names, schema.feature_kinds)
    ]
    for rec in d.records:
        cells = []
        for value, book in zip(rec.features, books):
            if book is None:
                cells.append(_format_numeric(value))
            else:
                code = int(value)
                cells.append(book[code] if 0 <= code < len(book) else UNKNOWN_CATEGORY_TEXT)
        cells.append(str(rec.attack_type))
        out.append(",".join(cells))
    return "\n".join(out) + "\n"


def write_dataset(d: Dataset, path: str | Path) -> None:
    from .fileio import atomic_write_text

    atomic_write_text(path, dataset_to_csv(d))


# ---------------------------------------------------------------------------
# Synthetic datasets


@dataclass(frozen=True)
class AttackSpec:
    """One planted attack population: `count` draws from the benign noise
    distribution with `offset` added on the signature feature positions.
    Specs sharing an overlap_group must use identical signature features,
    making their populations mutually detectable by construction.
    """

    attack_type: int
    count: int
    signature_features: tuple[int, ...]
    offset: float
    overlap_group: int | None = None
    name: str | None = None


@dataclass(frozen=True)
class SyntheticConfig:
    benign_count: int
    attacks: tuple[AttackSpec, ...]
    base_dim: int
    noise_scale: float = 1.0
    seed: int = 0


def validate_synthetic_config(cfg: SyntheticConfig) -> None:
    if cfg.benign_count < 1:
        raise DatasetError(f"benign_count must be positive, got {cfg.benign_count}")
    if cfg.base_dim < 1:
        raise DatasetError(f"base_dim must be positive, got {cfg.base_dim}")
    if not cfg.noise_scale > 0:
        raise DatasetError(f"noise_scale must be positive, got {cfg.noise_scale}")
    if not cfg.attacks:
        raise DatasetError("attacks must list at least one attack population")
    seen_ids = set()
    group_signatures: dict[int, tuple[int, ...]] = {}
    for spec in cfg.attacks:
        if spec.attack_type < 1:
            raise DatasetError(f"attack_type must be positive, got {spec.attack_type}")
        if spec.attack_type in seen_ids:
            raise DatasetError(f"duplicate attack_type {spec.attack_type}")
        seen_ids.add(spec.attack_type)
        if spec.count < 1:
            raise DatasetError(f"attack {spec.attack_type}: count must be positive")
        if not spec.signature_features:
            raise DatasetError(f"attack {spec.attack_type}: signature_features is empty")
        signature = tuple(sorted(spec.signature_features))
        if len(set(signature)) != len(signature):
            raise DatasetError(f"attack {spec.attack_type}: duplicate signature feature")
        if signature[0] < 0 or signature[-1] >= cfg.base_dim:
            raise DatasetError(
                f"attack {spec.attack_type}: signature feature out of range 0..{cfg.base_dim - 1}"
            )
        if spec.overlap_group is not None:
            previous = group_signatures.setdefault(spec.overlap_group, signature)
            if previous != signature:
                raise DatasetError(
                    f"attack {spec.attack_type}: overlap_group {spec.overlap_group} "
                    "members must share identical signature features"
                )


def _synthetic_taxonomy(cfg: SyntheticConfig) -> AttackTaxonomy:
    # Each synthetic attack type doubles as its own category, so attack- and
    # category-level runs coincide on synthetic data.
    types = {}
    categories = {}
    for spec in sorted(cfg.attacks, key=lambda s: s.attack_type):
        name = spec.name or f"synthetic-{spec.attack_type}"
        types[spec.attack_type] = AttackType(name, spec.attack_type)
        categories[spec.attack_type] = AttackCategory(f"A{spec.attack_type}", name)
    return AttackTaxonomy(types, categories)


def generate_synthetic(cfg: SyntheticConfig) -> Dataset:
    """Generate a labeled dataset: benign rows are Gaussian noise around 0;
    each attack row is a fresh benign draw plus its signature offset. The
    assembled records are shuffled into a seed-determined interleaved order.
    Pure function of cfg: equal configs produce identical datasets.
    """
    validate_synthetic_config(cfg)
    rng = np.random.default_rng(cfg.seed)
    blocks = [rng.normal(0.0, cfg.noise_scale, (cfg.benign_count, cfg.base_dim))]
    labels = [np.zeros(cfg.benign_count, dtype=np.int64)]
    for spec in cfg.attacks:
        block = rng.normal(0.0, cfg.noise_scale, (spec.count, cfg.base_dim))
        block[:, list(spec.signature_features)] += spec.offset
        blocks.append(block)
        labels.append(np.full(spec.count, spec.attack_type, dtype=np.int64))
    matrix = np.vstack(blocks)
    label_vec = np.concatenate(labels)
    order = rng.permutation(len(label_vec))
    matrix = matrix[order]
    label_vec = label_vec[order]

    schema = FeatureSchema(
        feature_names=tuple(f"f{j}" for j in range(cfg.base_dim)),
        feature_kinds=(NUMERIC,) * cfg.base_dim,
    )
    records = tuple(
        LabeledRecord(i, tuple(float(v) for v in matrix[i]), int(label_vec[i]))
        for i in range(len(label_vec))
    )
    return Dataset(schema=schema, records=records, taxonomy=_synthetic_taxonomy(cfg))


def synthetic_config_to_dict(cfg: SyntheticConfig) -> dict:
    return {
        "benign_count": cfg.benign_count,
        "base_dim": cfg.base_dim,
        "noise_scale": cfg.noise_scale,
        "seed": cfg.seed,
        "attacks": [
            {
                "attack_type": s.attack_type,
                "count": s.count,
                "signature_features": list(s.signature_features),
                "offset": s.offset,
                "overlap_group": s.overlap_group,
                "name": s.name,
            }
            for s in cfg.attacks
        ],
    }


def synthetic_config_from_dict(data: dict) -> SyntheticConfig:
    try:
        attacks = tuple(
            AttackSpec(
                attack_type=int(a["attack_type"]),
                count=int(a["count"]),
                signature_features=tuple(int(i) for i in a["signature_features"]),
                offset=float(a["offset"]),
                overlap_group=(None if a.get("overlap_group") is None else int(a["overlap_group"])),
                name=a.get("name"),
            )
            for a in data["attacks"]
        )
        cfg = SyntheticConfig(
            benign_count=int(data["benign_count"]),
            attacks=attacks,
            base_dim=int(data["base_dim"]),
            noise_scale=float(data.get("noise_scale", 1.0)),
            seed=int(data.get("seed", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetError(f"malformed synthetic config: {exc}") from exc
    validate_synthetic_config(cfg)
    return cfg
