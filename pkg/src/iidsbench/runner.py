"""Experiment runner: schedules (classifier, scenario, fold) cells, trains
and scores each one, persists every cell to its own JSON file, and folds the
results into run.json.

Reruns are reproducible to the byte (timing aside): each cell gets its own
seed derived by hashing the experiment seed with the cell identity, so
results do not depend on worker count or execution order. A rerun over an
existing output directory recomputes only the missing cells.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from multiprocessing import get_context
from pathlib import Path

from .classifiers import ClassifierSpec, TrainedModel, predict_dataset, train
from .dataset import (
    LEVEL_ATTACK,
    LEVEL_CATEGORY,
    SCHEMA_INFER_NUMERIC,
    TAXONOMY_BUILTIN,
    Dataset,
    SyntheticConfig,
    generate_synthetic,
    load_taxonomy,
    parse_dataset,
    synthetic_config_from_dict,
    synthetic_config_to_dict,
)
from .errors import ConfigError, RunError
from .fileio import atomic_write_text, dump_json, read_json
from .metrics import AggregatedRow, GroupRecallRow, aggregate_folds, per_group_recall
from .report import MetricsMatrix, build_matrix
from .splitting import (
    MODE_BASELINE,
    MODE_OMIT,
    MODE_ONLY,
    STRATEGY_CONTIGUOUS,
    STRATEGY_STRATIFIED,
    FoldPlan,
    ScenarioSpec,
    SplitInstance,
    enumerate_scenarios,
    materialize_split,
    partition_folds,
)

FORMAT_VERSION = "1"
RUN_FILE = "run.json"
CONFIG_FILE = "config.json"
MARKER_FILE = "INCOMPLETE"
CELLS_DIR = "cells"

_MODE_ORDER = (MODE_BASELINE, MODE_OMIT, MODE_ONLY)
_LEVEL_ORDER = (LEVEL_ATTACK, LEVEL_CATEGORY)


@dataclass(frozen=True)
class ExperimentConfig:
    classifiers: tuple[ClassifierSpec, ...]
    dataset_path: str | None = None
    schema_source: str = SCHEMA_INFER_NUMERIC
    taxonomy_source: str = TAXONOMY_BUILTIN
    synthetic: SyntheticConfig | None = None
    k: int = 5
    strategy: str = STRATEGY_STRATIFIED
    seed: int = 0
    levels: tuple[str, ...] = (LEVEL_ATTACK,)
    modes: tuple[str, ...] = _MODE_ORDER
    output_dir: str | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.classifiers:
            raise ConfigError("need at least one classifier")
        names = [spec.name for spec in self.classifiers]
        if len(set(names)) != len(names):
            raise ConfigError(f"classifier names must be unique, got {names}")
        if (self.dataset_path is None) == (self.synthetic is None):
            raise ConfigError("exactly one of dataset_path and synthetic must be set")
        if self.k < 2:
            raise ConfigError(f"k must be at least 2, got {self.k}")
        if self.strategy not in (STRATEGY_STRATIFIED, STRATEGY_CONTIGUOUS):
            raise ConfigError(f"unknown fold strategy {self.strategy!r}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        bad_levels = [lvl for lvl in self.levels if lvl not in _LEVEL_ORDER]
        if bad_levels or not self.levels:
            raise ConfigError(f"bad aggregation levels {list(self.levels)}")
        bad_modes = [mode for mode in self.modes if mode not in _MODE_ORDER]
        if bad_modes or not self.modes:
            raise ConfigError(f"bad scenario modes {list(self.modes)}")
        # canonical order, duplicates dropped, so equal configs hash equal
        object.__setattr__(
            self, "levels", tuple(lvl for lvl in _LEVEL_ORDER if lvl in self.levels)
        )
        object.__setattr__(
            self, "modes", tuple(mode for mode in _MODE_ORDER if mode in self.modes)
        )


def _classifier_to_dict(spec: ClassifierSpec) -> dict:
    params = dict(spec.hyperparameters)
    if "hidden" in params:
        params["hidden"] = list(params["hidden"])
    return {"name": spec.name, "kind": spec.kind, "seed": spec.seed, "hyperparameters": params}


def _classifier_from_dict(data: dict) -> ClassifierSpec:
    try:
        return ClassifierSpec(
            kind=data["kind"],
            hyperparameters=data.get("hyperparameters", {}),
            seed=data.get("seed", 0),
            name=data.get("name"),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed classifier entry: {exc}") from exc


def config_identity(cfg: ExperimentConfig) -> dict:
    """Everything that determines the numbers. Excludes output_dir and
    workers, which only say where and how fast.
    """
    if cfg.synthetic is not None:
        source: dict = {"synthetic": synthetic_config_to_dict(cfg.synthetic)}
    else:
        source = {
            "path": cfg.dataset_path,
            "schema": cfg.schema_source,
            "taxonomy": cfg.taxonomy_source,
        }
    return {
        "dataset": source,
        "k": cfg.k,
        "strategy": cfg.strategy,
        "seed": cfg.seed,
        "levels": list(cfg.levels),
        "modes": list(cfg.modes),
        "classifiers": [_classifier_to_dict(spec) for spec in cfg.classifiers],
    }


def config_to_dict(cfg: ExperimentConfig) -> dict:
    data = config_identity(cfg)
    data["output_dir"] = cfg.output_dir
    data["workers"] = cfg.workers
    return data


def config_from_dict(data: dict) -> ExperimentConfig:
    try:
        source = data["dataset"]
        if "synthetic" in source:
            dataset_path = None
            synthetic = synthetic_config_from_dict(source["synthetic"])
            schema = SCHEMA_INFER_NUMERIC
            taxonomy = TAXONOMY_BUILTIN
        else:
            dataset_path = source["path"]
            synthetic = None
            schema = source.get("schema", SCHEMA_INFER_NUMERIC)
            taxonomy = source.get("taxonomy", TAXONOMY_BUILTIN)
        return ExperimentConfig(
            classifiers=tuple(_classifier_from_dict(c) for c in data["classifiers"]),
            dataset_path=dataset_path,
            schema_source=schema,
            taxonomy_source=taxonomy,
            synthetic=synthetic,
            k=data.get("k", 5),
            strategy=data.get("strategy", STRATEGY_STRATIFIED),
            seed=data.get("seed", 0),
            levels=tuple(data.get("levels", [LEVEL_ATTACK])),
            modes=tuple(data.get("modes", list(_MODE_ORDER))),
            output_dir=data.get("output_dir"),
            workers=data.get("workers", 1),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed experiment config: {exc}") from exc


def config_fingerprint(cfg: ExperimentConfig) -> str:
    canonical = json.dumps(config_identity(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def cell_seed(config_seed: int, classifier_name: str, scenario: ScenarioSpec, fold: int) -> int:
    key = f"{config_seed}|{classifier_name}|{scenario.key()}|{fold}"
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def load_experiment_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.synthetic is not None:
        return generate_synthetic(cfg.synthetic)
    taxonomy = None
    if cfg.taxonomy_source != TAXONOMY_BUILTIN:
        taxonomy = load_taxonomy(cfg.taxonomy_source)
    return parse_dataset(cfg.dataset_path, schema_source=cfg.schema_source, taxonomy=taxonomy)


@dataclass(frozen=True)
class CellKey:
    classifier: ClassifierSpec
    scenario: ScenarioSpec
    fold: int

    def path(self) -> str:
        return f"{CELLS_DIR}/{self.classifier.name}/{self.scenario.key()}/{self.fold}.json"

    def ident(self) -> str:
        return f"{self.classifier.name}/{self.scenario.key()}/fold {self.fold}"


def plan_cells(cfg: ExperimentConfig, dataset: Dataset) -> list[CellKey]:
    cells = []
    for spec in cfg.classifiers:
        for level in cfg.levels:
            for scenario in enumerate_scenarios(dataset.taxonomy, level, cfg.modes):
                for fold in range(cfg.k):
                    cells.append(CellKey(spec, scenario, fold))
    return cells


@dataclass(frozen=True)
class CellResult:
    classifier: str
    row: GroupRecallRow
    wall_time: float


@dataclass(frozen=True)
class AggregateResult:
    classifier: str
    row: AggregatedRow


@dataclass(frozen=True, eq=False)
class RunArtifact:
    config: dict
    config_hash: str
    rows: tuple[CellResult, ...]
    aggregates: tuple[AggregateResult, ...]
    matrices: tuple[MetricsMatrix, ...]
    timing: dict = field(default_factory=dict)

    def matrix(self, classifier: str, mode: str, level: str) -> MetricsMatrix:
        for m in self.matrices:
            if m.classifier == classifier and m.mode == mode and m.level == level:
                return m
        raise RunError(f"no matrix for classifier {classifier!r} mode {mode!r} level {level!r}")

    def classifier_names(self) -> tuple[str, ...]:
        return tuple(sorted({m.classifier for m in self.matrices}))


def _compute_cell(dataset: Dataset, plan: FoldPlan, key: CellKey, seed: int) -> CellResult:
    start = time.perf_counter()
    split = materialize_split(dataset, plan, key.fold, key.scenario)
    spec = replace(key.classifier, seed=seed)
    model: TrainedModel = train(spec, split, dataset)
    flags, _ = predict_dataset(model, dataset, split.test_indices)
    test_records = [dataset.records[i] for i in split.test_indices.tolist()]
    fragment = per_group_recall(flags, test_records, dataset.taxonomy, key.scenario.level)
    row = fragment.with_context(key.scenario, key.fold)
    return CellResult(key.classifier.name, row, time.perf_counter() - start)


_POOL_STATE: dict = {}


def _pool_init(dataset: Dataset, plan: FoldPlan) -> None:
    _POOL_STATE["dataset"] = dataset
    _POOL_STATE["plan"] = plan


def _pool_task(args: tuple[CellKey, int]) -> CellResult:
    key, seed = args
    return _compute_cell(_POOL_STATE["dataset"], _POOL_STATE["plan"], key, seed)


def _row_to_dict(result: CellResult) -> dict:
    row = result.row
    return {
        "classifier": result.classifier,
        "scenario": row.scenario.to_dict(),
        "fold": row.fold,
        "values": {str(g): v for g, v in row.values.items()},
        "precision": row.precision,
        "recall": row.recall,
        "f1": row.f1,
    }


def _row_from_dict(data: dict) -> CellResult:
    row = GroupRecallRow(
        scenario=ScenarioSpec.from_dict(data["scenario"]),
        fold=data["fold"],
        level=data["scenario"]["level"],
        values={int(g): v for g, v in data["values"].items()},
        precision=data["precision"],
        recall=data["recall"],
        f1=data["f1"],
    )
    return CellResult(data["classifier"], row, data.get("wall_time", 0.0))


def _cell_file_dict(result: CellResult, config_hash: str) -> dict:
    data = _row_to_dict(result)
    return {
        "format_version": FORMAT_VERSION,
        "config_hash": config_hash,
        **data,
        "wall_time": result.wall_time,
    }


def _aggregate_to_dict(item: AggregateResult) -> dict:
    row = item.row
    return {
        "classifier": item.classifier,
        "scenario": row.scenario.to_dict(),
        "values": {str(g): v for g, v in row.group_means.items()},
        "defined_folds": {str(g): n for g, n in row.defined_folds.items()},
        "precision": row.precision,
        "precision_folds": row.precision_folds,
        "n_folds": row.n_folds,
    }


def _aggregate_from_dict(data: dict) -> AggregateResult:
    scenario = ScenarioSpec.from_dict(data["scenario"])
    row = AggregatedRow(
        scenario=scenario,
        level=scenario.level,
        group_means={int(g): v for g, v in data["values"].items()},
        defined_folds={int(g): n for g, n in data["defined_folds"].items()},
        precision=data["precision"],
        precision_folds=data["precision_folds"],
        n_folds=data["n_folds"],
    )
    return AggregateResult(data["classifier"], row)


def _sort_key(result: CellResult) -> tuple:
    return (result.classifier, result.row.scenario.key(), result.row.fold)


def _assemble(
    cfg: ExperimentConfig, dataset: Dataset, results: list[CellResult]
) -> tuple[tuple[AggregateResult, ...], tuple[MetricsMatrix, ...]]:
    by_scenario: dict[tuple[str, str], list[GroupRecallRow]] = {}
    for result in results:
        by_scenario.setdefault((result.classifier, result.row.scenario.key()), []).append(
            result.row
        )
    aggregates = tuple(
        AggregateResult(name, aggregate_folds(sorted(rows, key=lambda r: r.fold)))
        for (name, _), rows in sorted(by_scenario.items())
    )
    lookup = {(item.classifier, item.row.scenario.key()): item.row for item in aggregates}
    matrices = []
    for spec in cfg.classifiers:
        for level in cfg.levels:
            baseline = lookup.get((spec.name, ScenarioSpec(MODE_BASELINE, level).key()))
            for mode in cfg.modes:
                if mode == MODE_BASELINE:
                    if baseline is None:
                        continue
                    unit_rows: dict[int, AggregatedRow] = {}
                else:
                    unit_rows = {
                        unit: lookup[(spec.name, ScenarioSpec(mode, level, unit).key())]
                        for unit in dataset.taxonomy.unit_ids(level)
                    }
                matrices.append(
                    build_matrix(spec.name, mode, level, baseline, unit_rows, dataset.taxonomy)
                )
    matrices.sort(key=lambda m: (m.classifier, m.level, m.mode))
    return aggregates, tuple(matrices)


def artifact_to_dict(artifact: RunArtifact, timing: bool = True) -> dict:
    data = {
        "format_version": FORMAT_VERSION,
        "config": artifact.config,
        "config_hash": artifact.config_hash,
        "rows": [_row_to_dict(result) for result in artifact.rows],
        "aggregates": [_aggregate_to_dict(item) for item in artifact.aggregates],
        "matrices": [m.to_dict() for m in artifact.matrices],
    }
    if timing:
        data["timing"] = artifact.timing
    return data


def artifact_from_dict(data: dict) -> RunArtifact:
    if data.get("format_version") != FORMAT_VERSION:
        raise RunError(f"unsupported run file format {data.get('format_version')!r}")
    return RunArtifact(
        config=data["config"],
        config_hash=data["config_hash"],
        rows=tuple(_row_from_dict(row) for row in data["rows"]),
        aggregates=tuple(_aggregate_from_dict(item) for item in data["aggregates"]),
        matrices=tuple(MetricsMatrix.from_dict(m) for m in data["matrices"]),
        timing=data.get("timing", {}),
    )


def load_artifact(output_dir: str | Path) -> RunArtifact:
    path = Path(output_dir) / RUN_FILE
    if not path.exists():
        raise RunError(f"no {RUN_FILE} under {output_dir}")
    return artifact_from_dict(read_json(path))


def _read_existing_cell(path: Path, fingerprint: str, ident: str) -> CellResult:
    try:
        data = read_json(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise RunError(f"unreadable cell file for {ident}: {exc}") from exc
    if data.get("format_version") != FORMAT_VERSION:
        raise RunError(f"cell {ident} has unsupported format {data.get('format_version')!r}")
    if data.get("config_hash") != fingerprint:
        raise RunError(
            f"cell {ident} was produced by a different config "
            f"(stored {data.get('config_hash')!r}, expected {fingerprint!r})"
        )
    return _row_from_dict(data)


def _execute(cfg: ExperimentConfig, output_dir: Path) -> RunArtifact:
    fingerprint = config_fingerprint(cfg)
    output_dir.mkdir(parents=True, exist_ok=True)

    config_path = output_dir / CONFIG_FILE
    if config_path.exists():
        stored = config_from_dict(read_json(config_path))
        if config_fingerprint(stored) != fingerprint:
            raise RunError(
                f"output directory {output_dir} holds a different experiment; "
                "use a fresh directory or restore the original config"
            )
    atomic_write_text(config_path, dump_json(config_to_dict(cfg)))
    atomic_write_text(output_dir / MARKER_FILE, "run in progress or aborted\n")

    total_start = time.perf_counter()
    dataset = load_experiment_dataset(cfg)
    plan = partition_folds(dataset, cfg.k, cfg.strategy, cfg.seed)
    cells = plan_cells(cfg, dataset)

    results: dict[str, CellResult] = {}
    pending: list[tuple[CellKey, int]] = []
    for key in cells:
        path = output_dir / key.path()
        if path.exists():
            results[key.path()] = _read_existing_cell(path, fingerprint, key.ident())
        else:
            pending.append((key, cell_seed(cfg.seed, key.classifier.name, key.scenario, key.fold)))

    reused = len(results)

    def finish(key: CellKey, result: CellResult) -> None:
        path = output_dir / key.path()
        path.parent.mkdir(parents=True, exist_ok=True)
        atomic_write_text(path, dump_json(_cell_file_dict(result, fingerprint)))
        results[key.path()] = result

    if cfg.workers == 1 or len(pending) <= 1:
        for key, seed in pending:
            try:
                finish(key, _compute_cell(dataset, plan, key, seed))
            except Exception as exc:
                raise RunError(f"cell {key.ident()} failed: {exc}") from exc
    else:
        # spawn keeps worker state independent of the parent's thread state
        context = get_context("spawn")
        with ProcessPoolExecutor(
            max_workers=min(cfg.workers, len(pending)),
            mp_context=context,
            initializer=_pool_init,
            initargs=(dataset, plan),
        ) as pool:
            futures = [(key, pool.submit(_pool_task, (key, seed))) for key, seed in pending]
            for key, future in futures:
                try:
                    finish(key, future.result())
                except Exception as exc:
                    raise RunError(f"cell {key.ident()} failed: {exc}") from exc

    ordered = sorted(results.values(), key=_sort_key)
    aggregates, matrices = _assemble(cfg, dataset, ordered)
    timing = {
        "total_seconds": time.perf_counter() - total_start,
        "computed_cells": len(pending),
        "reused_cells": reused,
        "cell_seconds": {
            key.path(): results[key.path()].wall_time for key in cells
        },
    }
    artifact = RunArtifact(
        config=config_identity(cfg),
        config_hash=fingerprint,
        rows=tuple(ordered),
        aggregates=aggregates,
        matrices=matrices,
        timing=timing,
    )
    atomic_write_text(output_dir / RUN_FILE, dump_json(artifact_to_dict(artifact)))
    (output_dir / MARKER_FILE).unlink(missing_ok=True)
    return artifact


def run(cfg: ExperimentConfig) -> RunArtifact:
    if cfg.output_dir is None:
        raise ConfigError("experiment has no output directory")
    return _execute(cfg, Path(cfg.output_dir))


def resume(output_dir: str | Path) -> RunArtifact:
    """Recompute whatever cells are missing under an existing output
    directory and rebuild run.json. Complete directories just get
    reassembled from the stored cells.
    """
    output_dir = Path(output_dir)
    config_path = output_dir / CONFIG_FILE
    if not config_path.exists():
        raise RunError(f"no {CONFIG_FILE} under {output_dir}, nothing to resume")
    cfg = config_from_dict(read_json(config_path))
    cfg = replace(cfg, output_dir=str(output_dir))
    return _execute(cfg, output_dir)


def compare_experiments(a: RunArtifact, b: RunArtifact) -> list[dict]:
    """Juxtapose generalization directions: for every unit, the omit-mode
    recall from the first artifact against the only-mode recalls every other
    unit's trainer scored on it in the second.
    """
    if a.classifier_names() != b.classifier_names():
        raise RunError(
            f"classifier sets differ: {list(a.classifier_names())} vs {list(b.classifier_names())}"
        )
    omit_matrices = [m for m in a.matrices if m.mode == MODE_OMIT]
    if not omit_matrices:
        raise RunError("first artifact has no omit-mode matrices")
    table = []
    for omit in omit_matrices:
        try:
            only = b.matrix(omit.classifier, MODE_ONLY, omit.level)
        except RunError as exc:
            raise RunError(
                f"second artifact has no only-mode matrix for {omit.classifier!r} "
                f"at level {omit.level!r}"
            ) from exc
        if omit.col_groups != only.col_groups or omit.col_labels != only.col_labels:
            raise RunError(
                f"taxonomy mismatch for {omit.classifier!r} at level {omit.level!r}"
            )
        units = [u for u in omit.row_units if u is not None]
        for unit in units:
            label = omit.col_labels[omit.col_groups.index(unit)]
            trainers = {}
            for trainer in units:
                if trainer == unit:
                    continue
                trainer_label = only.col_labels[only.col_groups.index(trainer)]
                trainers[trainer_label] = only.cell(trainer, unit)
            table.append(
                {
                    "classifier": omit.classifier,
                    "level": omit.level,
                    "unit": unit,
                    "unit_label": label,
                    "omit_recall": omit.cell(unit, unit),
                    "only_recall_by_trainer": trainers,
                }
            )
    return table


def compare_to_csv(table: list[dict]) -> str:
    import csv as _csv
    import io as _io

    buffer = _io.StringIO()
    writer = _csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["classifier", "level", "unit", "unit_label", "omit_recall", "trainer", "only_recall"]
    )
    for row in table:
        omit = "n/a" if row["omit_recall"] is None else repr(row["omit_recall"])
        for trainer, value in row["only_recall_by_trainer"].items():
            writer.writerow(
                [
                    row["classifier"],
                    row["level"],
                    row["unit"],
                    row["unit_label"],
                    omit,
                    trainer,
                    "n/a" if value is None else repr(value),
                ]
            )
    return buffer.getvalue()
