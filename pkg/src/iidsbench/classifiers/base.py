"""Shared classifier plumbing: specs, preprocessing, score-to-label rule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..dataset import CATEGORICAL, NUMERIC
from ..errors import ConfigError, TrainError

KIND_FOREST = "random_forest"
KIND_SVM = "linear_svm"
KIND_MLP = "mlp"
KINDS = (KIND_FOREST, KIND_SVM, KIND_MLP)

# Conventional defaults, all overridable per spec. The mlp is the windowed
# stand-in for a sequence model, hence its wider default window.
DEFAULT_HYPERPARAMETERS: dict[str, dict] = {
    KIND_FOREST: {"n_trees": 100, "max_depth": 20, "min_leaf": 2, "window": 1},
    KIND_SVM: {"lambda": 1e-4, "epochs": 10, "window": 1},
    KIND_MLP: {
        "hidden": (64, 32),
        "learning_rate": 0.01,
        "batch_size": 128,
        "epochs": 20,
        "window": 5,
    },
}


def _require_positive_int(hyper: dict, key: str) -> None:
    value = hyper[key]
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ConfigError(f"hyperparameter {key} must be a positive integer, got {value!r}")


def _validate_hyperparameters(kind: str, hyper: dict) -> None:
    _require_positive_int(hyper, "window")
    if kind == KIND_FOREST:
        _require_positive_int(hyper, "n_trees")
        _require_positive_int(hyper, "min_leaf")
        if hyper["max_depth"] is not None:
            _require_positive_int(hyper, "max_depth")
    elif kind == KIND_SVM:
        _require_positive_int(hyper, "epochs")
        if not hyper["lambda"] > 0:
            raise ConfigError(f"hyperparameter lambda must be positive, got {hyper['lambda']!r}")
    else:
        _require_positive_int(hyper, "epochs")
        _require_positive_int(hyper, "batch_size")
        if not hyper["learning_rate"] > 0:
            raise ConfigError(
                f"hyperparameter learning_rate must be positive, got {hyper['learning_rate']!r}"
            )
        hidden = hyper["hidden"]
        if not all(isinstance(h, int) and h >= 1 for h in hidden):
            raise ConfigError(f"hyperparameter hidden must hold positive integers, got {hidden!r}")


@dataclass(frozen=True)
class ClassifierSpec:
    """One detector configuration. Hyperparameters are merged over the
    kind's defaults at construction, so a spec always carries the full map.
    """

    kind: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0
    name: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown classifier kind {self.kind!r}")
        merged = dict(DEFAULT_HYPERPARAMETERS[self.kind])
        unknown = set(self.hyperparameters) - set(merged)
        if unknown:
            raise ConfigError(f"unknown hyperparameters for {self.kind}: {sorted(unknown)}")
        merged.update(self.hyperparameters)
        if "hidden" in merged:
            merged["hidden"] = tuple(merged["hidden"])
        _validate_hyperparameters(self.kind, merged)
        object.__setattr__(self, "hyperparameters", merged)
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.name is None:
            object.__setattr__(self, "name", self.kind)


@dataclass(frozen=True, eq=False)
class PreprocessorState:
    """Standardization and windowing parameters, fitted on train rows only.

    Numeric columns standardize to (x - mean)/std; zero-variance columns are
    flagged and pass through unscaled. Categorical columns stay integer codes
    unless one_hot is set, in which case each expands to cardinality+1
    indicator columns; the extra slot absorbs codes past the fitted book
    (the reserved unknown code).
    """

    means: np.ndarray
    stds: np.ndarray
    zero_variance: np.ndarray
    feature_kinds: tuple[str, ...]
    cardinalities: tuple[int, ...]
    one_hot: bool
    window: int

    @property
    def encoded_width(self) -> int:
        width = 0
        for kind, card in zip(self.feature_kinds, self.cardinalities):
            if kind == CATEGORICAL and self.one_hot:
                width += card + 1
            else:
                width += 1
        return width


def fit_preprocessor(
    train_features,
    window: int = 1,
    kinds: tuple[str, ...] | None = None,
    cardinalities: tuple[int, ...] | None = None,
    one_hot: bool = False,
) -> PreprocessorState:
    """Compute per-feature mean/std from the given train rows. kinds and
    cardinalities come from the dataset schema; both default to all-numeric.
    """
    X = np.asarray(train_features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise TrainError("empty train set")
    n_features = X.shape[1]
    if kinds is None:
        kinds = (NUMERIC,) * n_features
    if cardinalities is None:
        cardinalities = (0,) * n_features
    if len(kinds) != n_features or len(cardinalities) != n_features:
        raise ValueError("kinds/cardinalities do not match feature arity")
    if window < 1:
        raise ValueError(f"window must be at least 1, got {window}")
    numeric = np.array([k == NUMERIC for k in kinds])
    means = np.where(numeric, X.mean(axis=0), 0.0)
    stds = np.where(numeric, X.std(axis=0), 1.0)
    zero_variance = numeric & (stds == 0.0)
    return PreprocessorState(
        means=means,
        stds=stds,
        zero_variance=zero_variance,
        feature_kinds=tuple(kinds),
        cardinalities=tuple(cardinalities),
        one_hot=one_hot,
        window=window,
    )


def _encode(p: PreprocessorState, X: np.ndarray) -> np.ndarray:
    columns = []
    for j, kind in enumerate(p.feature_kinds):
        col = X[:, j]
        if kind == NUMERIC:
            if p.zero_variance[j]:
                columns.append(col[:, None])
            else:
                columns.append(((col - p.means[j]) / p.stds[j])[:, None])
        elif p.one_hot:
            card = p.cardinalities[j]
            codes = np.clip(col.astype(np.int64), 0, card)
            block = np.zeros((len(col), card + 1), dtype=np.float64)
            block[np.arange(len(col)), codes] = 1.0
            columns.append(block)
        else:
            columns.append(col[:, None])
    return np.hstack(columns)


def transform(p: PreprocessorState, features) -> np.ndarray:
    """Standardize, encode, and window rows given in capture order. Row i of
    the output concatenates encoded rows i-w+1..i; rows before index 0 are
    zero blocks. Train/test membership of a windowed row follows its last
    (newest) block.
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != len(p.feature_kinds):
        raise ValueError(
            f"feature arity mismatch: expected {len(p.feature_kinds)} columns, "
            f"got {X.shape[1] if X.ndim == 2 else 'non-matrix input'}"
        )
    encoded = _encode(p, X)
    w = p.window
    if w == 1:
        return encoded
    n, width = encoded.shape
    out = np.zeros((n, width * w), dtype=np.float64)
    for block in range(w):
        shift = w - 1 - block  # block holds row i - shift
        target = out[:, block * width : (block + 1) * width]
        if shift == 0:
            target[:] = encoded
        else:
            target[shift:] = encoded[:-shift]
    return out


def preprocessor_to_dict(p: PreprocessorState) -> dict:
    return {
        "means": p.means.tolist(),
        "stds": p.stds.tolist(),
        "zero_variance": p.zero_variance.tolist(),
        "feature_kinds": list(p.feature_kinds),
        "cardinalities": list(p.cardinalities),
        "one_hot": p.one_hot,
        "window": p.window,
    }


def preprocessor_from_dict(data: dict) -> PreprocessorState:
    return PreprocessorState(
        means=np.asarray(data["means"], dtype=np.float64),
        stds=np.asarray(data["stds"], dtype=np.float64),
        zero_variance=np.asarray(data["zero_variance"], dtype=bool),
        feature_kinds=tuple(data["feature_kinds"]),
        cardinalities=tuple(data["cardinalities"]),
        one_hot=bool(data["one_hot"]),
        window=int(data["window"]),
    )


@dataclass(frozen=True)
class Prediction:
    label: str  # "malicious" | "benign"
    score: float


MALICIOUS = "malicious"
BENIGN_LABEL = "benign"


def labels_from_scores(scores: np.ndarray) -> np.ndarray:
    # Ties score exactly 0.5 resolve to malicious.
    return np.asarray(scores) >= 0.5


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def sqrt_feature_count(n_features: int) -> int:
    return max(1, int(math.sqrt(n_features)))
