"""Fully connected feed-forward net: ReLU hidden layers, one sigmoid
output unit, binary cross-entropy loss, plain mini-batch gradient descent.

Weights initialize uniformly in [-r, r] with r = sqrt(6/(fan_in+fan_out));
biases start at zero. With an empty hidden tuple the net degenerates to
logistic regression. The loss is computed on logits via softplus, keeping
it smooth for the finite-difference gradient check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import sigmoid


@dataclass(eq=False)
class MlpParams:
    weights: list[np.ndarray]  # layer l maps (fan_in, fan_out)
    biases: list[np.ndarray]


def init_params(layer_sizes: list[int], rng: np.random.Generator) -> MlpParams:
    weights = []
    biases = []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        r = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-r, r, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out, dtype=np.float64))
    return MlpParams(weights=weights, biases=biases)


def _forward(params: MlpParams, X: np.ndarray):
    """Returns (activations per layer, pre-activations per layer); the last
    pre-activation is the output logit column.
    """
    activations = [X]
    pre = []
    a = X
    last = len(params.weights) - 1
    for l, (W, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ W + b
        pre.append(z)
        a = z if l == last else np.maximum(z, 0.0)
        activations.append(a)
    return activations, pre


def mlp_loss(params: MlpParams, X, y) -> float:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1, 1)
    _, pre = _forward(params, X)
    z = pre[-1]
    # BCE on logits: softplus(z) - y*z
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def mlp_loss_and_grads(params: MlpParams, X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1, 1)
    n = len(X)
    activations, pre = _forward(params, X)
    z_out = pre[-1]
    loss = float(np.mean(np.logaddexp(0.0, z_out) - y * z_out))

    grads_w = [np.empty_like(W) for W in params.weights]
    grads_b = [np.empty_like(b) for b in params.biases]
    delta = (sigmoid(z_out) - y) / n
    for l in range(len(params.weights) - 1, -1, -1):
        grads_w[l] = activations[l].T @ delta
        grads_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ params.weights[l].T) * (pre[l - 1] > 0.0)
    return loss, grads_w, grads_b


def train_mlp(hyperparameters: dict, X_windowed, y, seed: int) -> MlpParams:
    X = np.asarray(X_windowed, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    layer_sizes = [X.shape[1], *hyperparameters["hidden"], 1]
    rng = np.random.default_rng(seed)
    params = init_params(layer_sizes, rng)
    lr = hyperparameters["learning_rate"]
    batch_size = hyperparameters["batch_size"]
    for _ in range(hyperparameters["epochs"]):
        order = rng.permutation(len(X))
        for start in range(0, len(X), batch_size):
            batch = order[start : start + batch_size]
            _, grads_w, grads_b = mlp_loss_and_grads(params, X[batch], y[batch])
            for W, gW in zip(params.weights, grads_w):
                W -= lr * gW
            for b, gb in zip(params.biases, grads_b):
                b -= lr * gb
    return params


def mlp_scores(params: MlpParams, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    _, pre = _forward(params, X)
    return sigmoid(pre[-1][:, 0])


def mlp_to_dict(params: MlpParams) -> dict:
    return {
        "weights": [W.tolist() for W in params.weights],
        "biases": [b.tolist() for b in params.biases],
    }


def mlp_from_dict(data: dict) -> MlpParams:
    return MlpParams(
        weights=[np.asarray(W, dtype=np.float64) for W in data["weights"]],
        biases=[np.asarray(b, dtype=np.float64) for b in data["biases"]],
    )
