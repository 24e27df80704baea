"""Small feedforward network trained from scratch with numpy.

One hidden ReLU layer; the output head is either a softmax classifier
or a single sigmoid unit.  This is the shared numeric core behind both
intention recognizers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_EPS = 1e-12


class TrainingDivergedError(Exception):
    """Loss became non-finite during training."""


@dataclass
class TrainingConfig:
    lr: float = 0.1
    epochs: int = 200
    seed: int = 0
    batch_size: int = 16


@dataclass
class FfnModel:
    w1: np.ndarray  # (hidden, input)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (output, hidden)
    b2: np.ndarray  # (output,)
    activation: str  # "softmax" | "sigmoid"

    @property
    def input_dim(self) -> int:
        return self.w1.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.w1.shape[0]

    @property
    def output_dim(self) -> int:
        return self.w2.shape[0]

    def __post_init__(self):
        if self.activation not in ("softmax", "sigmoid"):
            raise ValueError(f"unknown output activation {self.activation!r}")
        if self.activation == "sigmoid" and self.w2.shape[0] != 1:
            raise ValueError("sigmoid head requires exactly one output unit")
        if self.w1.shape[0] != self.b1.shape[0] or self.w2.shape[1] != self.w1.shape[0]:
            raise ValueError("layer shapes do not chain")
        if self.w2.shape[0] != self.b2.shape[0]:
            raise ValueError("output bias shape mismatch")
        for p in (self.w1, self.b1, self.w2, self.b2):
            if not np.all(np.isfinite(p)):
                raise ValueError("model parameters must be finite")

    @classmethod
    def initialize(
        cls, input_dim: int, hidden_dim: int, output_dim: int, activation: str, seed: int = 0
    ) -> FfnModel:
        rng = np.random.default_rng(seed)
        w1 = rng.normal(0.0, 1.0 / np.sqrt(input_dim), size=(hidden_dim, input_dim))
        w2 = rng.normal(0.0, 1.0 / np.sqrt(hidden_dim), size=(output_dim, hidden_dim))
        return cls(w1, np.zeros(hidden_dim), w2, np.zeros(output_dim), activation)

    def copy(self) -> FfnModel:
        return FfnModel(
            self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy(), self.activation
        )

    def parameters(self) -> list[np.ndarray]:
        return [self.w1, self.b1, self.w2, self.b2]


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def ffn_forward(model: FfnModel, x: np.ndarray) -> np.ndarray:
    """Forward pass for one input vector or a batch (rows are inputs)."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.shape[1] != model.input_dim:
        raise ValueError(f"input length {batch.shape[1]} != model input {model.input_dim}")
    z1 = batch @ model.w1.T + model.b1
    a1 = np.maximum(z1, 0.0)
    z2 = a1 @ model.w2.T + model.b2
    out = _softmax(z2) if model.activation == "softmax" else _sigmoid(z2)
    return out[0] if single else out


def _loss_and_grads(
    model: FfnModel, x: np.ndarray, targets: np.ndarray
) -> tuple[float, list[np.ndarray]]:
    """Mean loss over a batch plus gradients for every parameter.

    Cross-entropy for the softmax head (targets are class indices),
    binary cross-entropy for the sigmoid head (targets in [0,1]).
    """
    n = x.shape[0]
    z1 = x @ model.w1.T + model.b1
    a1 = np.maximum(z1, 0.0)
    z2 = a1 @ model.w2.T + model.b2

    if model.activation == "softmax":
        probs = _softmax(z2)
        picked = probs[np.arange(n), targets.astype(int)]
        loss = float(-np.mean(np.log(np.clip(picked, _EPS, None))))
        dz2 = probs.copy()
        dz2[np.arange(n), targets.astype(int)] -= 1.0
        dz2 /= n
    else:
        probs = _sigmoid(z2)
        t = targets.reshape(n, 1).astype(np.float64)
        clipped = np.clip(probs, _EPS, 1.0 - _EPS)
        loss = float(-np.mean(t * np.log(clipped) + (1.0 - t) * np.log(1.0 - clipped)))
        dz2 = (probs - t) / n

    dw2 = dz2.T @ a1
    db2 = dz2.sum(axis=0)
    da1 = dz2 @ model.w2
    dz1 = da1 * (z1 > 0)
    dw1 = dz1.T @ x
    db1 = dz1.sum(axis=0)
    return loss, [dw1, db1, dw2, db2]


def batch_loss(model: FfnModel, x: np.ndarray, targets: np.ndarray) -> float:
    return _loss_and_grads(model, x, targets)[0]


def ffn_train(
    model: FfnModel,
    inputs: np.ndarray,
    targets: np.ndarray,
    config: TrainingConfig,
) -> tuple[FfnModel, list[float]]:
    """Minibatch SGD.  Returns a trained copy and one mean loss per epoch.

    Deterministic given the seed; the input model is left untouched.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    targets = np.asarray(targets)
    if inputs.shape[0] == 0:
        raise ValueError("dataset is empty")
    if inputs.shape[0] != targets.shape[0]:
        raise ValueError("inputs and targets disagree in length")

    trained = model.copy()
    rng = np.random.default_rng(config.seed)
    losses: list[float] = []
    n = inputs.shape[0]
    batch = max(1, min(config.batch_size, n))

    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, batch):
            idx = order[start : start + batch]
            loss, grads = _loss_and_grads(trained, inputs[idx], targets[idx])
            if not np.isfinite(loss):
                raise TrainingDivergedError(f"non-finite loss {loss}")
            epoch_losses.append(loss)
            for param, grad in zip(trained.parameters(), grads):
                param -= config.lr * grad
        losses.append(float(np.mean(epoch_losses)))
    return trained, losses


def gradient_check(model: FfnModel, x: np.ndarray, targets: np.ndarray, h: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    targets = np.atleast_1d(np.asarray(targets))
    probe = model.copy()
    _, grads = _loss_and_grads(probe, x, targets)
    worst = 0.0
    for param, grad in zip(probe.parameters(), grads):
        it = np.nditer(param, flags=["multi_index"])
        while not it.finished:
            i = it.multi_index
            orig = param[i]
            param[i] = orig + h
            plus = batch_loss(probe, x, targets)
            param[i] = orig - h
            minus = batch_loss(probe, x, targets)
            param[i] = orig
            numeric = (plus - minus) / (2.0 * h)
            analytic = grad[i]
            denom = max(abs(numeric) + abs(analytic), 1e-8)
            worst = max(worst, abs(numeric - analytic) / denom)
            it.iternext()
    return worst


def save_model(model: FfnModel, path) -> None:
    """Write the versioned text model format.

    Header ``ffn v1 <E_in> <H> <O> <activation>``, then one line per
    parameter row (w1 rows, b1, w2 rows, b2), space-separated decimal
    floats that round-trip exactly.
    """
    lines = [
        f"ffn v1 {model.input_dim} {model.hidden_dim} {model.output_dim} {model.activation}"
    ]
    for row in model.w1:
        lines.append(" ".join(repr(float(v)) for v in row))
    lines.append(" ".join(repr(float(v)) for v in model.b1))
    for row in model.w2:
        lines.append(" ".join(repr(float(v)) for v in row))
    lines.append(" ".join(repr(float(v)) for v in model.b2))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


class ModelFormatError(Exception):
    pass


def load_model(path) -> FfnModel:
    with open(path, encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines:
        raise ModelFormatError(f"{path}: empty model file")
    header = lines[0].split()
    if len(header) != 6 or header[0] != "ffn" or header[1] != "v1":
        raise ModelFormatError(f"{path}: bad header {lines[0]!r}")
    try:
        e_in, hidden, out = int(header[2]), int(header[3]), int(header[4])
    except ValueError:
        raise ModelFormatError(f"{path}: non-integer sizes in header") from None
    activation = header[5]
    expected = hidden + 1 + out + 1
    rows = lines[1:]
    if len(rows) != expected:
        raise ModelFormatError(f"{path}: expected {expected} parameter rows, got {len(rows)}")

    def parse_row(line: str, width: int, where: str) -> np.ndarray:
        values = line.split()
        if len(values) != width:
            raise ModelFormatError(f"{path}: {where} expected {width} values, got {len(values)}")
        try:
            return np.array([float(v) for v in values], dtype=np.float64)
        except ValueError:
            raise ModelFormatError(f"{path}: non-numeric value in {where}") from None

    w1 = np.stack([parse_row(rows[i], e_in, f"w1 row {i}") for i in range(hidden)])
    b1 = parse_row(rows[hidden], hidden, "b1")
    w2 = np.stack(
        [parse_row(rows[hidden + 1 + i], hidden, f"w2 row {i}") for i in range(out)]
    )
    b2 = parse_row(rows[hidden + 1 + out], out, "b2")
    try:
        return FfnModel(w1, b1, w2, b2, activation)
    except ValueError as exc:
        raise ModelFormatError(f"{path}: {exc}") from None
