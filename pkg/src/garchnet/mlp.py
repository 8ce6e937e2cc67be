"""A small dense network: ReLU hidden layers, linear output, Adam on MSD loss.

Each layer's weights are one matrix of shape ``(fan_in + 1, fan_out)``.  Row 0
holds the bias weights (the constant input unit a_0 = 1), rows 1.. the
connection weights, so the net input of layer h is ``[1, a] @ W``.
"""

from __future__ import annotations

import copy
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .dataset import (
    DatasetSplit,
    ScalerParams,
    apply_scaler,
    rows_to_arrays,
    scale_target,
    unscale_target,
)
from .errors import FormatError, LengthMismatch, NoValidationRows, ShapeMismatch
from .params import FeatureSetKind

log = logging.getLogger(__name__)

FORMAT_VERSION = "garchnet-mlp/1"
FULL_HIDDEN = (128, 2048, 2048, 128)
DESK_HIDDEN = (64, 128, 128, 64)


@dataclass(frozen=True)
class MlpArchitecture:
    input_dim: int = 3
    hidden_dims: tuple[int, ...] = DESK_HIDDEN
    output_dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))
        if min(self.dims) < 1:
            raise ValueError(f"all layer sizes must be >= 1, got {self.dims}")

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.input_dim, *self.hidden_dims, self.output_dim)

    def weight_shapes(self) -> list[tuple[int, int]]:
        d = self.dims
        return [(d[h - 1] + 1, d[h]) for h in range(1, len(d))]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    max_epochs: int = 5000
    patience: int = 100
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    batch_size: int | None = None  # None: full batch
    seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if self.max_epochs < 1 or self.patience < 1:
            raise ValueError("max_epochs and patience must be >= 1")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class MlpModel:
    architecture: MlpArchitecture
    weights: list[np.ndarray]
    scaler: ScalerParams | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        shapes = [w.shape for w in self.weights]
        if shapes != self.architecture.weight_shapes():
            raise ShapeMismatch(f"weight shapes {shapes} do not chain as {self.architecture.weight_shapes()}")

    @property
    def kind(self) -> FeatureSetKind | None:
        k = self.metadata.get("kind")
        return FeatureSetKind.parse(k) if k else None

    def predict(self, features) -> np.ndarray:
        """Un-scaled alpha1 predictions for raw (un-scaled) feature rows."""
        x = apply_scaler(self.scaler, np.atleast_2d(features))
        return unscale_target(self.scaler, forward(self, x))


@dataclass
class TrainingTrace:
    train_msd: list[float] = field(default_factory=list)
    validation_msd: list[float] = field(default_factory=list)
    best_epoch: int = 0

    def to_csv(self, path, provenance: dict | None = None) -> None:
        with open(path, "w") as fh:
            if provenance is not None:
                fh.write("# " + json.dumps(provenance, sort_keys=True) + "\n")
            fh.write("epoch,train_msd,validation_msd\n")
            for i, (a, b) in enumerate(zip(self.train_msd, self.validation_msd), start=1):
                fh.write(f"{i},{a:.17g},{b:.17g}\n")


def init_weights(arch: MlpArchitecture, seed: int) -> list[np.ndarray]:
    """He-uniform connection weights (+-sqrt(6 / fan_in)), zero biases."""
    rng = np.random.default_rng(seed)
    out = []
    for rows, cols in arch.weight_shapes():
        fan_in = rows - 1
        lim = np.sqrt(6.0 / fan_in)
        w = np.zeros((rows, cols))
        w[1:] = rng.uniform(-lim, lim, size=(fan_in, cols))
        out.append(w)
    return out


def _forward_all(weights: Sequence[np.ndarray], x: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
    acts = [x]
    pre = []
    a = x
    last = len(weights) - 1
    for h, w in enumerate(weights):
        z = a @ w[1:] + w[0]
        pre.append(z)
        a = z if h == last else np.maximum(z, 0.0)
        acts.append(a)
    return acts, pre


def forward(model: MlpModel, scaled_features) -> np.ndarray | float:
    """Network output for already-scaled inputs.

    A single feature triple returns a float; a 2-D batch returns a 1-D array.
    """
    x = np.asarray(scaled_features, dtype=np.float64)
    single = x.ndim == 1
    x2 = np.atleast_2d(x)
    if x2.shape[1] != model.architecture.input_dim:
        raise ShapeMismatch(f"expected {model.architecture.input_dim} inputs, got {x2.shape[1]}")
    acts, _ = _forward_all(model.weights, x2)
    out = acts[-1][:, 0]
    return float(out[0]) if single else out


def msd_loss(predictions, targets) -> float:
    p = np.asarray(predictions, dtype=np.float64).ravel()
    t = np.asarray(targets, dtype=np.float64).ravel()
    if p.shape != t.shape:
        raise LengthMismatch(f"{p.size} predictions vs {t.size} targets")
    if p.size == 0:
        raise LengthMismatch("empty batch")
    return float(np.mean((t - p) ** 2))


def _backward(weights: Sequence[np.ndarray], x: np.ndarray, y: np.ndarray) -> tuple[float, list[np.ndarray]]:
    acts, pre = _forward_all(weights, x)
    n = x.shape[0]
    resid = acts[-1][:, 0] - y
    loss = float(np.mean(resid**2))
    delta = (2.0 / n) * resid[:, None]
    grads = [None] * len(weights)
    for h in range(len(weights) - 1, -1, -1):
        a_prev = acts[h]
        g = np.empty_like(weights[h])
        g[0] = delta.sum(axis=0)
        g[1:] = a_prev.T @ delta
        grads[h] = g
        if h > 0:
            # ReLU subgradient at 0 is 0
            delta = (delta @ weights[h][1:].T) * (pre[h - 1] > 0.0)
    return loss, grads


def backward(model: MlpModel, scaled_features, scaled_targets) -> list[np.ndarray]:
    """Gradients of the batch MSD with respect to every weight matrix."""
    x = np.atleast_2d(np.asarray(scaled_features, dtype=np.float64))
    y = np.asarray(scaled_targets, dtype=np.float64).ravel()
    if x.shape[0] == 0:
        raise LengthMismatch("empty batch")
    if x.shape[0] != y.shape[0]:
        raise LengthMismatch(f"{x.shape[0]} inputs vs {y.shape[0]} targets")
    if x.shape[1] != model.architecture.input_dim:
        raise ShapeMismatch(f"expected {model.architecture.input_dim} inputs, got {x.shape[1]}")
    return _backward(model.weights, x, y)[1]


class Adam:
    def __init__(self, shapes, lr, beta1, beta2, eps):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, weights: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        c1 = 1.0 - self.b1**self.t
        c2 = 1.0 - self.b2**self.t
        for w, g, m, v in zip(weights, grads, self.m, self.v):
            m *= self.b1
            m += (1.0 - self.b1) * g
            v *= self.b2
            v += (1.0 - self.b2) * (g * g)
            w -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


class EarlyStopping:
    """Track the best validation loss and keep a copy of the best weights."""

    def __init__(self, patience: int):
        self.patience = patience
        self.best_loss = np.inf
        self.best_epoch = 0
        self.best_weights: list[np.ndarray] | None = None
        self.stale = 0

    def update(self, epoch: int, loss: float, weights: Sequence[np.ndarray]) -> bool:
        """Record an epoch; return True when training should stop."""
        if loss < self.best_loss:
            self.best_loss = loss
            self.best_epoch = epoch
            self.best_weights = [w.copy() for w in weights]
            self.stale = 0
        else:
            self.stale += 1
        return self.stale >= self.patience


def train(
    arch: MlpArchitecture,
    config: TrainConfig,
    split: DatasetSplit,
    scaler: ScalerParams,
    *,
    kind: FeatureSetKind | None = None,
    validation_loss: Callable[[MlpModel], float] | None = None,
    progress_every: int = 0,
) -> tuple[MlpModel, TrainingTrace]:
    """Fit the network on ``split.train`` with early stopping on ``split.validate``.

    ``validation_loss`` overrides the per-epoch validation metric (it receives
    the current model); the default is scaled-target MSD on the validation rows.
    """
    if not split.validate and validation_loss is None:
        raise NoValidationRows("validation partition is empty")
    if not split.train:
        raise NoValidationRows("training partition is empty")

    xtr, ytr = rows_to_arrays(split.train)
    xtr, ytr = apply_scaler(scaler, xtr), scale_target(scaler, ytr)
    if split.validate:
        xva, yva = rows_to_arrays(split.validate)
        xva, yva = apply_scaler(scaler, xva), scale_target(scaler, yva)

    weights = init_weights(arch, config.seed)
    meta = {"kind": str(kind) if kind else None, "seed": config.seed, "best_epoch": 0, "train_config": asdict(config)}
    model = MlpModel(arch, weights, scaler, meta)
    if validation_loss is None:

        def validation_loss(m: MlpModel) -> float:
            return msd_loss(forward(m, xva), yva)

    opt = Adam([w.shape for w in weights], config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_eps)
    stopper = EarlyStopping(config.patience)
    trace = TrainingTrace()
    shuffle_rng = np.random.default_rng([config.seed, 1])
    n = xtr.shape[0]

    for epoch in range(1, config.max_epochs + 1):
        if config.batch_size is None or config.batch_size >= n:
            _, grads = _backward(weights, xtr, ytr)
            opt.step(weights, grads)
        else:
            order = shuffle_rng.permutation(n)
            for start in range(0, n, config.batch_size):
                idx = order[start : start + config.batch_size]
                _, grads = _backward(weights, xtr[idx], ytr[idx])
                opt.step(weights, grads)
        train_loss = msd_loss(forward(model, xtr), ytr)
        val_loss = float(validation_loss(model))
        trace.train_msd.append(train_loss)
        trace.validation_msd.append(val_loss)
        if progress_every and epoch % progress_every == 0:
            log.info("epoch %d train %.3e val %.3e best %.3e@%d", epoch, train_loss, val_loss, stopper.best_loss, stopper.best_epoch)
        if not np.isfinite(train_loss):
            log.warning("training diverged at epoch %d", epoch)
            break
        if stopper.update(epoch, val_loss, weights):
            break

    if stopper.best_weights is not None:
        model.weights = stopper.best_weights
    trace.best_epoch = stopper.best_epoch
    model.metadata["best_epoch"] = stopper.best_epoch
    return model, trace


# -- serialization -------------------------------------------------------------


def _float_array(a: np.ndarray) -> str:
    return "[" + ", ".join(format(float(v), ".17g") for v in a.ravel()) + "]"


def model_to_text(model: MlpModel) -> str:
    doc = {
        "version": FORMAT_VERSION,
        "architecture": {
            "input_dim": model.architecture.input_dim,
            "hidden_dims": list(model.architecture.hidden_dims),
            "output_dim": model.architecture.output_dim,
        },
        "scaler": model.scaler.to_dict() if model.scaler else None,
        "metadata": model.metadata,
        "weights": [f"@@W{i}@@" for i in range(len(model.weights))],
    }
    text = json.dumps(doc, indent=1, sort_keys=True)
    for i, w in enumerate(model.weights):
        body = '{"shape": [%d, %d], "data": %s}' % (w.shape[0], w.shape[1], _float_array(w))
        text = text.replace(f'"@@W{i}@@"', body)
    return text + "\n"


def save_model(model: MlpModel, path) -> None:
    Path(path).write_text(model_to_text(model))


def _field(d: dict, key: str, where: str):
    if not isinstance(d, dict) or key not in d:
        raise FormatError("missing field", f"{where}.{key}" if where else key)
    return d[key]


def model_from_text(text: str) -> MlpModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not a valid model document ({exc.msg} at line {exc.lineno})", "$") from exc
    version = _field(doc, "version", "")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported model version {version!r} (expected {FORMAT_VERSION!r})", "version")
    a = _field(doc, "architecture", "")
    try:
        arch = MlpArchitecture(
            int(_field(a, "input_dim", "architecture")),
            tuple(_field(a, "hidden_dims", "architecture")),
            int(_field(a, "output_dim", "architecture")),
        )
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc), "architecture") from exc
    raw_w = _field(doc, "weights", "")
    shapes = arch.weight_shapes()
    if not isinstance(raw_w, list) or len(raw_w) != len(shapes):
        raise FormatError(f"expected {len(shapes)} weight matrices", "weights")
    weights = []
    for i, (entry, shape) in enumerate(zip(raw_w, shapes)):
        where = f"weights[{i}]"
        data = _field(entry, "data", where)
        if list(_field(entry, "shape", where)) != list(shape):
            raise FormatError(f"shape {entry['shape']} does not match architecture {list(shape)}", f"{where}.shape")
        try:
            arr = np.array(data, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise FormatError(str(exc), f"{where}.data") from exc
        if arr.size != shape[0] * shape[1]:
            raise FormatError(f"{arr.size} values for shape {list(shape)}", f"{where}.data")
        weights.append(arr.reshape(shape))
    sc = _field(doc, "scaler", "")
    scaler = ScalerParams.from_dict(sc) if sc is not None else None
    meta = _field(doc, "metadata", "")
    if not isinstance(meta, dict):
        raise FormatError("must be an object", "metadata")
    return MlpModel(arch, weights, scaler, meta)


def load_model(path) -> MlpModel:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read model file ({exc})", str(path)) from exc
    return model_from_text(text)


def clone(model: MlpModel) -> MlpModel:
    return copy.deepcopy(model)
