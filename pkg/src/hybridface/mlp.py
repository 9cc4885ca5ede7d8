"""One-hidden-layer tanh network trained by online backprop with momentum."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DivergenceError, ParameterError, ShapeError

DIVERGENCE_MSE = 1e6


@dataclass(frozen=True)
class MlpConfig:
    hidden_units: int = 70
    learn_rate: float = 0.1
    momentum: float = 0.5
    max_epochs: int = 1000
    target_mse: float | None = 1e-3  # None or inf: always run max_epochs
    seed: int = 0
    init_scale: float | None = None  # None: 1/sqrt(fan_in) per layer

    def __post_init__(self):
        if self.hidden_units < 1:
            raise ParameterError(f"hidden_units must be >= 1, got {self.hidden_units}")
        if not self.learn_rate > 0:
            raise ParameterError(f"learn_rate must be > 0, got {self.learn_rate}")
        if not 0 <= self.momentum < 1:
            raise ParameterError(f"momentum must lie in [0, 1), got {self.momentum}")
        if self.init_scale is not None and not self.init_scale > 0:
            raise ParameterError(f"init_scale must be > 0, got {self.init_scale}")
        if self.max_epochs < 1:
            raise ParameterError(f"max_epochs must be >= 1, got {self.max_epochs}")


@dataclass(eq=False)
class MlpNetwork:
    w1: np.ndarray  # (inputs, hidden)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden, outputs)
    b2: np.ndarray  # (outputs,)
    learn_rate: float = 0.1
    momentum: float = 0.5

    @property
    def dims(self):
        return self.w1.shape[0], self.w1.shape[1], self.w2.shape[1]

    def params(self):
        return [self.w1, self.b1, self.w2, self.b2]

    def copy(self) -> "MlpNetwork":
        return replace(self, w1=self.w1.copy(), b1=self.b1.copy(),
                       w2=self.w2.copy(), b2=self.b2.copy())


@dataclass
class Gradients:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def as_list(self):
        return [self.w1, self.b1, self.w2, self.b2]


@dataclass(frozen=True, eq=False)
class ScoreVector:
    scores: np.ndarray
    class_ids: tuple

    def __post_init__(self):
        if len(self.scores) != len(self.class_ids):
            raise ShapeError(f"{len(self.scores)} scores for {len(self.class_ids)} classes")


@dataclass
class TrainReport:
    epochs_run: int = 0
    final_mse: float = math.nan
    mse_history: list[float] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["epoch,mse"]
        lines += [f"{i},{m!r}" for i, m in enumerate(self.mse_history, 1)]
        return "\n".join(lines) + "\n"


def encode_targets(class_index: int, n_classes: int) -> np.ndarray:
    if not 0 <= class_index < n_classes:
        raise ValueError(f"class index {class_index} out of range for {n_classes} classes")
    t = -np.ones(n_classes)
    t[class_index] = 1.0
    return t


def init_network(dims, cfg: MlpConfig) -> MlpNetwork:
    """Uniform weights and biases, layer by layer, from `cfg.seed`.

    The default range is +-1/sqrt(fan_in), the usual fully connected layer
    initialization; `cfg.init_scale` overrides it for both layers.
    """
    n_in, n_hidden, n_out = dims
    if min(dims) < 1:
        raise ParameterError(f"network dimensions must be positive, got {dims}")
    rng = np.random.default_rng(cfg.seed)
    layers = []
    for fan_in, fan_out in ((n_in, n_hidden), (n_hidden, n_out)):
        bound = cfg.init_scale if cfg.init_scale is not None else 1.0 / math.sqrt(fan_in)
        layers.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        layers.append(rng.uniform(-bound, bound, size=fan_out))
    return MlpNetwork(*layers, learn_rate=cfg.learn_rate, momentum=cfg.momentum)


def _check_input(net, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != net.w1.shape[0]:
        raise ShapeError(f"input length {x.shape[-1]} does not match network input {net.w1.shape[0]}")
    return x


def forward(net: MlpNetwork, x) -> np.ndarray:
    """Output scores for one input (1-D) or a batch of rows (2-D)."""
    x = _check_input(net, x)
    h = np.tanh(x @ net.w1 + net.b1)
    return np.tanh(h @ net.w2 + net.b2)


def compute_gradients(net: MlpNetwork, x, target) -> Gradients:
    """Gradient of 0.5 * ||scores - target||^2 for a single sample."""
    x = _check_input(net, x)
    target = np.asarray(target, dtype=np.float64)
    if x.ndim != 1 or target.shape != (net.w2.shape[1],):
        raise ShapeError(f"expected one sample and {net.w2.shape[1]} targets")
    h = np.tanh(x @ net.w1 + net.b1)
    y = np.tanh(h @ net.w2 + net.b2)
    delta_out = (y - target) * (1.0 - y * y)
    delta_hidden = (net.w2 @ delta_out) * (1.0 - h * h)
    return Gradients(np.outer(x, delta_hidden), delta_hidden, np.outer(h, delta_out), delta_out)


def mse(net: MlpNetwork, features, targets) -> float:
    out = forward(net, features)
    return float(np.mean((out - targets) ** 2))


def train(net: MlpNetwork, features, labels, cfg: MlpConfig):
    """Online backprop with momentum, one sample at a time in data order.

    Labels are class indices, encoded as +1 for the true class and -1
    elsewhere. Each step applies dw(t) = -lr * grad + momentum * dw(t-1).
    Training stops when the post-epoch MSE (averaged over samples and
    outputs) reaches `cfg.target_mse` or after `cfg.max_epochs` epochs.
    Returns a trained copy of `net` and the TrainReport.
    """
    labels = np.asarray(labels, dtype=int)
    n_out = net.w2.shape[1]
    targets = np.array([encode_targets(k, n_out) for k in labels]).reshape(len(labels), n_out)
    return train_targets(net, features, targets, cfg)


def train_targets(net: MlpNetwork, features, targets, cfg: MlpConfig):
    """`train` with an explicit (samples, outputs) target matrix."""
    features = _check_input(net, np.atleast_2d(features))
    targets = np.asarray(targets, dtype=np.float64)
    if features.shape[0] == 0 or targets.shape != (features.shape[0], net.w2.shape[1]):
        raise ShapeError(f"{features.shape[0]} feature rows for targets of shape {targets.shape}")

    net = net.copy()
    net.learn_rate, net.momentum = cfg.learn_rate, cfg.momentum
    params = net.params()
    velocity = [np.zeros_like(p) for p in params]
    lr, mom = cfg.learn_rate, cfg.momentum
    target_mse = cfg.target_mse
    if target_mse is not None and not math.isfinite(target_mse):
        target_mse = None
    report = TrainReport()

    for epoch in range(1, cfg.max_epochs + 1):
        for x, t in zip(features, targets):
            grads = compute_gradients(net, x, t).as_list()
            for p, v, g in zip(params, velocity, grads):
                v *= mom
                v -= lr * g
                p += v
        err = mse(net, features, targets)
        report.mse_history.append(err)
        report.epochs_run = epoch
        report.final_mse = err
        if not math.isfinite(err) or err > DIVERGENCE_MSE or not all(
            np.all(np.isfinite(p)) for p in params
        ):
            raise DivergenceError(f"training diverged at epoch {epoch} (mse {err})")
        if target_mse is not None and err <= target_mse:
            break
    return net, report


def classify_scores(scores: ScoreVector):
    """Argmax class id and its score; ties go to the lowest index."""
    if len(scores.scores) == 0:
        raise ValueError("cannot classify an empty score vector")
    k = int(np.argmax(scores.scores))
    return scores.class_ids[k], float(scores.scores[k])
