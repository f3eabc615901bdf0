"""Fully connected regression network in plain numpy, trained with Adam on MSE.

Hidden layers use ReLU, the output layer a sigmoid, so targets must be scaled
into [0, 1]. Everything runs in float64.
"""

import math
import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from .dataset import NormRecord
from .errors import FormatError, TrainingDivergedError

ACTIVATIONS = ("relu", "sigmoid")


def relu(x):
    return np.maximum(x, 0.0)


def sigmoid(x):
    """Logistic function, evaluated without overflow for large ``|x|``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out if out.ndim else float(out)


@dataclass
class MlpModel:
    layer_sizes: tuple
    weights: list  # weights[i] has shape (layer_sizes[i], layer_sizes[i+1])
    biases: list
    activations: tuple

    def __post_init__(self):
        self.layer_sizes = tuple(int(n) for n in self.layer_sizes)
        self.activations = tuple(self.activations)
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.weights):
            raise ValueError("one weight matrix and bias vector per layer transition is required")
        if len(self.activations) != len(self.weights):
            raise ValueError("one activation tag per layer transition is required")
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            shape = (self.layer_sizes[i], self.layer_sizes[i + 1])
            if W.shape != shape or b.shape != (shape[1],):
                raise ValueError(f"layer {i}: expected W{shape} and b({shape[1]},), got {W.shape}, {b.shape}")
        for a in self.activations:
            if a not in ACTIVATIONS:
                raise ValueError(f"unknown activation {a!r}")

    @property
    def n_params(self):
        return sum(W.size + b.size for W, b in zip(self.weights, self.biases))

    def copy(self):
        return MlpModel(
            self.layer_sizes,
            [W.copy() for W in self.weights],
            [b.copy() for b in self.biases],
            self.activations,
        )

    def flat(self):
        return np.concatenate([np.concatenate([W.ravel(), b]) for W, b in zip(self.weights, self.biases)])


def param_count(layer_sizes):
    return sum(a * b + b for a, b in zip(layer_sizes[:-1], layer_sizes[1:]))


def build_network(layer_sizes, seed=0, hidden_init="glorot"):
    """ReLU hidden layers and a sigmoid output layer, uniform random weights, zero biases.

    The output layer always uses Glorot-uniform limits. ``hidden_init``
    selects Glorot or He limits for the ReLU layers. He limits on the
    narrow input layer give pre-activations about ten times wider, which
    saturates the sigmoid on strongly skewed targets.
    """
    sizes = tuple(layer_sizes)
    if len(sizes) < 2 or any(int(n) != n or n < 1 for n in sizes):
        raise ValueError(f"layer sizes must be >= 2 positive integers, got {layer_sizes}")
    if hidden_init not in ("glorot", "he"):
        raise ValueError(f"hidden_init must be 'glorot' or 'he', got {hidden_init!r}")
    rng = np.random.default_rng(seed)
    weights, biases, acts = [], [], []
    for i, (n_in, n_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        last = i == len(sizes) - 2
        if last or hidden_init == "glorot":
            limit = math.sqrt(6.0 / (n_in + n_out))
        else:
            limit = math.sqrt(6.0 / n_in)
        weights.append(rng.uniform(-limit, limit, size=(n_in, n_out)))
        biases.append(np.zeros(n_out))
        acts.append("sigmoid" if last else "relu")
    return MlpModel(sizes, weights, biases, tuple(acts))


def _activate(tag, z):
    return relu(z) if tag == "relu" else sigmoid(z)


def _forward_cache(model, X):
    a = np.asarray(X, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    if a.shape[1] != model.layer_sizes[0]:
        raise ValueError(f"expected {model.layer_sizes[0]} input features, got {a.shape[1]}")
    acts = [a]
    for W, b, tag in zip(model.weights, model.biases, model.activations):
        a = _activate(tag, a @ W + b)
        acts.append(a)
    return acts


def forward(model, X):
    """Network outputs for one sample (1-D) or a batch (2-D)."""
    X = np.asarray(X, dtype=float)
    out = _forward_cache(model, X)[-1]
    if not np.isfinite(out).all():
        raise FloatingPointError("network output is not finite")
    return out[0] if X.ndim == 1 else out


def mse_loss(pred, target):
    pred, target = np.asarray(pred, float), np.asarray(target, float)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {target.shape}")
    return float(np.mean((pred - target) ** 2))


def backward(model, X, Y):
    """Loss and its gradient with respect to every weight and bias.

    Returns ``(loss, grads)`` with ``grads = [(dW0, db0), (dW1, db1), ...]``.
    """
    acts = _forward_cache(model, X)
    Y = np.asarray(Y, dtype=float).reshape(acts[-1].shape)
    diff = acts[-1] - Y
    loss = float(np.mean(diff**2))
    delta = 2.0 * diff / diff.size
    grads = [None] * len(model.weights)
    for i in reversed(range(len(model.weights))):
        a_out = acts[i + 1]
        if model.activations[i] == "sigmoid":
            delta = delta * a_out * (1.0 - a_out)
        else:
            delta = delta * (a_out > 0)
        grads[i] = (acts[i].T @ delta, delta.sum(axis=0))
        if i:
            delta = delta @ model.weights[i].T
    return loss, grads


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 500
    batch_size: int = 32
    seed: int = 0
    patience: int = 50  # epochs without validation improvement; 0 disables early stopping
    loss: str = "mse"

    def __post_init__(self):
        if not (self.lr >= 0 and 0 < self.beta1 < 1 and 0 < self.beta2 < 1 and self.eps > 0):
            raise ValueError("invalid Adam hyperparameters")
        if self.epochs < 1 or self.batch_size < 1 or self.patience < 0:
            raise ValueError("epochs and batch_size must be >= 1, patience >= 0")
        if self.loss != "mse":
            raise ValueError(f"unsupported loss {self.loss!r}")


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0

    @classmethod
    def zeros(cls, model):
        m = [(np.zeros_like(W), np.zeros_like(b)) for W, b in zip(model.weights, model.biases)]
        v = [(np.zeros_like(W), np.zeros_like(b)) for W, b in zip(model.weights, model.biases)]
        return cls(m, v, 0)


def adam_step(model, grads, state, cfg=TrainConfig()):
    """Apply one bias-corrected Adam update in place; returns ``model``."""
    if len(grads) != len(model.weights):
        raise ValueError("gradient list does not match the model")
    state.t += 1
    c1 = 1.0 - cfg.beta1**state.t
    c2 = 1.0 - cfg.beta2**state.t
    params = list(zip(model.weights, model.biases))
    for (p_pair, g_pair, m_pair, v_pair) in zip(params, grads, state.m, state.v):
        for p, g, m, v in zip(p_pair, g_pair, m_pair, v_pair):
            if g.shape != p.shape:
                raise ValueError(f"gradient shape {g.shape} does not match parameter {p.shape}")
            m *= cfg.beta1
            m += (1.0 - cfg.beta1) * g
            v *= cfg.beta2
            v += (1.0 - cfg.beta2) * g * g
            p -= cfg.lr * (m / c1) / (np.sqrt(v / c2) + cfg.eps)
    return model


@dataclass
class TrainHistory:
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    best_epoch: int = 0
    stopped_early: bool = False

    def to_csv(self):
        lines = ["epoch,train_loss,val_loss"]
        lines += [f"{i + 1},{tr!r},{va!r}" for i, (tr, va) in enumerate(zip(self.train_loss, self.val_loss))]
        return "\n".join(lines) + "\n"


def train(model, train_set, val_set, cfg=TrainConfig(), callback=None):
    """Mini-batch Adam training with seeded shuffling.

    ``train_set`` and ``val_set`` are ``(X, Y)`` pairs in scaled space. The
    recorded training loss is the mean of the batch losses in each epoch.
    Training stops after ``cfg.patience`` epochs without a new best
    validation loss; the weights at stop time are kept. ``model`` is updated
    in place and returned with the history.
    """
    X, Y = (np.asarray(a, dtype=float) for a in train_set)
    Xv, Yv = (np.asarray(a, dtype=float) for a in val_set)
    if len(X) == 0 or len(Xv) == 0:
        raise ValueError("training and validation sets must be non-empty")
    if len(X) != len(Y) or len(Xv) != len(Yv):
        raise ValueError("feature and target row counts differ")
    rng = np.random.default_rng(cfg.seed)
    state = AdamState.zeros(model)
    hist = TrainHistory()
    best, since_best = math.inf, 0
    n = len(X)
    for epoch in range(1, cfg.epochs + 1):
        perm = rng.permutation(n)
        batch_losses = []
        for start in range(0, n, cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            loss, grads = backward(model, X[idx], Y[idx])
            if not math.isfinite(loss):
                raise TrainingDivergedError(epoch)
            adam_step(model, grads, state, cfg)
            batch_losses.append(loss)
        tr = float(np.mean(batch_losses))
        va = mse_loss(_forward_cache(model, Xv)[-1], Yv)
        if not (math.isfinite(tr) and math.isfinite(va)):
            raise TrainingDivergedError(epoch)
        hist.train_loss.append(tr)
        hist.val_loss.append(va)
        if callback is not None:
            callback(epoch, tr, va)
        if va < best:
            best, since_best, hist.best_epoch = va, 0, epoch
        else:
            since_best += 1
            if cfg.patience and since_best >= cfg.patience:
                hist.stopped_early = True
                break
    return model, hist


# model file layout (little-endian), see docs/model_format.md
MAGIC = b"RTMLP\x00\r\n"
MODEL_VERSION = 1
_ACT_CODE = {"relu": 0, "sigmoid": 1}
_CODE_ACT = {v: k for k, v in _ACT_CODE.items()}


def dumps_model(model, norm):
    if len(norm.columns) != model.layer_sizes[0] + model.layer_sizes[-1]:
        raise FormatError(
            f"NormRecord has {len(norm.columns)} columns but the network maps "
            f"{model.layer_sizes[0]} inputs to {model.layer_sizes[-1]} outputs"
        )
    out = bytearray(MAGIC)
    out += struct.pack("<II", MODEL_VERSION, len(model.layer_sizes))
    out += struct.pack(f"<{len(model.layer_sizes)}I", *model.layer_sizes)
    out += bytes(_ACT_CODE[a] for a in model.activations)
    for W, b in zip(model.weights, model.biases):
        out += np.ascontiguousarray(W, dtype="<f8").tobytes()
        out += np.ascontiguousarray(b, dtype="<f8").tobytes()
    out += struct.pack("<I", len(norm.columns))
    for name in norm.columns:
        raw = name.encode("utf-8")
        out += struct.pack("<H", len(raw)) + raw
    out += np.asarray(norm.mins, dtype="<f8").tobytes()
    out += np.asarray(norm.maxs, dtype="<f8").tobytes()
    out += struct.pack("<I", zlib.crc32(out))
    return bytes(out)


class _Reader:
    def __init__(self, buf):
        self.buf, self.pos = buf, 0

    def take(self, n):
        if self.pos + n > len(self.buf):
            raise FormatError(f"model file truncated at byte {self.pos} (needed {n} more)")
        chunk = self.buf[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def f64(self, count):
        return np.frombuffer(self.take(8 * count), dtype="<f8").astype(float)


def loads_model(buf):
    """Inverse of :func:`dumps_model`; returns ``(model, norm)``."""
    r = _Reader(bytes(buf))
    if r.take(len(MAGIC)) != MAGIC:
        raise FormatError("not a model file (bad magic)")
    version, n_sizes = r.unpack("<II")
    if version != MODEL_VERSION:
        raise FormatError(f"model format version {version}, expected {MODEL_VERSION}")
    if not (2 <= n_sizes <= 64):
        raise FormatError(f"implausible layer count {n_sizes}")
    sizes = r.unpack(f"<{n_sizes}I")
    codes = r.take(n_sizes - 1)
    try:
        acts = tuple(_CODE_ACT[c] for c in codes)
    except KeyError:
        raise FormatError("unknown activation code") from None
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        weights.append(r.f64(n_in * n_out).reshape(n_in, n_out))
        biases.append(r.f64(n_out))
    (n_cols,) = r.unpack("<I")
    if n_cols != sizes[0] + sizes[-1]:
        raise FormatError(f"NormRecord has {n_cols} columns, network needs {sizes[0] + sizes[-1]}")
    names = []
    for _ in range(n_cols):
        (ln,) = r.unpack("<H")
        names.append(r.take(ln).decode("utf-8"))
    mins, maxs = r.f64(n_cols), r.f64(n_cols)
    body_end = r.pos
    (crc,) = r.unpack("<I")
    if r.pos != len(r.buf):
        raise FormatError(f"{len(r.buf) - r.pos} trailing bytes after model payload")
    if zlib.crc32(r.buf[:body_end]) != crc:
        raise FormatError("model file checksum mismatch")
    return MlpModel(sizes, weights, biases, acts), NormRecord(mins, maxs, tuple(names))


def save_model(model, norm, path):
    with open(path, "wb") as fh:
        fh.write(dumps_model(model, norm))


def load_model(path):
    with open(path, "rb") as fh:
        return loads_model(fh.read())


def predict(model, norm, X_raw):
    """Map raw feature rows through scaling, the network and back to target units."""
    return norm.unscale_targets(forward(model, norm.scale_features(X_raw)))
