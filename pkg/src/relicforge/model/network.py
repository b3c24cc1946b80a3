"""From-scratch stacked LSTM for per-node action classification.

Standard four-gate cells over the pre-order feature steps: input, forget,
and output gates are sigmoids of W.[h, x] + b, the candidate is a tanh,
c_t = f*c + i*g and h_t = o*tanh(c_t). A class projection plus a scalar
split-offset head (sigmoid) read the top layer's state at every step.
Everything is float64 numpy; the backward pass is hand-rolled
backpropagation through time, held to a finite-difference oracle by the
test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from relicforge.errors import ShapeError

INIT_SCALE = 0.08
FORGET_BIAS = 1.0

GATE_WEIGHTS = ("W_i", "W_f", "W_o", "W_c")
GATE_BIASES = ("b_i", "b_f", "b_o", "b_c")

_CONFIG_FIELDS = (
    "layers", "hidden", "dropout", "lr", "epochs", "batch",
    "input_dim", "classes", "seed",
)


@dataclass(frozen=True)
class ModelConfig:
    layers: int = 1
    hidden: int = 32
    dropout: float = 0.3
    lr: float = 0.001
    epochs: int = 50
    batch: int = 64
    input_dim: int = 18
    classes: int = 12
    seed: int = 42

    def validate(self) -> None:
        for name in ("layers", "hidden", "epochs", "batch", "input_dim", "classes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def to_json(self) -> dict:
        return {name: getattr(self, name) for name in _CONFIG_FIELDS}

    @classmethod
    def from_json(cls, data: dict) -> "ModelConfig":
        return cls(**{name: data[name] for name in _CONFIG_FIELDS})


def layer_dims(config: ModelConfig) -> list[tuple[int, int]]:
    """(input width, hidden) per layer, bottom to top."""
    dims = []
    width = config.input_dim
    for _ in range(config.layers):
        dims.append((width, config.hidden))
        width = config.hidden
    return dims


def tensor_shapes(config: ModelConfig) -> list[tuple[str, tuple[int, ...]]]:
    """The parameter table. Its order is the serialization and update order."""
    out: list[tuple[str, tuple[int, ...]]] = []
    for li, (width, hidden) in enumerate(layer_dims(config)):
        for gate in GATE_WEIGHTS:
            out.append((f"layer{li}.{gate}", (hidden, hidden + width)))
        for gate in GATE_BIASES:
            out.append((f"layer{li}.{gate}", (hidden,)))
    out.append(("W_y", (config.classes, config.hidden)))
    out.append(("b_y", (config.classes,)))
    out.append(("W_s", (config.hidden,)))
    out.append(("b_s", (1,)))
    return out


@dataclass(eq=False)
class ModelCheckpoint:
    config: ModelConfig
    params: dict[str, np.ndarray]
    history: list[dict] = field(default_factory=list)

    def validate(self) -> None:
        self.config.validate()
        expected = tensor_shapes(self.config)
        if list(self.params) != [name for name, _ in expected]:
            raise ShapeError("parameter table does not match the config")
        for name, shape in expected:
            if self.params[name].shape != shape:
                raise ShapeError(
                    f"{name} has shape {self.params[name].shape}, expected {shape}"
                )
            if not np.all(np.isfinite(self.params[name])):
                raise ValueError(f"{name} holds non-finite values")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModelCheckpoint):
            return NotImplemented
        return (
            self.config == other.config
            and self.history == other.history
            and list(self.params) == list(other.params)
            and all(np.array_equal(self.params[k], other.params[k]) for k in self.params)
        )


def init_checkpoint(config: ModelConfig, rng: np.random.Generator | None = None) -> ModelCheckpoint:
    """Small uniform weights, zero biases except the forget gate's 1.0."""
    config.validate()
    if rng is None:
        rng = np.random.default_rng(config.seed)
    params: dict[str, np.ndarray] = {}
    for name, shape in tensor_shapes(config):
        base = name.split(".")[-1]
        if base == "b_f":
            params[name] = np.full(shape, FORGET_BIAS)
        elif base.startswith("b"):
            params[name] = np.zeros(shape)
        else:
            params[name] = rng.uniform(-INIT_SCALE, INIT_SCALE, size=shape)
    return ModelCheckpoint(config, params)


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = logits - np.max(logits, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))


@dataclass
class _LayerTrace:
    z: np.ndarray        # (T, hidden + width), [h_prev, x_t] per step
    i: np.ndarray
    f: np.ndarray
    o: np.ndarray
    g: np.ndarray        # candidate, tanh
    c: np.ndarray
    tanh_c: np.ndarray
    mask: np.ndarray | None  # inverted-dropout mask applied on the way up


@dataclass
class ForwardPass:
    logits: np.ndarray       # (T, classes)
    offsets: np.ndarray      # (T,) sigmoid split positions in (0, 1)
    offset_pre: np.ndarray   # (T,) pre-sigmoid activations
    top: np.ndarray          # (T, hidden) input to both heads
    layers: list[_LayerTrace]


def forward(features, ckpt: ModelCheckpoint, rng: np.random.Generator | None = None) -> ForwardPass:
    """Run the stack over one feature sequence.

    `rng` turns on training mode: inverted dropout on each non-final
    layer's output. Without it the pass is deterministic, and dropout=0
    with an rng is bitwise-identical to running without one.
    """
    config = ckpt.config
    mat = np.asarray(getattr(features, "matrix", features), dtype=float)
    if mat.ndim != 2 or mat.shape[1] != config.input_dim:
        raise ShapeError(
            f"expected (steps, {config.input_dim}) features, got {mat.shape}"
        )
    steps = mat.shape[0]
    params = ckpt.params
    dims = layer_dims(config)

    x = mat
    traces: list[_LayerTrace] = []
    for li, (width, hidden) in enumerate(dims):
        if x.shape[1] != width:
            raise ShapeError(f"layer {li} expected width {width}, got {x.shape[1]}")
        W_i = params[f"layer{li}.W_i"]
        W_f = params[f"layer{li}.W_f"]
        W_o = params[f"layer{li}.W_o"]
        W_c = params[f"layer{li}.W_c"]
        b_i = params[f"layer{li}.b_i"]
        b_f = params[f"layer{li}.b_f"]
        b_o = params[f"layer{li}.b_o"]
        b_c = params[f"layer{li}.b_c"]

        z = np.zeros((steps, hidden + width))
        gi = np.zeros((steps, hidden))
        gf = np.zeros((steps, hidden))
        go = np.zeros((steps, hidden))
        gg = np.zeros((steps, hidden))
        cs = np.zeros((steps, hidden))
        hs = np.zeros((steps, hidden))
        h_prev = np.zeros(hidden)
        c_prev = np.zeros(hidden)
        for t in range(steps):
            z_t = np.concatenate([h_prev, x[t]])
            i_t = sigmoid(W_i @ z_t + b_i)
            f_t = sigmoid(W_f @ z_t + b_f)
            o_t = sigmoid(W_o @ z_t + b_o)
            g_t = np.tanh(W_c @ z_t + b_c)
            c_t = f_t * c_prev + i_t * g_t
            h_t = o_t * np.tanh(c_t)
            z[t], gi[t], gf[t], go[t], gg[t], cs[t], hs[t] = (
                z_t, i_t, f_t, o_t, g_t, c_t, h_t,
            )
            h_prev, c_prev = h_t, c_t

        mask = None
        out = hs
        if rng is not None and config.dropout > 0 and li < config.layers - 1:
            keep = rng.random((steps, hidden)) >= config.dropout
            mask = keep / (1.0 - config.dropout)
            out = hs * mask
        traces.append(
            _LayerTrace(z=z, i=gi, f=gf, o=go, g=gg, c=cs, tanh_c=np.tanh(cs), mask=mask)
        )
        x = out

    logits = x @ params["W_y"].T + params["b_y"]
    offset_pre = x @ params["W_s"] + params["b_s"][0]
    return ForwardPass(
        logits=logits,
        offsets=sigmoid(offset_pre),
        offset_pre=offset_pre,
        top=x,
        layers=traces,
    )


def loss_and_grads(batch, ckpt: ModelCheckpoint, rng: np.random.Generator | None = None):
    """Weighted cross-entropy over class steps plus squared error on split
    offsets, with exact gradients for every parameter.

    Both terms are means over the batch's total step weight (class term)
    and total offset weight (split term), so a zero-weight step can never
    move a parameter.
    """
    if not batch:
        raise ValueError("empty batch")
    config = ckpt.config
    params = ckpt.params
    total_w = sum(float(s.weight.sum()) for s in batch)
    total_ext = sum(float(s.offset_mask.sum()) for s in batch)
    if total_w <= 0:
        raise ValueError("batch carries no step weight")

    grads = {name: np.zeros_like(p) for name, p in params.items()}
    dims = layer_dims(config)
    loss = 0.0

    for sample in batch:
        fp = forward(sample.steps, ckpt, rng)
        steps = fp.logits.shape[0]
        ids = sample.class_ids
        w = sample.weight / total_w

        logp = log_softmax(fp.logits)
        loss += float(np.sum(w * -logp[np.arange(steps), ids]))
        dlogits = softmax(fp.logits)
        dlogits[np.arange(steps), ids] -= 1.0
        dlogits *= w[:, None]

        if total_ext > 0:
            m = sample.offset_mask / total_ext
            diff = fp.offsets - sample.offsets
            loss += float(np.sum(m * diff * diff))
            doffset_pre = 2.0 * m * diff * fp.offsets * (1.0 - fp.offsets)
        else:
            doffset_pre = np.zeros(steps)

        grads["W_y"] += dlogits.T @ fp.top
        grads["b_y"] += dlogits.sum(axis=0)
        grads["W_s"] += fp.top.T @ doffset_pre
        grads["b_s"][0] += doffset_pre.sum()
        dout = dlogits @ params["W_y"] + np.outer(doffset_pre, params["W_s"])

        for li in reversed(range(config.layers)):
            tr = fp.layers[li]
            width, hidden = dims[li]
            dh_seq = dout * tr.mask if tr.mask is not None else dout
            W_i = params[f"layer{li}.W_i"]
            W_f = params[f"layer{li}.W_f"]
            W_o = params[f"layer{li}.W_o"]
            W_c = params[f"layer{li}.W_c"]
            dW_i = grads[f"layer{li}.W_i"]
            dW_f = grads[f"layer{li}.W_f"]
            dW_o = grads[f"layer{li}.W_o"]
            dW_c = grads[f"layer{li}.W_c"]
            db_i = grads[f"layer{li}.b_i"]
            db_f = grads[f"layer{li}.b_f"]
            db_o = grads[f"layer{li}.b_o"]
            db_c = grads[f"layer{li}.b_c"]

            dh_next = np.zeros(hidden)
            dc_next = np.zeros(hidden)
            dx_seq = np.zeros((steps, width))
            for t in reversed(range(steps)):
                dh = dh_seq[t] + dh_next
                i_t, f_t, o_t, g_t = tr.i[t], tr.f[t], tr.o[t], tr.g[t]
                da_o = dh * tr.tanh_c[t] * o_t * (1.0 - o_t)
                dc = dc_next + dh * o_t * (1.0 - tr.tanh_c[t] ** 2)
                c_prev = tr.c[t - 1] if t > 0 else np.zeros(hidden)
                da_f = dc * c_prev * f_t * (1.0 - f_t)
                da_i = dc * g_t * i_t * (1.0 - i_t)
                da_c = dc * i_t * (1.0 - g_t**2)

                z_t = tr.z[t]
                dW_i += np.outer(da_i, z_t)
                dW_f += np.outer(da_f, z_t)
                dW_o += np.outer(da_o, z_t)
                dW_c += np.outer(da_c, z_t)
                db_i += da_i
                db_f += da_f
                db_o += da_o
                db_c += da_c

                dz = W_i.T @ da_i + W_f.T @ da_f + W_o.T @ da_o + W_c.T @ da_c
                dh_next = dz[:hidden]
                dx_seq[t] = dz[hidden:]
                dc_next = dc * f_t
            dout = dx_seq

    return loss, grads
