"""Dense MLP autoencoder with hand-written backprop and SGD/Adam updates.

Everything is float64 numpy. Rows are examples, so a layer computes
``act(x @ W.T + b)`` with ``W`` stored as (out, in).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import NumericError, ShapeError

ACTIVATIONS = ("identity", "relu", "tanh")
CHECKPOINT_VERSION = 1


def _activate(a: np.ndarray, kind: str) -> np.ndarray:
    if kind == "identity":
        return a
    if kind == "relu":
        return np.maximum(a, 0.0)
    if kind == "tanh":
        return np.tanh(a)
    raise ValueError(f"unknown activation {kind!r}")


def _activate_grad(a: np.ndarray, out: np.ndarray, kind: str) -> np.ndarray:
    # derivative of the activation at pre-activation a (out = act(a))
    if kind == "identity":
        return np.ones_like(a)
    if kind == "relu":
        return (a > 0.0).astype(np.float64)
    if kind == "tanh":
        return 1.0 - out * out
    raise ValueError(f"unknown activation {kind!r}")


@dataclass
class Layer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str = "identity"

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise ShapeError(
                f"weights {self.weights.shape} and bias {self.bias.shape} are inconsistent"
            )
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]


@dataclass
class Autoencoder:
    """``G = decoder o encoder``; the encoder output is the representation z."""

    encoder: list[Layer]
    decoder: list[Layer]

    def __post_init__(self):
        layers = self.layers
        if not self.encoder or not self.decoder:
            raise ShapeError("encoder and decoder need at least one layer each")
        for prev, nxt in zip(layers, layers[1:]):
            if prev.out_dim != nxt.in_dim:
                raise ShapeError(f"layer widths do not chain: {prev.out_dim} -> {nxt.in_dim}")
        if self.decoder[-1].out_dim != self.encoder[0].in_dim:
            raise ShapeError("decoder output width must equal the input width")

    @property
    def layers(self) -> list[Layer]:
        return list(self.encoder) + list(self.decoder)

    @property
    def input_dim(self) -> int:
        return self.encoder[0].in_dim

    @property
    def hidden_dim(self) -> int:
        return self.encoder[-1].out_dim

    def copy(self) -> "Autoencoder":
        clone = lambda ls: [Layer(l.weights.copy(), l.bias.copy(), l.activation) for l in ls]
        return Autoencoder(clone(self.encoder), clone(self.decoder))

    def parameters(self) -> list[np.ndarray]:
        out = []
        for layer in self.layers:
            out.extend((layer.weights, layer.bias))
        return out


def default_hidden_dims(input_dim: int) -> list[int]:
    """[32, 32] for low-dimensional inputs, a single 128-wide layer otherwise."""
    return [32, 32] if input_dim <= 8 else [128]


def build_autoencoder(
    input_dim: int,
    hidden_dims: list[int] | None = None,
    seed: int | np.random.Generator = 0,
    activation: str = "relu",
    output_activation: str = "identity",
    representation_activation: str | None = None,
) -> Autoencoder:
    """Glorot-uniform initialised autoencoder.

    The encoder maps ``input_dim`` through ``hidden_dims``; its last width is
    the representation size. The decoder mirrors the hidden widths back to
    ``input_dim``. Hidden layers (the representation included) use
    ``activation``; the reconstruction layer uses ``output_activation``.
    ``representation_activation`` overrides the activation of the last
    encoder layer only.
    """
    hidden_dims = list(hidden_dims) if hidden_dims is not None else default_hidden_dims(input_dim)
    if not hidden_dims or min(hidden_dims) < 1:
        raise ShapeError(f"invalid hidden_dims {hidden_dims}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    def make(fan_in, fan_out, act):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-limit, limit, size=(fan_out, fan_in))
        return Layer(w, np.zeros(fan_out), act)

    enc_widths = [input_dim] + hidden_dims
    encoder = [make(a, b, activation) for a, b in zip(enc_widths, enc_widths[1:])]
    if representation_activation is not None:
        encoder[-1].activation = representation_activation
    dec_widths = list(reversed(hidden_dims)) + [input_dim]
    decoder = [
        make(a, b, output_activation if i == len(dec_widths) - 2 else activation)
        for i, (a, b) in enumerate(zip(dec_widths, dec_widths[1:]))
    ]
    return Autoencoder(encoder, decoder)


@dataclass
class ForwardCache:
    inputs: list[np.ndarray]  # input to each layer
    preacts: list[np.ndarray]
    outputs: list[np.ndarray]
    n_encoder: int


def forward(model: Autoencoder, batch) -> tuple[np.ndarray, np.ndarray, ForwardCache]:
    """Run the autoencoder; returns (z, reconstruction, cache)."""
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise ShapeError(f"batch has shape {x.shape}, model expects {model.input_dim} columns")
    inputs, preacts, outputs = [], [], []
    h = x
    for layer in model.layers:
        inputs.append(h)
        a = h @ layer.weights.T + layer.bias
        h = _activate(a, layer.activation)
        preacts.append(a)
        outputs.append(h)
    n_enc = len(model.encoder)
    return outputs[n_enc - 1], outputs[-1], ForwardCache(inputs, preacts, outputs, n_enc)


def encode(model: Autoencoder, batch) -> np.ndarray:
    return forward(model, batch)[0]


def reconstruct(model: Autoencoder, batch) -> np.ndarray:
    return forward(model, batch)[1]


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @classmethod
    def zeros_like(cls, model: Autoencoder) -> "Gradients":
        return cls(
            [np.zeros_like(l.weights) for l in model.layers],
            [np.zeros_like(l.bias) for l in model.layers],
        )

    def __add__(self, other: "Gradients") -> "Gradients":
        return Gradients(
            [a + b for a, b in zip(self.weights, other.weights)],
            [a + b for a, b in zip(self.biases, other.biases)],
        )

    def scale(self, c: float) -> "Gradients":
        return Gradients([c * w for w in self.weights], [c * b for b in self.biases])

    def flat(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.extend((w.ravel(), b.ravel()))
        return np.concatenate(parts)


def backward(model: Autoencoder, cache: ForwardCache, d_recon, d_z) -> Gradients:
    """Backpropagate output adjoints ``d_recon`` and ``d_z`` through the model.

    ``d_z`` is injected at the encoder output, so a loss touching both the
    reconstruction and the representation is handled in one pass. Either
    adjoint may be ``None`` (treated as zero).
    """
    layers = model.layers
    n_rows = cache.inputs[0].shape[0]
    z_shape = cache.outputs[cache.n_encoder - 1].shape
    recon_shape = cache.outputs[-1].shape
    d_recon = np.zeros(recon_shape) if d_recon is None else np.asarray(d_recon, dtype=np.float64)
    d_z = np.zeros(z_shape) if d_z is None else np.asarray(d_z, dtype=np.float64)
    if d_recon.shape != recon_shape:
        raise ShapeError(f"d_recon has shape {d_recon.shape}, expected {recon_shape}")
    if d_z.shape != z_shape:
        raise ShapeError(f"d_z has shape {d_z.shape}, expected {z_shape}")

    dw = [None] * len(layers)
    db = [None] * len(layers)
    g = d_recon
    for i in range(len(layers) - 1, -1, -1):
        layer = layers[i]
        if i == cache.n_encoder - 1:
            g = g + d_z
        da = g * _activate_grad(cache.preacts[i], cache.outputs[i], layer.activation)
        dw[i] = da.T @ cache.inputs[i]
        db[i] = da.sum(axis=0)
        g = da @ layer.weights
    assert g.shape[0] == n_rows
    return Gradients(dw, db)


@dataclass
class OptimizerState:
    method: str = "adam"  # "adam" or "sgd"
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon_stab: float = 1e-8
    step: int = 0
    first_moment: list[np.ndarray] = field(default_factory=list)
    second_moment: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if self.method not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.method!r}")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")


def apply_update(
    model: Autoencoder, grads: Gradients, state: OptimizerState
) -> tuple[Autoencoder, OptimizerState]:
    """One optimizer step, in place. Returns ``(model, state)`` for chaining."""
    layers = model.layers
    if len(grads.weights) != len(layers):
        raise ShapeError("gradient set does not mirror the model")
    for i, (layer, gw, gb) in enumerate(zip(layers, grads.weights, grads.biases)):
        if gw.shape != layer.weights.shape or gb.shape != layer.bias.shape:
            raise ShapeError(f"gradient shapes for layer {i} do not mirror the model")
        if not (np.all(np.isfinite(gw)) and np.all(np.isfinite(gb))):
            raise NumericError(f"non-finite gradient in layer {i}", layer_index=i)

    params = model.parameters()
    flat_grads = [g for pair in zip(grads.weights, grads.biases) for g in pair]
    state.step += 1
    lr = state.learning_rate
    if state.method == "sgd":
        for p, g in zip(params, flat_grads):
            p -= lr * g
        return model, state

    if not state.first_moment:
        state.first_moment = [np.zeros_like(p) for p in params]
        state.second_moment = [np.zeros_like(p) for p in params]
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1**state.step
    bc2 = 1.0 - b2**state.step
    for p, g, m, v in zip(params, flat_grads, state.first_moment, state.second_moment):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.epsilon_stab)
    return model, state


def save_model(model: Autoencoder, path) -> None:
    """JSON checkpoint; floats are written with repr so the round trip is exact."""
    payload = {
        "format": "fairad-autoencoder",
        "version": CHECKPOINT_VERSION,
        "n_encoder": len(model.encoder),
        "layers": [
            {
                "shape": list(l.weights.shape),
                "activation": l.activation,
                "weights": l.weights.ravel().tolist(),
                "bias": l.bias.tolist(),
            }
            for l in model.layers
        ],
    }
    Path(path).write_text(json.dumps(payload))


def load_model(path) -> Autoencoder:
    payload = json.loads(Path(path).read_text())
    if payload.get("format") != "fairad-autoencoder":
        raise ValueError(f"{path} is not a fairad checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {payload.get('version')}")
    layers = [
        Layer(
            np.array(l["weights"], dtype=np.float64).reshape(l["shape"]),
            np.array(l["bias"], dtype=np.float64),
            l["activation"],
        )
        for l in payload["layers"]
    ]
    k = payload["n_encoder"]
    return Autoencoder(layers[:k], layers[k:])
