"""Minimal neural engine: multi-layer GRU, MLP, BCE, Adam, step-decay schedule.

Everything is float64 numpy, batch-first, with hand-written reverse-mode
gradients.  Forward methods return a cache that the matching backward method
consumes; parameter gradients are accumulated into a flat ``{name: array}``
dict keyed by the owner's prefix.  No external ML dependency.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError, NumericError

BCE_EPS = 1e-7


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _init_matrix(rng, rows: int, cols: int, fan_in: int) -> np.ndarray:
    """Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)]; zeros when rng is None."""
    if rng is None:
        return np.zeros((rows, cols))
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=(rows, cols))


class GruLayer:
    """One GRU layer with fused gate parameters in order (reset, update, candidate).

    h' = (1 - z) * c + z * h  with
    r = sigma(W_r x + U_r h + b_r), z = sigma(W_z x + U_z h + b_z),
    c = tanh(W_c x + r * (U_c h + b_c)).
    """

    def __init__(self, input_dim: int, hidden_dim: int, rng=None):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.w = _init_matrix(rng, 3 * hidden_dim, input_dim, input_dim)
        self.u = _init_matrix(rng, 3 * hidden_dim, hidden_dim, hidden_dim)
        self.b = np.zeros(3 * hidden_dim)

    # per-gate views over the fused arrays, rows [0:H)=reset, [H:2H)=update, [2H:3H)=candidate
    @property
    def w_r(self):
        return self.w[: self.hidden_dim]

    @property
    def w_z(self):
        return self.w[self.hidden_dim : 2 * self.hidden_dim]

    @property
    def w_c(self):
        return self.w[2 * self.hidden_dim :]

    @property
    def u_r(self):
        return self.u[: self.hidden_dim]

    @property
    def u_z(self):
        return self.u[self.hidden_dim : 2 * self.hidden_dim]

    @property
    def u_c(self):
        return self.u[2 * self.hidden_dim :]

    @property
    def b_r(self):
        return self.b[: self.hidden_dim]

    @property
    def b_z(self):
        return self.b[self.hidden_dim : 2 * self.hidden_dim]

    @property
    def b_c(self):
        return self.b[2 * self.hidden_dim :]

    def named_params(self, prefix: str):
        yield f"{prefix}.w", self.w
        yield f"{prefix}.u", self.u
        yield f"{prefix}.b", self.b

    def step(self, x: np.ndarray, h: np.ndarray):
        """One time step on a (B, input_dim) batch; returns (h_new, cache)."""
        if x.shape[1] != self.input_dim or h.shape[1] != self.hidden_dim:
            raise InputError(
                f"GRU layer expects input {self.input_dim}/hidden {self.hidden_dim}, "
                f"got {x.shape[1]}/{h.shape[1]}"
            )
        hd = self.hidden_dim
        gi = x @ self.w.T
        gh = h @ self.u.T + self.b
        r = sigmoid(gi[:, :hd] + gh[:, :hd])
        z = sigmoid(gi[:, hd : 2 * hd] + gh[:, hd : 2 * hd])
        hc = gh[:, 2 * hd :]
        c = np.tanh(gi[:, 2 * hd :] + r * hc)
        h_new = (1.0 - z) * c + z * h
        return h_new, (x, h, r, z, c, hc)

    def backward_step(self, cache, dh_new, grads, prefix):
        """Accumulate parameter grads; return (dx, dh_prev)."""
        x, h, r, z, c, hc = cache
        dz = dh_new * (h - c)
        dc = dh_new * (1.0 - z)
        dh = dh_new * z
        dac = dc * (1.0 - c * c)
        dar = (dac * hc) * r * (1.0 - r)
        daz = dz * z * (1.0 - z)
        dhc = dac * r
        d_gi = np.concatenate([dar, daz, dac], axis=1)
        d_gh = np.concatenate([dar, daz, dhc], axis=1)
        grads[f"{prefix}.w"] += d_gi.T @ x
        grads[f"{prefix}.u"] += d_gh.T @ h
        grads[f"{prefix}.b"] += d_gh.sum(axis=0)
        dx = d_gi @ self.w
        dh += d_gh @ self.u
        return dx, dh


class GruStack:
    """Stacked GRU layers; layer l consumes layer l-1's output sequence."""

    def __init__(self, num_layers: int, input_dim: int, hidden_dim: int, rng=None):
        if num_layers < 1:
            raise InputError("need at least one GRU layer")
        self.num_layers = num_layers
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.layers = [
            GruLayer(input_dim if l == 0 else hidden_dim, hidden_dim, rng)
            for l in range(num_layers)
        ]

    def named_params(self, prefix: str):
        for l, layer in enumerate(self.layers):
            yield from layer.named_params(f"{prefix}.{l}")

    def zero_state(self, batch: int) -> list[np.ndarray]:
        return [np.zeros((batch, self.hidden_dim)) for _ in self.layers]

    def step(self, x: np.ndarray, hs: list[np.ndarray]):
        """Advance every layer one step; returns (new hiddens, caches per layer)."""
        new_hs = []
        caches = []
        inp = x
        for layer, h in zip(self.layers, hs):
            h_new, cache = layer.step(inp, h)
            new_hs.append(h_new)
            caches.append(cache)
            inp = h_new
        return new_hs, caches

    def backward_step(self, caches, d_hs, grads, prefix):
        """Reverse one step.  ``d_hs[l]`` is the incoming gradient w.r.t. layer
        l's new hidden (carry from the future step plus any consumer terms).
        Returns (dx, carries) where carries feed the previous time step."""
        carries = [None] * self.num_layers
        d_above = None
        for l in reversed(range(self.num_layers)):
            d_total = d_hs[l] if d_above is None else d_hs[l] + d_above
            dx, dh_prev = self.layers[l].backward_step(
                caches[l], d_total, grads, f"{prefix}.{l}"
            )
            carries[l] = dh_prev
            d_above = dx
        return d_above, carries


def gru_stack_forward(stack: GruStack, inputs: np.ndarray, h0=None):
    """Run a whole (T, B, input_dim) sequence; returns ((T, B, H) outputs, final hiddens).

    An empty sequence returns empty outputs and ``h0`` unchanged.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 3:
        raise InputError(f"expected (T, B, input_dim) inputs, got shape {inputs.shape}")
    t_steps, batch, _ = inputs.shape
    hs = stack.zero_state(batch) if h0 is None else [h.copy() for h in h0]
    outputs = np.zeros((t_steps, batch, stack.hidden_dim))
    for t in range(t_steps):
        hs, _ = stack.step(inputs[t], hs)
        outputs[t] = hs[-1]
    return outputs, hs


_ACTIVATIONS = ("relu", "sigmoid", "identity")


class Mlp:
    """Affine layers with per-layer activation tags."""

    def __init__(self, dims: list[int], activations: list[str], rng=None):
        if len(dims) < 2 or len(activations) != len(dims) - 1:
            raise InputError("dims must chain and provide one activation per layer")
        for act in activations:
            if act not in _ACTIVATIONS:
                raise InputError(f"unknown activation {act!r}")
        self.dims = list(dims)
        self.activations = list(activations)
        self.weights = [
            _init_matrix(rng, dims[i + 1], dims[i], dims[i]) for i in range(len(dims) - 1)
        ]
        self.biases = [np.zeros(dims[i + 1]) for i in range(len(dims) - 1)]

    def named_params(self, prefix: str):
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            yield f"{prefix}.{i}.w", w
            yield f"{prefix}.{i}.b", b

    def forward(self, x: np.ndarray):
        outs = [np.asarray(x, dtype=np.float64)]
        for w, b, act in zip(self.weights, self.biases, self.activations):
            a = outs[-1] @ w.T + b
            if act == "relu":
                y = np.maximum(a, 0.0)
            elif act == "sigmoid":
                y = sigmoid(a)
            else:
                y = a
            outs.append(y)
        return outs[-1], outs

    def backward(self, cache, dy, grads, prefix):
        outs = cache
        d = dy
        for i in reversed(range(len(self.weights))):
            act = self.activations[i]
            y = outs[i + 1]
            if act == "relu":
                d = d * (y > 0.0)
            elif act == "sigmoid":
                d = d * y * (1.0 - y)
            grads[f"{prefix}.{i}.w"] += d.T @ outs[i]
            grads[f"{prefix}.{i}.b"] += d.sum(axis=0)
            d = d @ self.weights[i]
        return d


class Linear:
    """Single affine map y = x W^T + b."""

    def __init__(self, input_dim: int, output_dim: int, rng=None):
        self.w = _init_matrix(rng, output_dim, input_dim, input_dim)
        self.b = np.zeros(output_dim)

    def named_params(self, prefix: str):
        yield f"{prefix}.w", self.w
        yield f"{prefix}.b", self.b

    def forward(self, x: np.ndarray):
        return x @ self.w.T + self.b, x

    def backward(self, cache, dy, grads, prefix):
        x = cache
        grads[f"{prefix}.w"] += dy.T @ x
        grads[f"{prefix}.b"] += dy.sum(axis=0)
        return dy @ self.w


def bce_loss(p: np.ndarray, y: np.ndarray, mask: np.ndarray) -> float:
    """Masked mean binary cross-entropy with probabilities clamped to [eps, 1-eps]."""
    loss, _ = bce_loss_grad(p, y, mask)
    return loss


def bce_loss_grad(p: np.ndarray, y: np.ndarray, mask: np.ndarray):
    """Loss plus d(loss)/d(p); gradient is zero at masked-out and clamped slots."""
    p = np.asarray(p, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if p.shape != y.shape or p.shape != mask.shape:
        raise InputError(f"shape mismatch: p {p.shape}, y {y.shape}, mask {mask.shape}")
    count = int(mask.sum())
    if count == 0:
        raise InputError("bce_loss over an empty mask")
    pc = np.clip(p, BCE_EPS, 1.0 - BCE_EPS)
    terms = -(y * np.log(pc) + (1.0 - y) * np.log1p(-pc))
    loss = float(terms[mask].mean())
    dp = np.zeros_like(p)
    live = mask & (p == pc)
    dp[live] = (pc[live] - y[live]) / (pc[live] * (1.0 - pc[live])) / count
    return loss, dp


class AdamState:
    """First/second-moment accumulators congruent with a parameter dict."""

    def __init__(self, params: dict[str, np.ndarray], beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float,
) -> None:
    """One Adam update, in place, with bias correction.

    Fails fast on non-finite gradients: a poisoned moment estimate would
    silently corrupt every later step.
    """
    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t
    for name, p in params.items():
        g = grads[name]
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient for parameter {name!r}")
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= lr * (m / c1) / (np.sqrt(v / c2) + state.eps)


def lr_schedule(base_lr: float, epoch: int) -> float:
    """Step decay: multiply by 0.2 after every 100 epochs."""
    if epoch < 0:
        raise InputError(f"epoch must be >= 0, got {epoch}")
    return base_lr * 0.2 ** (epoch // 100)


def zero_grads(params: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    return {k: np.zeros_like(v) for k, v in params.items()}
