"""Node-level chaotic maps, diffusive coupling, noise injection, simulation.

Five registered maps, in registry order: logistic, tent, baker, standard,
cat. Logistic and tent carry one state component per node; baker, standard
and cat carry two. The standard map lives on [0, 2*pi)^2, everything else on
[0, 1)^m.

One coupled step is, exactly in this order: apply the local map to every
node, add the diffusive coupling y_i + sum_j W_ij (y_j - y_i), add the
per-step noise, fold each component back into the invariant domain. The
coupling sum is evaluated literally as written, term by term in ascending j,
so results never depend on BLAS kernels or thread counts and the sum
vanishes exactly for synchronized states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainViolation, InvalidRange, NumericalDivergence
from .graphgen import GraphSpec
from .keystream import KeyedStream

TWO_PI = 2.0 * math.pi


class MapKind(Enum):
    LOGISTIC = "logistic"
    TENT = "tent"
    BAKER = "baker"
    STANDARD = "standard"
    CAT = "cat"


# Registry order is normative for keyed map selection.
MAP_ORDER = (MapKind.LOGISTIC, MapKind.TENT, MapKind.BAKER, MapKind.STANDARD, MapKind.CAT)

STATE_DIM = {
    MapKind.LOGISTIC: 1,
    MapKind.TENT: 1,
    MapKind.BAKER: 2,
    MapKind.STANDARD: 2,
    MapKind.CAT: 2,
}

# Parameter ranges that keep each map in its bounded chaotic regime; the
# lambda > 0 diagnostics gate in CI validates these choices. The kick
# strength starts at 2.5: below that, diffusively coupled kicked rotors
# synchronize onto stable islands of the single map often enough that the
# chaos gate fails.
PARAM_RANGES = {
    "r": (3.9, 4.0),
    "mu": (0.4, 0.6),
    "s": (0.3, 0.7),
    "K": (2.5, 5.0),
}


@dataclass(frozen=True)
class MapParams:
    """Per-map parameters; fields of inactive maps stay zero."""

    r: float = 0.0    # logistic rate
    mu: float = 0.0   # tent break point
    s: float = 0.0    # baker fold point
    K: float = 0.0    # standard-map kick strength


@dataclass(frozen=True)
class SystemConfig:
    """Fully resolved chaotic system."""

    graph: GraphSpec
    map_kind: MapKind
    params: MapParams
    d: int
    t_burn: int = 100
    noise_sigma: float = 1e-3
    alpha: float = 1.0

    def validate(self) -> None:
        if self.d < 1:
            raise InvalidRange(f"node count must be >= 1, got {self.d}")
        if self.t_burn < 0:
            raise InvalidRange(f"burn-in must be >= 0, got {self.t_burn}")
        if self.noise_sigma < 0.0:
            raise InvalidRange(f"noise amplitude must be >= 0, got {self.noise_sigma}")
        if self.alpha <= 0.0:
            raise InvalidRange(f"mask amplitude must be > 0, got {self.alpha}")

    @property
    def state_dim(self) -> int:
        return STATE_DIM[self.map_kind]

    @property
    def domain_span(self) -> float:
        return TWO_PI if self.map_kind is MapKind.STANDARD else 1.0


def map_step(kind: MapKind, state: np.ndarray, params: MapParams) -> np.ndarray:
    """Apply one registered map rule to states of shape (..., m).

    Vectorized over leading axes; the rule acts on the trailing component
    axis. Callers are responsible for prior domain validation.
    """
    out = np.empty_like(state)
    if kind is MapKind.LOGISTIC:
        x = state[..., 0]
        out[..., 0] = params.r * x * (1.0 - x)
    elif kind is MapKind.TENT:
        x = state[..., 0]
        out[..., 0] = np.where(x < params.mu, x / params.mu, (1.0 - x) / (1.0 - params.mu))
    elif kind is MapKind.BAKER:
        # Area-preserving skew baker transformation with fold point s:
        # stretch-and-cut in x, stack in y.
        s = params.s
        x = state[..., 0]
        y = state[..., 1]
        left = x < s
        out[..., 0] = np.where(left, x / s, (x - s) / (1.0 - s))
        out[..., 1] = np.where(left, s * y, s + (1.0 - s) * y)
    elif kind is MapKind.STANDARD:
        theta = state[..., 0]
        p = state[..., 1]
        # mod of a tiny negative kick can round to exactly 2*pi; land it on 0
        p_new = np.mod(p + params.K * np.sin(theta), TWO_PI)
        p_new = np.where(p_new >= TWO_PI, 0.0, p_new)
        theta_new = np.mod(theta + p_new, TWO_PI)
        theta_new = np.where(theta_new >= TWO_PI, 0.0, theta_new)
        out[..., 1] = p_new
        out[..., 0] = theta_new
    elif kind is MapKind.CAT:
        x = state[..., 0]
        y = state[..., 1]
        out[..., 0] = np.mod(x + y, 1.0)
        out[..., 1] = np.mod(x + 2.0 * y, 1.0)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown map kind {kind!r}")
    return out


def check_domain(kind: MapKind, state: np.ndarray) -> None:
    """Raise DomainViolation unless every component is inside the map domain."""
    hi = TWO_PI if kind is MapKind.STANDARD else 1.0
    if not (np.all(state >= 0.0) and np.all(state < hi)):
        bad = np.argwhere(~((state >= 0.0) & (state < hi)))
        where = bad[0].tolist() if bad.size else "?"
        raise DomainViolation(f"state outside [0, {hi}) at index {where}")


def fold(kind: MapKind, state: np.ndarray) -> np.ndarray:
    """Fold components back into the invariant domain by modular reduction.

    Folding (not clamping) preserves mixing and avoids absorbing states at
    the boundaries. The mod can round to exactly hi for tiny negative inputs;
    those land on 0.0 to keep the domain half-open.
    """
    hi = TWO_PI if kind is MapKind.STANDARD else 1.0
    out = np.mod(state, hi)
    out[out >= hi] = 0.0
    return out


def row_sums(w: np.ndarray) -> np.ndarray:
    """Weight row sums by ascending-j accumulation (bit-stable, matches the
    scalar reference; np.sum's pairwise order would not)."""
    rho = np.zeros(w.shape[0], dtype=np.float64)
    for j in range(w.shape[0]):
        np.add(rho, w[:, j], out=rho)
    return rho


def weight_columns(w: np.ndarray) -> list[np.ndarray]:
    """Column views of w, hoisted once so hot loops skip per-step slicing."""
    return [w[:, j, None] for j in range(w.shape[0])]


def coupled_step(
    states: np.ndarray,
    w: np.ndarray,
    kind: MapKind,
    params: MapParams,
    noise: np.ndarray | None = None,
    w_cols: list[np.ndarray] | None = None,
    check: bool = True,
) -> np.ndarray:
    """One diffusive-coupling update of all nodes.

    states has shape (d, m) or (batch, d, m); w is the d*d weight matrix.
    Computes y = f_local(states), then per node y_i + sum_j W_ij (y_j - y_i),
    adds noise (if given), folds. The coupling sum is evaluated literally,
    term by term in ascending j, so it is bit-stable everywhere and exactly
    zero when all nodes share one state. w_cols may carry precomputed
    weight_columns(w); internal loops whose inputs are already folded pass
    check=False (fold guarantees the domain; non-finite outputs are still
    caught below). Batched inputs evolve independent trajectories with
    bitwise-identical per-trajectory results.
    """
    if check:
        check_domain(kind, states)
    y = map_step(kind, states, params)
    d = w.shape[0]
    if w_cols is None:
        w_cols = weight_columns(w)
    acc = np.zeros_like(y)
    tmp = np.empty_like(y)
    sub, mul, add = np.subtract, np.multiply, np.add
    if states.ndim == 3:
        # yt[j] is node j's states across the batch, shaped to broadcast
        yt = np.ascontiguousarray(y.transpose(1, 0, 2)).reshape(d, -1, 1, y.shape[2])
        for j in range(d):
            sub(yt[j], y, out=tmp)
            mul(tmp, w_cols[j], out=tmp)
            add(acc, tmp, out=acc)
    else:
        for j in range(d):
            sub(y[j], y, out=tmp)
            mul(tmp, w_cols[j], out=tmp)
            add(acc, tmp, out=acc)
    coupled = y + acc
    if noise is not None:
        coupled = coupled + noise
    out = fold(kind, coupled)
    if not np.isfinite(out).all():
        bad = np.argwhere(~np.isfinite(out))[0]
        node = int(bad[-2]) if bad.size >= 2 else int(bad[0])
        raise NumericalDivergence(f"non-finite state at node {node}", node=node)
    return out


def init_state(cfg: SystemConfig, init_stream: KeyedStream) -> np.ndarray:
    """Draw the initial d*m state, node-major then component-minor.

    Unit-domain maps start in the safe interior [0.05, 0.95); the standard
    map starts anywhere on its torus [0, 2*pi).
    """
    m = cfg.state_dim
    if cfg.map_kind is MapKind.STANDARD:
        draws = cfg.d * m
        flat = init_stream.uniform_block(draws, 0.0, TWO_PI)
    else:
        flat = init_stream.uniform_block(cfg.d * m, 0.05, 0.95)
    return flat.reshape(cfg.d, m)


def simulate(
    cfg: SystemConfig,
    w: np.ndarray,
    x0: np.ndarray,
    noise_stream: KeyedStream | None,
    rows: int,
) -> np.ndarray:
    """Advance t_burn discarded steps then emit one mask row per retained step.

    Each retained row is the first state component of every node, normalized
    to [0, 1) (divided by 2*pi for the standard map) and affinely mapped to
    [-alpha, alpha) via alpha * (2u - 1). Noise draws, when sigma > 0, are
    uniform in [-sigma, sigma) consumed step-major, node-major,
    component-minor; sigma = 0 consumes no draws.
    """
    if rows < 1:
        raise InvalidRange(f"rows must be >= 1, got {rows}")
    cfg.validate()
    d, m = x0.shape
    sigma = cfg.noise_sigma
    use_noise = sigma > 0.0
    if use_noise and noise_stream is None:
        raise InvalidRange("noise_sigma > 0 requires a noise stream")
    states = x0.copy()
    out = np.empty((rows, d), dtype=np.float64)
    total = cfg.t_burn + rows
    kind = cfg.map_kind
    span = cfg.domain_span
    alpha = cfg.alpha
    w_cols = weight_columns(w)
    for step in range(total):
        noise = None
        if use_noise:
            noise = noise_stream.uniform_block(d * m, -sigma, sigma).reshape(d, m)
        try:
            states = coupled_step(
                states, w, kind, cfg.params, noise, w_cols=w_cols, check=step == 0
            )
        except NumericalDivergence as exc:
            exc.step = step
            raise NumericalDivergence(
                f"{exc} at timestep {step}", node=exc.node, step=step
            ) from exc
        if step >= cfg.t_burn:
            u = states[:, 0] if span == 1.0 else states[:, 0] / TWO_PI
            out[step - cfg.t_burn] = alpha * (2.0 * u - 1.0)
    return out
