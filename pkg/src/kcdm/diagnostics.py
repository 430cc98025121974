"""Chaos and key-sensitivity diagnostics for resolved systems.

The Lyapunov estimate is the standard two-trajectory method: evolve the
reference state and a perturbed copy under identical noise-free dynamics,
log the separation growth each step, renormalize the perturbed state back to
distance eps. Keyed noise is forced off during estimation: it is identical
on both trajectories and would contaminate the separation only through
folding, which is not the deterministic divergence being measured.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dynamics import SystemConfig, coupled_step, fold, weight_columns
from .errors import IdenticalInputs, SynchronizationWarning
from .keystream import MasterKey, Nonce

RENORM_EPS = 1e-30
DEFAULT_LOG_DISCARD = 10


@dataclass(frozen=True)
class LyapunovReport:
    """Largest-Lyapunov estimate (nats/step) and its retained per-step logs."""

    lambda_hat: float
    steps: int
    epsilon: float
    per_step_logs: np.ndarray = field(repr=False)
    # Mean over all logs, before the transient discard; reported alongside
    # because the discard is a convergence aid, not part of the estimator.
    lambda_hat_all: float = float("nan")
    discarded: int = 0


def estimate_lyapunov(
    cfg: SystemConfig,
    w: np.ndarray,
    x0: np.ndarray,
    T: int = 2000,
    eps: float = 1e-8,
    discard: int | None = None,
) -> LyapunovReport:
    """Two-trajectory largest-Lyapunov estimate over T logged steps.

    The perturbed start is x0 + eps on every component; one unlogged
    alignment step renormalizes that offset to exactly eps before the first
    log, so the all-components perturbation does not bias the estimate. Each
    logged step records log(||delta|| / eps) and renormalizes the perturbed
    state to x + eps * delta / (||delta|| + 1e-30).

    Persistently synchronized trajectories yield lambda_hat = -inf with a
    SynchronizationWarning rather than an exception.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    if discard is None:
        discard = DEFAULT_LOG_DISCARD
    kind = cfg.map_kind
    params = cfg.params
    w_cols = weight_columns(w)

    pair = np.stack([x0, fold(kind, x0 + eps)])
    # Alignment step: evolve, renormalize, do not log.
    pair = coupled_step(pair, w, kind, params, w_cols=w_cols)
    pair[1] = _renormalize(pair, kind, eps)

    logs = np.empty(T, dtype=np.float64)
    for t in range(T):
        pair = coupled_step(pair, w, kind, params, w_cols=w_cols, check=False)
        delta = pair[1] - pair[0]
        norm = float(np.sqrt(np.sum(delta * delta)))
        logs[t] = math.log(norm / eps) if norm > 0.0 else -math.inf
        pair[1] = pair[0] + eps * (delta / (norm + RENORM_EPS))
        pair[1] = fold(kind, pair[1])

    keep = logs[discard:] if T > discard else logs
    lambda_hat = float(np.mean(keep))
    lambda_all = float(np.mean(logs))
    if math.isinf(lambda_hat) and lambda_hat < 0:
        warnings.warn(
            "perturbed trajectory synchronized with the reference; "
            "lambda_hat reported as -inf",
            SynchronizationWarning,
        )
    return LyapunovReport(
        lambda_hat=lambda_hat,
        steps=T,
        epsilon=eps,
        per_step_logs=keep,
        lambda_hat_all=lambda_all,
        discarded=len(logs) - len(keep),
    )


def _renormalize(pair: np.ndarray, kind, eps: float) -> np.ndarray:
    delta = pair[1] - pair[0]
    norm = float(np.sqrt(np.sum(delta * delta)))
    out = pair[0] + eps * (delta / (norm + RENORM_EPS))
    return fold(kind, out)


@dataclass(frozen=True)
class AvalancheReport:
    """Decorrelation statistics between two full mask generations."""

    pearson_r: float
    mean_abs_diff: float
    elements: int


def avalanche(
    key_a: MasterKey,
    nonce_a: Nonce,
    key_b: MasterKey,
    nonce_b: Nonce,
    shape: tuple[int, ...],
    options=None,
) -> AvalancheReport:
    """Generate both masks end-to-end and report their Pearson correlation
    and mean elementwise absolute difference."""
    from .cipher import CipherOptions, generate_mask

    if key_a.bytes == key_b.bytes and nonce_a.bytes == nonce_b.bytes:
        raise IdenticalInputs("avalanche needs distinct (key, nonce) inputs")
    if options is None:
        options = CipherOptions()
    s_a = generate_mask(key_a, nonce_a, shape, options).ravel()
    s_b = generate_mask(key_b, nonce_b, shape, options).ravel()
    r = float(np.corrcoef(s_a, s_b)[0, 1])
    return AvalancheReport(
        pearson_r=r,
        mean_abs_diff=float(np.mean(np.abs(s_a - s_b))),
        elements=s_a.size,
    )
