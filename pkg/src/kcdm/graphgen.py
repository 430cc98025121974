"""Deterministic random-graph and coupling-weight sampling.

Draw order is normative: it defines bit-compatibility across implementations.
ER consumes one unit uniform per unordered pair (i < j) in row-major order.
WS consumes one uniform per lattice edge, traversed (i, i+j mod d) for
j = 1..k/2 with i outermost and increasing, plus index draws on rewire.
Weights consume one uniform per ordered pair (full d*d matrix, row-major)
before the Hadamard mask is applied.

Graphs are undirected (symmetric adjacency, zero diagonal) so the diffusive
coupling is a proper graph Laplacian flow. Each nonzero weight row is
normalized to sum exactly eps_c, making the coupled update a convex
combination and hence bounded; isolated rows stay all-zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimension, InvalidGraphSpec
from .keystream import KeyedStream

FAMILY_ER = "er"
FAMILY_WS = "ws"


@dataclass(frozen=True)
class GraphSpec:
    """Resolved graph family and parameters for one system."""

    family: str
    d: int
    p: float = 0.0        # ER edge probability
    k: int = 0            # WS even lattice degree
    beta: float = 0.0     # WS rewiring probability
    eps_c: float = 0.0    # coupling strength, each nonzero row of W sums to it

    def validate(self) -> None:
        if self.d < 1:
            raise InvalidDimension(f"node count must be >= 1, got {self.d}")
        if not 0.0 < self.eps_c < 1.0:
            raise InvalidGraphSpec(f"eps_c must be in (0, 1), got {self.eps_c}")
        if self.family == FAMILY_ER:
            if not 0.0 < self.p < 1.0:
                raise InvalidGraphSpec(f"ER p must be in (0, 1), got {self.p}")
        elif self.family == FAMILY_WS:
            if self.k % 2 != 0 or not 2 <= self.k < self.d:
                raise InvalidGraphSpec(
                    f"WS degree must be even with 2 <= k < d, got k={self.k}, d={self.d}"
                )
            if not 0.0 <= self.beta <= 1.0:
                raise InvalidGraphSpec(f"WS beta must be in [0, 1], got {self.beta}")
        else:
            raise InvalidGraphSpec(f"unknown graph family {self.family!r}")


def sample_er(d: int, p: float, stream: KeyedStream) -> np.ndarray:
    """Erdős–Rényi adjacency: edge (i<j) present iff its unit draw < p."""
    if d < 1:
        raise InvalidDimension(f"node count must be >= 1, got {d}")
    if not 0.0 <= p <= 1.0:
        raise InvalidGraphSpec(f"edge probability must be in [0, 1], got {p}")
    a = np.zeros((d, d), dtype=np.uint8)
    n_pairs = d * (d - 1) // 2
    if n_pairs:
        draws = stream.unit_block(n_pairs)
        pos = 0
        for i in range(d):
            row = draws[pos : pos + (d - 1 - i)]
            hits = np.nonzero(row < p)[0]
            for off in hits:
                j = i + 1 + int(off)
                a[i, j] = 1
                a[j, i] = 1
            pos += d - 1 - i
    return a


def sample_ws(d: int, k: int, beta: float, stream: KeyedStream) -> np.ndarray:
    """Watts–Strogatz adjacency: ring lattice with probabilistic rewiring.

    For each lattice edge, one uniform decides rewiring; a rewired far
    endpoint is drawn by rejection (index draws) until it is neither the
    source node nor an existing neighbor. A node already connected to all
    others keeps its lattice edge (no legal rewire target exists).
    """
    if d < 1:
        raise InvalidDimension(f"node count must be >= 1, got {d}")
    if k % 2 != 0 or not 2 <= k < d:
        raise InvalidGraphSpec(f"WS degree must be even with 2 <= k < d, got k={k}, d={d}")
    if not 0.0 <= beta <= 1.0:
        raise InvalidGraphSpec(f"rewiring probability must be in [0, 1], got {beta}")
    a = np.zeros((d, d), dtype=np.uint8)
    half = k // 2
    for i in range(d):
        for t in range(1, half + 1):
            j = (i + t) % d
            a[i, j] = 1
            a[j, i] = 1
    for i in range(d):
        for t in range(1, half + 1):
            if stream.unit_uniform() >= beta:
                continue
            j_old = (i + t) % d
            if int(a[i].sum()) >= d - 1:
                continue
            while True:
                c = stream.index(d)
                if c != i and not a[i, c]:
                    break
            a[i, j_old] = 0
            a[j_old, i] = 0
            a[i, c] = 1
            a[c, i] = 1
    return a


def sample_weights(adjacency: np.ndarray, eps_c: float, stream: KeyedStream) -> np.ndarray:
    """Coupling weights: unit-uniform matrix, Hadamard-masked by adjacency,
    each nonzero row rescaled to sum eps_c.

    Scaling is (u / row_sum) * eps_c with an exactly-rounded row sum, so a
    single-entry row lands on exactly eps_c and dense rows stay within a few
    ulp of it.
    """
    if not 0.0 < eps_c < 1.0:
        raise InvalidGraphSpec(f"coupling strength must be in (0, 1), got {eps_c}")
    d = adjacency.shape[0]
    u = stream.unit_block(d * d).reshape(d, d)
    w = u * adjacency
    for i in range(d):
        row_sum = math.fsum(w[i].tolist())
        if row_sum > 0.0:
            w[i] = (w[i] / row_sum) * eps_c
    return w


def sample_graph(spec: GraphSpec, stream: KeyedStream) -> tuple[np.ndarray, np.ndarray]:
    """Sample adjacency then weights from one stream, per the resolved spec."""
    spec.validate()
    if spec.family == FAMILY_ER:
        a = sample_er(spec.d, spec.p, stream)
    else:
        a = sample_ws(spec.d, spec.k, spec.beta, stream)
    w = sample_weights(a, spec.eps_c, stream)
    return a, w
