"""Sweep auto-sampled systems and report their largest Lyapunov exponents.

Usage:
    python scripts/chaos_gate.py [--configs 200] [--d 32] [--steps 2000]
                                 [--workers 2] [--seed-tag chaos-gate]

Prints one line per config and a per-map summary; exits nonzero if any
exponent is not positive. This is the same sweep the acceptance suite runs,
exposed for range tuning and longer studies.
"""

import argparse
import hashlib
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from kcdm import MasterKey, Nonce
from kcdm.cipher import resolve_config
from kcdm.diagnostics import estimate_lyapunov

ARGS = None


def one_config(i):
    tag = ARGS.seed_tag.encode()
    key = MasterKey(hashlib.sha256(tag + b"-key" + i.to_bytes(8, "little")).digest())
    nonce = Nonce(hashlib.sha256(tag + b"-nonce" + i.to_bytes(8, "little")).digest()[:16])
    res = resolve_config(key, nonce, ARGS.d)
    cfg = replace(res.config, noise_sigma=0.0)
    rep = estimate_lyapunov(cfg, res.weights, res.x0, T=ARGS.steps)
    return i, res.config.map_kind.value, res.config.graph.family, rep.lambda_hat


def main():
    global ARGS
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--configs", type=int, default=200)
    parser.add_argument("--d", type=int, default=32)
    parser.add_argument("--steps", type=int, default=2000)
    parser.add_argument("--workers", type=int, default=2)
    parser.add_argument("--seed-tag", default="chaos-gate")
    ARGS = parser.parse_args()

    t0 = time.time()
    with ProcessPoolExecutor(max_workers=ARGS.workers) as pool:
        results = list(pool.map(one_config, range(ARGS.configs), chunksize=10))
    by_map = {}
    failures = []
    for i, kind, family, lam in results:
        print(f"{i:4d} {kind:9s} {family:2s} lambda={lam:+.4f}")
        by_map.setdefault(kind, []).append(lam)
        if not lam > 0.0:
            failures.append((i, kind, lam))
    print(f"\n{ARGS.configs} configs in {time.time() - t0:.1f}s")
    for kind in sorted(by_map):
        vals = np.array(by_map[kind])
        print(
            f"  {kind:9s} n={len(vals):3d} min={vals.min():+.4f} "
            f"mean={vals.mean():+.4f} max={vals.max():+.4f}"
        )
    if failures:
        print(f"FAILED: {len(failures)} non-positive exponents: {failures}")
        return 1
    print("all exponents positive")
    return 0


if __name__ == "__main__":
    sys.exit(main())
