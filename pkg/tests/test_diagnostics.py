import hashlib
import math

import numpy as np
import pytest

from kcdm import IdenticalInputs, SynchronizationWarning
from kcdm.cipher import CipherOptions
from kcdm.diagnostics import avalanche, estimate_lyapunov
from kcdm.dynamics import MapKind, MapParams, SystemConfig
from kcdm.graphgen import GraphSpec
from kcdm.keystream import MasterKey, Nonce

from conftest import fixed_key, fixed_nonce

LN2 = math.log(2.0)
CAT_LAMBDA = math.log((3.0 + math.sqrt(5.0)) / 2.0)


def _single_node_config(kind, params):
    spec = GraphSpec(family="er", d=1, p=0.5, eps_c=0.1)
    return SystemConfig(graph=spec, map_kind=kind, params=params, d=1, noise_sigma=0.0)


def _w1():
    return np.zeros((1, 1))


def test_logistic_lyapunov_benchmark():
    cfg = _single_node_config(MapKind.LOGISTIC, MapParams(r=4.0))
    rep = estimate_lyapunov(cfg, _w1(), np.array([[0.2]]), T=10_000)
    assert rep.lambda_hat == pytest.approx(LN2, abs=0.05)
    assert rep.steps == 10_000
    assert rep.epsilon == 1e-8
    assert rep.lambda_hat == pytest.approx(float(np.mean(rep.per_step_logs)), rel=1e-12)


def test_tent_lyapunov_benchmark():
    cfg = _single_node_config(MapKind.TENT, MapParams(mu=0.5))
    rep = estimate_lyapunov(cfg, _w1(), np.array([[0.21]]), T=10_000)
    assert rep.lambda_hat == pytest.approx(LN2, abs=0.05)


def test_cat_lyapunov_benchmark():
    cfg = _single_node_config(MapKind.CAT, MapParams())
    rep = estimate_lyapunov(cfg, _w1(), np.array([[0.2, 0.7]]), T=10_000)
    assert rep.lambda_hat == pytest.approx(CAT_LAMBDA, abs=0.05)


def test_lyapunov_reproducible_bit_exactly():
    cfg = _single_node_config(MapKind.LOGISTIC, MapParams(r=3.93))
    a = estimate_lyapunov(cfg, _w1(), np.array([[0.4]]), T=500)
    b = estimate_lyapunov(cfg, _w1(), np.array([[0.4]]), T=500)
    assert a.lambda_hat == b.lambda_hat
    assert np.array_equal(a.per_step_logs, b.per_step_logs)


def test_lyapunov_doubling_t_converges():
    cfg = _single_node_config(MapKind.LOGISTIC, MapParams(r=4.0))
    a = estimate_lyapunov(cfg, _w1(), np.array([[0.2]]), T=10_000)
    b = estimate_lyapunov(cfg, _w1(), np.array([[0.2]]), T=20_000)
    assert abs(a.lambda_hat - b.lambda_hat) < 0.02


def test_lyapunov_discard_is_reported():
    cfg = _single_node_config(MapKind.LOGISTIC, MapParams(r=4.0))
    rep = estimate_lyapunov(cfg, _w1(), np.array([[0.2]]), T=100)
    assert rep.discarded == 10
    assert len(rep.per_step_logs) == 90
    assert math.isfinite(rep.lambda_hat_all)
    rep_all = estimate_lyapunov(cfg, _w1(), np.array([[0.2]]), T=100, discard=0)
    assert rep_all.discarded == 0
    assert len(rep_all.per_step_logs) == 100
    assert rep_all.lambda_hat == pytest.approx(rep.lambda_hat_all, rel=1e-12)


def test_synchronized_trajectories_yield_minus_inf_warning():
    # a perturbation below half an ulp of the state vanishes on addition, so
    # the two trajectories are bitwise identical from step 0 and the estimate
    # saturates at the -inf sentinel instead of raising
    cfg = _single_node_config(MapKind.TENT, MapParams(mu=0.5))
    x0 = np.array([[0.4]])
    with pytest.warns(SynchronizationWarning):
        rep = estimate_lyapunov(cfg, _w1(), x0, T=50, eps=1e-30)
    assert rep.lambda_hat == -math.inf


def test_avalanche_distinct_keys_decorrelated():
    key = fixed_key("avalanche-a")
    nonce = fixed_nonce("avalanche-a")
    flipped = bytearray(key.bytes)
    flipped[0] ^= 0x01
    rep = avalanche(key, nonce, MasterKey(bytes(flipped)), nonce, (64, 64))
    assert rep.elements == 4096
    assert abs(rep.pearson_r) < 0.05
    assert 0.2 < rep.mean_abs_diff < 1.2


def test_avalanche_nonce_flip_decorrelated():
    key = fixed_key("avalanche-b")
    nonce = fixed_nonce("avalanche-b")
    flipped = bytearray(nonce.bytes)
    flipped[-1] ^= 0x80
    rep = avalanche(key, nonce, key, Nonce(bytes(flipped)), (64, 64))
    assert abs(rep.pearson_r) < 0.05


def test_avalanche_identical_inputs_rejected():
    key = fixed_key("identical")
    nonce = fixed_nonce("identical")
    with pytest.raises(IdenticalInputs):
        avalanche(key, nonce, key, nonce, (16, 16))


def test_avalanche_honors_options():
    key = fixed_key("opts")
    nonce = fixed_nonce("opts")
    other = fixed_nonce("opts2")
    rep = avalanche(key, nonce, key, other, (32, 32), CipherOptions(map_kind=MapKind.TENT))
    assert abs(rep.pearson_r) < 0.2  # small sample, loose bound
    assert -1.0 <= rep.pearson_r <= 1.0
