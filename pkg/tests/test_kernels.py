"""Backend kernels: dual-path equivalence, tie-breaking, and env selection."""

import os
import subprocess
import sys

import numpy as np
import pytest

from choicewelfare import _kernels as kernels

numba_active = pytest.mark.skipif(
    kernels.active_backend() != "numba", reason="numba backend not active"
)


def _run_with_backend(value: str) -> subprocess.CompletedProcess:
    env = dict(os.environ, CHOICEWELFARE_BACKEND=value)
    return subprocess.run(
        [sys.executable, "-c", "import choicewelfare; print(choicewelfare.active_backend())"],
        env=env,
        capture_output=True,
        text=True,
    )


def test_active_backend_is_known():
    assert kernels.active_backend() in ("numba", "numpy")


def test_env_var_forces_numpy():
    result = _run_with_backend("numpy")
    assert result.returncode == 0
    assert result.stdout.strip() == "numpy"


def test_env_var_rejects_unknown_value():
    result = _run_with_backend("cuda")
    assert result.returncode != 0
    assert "CHOICEWELFARE_BACKEND" in result.stderr


def test_warm_up_is_idempotent():
    kernels.warm_up()
    kernels.warm_up()


def test_argmax_tally_counts_sum_to_rows():
    rng = np.random.default_rng(1)
    u = rng.normal(size=4)
    errors = rng.normal(size=(1000, 4))
    counts = kernels.argmax_tally(u, errors)
    assert counts.shape == (4,)
    assert counts.sum() == 1000
    assert np.all(counts >= 0)


def test_argmax_tally_lowest_index_tie_break():
    u = np.array([1.0, 1.0, 0.0])
    errors = np.zeros((7, 3))
    counts = kernels.argmax_tally(u, errors)
    assert list(counts) == [7, 0, 0]


def test_argmax_tally_matches_plain_argmax():
    rng = np.random.default_rng(2)
    for _ in range(10):
        k = int(rng.integers(2, 6))
        n = int(rng.integers(1, 500))
        u = rng.normal(size=k)
        errors = rng.normal(size=(n, k))
        expected = np.bincount(np.argmax(u + errors, axis=1), minlength=k)
        assert np.array_equal(kernels.argmax_tally(u, errors), expected)


@numba_active
def test_argmax_tally_backends_agree():
    rng = np.random.default_rng(3)
    for _ in range(20):
        k = int(rng.integers(2, 7))
        n = int(rng.integers(1, 2000))
        u = rng.normal(size=k)
        errors = rng.normal(size=(n, k))
        a = kernels.argmax_tally_numba(u, errors)
        b = kernels.argmax_tally_numpy(u, errors)
        assert np.array_equal(a, b)


def test_logit_welfare_curve_matches_direct_softmax():
    rng = np.random.default_rng(4)
    weights = rng.dirichlet(np.ones(5))
    utilities = rng.normal(size=(5, 4))
    q_values = np.array([0.0, 0.3, 1.7, 9.0])
    curve = kernels.logit_welfare_curve(weights, utilities, q_values)
    for qi, q in enumerate(q_values):
        z = q * utilities
        z = z - z.max(axis=1, keepdims=True)
        e = np.exp(z)
        p = e / e.sum(axis=1, keepdims=True)
        direct = float(np.sum(weights * np.sum(utilities * p, axis=1)))
        assert abs(curve[qi] - direct) < 1e-12


def test_logit_welfare_curve_q_zero_is_uniform_mean():
    rng = np.random.default_rng(5)
    weights = rng.dirichlet(np.ones(3))
    utilities = rng.normal(size=(3, 6))
    curve = kernels.logit_welfare_curve(weights, utilities, np.array([0.0]))
    assert abs(curve[0] - np.sum(weights * utilities.mean(axis=1))) < 1e-12


def test_logit_welfare_curve_overflow_safe():
    weights = np.array([1.0])
    utilities = np.array([[0.0, 500.0, 1000.0]])
    curve = kernels.logit_welfare_curve(weights, utilities, np.array([1e6]))
    assert np.isfinite(curve[0])
    assert abs(curve[0] - 1000.0) < 1e-9


@numba_active
def test_logit_welfare_curve_backends_agree():
    rng = np.random.default_rng(6)
    for _ in range(10):
        n_types = int(rng.integers(1, 8))
        k = int(rng.integers(1, 6))
        weights = rng.dirichlet(np.ones(n_types))
        utilities = rng.normal(size=(n_types, k))
        q_values = np.sort(rng.uniform(0.0, 10.0, size=12))
        a = kernels.logit_welfare_curve_numba(weights, utilities, q_values)
        b = kernels.logit_welfare_curve_numpy(weights, utilities, q_values)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-13)


def test_count_below_threshold_strictness():
    diffs = np.array([-1.0, 0.0, 1.0])
    assert kernels.count_below_threshold(diffs, 0.0, True) == 1
    assert kernels.count_below_threshold(diffs, 0.0, False) == 2


@numba_active
def test_count_below_threshold_backends_agree():
    rng = np.random.default_rng(7)
    diffs = rng.normal(size=5000)
    for threshold in (-0.5, 0.0, 1.3):
        for strict in (True, False):
            a = kernels.count_below_threshold_numba(diffs, threshold, strict)
            b = kernels.count_below_threshold_numpy(diffs, threshold, strict)
            assert int(a) == int(b)
