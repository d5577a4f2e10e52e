import numpy as np
import pytest

from horizonbattery._kernels import (
    HAS_NUMBA,
    backend_name,
    mode_overlap_series_numba,
    mode_overlap_series_numpy,
    quadratic_form_series_numba,
    quadratic_form_series_numpy,
)


@pytest.fixture(scope="module")
def problem():
    rng = np.random.default_rng(7)
    L = 60
    A = rng.standard_normal((L, L))
    M = (A + A.T) / 2
    eigs = np.sort(rng.standard_normal(L)) * 3.0
    times = np.arange(0.0, 5.0, 0.01)
    w = rng.standard_normal(L) * 0.2
    return M, eigs, times, w


def test_quadratic_form_backends_agree(problem):
    M, eigs, times, _ = problem
    a = quadratic_form_series_numpy(M, eigs, times)
    if HAS_NUMBA:
        b = quadratic_form_series_numba(M, eigs, times)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_mode_overlap_backends_agree(problem):
    _, eigs, times, w = problem
    a = mode_overlap_series_numpy(w, eigs, times)
    if HAS_NUMBA:
        b = mode_overlap_series_numba(w, eigs, times)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)


def test_quadratic_form_against_direct_sum(problem):
    M, eigs, times, _ = problem
    out = quadratic_form_series_numpy(M, eigs, times)
    for ti in (0, 17, len(times) - 1):
        t = times[ti]
        direct = np.sum(M * np.cos(np.subtract.outer(eigs, eigs) * t))
        assert out[ti] == pytest.approx(direct, rel=1e-10)


def test_mode_overlap_against_direct_sum(problem):
    _, eigs, times, w = problem
    out = mode_overlap_series_numpy(w, eigs, times)
    for ti in (0, 23, len(times) - 1):
        t = times[ti]
        direct = abs(np.sum(w * np.exp(-1j * eigs * t))) ** 2
        assert out[ti] == pytest.approx(direct, rel=1e-10, abs=1e-14)


def test_chunking_invariance(problem):
    M, eigs, times, _ = problem
    a = quadratic_form_series_numpy(M, eigs, times, chunk=7)
    b = quadratic_form_series_numpy(M, eigs, times, chunk=10**6)
    np.testing.assert_allclose(a, b, rtol=1e-11)


def test_env_flag_selects_numpy_backend():
    import os
    import subprocess
    import sys

    code = (
        "import horizonbattery._kernels as k; "
        "print(k.backend_name(), k.quadratic_form_series is k.quadratic_form_series_numpy)"
    )
    env = dict(os.environ, HORIZONBATTERY_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "numpy True"


def test_backend_name():
    assert backend_name() in ("numba", "numpy")
