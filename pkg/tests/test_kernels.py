import numpy as np
import pytest

from latcbc import kernels
from latcbc._accel import BACKEND, HAVE_NUMBA

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def _reference_sweep(excess, table, cands):
    N = len(excess)
    return np.array([sum(excess[n] * table[n * g % N] for n in range(N)) for g in cands])


def _reference_corr(x, y):
    M = len(x)
    return np.array([sum(x[i] * y[(i + k) % M] for i in range(M)) for k in range(M)])


@pytest.fixture
def data():
    rng = np.random.default_rng(7)
    N = 37
    return rng.normal(size=N), rng.normal(size=N), np.arange(1, N)


def test_numpy_sweep(data):
    excess, table, cands = data
    np.testing.assert_allclose(kernels.sweep_numpy(excess, table, cands),
                               _reference_sweep(excess, table, cands), rtol=1e-12, atol=1e-12)


@needs_numba
def test_numba_sweep(data):
    excess, table, cands = data
    np.testing.assert_allclose(kernels.sweep_numba(excess, table, cands),
                               _reference_sweep(excess, table, cands), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("fn", ["correlate_numpy", "correlate_numba", "correlate_fft"])
def test_correlations(data, fn):
    f = getattr(kernels, fn)
    if f is None:
        pytest.skip("numba not installed")
    x, y, _ = data
    np.testing.assert_allclose(f(x, y), _reference_corr(x, y), rtol=1e-10, atol=1e-12)


@needs_numba
def test_backends_agree_on_large_input():
    rng = np.random.default_rng(3)
    N = 2003
    excess, table = rng.normal(size=N), rng.normal(size=N)
    cands = np.arange(1, N)
    np.testing.assert_allclose(kernels.sweep_numba(excess, table, cands),
                               kernels.sweep_numpy(excess, table, cands), rtol=1e-9, atol=1e-10)


def test_backend_flag():
    assert BACKEND in ("numba", "numpy")
    expected = kernels.sweep_numba if BACKEND == "numba" else kernels.sweep_numpy
    assert kernels.sweep is expected
