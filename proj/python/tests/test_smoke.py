import math

import numpy as np
import pytest

import steinlil


def test_fgn_covariance():
    m = steinlil.CovarianceModel.fgn(0.75)
    assert m.rho(0) == 1.0
    assert m.rho(1) == pytest.approx(math.sqrt(2) - 1, abs=1e-15)
    assert steinlil.critical_hurst(2) == 0.75


def test_partial_sum_variance_brute_force():
    m = steinlil.CovarianceModel.fgn(0.3)
    n = 40
    rho = np.array([[m.rho(abs(i - j)) for j in range(n)] for i in range(n)])
    assert steinlil.partial_sum_variance(m, 2, n) == pytest.approx(2 * (rho**2).sum(), rel=1e-12)


def test_sampling_is_deterministic():
    m = steinlil.CovarianceModel.fgn(0.6)
    a = steinlil.sample_paths(m, 32, seed=3, replicates=4)
    b = steinlil.sample_paths(m, 32, seed=3, replicates=4, threads=2)
    assert a.shape == (4, 32)
    assert np.array_equal(a, b)


def test_hermite_vectorized():
    x = np.linspace(-2, 2, 5)
    assert np.allclose(steinlil.hermite(3, x), x**3 - 3 * x)


def test_distances():
    r = steinlil.wasserstein_assignment(np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([[0.0, 0.0], [0.0, 1.0]]))
    assert r.value == pytest.approx(math.sqrt(2) / 2, abs=1e-12)
    assert steinlil.kolmogorov_vs_gaussian(np.array([0.0])).value == pytest.approx(0.5)
    with pytest.raises(steinlil.DomainError):
        steinlil.wasserstein_sorted(np.zeros(2), np.zeros(3))


def test_stein_factor():
    assert steinlil.stein_factor("uniform", 0.5) == pytest.approx((3 - 0.25) / 2, rel=1e-10)


def test_run_experiment():
    report = steinlil.run("variance-table", "regime = critical\n", n_max_log2=12)
    assert report["report"] == "variance-table"
    assert report["pass"] is True
    with pytest.raises(steinlil.RegimeError):
        steinlil.run("variance-table", hurst=0.9, regime="breuer-major")
