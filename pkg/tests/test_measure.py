import itertools
from math import factorial

import numpy as np
import pytest

from seqgauss import core, measure

M, D = 2, 3
DIMS = core.TruncationDims(M, D)


def random_cov(rng, d=D):
    g = rng.standard_normal((d, d))
    return core.Covariance(g @ g.T / d + 0.5 * np.eye(d))


def brute_isserlis(phis, cov):
    """Independent oracle: explicit enumeration of perfect matchings."""
    n = len(phis)
    if n % 2 == 1:
        return 0.0
    if n == 0:
        return 1.0

    def pairings(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for i, other in enumerate(rest):
            for tail in pairings(rest[:i] + rest[i + 1 :]):
                yield [(first, other)] + tail

    total = 0.0
    for pairing in pairings(list(range(n))):
        prod = 1.0
        for i, j in pairing:
            prod *= core.inner_a(phis[i], phis[j], cov)
        total += prod
    return total


def test_same_seed_reproduces_batch_bitwise():
    rng = np.random.default_rng(0)
    cov = random_cov(rng)
    b1 = measure.sample_mu_a(cov, DIMS, 200, seed=99)
    b2 = measure.sample_mu_a(cov, DIMS, 200, seed=99)
    assert np.array_equal(b1.samples, b2.samples)
    b3 = measure.sample_mu_a(cov, DIMS, 200, seed=100)
    assert not np.array_equal(b1.samples, b3.samples)


def test_samples_are_cholesky_transformed_normals():
    # pins the construction contract W = Z L^T
    cov = core.Covariance([[2.0, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 0.5]])
    batch = measure.sample_mu_a(cov, DIMS, 50, seed=7)
    z = np.random.default_rng(7).standard_normal((50, M, D))
    assert np.array_equal(batch.samples, z @ cov.chol.T)


def test_sample_count_validation():
    cov = core.Covariance.identity(D)
    with pytest.raises(ValueError, match="count"):
        measure.sample_mu_a(cov, DIMS, 0, seed=1)
    with pytest.raises(ValueError, match="dims"):
        measure.sample_mu_a(cov, core.TruncationDims(2, 4), 10, seed=1)


def test_pairing_basics():
    rng = np.random.default_rng(1)
    w = rng.standard_normal((M, D))
    assert measure.pairing(np.zeros((M, D)), w) == 0.0
    phi, psi = rng.standard_normal((2, M, D))
    a, b = 1.7, -0.3
    assert measure.pairing(a * phi + b * psi, w) == pytest.approx(
        a * measure.pairing(phi, w) + b * measure.pairing(psi, w), rel=1e-12
    )
    h, g = rng.standard_normal((2, M))
    x, y = rng.standard_normal((2, D))
    assert measure.pairing(core.bullet(h, x), core.bullet(g, y)) == pytest.approx(
        float(h @ g) * float(x @ y), rel=1e-12
    )


def test_pairing_variance_matches_weighted_norm():
    rng = np.random.default_rng(2)
    cov = random_cov(rng)
    batch = measure.sample_mu_a(cov, DIMS, 100_000, seed=11)
    phi = rng.standard_normal((M, D))
    p = measure.pairings(phi, batch)
    var = p.var(ddof=1)
    se = var * np.sqrt(2.0 / (batch.count - 1))
    assert abs(var - core.inner_a(phi, phi, cov)) < 4.0 * se


def test_unit_frobenius_identity_weight_variance_is_one():
    rng = np.random.default_rng(3)
    cov = core.Covariance.identity(D)
    batch = measure.sample_mu_a(cov, DIMS, 100_000, seed=12)
    phi = rng.standard_normal((M, D))
    phi /= np.linalg.norm(phi)
    p = measure.pairings(phi, batch)
    var = p.var(ddof=1)
    se = var * np.sqrt(2.0 / (batch.count - 1))
    assert abs(var - 1.0) < 4.0 * se


def test_char_function_at_zero_is_exact():
    cov = core.Covariance.identity(D)
    batch = measure.sample_mu_a(cov, DIMS, 100, seed=13)
    est = measure.char_function_mc(np.zeros((M, D)), batch)
    assert est.value == 1.0 + 0.0j
    assert est.std_error == 0.0 + 0.0j


def test_char_function_matches_gaussian_transform():
    rng = np.random.default_rng(4)
    cov = random_cov(rng)
    batch = measure.sample_mu_a(cov, DIMS, 100_000, seed=14)
    phi = 0.6 * rng.standard_normal((M, D))
    est = measure.char_function_mc(phi, batch)
    target = float(np.exp(-0.5 * core.inner_a(phi, phi, cov)))
    assert abs(est.value.real - target) < 4.0 * est.std_error.real
    assert abs(est.value.imag) < 4.0 * est.std_error.imag


def test_char_function_empty_batch_rejected():
    batch = measure.SampleBatch(samples=np.zeros((0, M, D)), seed=0, count=0)
    with pytest.raises(ValueError, match="empty"):
        measure.char_function_mc(np.ones((M, D)), batch)


def test_isserlis_pair_and_odd_and_quartic():
    rng = np.random.default_rng(5)
    cov = random_cov(rng)
    phi, psi, chi = rng.standard_normal((3, M, D))
    assert measure.isserlis_moment([phi, psi], cov) == pytest.approx(
        core.inner_a(phi, psi, cov), rel=1e-12
    )
    assert measure.isserlis_moment([phi, psi, chi], cov) == 0.0
    assert measure.isserlis_moment([phi] * 4, cov) == pytest.approx(
        3.0 * core.inner_a(phi, phi, cov) ** 2, rel=1e-12
    )
    assert measure.isserlis_moment([], cov) == 1.0


def test_isserlis_matches_brute_force_enumeration():
    rng = np.random.default_rng(6)
    cov = random_cov(rng)
    for n in (2, 4, 6):
        phis = list(0.8 * rng.standard_normal((n, M, D)))
        assert measure.isserlis_moment(phis, cov) == pytest.approx(
            brute_isserlis(phis, cov), rel=1e-11, abs=1e-11
        )


def test_isserlis_factor_limit():
    cov = core.Covariance.identity(D)
    with pytest.raises(ValueError, match="factors"):
        measure.isserlis_moment([np.ones((M, D))] * 12, cov)


def test_mc_product_moments_match_oracle():
    rng = np.random.default_rng(7)
    cov = random_cov(rng)
    batch = measure.sample_mu_a(cov, DIMS, 100_000, seed=15)
    for n in (2, 3, 4):
        phis = [0.8 * rng.standard_normal((M, D)) for _ in range(n)]
        prod = np.ones(batch.count)
        for p in phis:
            prod = prod * measure.pairings(p, batch)
        mean = prod.mean()
        se = prod.std(ddof=1) / np.sqrt(batch.count)
        assert abs(mean - measure.isserlis_moment(phis, cov)) < 4.0 * se


def wick_pair_expectation(phi, n, psi, m, cov):
    """E[:phi^n: :psi^m:] by expanding Wick monomials into plain monomials
    (alternating trace-insertion sum) and applying the pair oracle."""
    na2 = core.inner_a(phi, phi, cov)
    nb2 = core.inner_a(psi, psi, cov)
    total = 0.0
    for k in range(n // 2 + 1):
        ck = (-1) ** k * factorial(n) / (2**k * factorial(k) * factorial(n - 2 * k))
        for l in range(m // 2 + 1):
            cl = (-1) ** l * factorial(m) / (2**l * factorial(l) * factorial(m - 2 * l))
            factors = [phi] * (n - 2 * k) + [psi] * (m - 2 * l)
            total += ck * cl * na2**k * nb2**l * measure.isserlis_moment(factors, cov)
    return total


def test_exact_wick_orthogonality_via_oracle():
    rng = np.random.default_rng(8)
    for _ in range(5):
        cov = random_cov(rng)
        phi, psi = rng.standard_normal((2, M, D))
        for n, m in itertools.product(range(5), repeat=2):
            val = wick_pair_expectation(phi, n, psi, m, cov)
            target = factorial(n) * core.inner_a(phi, psi, cov) ** n if n == m else 0.0
            assert val == pytest.approx(target, abs=1e-9 * max(1.0, abs(target)))


def test_pushforward_check_passes_for_orthonormal_family():
    rng = np.random.default_rng(9)
    cov = random_cov(rng)
    batch = measure.sample_mu_a(cov, DIMS, 100_000, seed=16)
    raw = list(rng.standard_normal((3, M, D)))
    basis = core.gram_schmidt(raw, lambda f, g: core.inner_a(f, g, cov))
    report = measure.pushforward_check(basis, batch, cov)
    assert report.passed, report.failures
    assert report.means.shape == (3,)


def test_pushforward_identity_weight_unit_entries():
    cov = core.Covariance.identity(D)
    batch = measure.sample_mu_a(cov, DIMS, 100_000, seed=17)
    basis = []
    for i, k in ((0, 0), (1, 1), (0, 2)):
        phi = np.zeros((M, D))
        phi[i, k] = 1.0
        basis.append(phi)
    report = measure.pushforward_check(basis, batch, cov)
    assert report.passed, report.failures


def test_pushforward_check_rejects_non_orthonormal_input():
    cov = core.Covariance.identity(D)
    batch = measure.sample_mu_a(cov, DIMS, 100, seed=18)
    phi = np.zeros((M, D))
    phi[0, 0] = 2.0
    with pytest.raises(ValueError, match="orthonormal"):
        measure.pushforward_check([phi], batch, cov)


def test_product_moments_factorize_for_orthonormal_family():
    rng = np.random.default_rng(10)
    cov = random_cov(rng)
    batch = measure.sample_mu_a(cov, DIMS, 100_000, seed=19)
    basis = core.gram_schmidt(
        list(rng.standard_normal((2, M, D))), lambda f, g: core.inner_a(f, g, cov)
    )
    p0 = measure.pairings(basis[0], batch)
    p1 = measure.pairings(basis[1], batch)
    joint = (p0**2) * (p1**2)
    se = joint.std(ddof=1) / np.sqrt(batch.count)
    assert abs(joint.mean() - (p0**2).mean() * (p1**2).mean()) < 6.0 * se


def test_mc_estimate_rejects_negative_errors():
    with pytest.raises(ValueError):
        measure.McEstimate(value=0.0, std_error=-1.0, count=10)
