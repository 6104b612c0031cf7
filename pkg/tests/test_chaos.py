import numpy as np
import pytest

from seqgauss import chaos, core, measure, wick

M, D = 2, 3
DIMS = core.TruncationDims(M, D)


def random_cov(rng, d=D):
    g = rng.standard_normal((d, d))
    return core.Covariance(g @ g.T / d + 0.5 * np.eye(d))


def random_expansion(rng, max_degree=2):
    kernels = {0: wick.SymKernel.constant(float(rng.standard_normal()), M, D)}
    for n in range(1, max_degree + 1):
        kernels[n] = wick.polarize([0.7 * rng.standard_normal((M, D)) for _ in range(n)])
    return chaos.ChaosExpansion(kernels=kernels)


def coupled_cov():
    a = np.eye(4)
    a[0, 1] = a[1, 0] = 0.5
    return core.Covariance(a)


def test_worked_example_single_vector():
    cov = coupled_cov()
    rng = np.random.default_rng(0)
    f = rng.standard_normal((3, 4))
    e1 = np.array([1.0, 0.0, 0.0, 0.0])
    out = chaos.cond_exp_monomial(f, [e1], cov)
    assert np.allclose(out, core.bullet(f[:, 0] + 0.5 * f[:, 1], e1), atol=1e-12)


def test_worked_example_two_vectors():
    cov = coupled_cov()
    rng = np.random.default_rng(1)
    f = rng.standard_normal((3, 4))
    e1 = np.array([1.0, 0.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0, 0.0])
    out = chaos.cond_exp_monomial(f, [e1, e2], cov)
    expected = core.bullet(f[:, 0], e1) + core.bullet(f[:, 1], e2)
    assert np.allclose(out, expected, atol=1e-12)


def test_worked_example_later_coordinates_untouched():
    cov = coupled_cov()
    rng = np.random.default_rng(2)
    f = rng.standard_normal((3, 4))
    e3 = np.array([0.0, 0.0, 1.0, 0.0])
    out = chaos.cond_exp_monomial(f, [e3], cov)
    assert np.allclose(out, core.bullet(f[:, 2], e3), atol=1e-12)


def test_full_span_projection_is_identity():
    rng = np.random.default_rng(3)
    cov = random_cov(rng)
    f = rng.standard_normal((M, D))
    out = chaos.cond_exp_monomial(f, list(np.eye(D)), cov)
    assert np.allclose(out, f, atol=1e-12)


def test_cond_exp_monomial_degenerate_span_rejected():
    cov = core.Covariance.identity(D)
    with pytest.raises(ValueError):
        chaos.cond_exp_monomial(np.ones((M, D)), [np.zeros(D)], cov)


def test_degree_one_additivity():
    rng = np.random.default_rng(4)
    for _ in range(20):
        cov = random_cov(rng)
        f = rng.standard_normal((M, D))
        basis = core.gram_schmidt_a(list(rng.standard_normal((2, D))), cov)
        joint = chaos.cond_exp_monomial(f, basis, cov)
        separate = sum(chaos.cond_exp_monomial(f, [x], cov) for x in basis)
        assert np.allclose(joint, separate, atol=1e-10)


def test_span_invariance():
    rng = np.random.default_rng(5)
    for _ in range(20):
        cov = random_cov(rng)
        f = rng.standard_normal((M, D))
        xs = list(rng.standard_normal((2, D)))
        mix = rng.standard_normal((2, 2)) + 2.0 * np.eye(2)
        ys = [mix[0, 0] * xs[0] + mix[0, 1] * xs[1], mix[1, 0] * xs[0] + mix[1, 1] * xs[1]]
        assert np.allclose(
            chaos.cond_exp_monomial(f, xs, cov),
            chaos.cond_exp_monomial(f, ys, cov),
            atol=1e-10,
        )


def test_cond_exp_monomial_matches_gaussian_regression_oracle():
    # independent route: regress <f, W> onto the generating observables
    # h_i bullet x_k by solving against their weighted Gram matrix
    rng = np.random.default_rng(42)
    for _ in range(10):
        m, d, q = 3, 5, 2
        g = rng.standard_normal((d, d))
        cov = core.Covariance(g @ g.T / d + 0.5 * np.eye(d))
        f = rng.standard_normal((m, d))
        xs = [rng.standard_normal(d) for _ in range(q)]
        obs = [core.bullet(np.eye(m)[i], x) for x in xs for i in range(m)]
        c = np.array([core.inner_a(f, o, cov) for o in obs])
        gram = np.array([[core.inner_a(a, b, cov) for b in obs] for a in obs])
        coef = np.linalg.solve(gram, c)
        kernel = sum(w * o for w, o in zip(coef, obs))
        assert np.allclose(chaos.cond_exp_monomial(f, xs, cov), kernel, atol=1e-12)


def test_conditioning_set_from_vectors_is_orthonormal():
    rng = np.random.default_rng(6)
    cov = random_cov(rng)
    cond = chaos.ConditioningSet.from_vectors(list(rng.standard_normal((3, M, D))), cov)
    cond.validate(cov)
    assert len(cond.basis) == 3


def test_cond_exp_chaos_rejects_non_orthonormal_set():
    cov = core.Covariance.identity(D)
    phi = np.zeros((M, D))
    phi[0, 0] = 2.0
    cond = chaos.ConditioningSet(basis=(phi,))
    expansion = chaos.ChaosExpansion(kernels={1: wick.SymKernel.rank_one(phi, 1)})
    with pytest.raises(ValueError, match="orthonormal"):
        chaos.cond_exp_chaos(expansion, cond, cov)


def test_cond_exp_chaos_fixes_kernels_in_span():
    rng = np.random.default_rng(7)
    cov = random_cov(rng)
    cond = chaos.ConditioningSet.from_vectors(list(rng.standard_normal((2, M, D))), cov)
    psi = 1.3 * cond.basis[0] - 0.4 * cond.basis[1]
    expansion = chaos.ChaosExpansion(kernels={2: wick.SymKernel.rank_one(psi, 2)})
    out = chaos.cond_exp_chaos(expansion, cond, cov)
    assert np.allclose(out.kernels[2].terms[0].base, psi, atol=1e-12)


def test_cond_exp_chaos_annihilates_orthogonal_kernels():
    cov = core.Covariance.identity(D)
    psi = np.zeros((M, D))
    psi[0, 0] = 1.0
    phi = np.zeros((M, D))
    phi[1, 2] = 1.0
    cond = chaos.ConditioningSet(basis=(psi,))
    expansion = chaos.ChaosExpansion(kernels={3: wick.SymKernel.rank_one(phi, 3)})
    out = chaos.cond_exp_chaos(expansion, cond, cov)
    assert not out.kernels[3].terms[0].base.any()
    # evaluation of the projected functional vanishes identically
    w = np.random.default_rng(8).standard_normal((M, D))
    assert chaos.eval_expansion(out, cov, w) == 0.0


def test_cond_exp_chaos_keeps_constants():
    rng = np.random.default_rng(9)
    cov = random_cov(rng)
    cond = chaos.ConditioningSet.from_vectors([rng.standard_normal((M, D))], cov)
    expansion = chaos.ChaosExpansion(kernels={0: wick.SymKernel.constant(4.2, M, D)})
    out = chaos.cond_exp_chaos(expansion, cond, cov)
    assert out.kernels[0].terms[0].coeff == 4.2


def test_cond_exp_chaos_idempotent_and_contractive():
    rng = np.random.default_rng(10)
    for _ in range(20):
        cov = random_cov(rng)
        expansion = random_expansion(rng)
        cond = chaos.ConditioningSet.from_vectors(
            list(rng.standard_normal((2, M, D))), cov
        )
        once = chaos.cond_exp_chaos(expansion, cond, cov)
        twice = chaos.cond_exp_chaos(once, cond, cov)
        for n in once.degrees:
            for t1, t2 in zip(once.kernels[n].terms, twice.kernels[n].terms):
                assert np.allclose(t1.base, t2.base, atol=1e-10)
        assert chaos.chaos_norm(once, cov) <= chaos.chaos_norm(expansion, cov) + 1e-10


def test_chaos_and_monomial_projections_agree_for_degree_one():
    rng = np.random.default_rng(11)
    for _ in range(10):
        cov = random_cov(rng)
        f = rng.standard_normal((M, D))
        xs = list(rng.standard_normal((2, D)))
        basis = core.gram_schmidt_a(xs, cov)
        h_basis = np.eye(M)
        cond = chaos.ConditioningSet(
            basis=tuple(core.bullet(h_basis[i], x) for i in range(M) for x in basis)
        )
        expansion = chaos.ChaosExpansion(kernels={1: wick.SymKernel.rank_one(f, 1)})
        conditioned = chaos.cond_exp_chaos(expansion, cond, cov)
        kernel_sum = sum(t.coeff * t.base for t in conditioned.kernels[1].terms)
        assert np.allclose(kernel_sum, chaos.cond_exp_monomial(f, xs, cov), atol=1e-10)


def test_eval_expansion_low_degrees():
    rng = np.random.default_rng(12)
    cov = random_cov(rng)
    w = rng.standard_normal((M, D))
    const = chaos.ChaosExpansion(kernels={0: wick.SymKernel.constant(2.5, M, D)})
    assert chaos.eval_expansion(const, cov, w) == 2.5
    phi = rng.standard_normal((M, D))
    linear = chaos.ChaosExpansion(kernels={1: wick.SymKernel.rank_one(phi, 1)})
    assert chaos.eval_expansion(linear, cov, w) == pytest.approx(
        measure.pairing(phi, w), rel=1e-12
    )


def test_expansion_mean_is_constant_coefficient():
    rng = np.random.default_rng(13)
    cov = random_cov(rng)
    batch = measure.sample_mu_a(cov, DIMS, 100_000, seed=21)
    expansion = random_expansion(rng)
    values = chaos.eval_expansion(expansion, cov, batch.samples)
    se = values.std(ddof=1) / np.sqrt(batch.count)
    assert abs(values.mean() - expansion.kernels[0].terms[0].coeff) < 4.0 * se


def test_chaos_inner_structure():
    from math import factorial

    rng = np.random.default_rng(14)
    cov = random_cov(rng)
    phi, psi = rng.standard_normal((2, M, D))
    e2 = chaos.ChaosExpansion(kernels={2: wick.SymKernel.rank_one(phi, 2)})
    e3 = chaos.ChaosExpansion(kernels={3: wick.SymKernel.rank_one(psi, 3)})
    assert chaos.chaos_inner(e2, e3, cov) == 0.0
    # norm identity: n! * ||phi||_A^(2n)
    for n in range(1, 4):
        e = chaos.ChaosExpansion(kernels={n: wick.SymKernel.rank_one(phi, n)})
        assert chaos.chaos_inner(e, e, cov) == pytest.approx(
            factorial(n) * core.inner_a(phi, phi, cov) ** n, rel=1e-12
        )


def test_chaos_inner_matches_monte_carlo():
    rng = np.random.default_rng(15)
    cov = random_cov(rng)
    batch = measure.sample_mu_a(cov, DIMS, 100_000, seed=22)
    f_exp = random_expansion(rng)
    g_exp = random_expansion(rng)
    prod = chaos.eval_expansion(f_exp, cov, batch.samples) * chaos.eval_expansion(
        g_exp, cov, batch.samples
    )
    se = prod.std(ddof=1) / np.sqrt(batch.count)
    assert abs(prod.mean() - chaos.chaos_inner(f_exp, g_exp, cov)) < 4.0 * se


def test_mc_cond_check_degree_one_with_unit_test_function():
    rng = np.random.default_rng(16)
    cov = random_cov(rng)
    batch = measure.sample_mu_a(cov, DIMS, 100_000, seed=23)
    cond = chaos.ConditioningSet.from_vectors(list(rng.standard_normal((2, M, D))), cov)
    expansion = chaos.ChaosExpansion(
        kernels={1: wick.SymKernel.rank_one(rng.standard_normal((M, D)), 1)}
    )
    est = chaos.mc_cond_check(expansion, cond, cov, lambda c: np.ones(c.shape[0]), batch)
    assert abs(est.value) <= 4.0 * est.std_error + 1e-12


def test_mc_cond_check_measurable_expansion_has_zero_residual():
    rng = np.random.default_rng(17)
    cov = random_cov(rng)
    batch = measure.sample_mu_a(cov, DIMS, 5_000, seed=24)
    cond = chaos.ConditioningSet.from_vectors(list(rng.standard_normal((2, M, D))), cov)
    expansion = chaos.ChaosExpansion(
        kernels={2: wick.SymKernel.rank_one(cond.basis[0], 2)}
    )
    est = chaos.mc_cond_check(
        expansion, cond, cov, lambda c: c[:, 0] * c[:, 1], batch
    )
    # the kernel is reproduced by the projection up to machine rounding,
    # so the per-sample residual is zero at rounding level rather than bitwise
    assert abs(est.value) < 1e-12
    assert est.std_error < 1e-12


def test_mc_cond_check_quadratic_expansions():
    rng = np.random.default_rng(18)
    cov = random_cov(rng)
    batch = measure.sample_mu_a(cov, DIMS, 100_000, seed=25)
    cond = chaos.ConditioningSet.from_vectors(list(rng.standard_normal((2, M, D))), cov)
    for _ in range(5):
        expansion = random_expansion(rng)
        est = chaos.mc_cond_check(
            expansion, cond, cov, lambda c: c[:, 0] ** 2 - c[:, 0] * c[:, 1], batch
        )
        assert abs(est.value) <= 4.0 * est.std_error + 1e-12


def test_mc_cond_check_scalar_test_function():
    rng = np.random.default_rng(19)
    cov = random_cov(rng)
    batch = measure.sample_mu_a(cov, DIMS, 2_000, seed=26)
    cond = chaos.ConditioningSet.from_vectors([rng.standard_normal((M, D))], cov)
    expansion = random_expansion(rng, max_degree=1)
    est_vec = chaos.mc_cond_check(expansion, cond, cov, lambda c: c[:, 0], batch)
    est_scalar = chaos.mc_cond_check(expansion, cond, cov, lambda row: row[0], batch)
    assert est_vec.value == pytest.approx(est_scalar.value, rel=1e-12, abs=1e-15)
