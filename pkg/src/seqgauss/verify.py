"""Randomized invariant suites behind the ``verify`` CLI command.

Each suite returns a list of named check results; a check that raises is
reported as failed with the exception text.  Seeds make every suite
deterministic, ``tol_scale`` loosens or tightens all stated tolerances by
a common factor, and ``samples`` sizes the Monte Carlo suites.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from . import chaos as chaos_mod
from . import closure as closure_mod
from . import core, hermite, measure, wick

__all__ = ["CheckResult", "SUITE_NAMES", "run_suite"]

SUITE_NAMES = ("core", "hermite", "wick", "measure", "chaos", "closure")

DEFAULT_SAMPLES = 100_000


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


class _Suite:
    """Collects named checks, turning exceptions into failures."""

    def __init__(self) -> None:
        self.results: list[CheckResult] = []

    def check(self, name: str, fn) -> None:
        try:
            detail = fn()
            self.results.append(CheckResult(name, True, detail or ""))
        except Exception as exc:  # noqa: BLE001 - report, don't crash the runner
            self.results.append(CheckResult(name, False, str(exc)))


def _assert_close(value, target, tol, label: str) -> None:
    err = float(np.max(np.abs(np.asarray(value) - np.asarray(target))))
    if err > tol:
        raise AssertionError(f"{label}: error {err:.3e} exceeds {tol:.1e}")


def _random_cov(rng: np.random.Generator, d: int) -> core.Covariance:
    g = rng.standard_normal((d, d))
    return core.Covariance(g @ g.T / d + 0.5 * np.eye(d))


def _random_seqvecs(rng: np.random.Generator, count: int, m: int, d: int) -> list[np.ndarray]:
    return [rng.standard_normal((m, d)) for _ in range(count)]


# ---------------------------------------------------------------------------
# core


def suite_core(seed: int = 0, tol_scale: float = 1.0, samples: int = DEFAULT_SAMPLES):
    rng = np.random.default_rng(seed)
    s = _Suite()

    def bilinear_identities():
        for _ in range(50):
            m, d = rng.integers(1, 9, size=2)
            h, g = rng.standard_normal(m), rng.standard_normal(m)
            x, y = rng.standard_normal(d), rng.standard_normal(d)
            f = rng.standard_normal((m, d))
            cov = _random_cov(rng, d)
            _assert_close(
                core.bracket(core.bullet(h, x), y),
                float(x @ y) * h,
                1e-12 * tol_scale * max(1.0, float(np.abs(x @ y) * np.abs(h).max())),
                "bracket(bullet(h,x),y) = (x,y) h",
            )
            _assert_close(
                core.inner_l2(core.bullet(h, x), core.bullet(g, y)),
                float(h @ g) * float(x @ y),
                1e-12 * tol_scale * max(1.0, abs(float(h @ g) * float(x @ y))),
                "rank-one inner product factorizes",
            )
            _assert_close(
                core.inner_a(f, core.bullet(h, x), cov),
                float(core.bracket(f, cov.apply(x)) @ h),
                1e-12 * tol_scale * max(1.0, abs(core.inner_a(f, core.bullet(h, x), cov))),
                "weighted pairing against a rank-one embedding",
            )
            _assert_close(
                core.inner_a(core.bullet(h, x), core.bullet(g, y), cov),
                float(h @ g) * cov.inner(x, y),
                1e-12 * tol_scale * max(1.0, abs(float(h @ g) * cov.inner(x, y))),
                "weighted rank-one inner product factorizes",
            )

    def norm_identities():
        for _ in range(50):
            m, d = rng.integers(1, 9, size=2)
            h = rng.standard_normal(m)
            x = rng.standard_normal(d)
            f = rng.standard_normal((m, d))
            lhs = np.linalg.norm(core.bullet(h, x))
            rhs = np.linalg.norm(h) * np.linalg.norm(x)
            _assert_close(lhs, rhs, 1e-12 * tol_scale * max(1.0, rhs), "embedding norm")
            if np.linalg.norm(core.bracket(f, x)) > np.linalg.norm(f) * np.linalg.norm(
                x
            ) * (1 + 1e-12):
                raise AssertionError("contraction exceeds Cauchy-Schwarz bound")

    def parseval():
        for _ in range(20):
            m, d = rng.integers(2, 9, size=2)
            f = rng.standard_normal((m, d))
            basis, _ = np.linalg.qr(rng.standard_normal((d, d)))
            total = sum(
                float(np.linalg.norm(core.bracket(f, basis[:, k])) ** 2)
                for k in range(d)
            )
            _assert_close(
                total,
                float(np.linalg.norm(f) ** 2),
                1e-10 * tol_scale * max(1.0, np.linalg.norm(f) ** 2),
                "squared norms against an orthonormal basis",
            )

    def operator_extension():
        for _ in range(20):
            m, d = rng.integers(2, 9, size=2)
            f = rng.standard_normal((m, d))
            h = rng.standard_normal(m)
            x = rng.standard_normal(d)
            cov = _random_cov(rng, d)
            direct = core.apply_extended(cov, f)
            basis, _ = np.linalg.qr(rng.standard_normal((d, d)))
            via_basis = sum(
                core.bullet(core.bracket(f, basis[:, k]), cov.apply(basis[:, k]))
                for k in range(d)
            )
            _assert_close(
                via_basis, direct, 1e-10 * tol_scale * max(1.0, np.abs(direct).max()),
                "extension is basis independent",
            )
            _assert_close(
                core.apply_extended(cov, core.bullet(h, x)),
                core.bullet(h, cov.apply(x)),
                1e-12 * tol_scale * max(1.0, np.abs(core.bullet(h, cov.apply(x))).max()),
                "extension and embedding commute",
            )

    def operator_norm_transfer():
        for _ in range(5):
            m, d = int(rng.integers(2, 6)), int(rng.integers(4, 13))
            q, _ = np.linalg.qr(rng.standard_normal((d, d)))
            eigs = np.linspace(0.5, 2.0, d)
            a = q @ np.diag(eigs) @ q.T
            cov = core.Covariance(0.5 * (a + a.T))
            x = rng.standard_normal(d)
            for _ in range(4000):
                y = cov.matrix @ x
                x = y / np.linalg.norm(y)
            lam_vec = float(x @ cov.matrix @ x)
            f = rng.standard_normal((m, d))
            for _ in range(4000):
                g = core.apply_extended(cov, f)
                f = g / np.linalg.norm(g)
            lam_seq = core.inner_l2(f, core.apply_extended(cov, f))
            _assert_close(lam_seq, lam_vec, 1e-8 * tol_scale, "matched spectral norms")

    def block_projection_algebra():
        for _ in range(20):
            d = int(rng.integers(3, 13))
            cov = _random_cov(rng, d)
            cut = int(rng.integers(1, d))
            blocks = core.block_projection(cov, cut)
            p, pt = blocks.p, blocks.pt
            _assert_close(p @ p, p, 1e-10 * tol_scale, "projection is idempotent")
            _assert_close(
                cov.matrix @ p, pt @ cov.matrix, 1e-10 * tol_scale,
                "weighted adjoint relation",
            )
            x = rng.standard_normal(d)
            y = np.zeros(d)
            y[:cut] = rng.standard_normal(cut)
            if cov.inner(x - p @ x, y) > 1e-10 * tol_scale * max(
                1.0, np.linalg.norm(x) * np.linalg.norm(y)
            ):
                raise AssertionError("projection residual is not orthogonal to the range")
            nx = np.sqrt(cov.inner(x, x))
            npx = np.sqrt(max(cov.inner(p @ x, p @ x), 0.0))
            if npx > nx * (1 + 1e-10 * tol_scale):
                raise AssertionError("projection expands the weighted norm")
            for k in range(cut):
                e = np.zeros(d)
                e[k] = 1.0
                _assert_close(p @ e, e, 1e-12 * tol_scale, "projection fixes its range")

    def block_projection_example():
        cov = core.Covariance([[1.0, 0.5, 0.0], [0.5, 1.0, 0.0], [0.0, 0.0, 1.0]])
        blocks = core.block_projection(cov, 1)
        expected = np.zeros((3, 3))
        expected[0] = [1.0, 0.5, 0.0]
        _assert_close(blocks.p, expected, 1e-12 * tol_scale, "worked 3x3 projection")

    def gram_schmidt_example():
        cov = core.Covariance([[1.0, 0.5], [0.5, 1.0]])
        basis = core.gram_schmidt_a([np.array([1.0, 0.0]), np.array([0.0, 1.0])], cov)
        _assert_close(basis[0], [1.0, 0.0], 1e-12 * tol_scale, "first vector kept")
        target = np.sqrt(4.0 / 3.0) * np.array([-0.5, 1.0])
        _assert_close(basis[1], target, 1e-12 * tol_scale, "second orthonormalized vector")
        dep = core.gram_schmidt_a(
            [np.array([1.0, 2.0]), np.array([2.0, 4.0])], cov
        )
        if len(dep) != 1:
            raise AssertionError(f"dependent input not dropped: got {len(dep)} vectors")

    def divergence_diagnostic():
        d = 2048
        k = np.arange(1, d + 1)
        cov = core.Covariance(np.diag(1.0 / k**2))
        h = np.ones(1)
        x = 1.0 / k
        f = np.zeros((1, d))
        for n_lo, n_hi in ((4, 16), (16, 256)):
            f_lo = np.zeros((1, d))
            f_lo[0, :n_lo] = 1.0
            f_hi = np.zeros((1, d))
            f_hi[0, :n_hi] = 1.0
            diff2 = core.inner_a(f_hi - f_lo, f_hi - f_lo, cov)
            _assert_close(
                diff2,
                float(np.sum(1.0 / k[n_lo:n_hi] ** 2)),
                1e-10 * tol_scale,
                "weighted Cauchy increments",
            )
        bound = np.pi / np.sqrt(6.0) + 1e-6
        for n in (16, 256, 2048):
            f[:, :] = 0.0
            f[0, :n] = h[0]
            growth = float(np.linalg.norm(core.bracket(f, x)))
            harmonic = float(np.sum(1.0 / k[:n]))
            _assert_close(growth, harmonic, 1e-9 * tol_scale, "harmonic growth")
            if core.norm_a(f, cov) > bound:
                raise AssertionError("weighted norm escaped its bound")
        return "contraction diverges while the weighted norm stays bounded"

    def psd_appendix():
        for _ in range(20):
            n = int(rng.integers(2, 7))
            g1 = rng.standard_normal((n, n))
            g2 = rng.standard_normal((n, n))
            m1, m2 = g1 @ g1.T, g2 @ g2.T
            if not core.psd_check(core.hadamard(m1, m2), tol=1e-9 * tol_scale):
                raise AssertionError("Schur product lost positive semidefiniteness")
            scale = np.abs(m1).max() or 1.0
            scaled = m1 / scale
            series = np.zeros_like(scaled)
            power = np.ones_like(scaled)
            for j in range(30):
                series = series + power / factorial(j)
                power = core.hadamard(power, scaled)
            if not core.psd_check(series, tol=1e-9 * tol_scale):
                raise AssertionError("entrywise exponential series lost PSD")
            _assert_close(core.hadamard(m1, np.ones_like(m1)), m1, 0.0, "ones identity")
        if core.psd_check(np.array([[1.0, 2.0], [2.0, 1.0]]), tol=1e-9):
            raise AssertionError("indefinite matrix passed the PSD check")

    s.check("bilinear embedding/contraction identities", bilinear_identities)
    s.check("embedding norm and contraction bound", norm_identities)
    s.check("norm decomposition over orthonormal bases", parseval)
    s.check("operator extension to sequence vectors", operator_extension)
    s.check("operator norm transfer (power iteration)", operator_norm_transfer)
    s.check("weighted block projection algebra", block_projection_algebra)
    s.check("worked block projection", block_projection_example)
    s.check("weighted Gram-Schmidt worked example", gram_schmidt_example)
    s.check("unbounded contraction diagnostic", divergence_diagnostic)
    s.check("PSD closure under Schur products", psd_appendix)
    return s.results


# ---------------------------------------------------------------------------
# hermite


def suite_hermite(seed: int = 0, tol_scale: float = 1.0, samples: int = DEFAULT_SAMPLES):
    rng = np.random.default_rng(seed)
    s = _Suite()

    def orthogonality_matrix():
        nmax = 10
        gram = np.empty((nmax + 1, nmax + 1))
        for n in range(nmax + 1):
            for m in range(nmax + 1):
                gram[n, m] = hermite.gh_expectation(
                    lambda t: hermite.hermite_prob(n, t) * hermite.hermite_prob(m, t)
                )
        target = np.diag([factorial(n) for n in range(nmax + 1)])
        _assert_close(gram, target, 1e-8 * tol_scale, "quadrature Gram matrix")

    def recurrence_vs_sum():
        for n in range(16):
            for x in rng.uniform(-5.0, 5.0, size=8):
                a = hermite.hermite_prob(n, float(x))
                b = hermite.hermite_prob_sum(n, float(x))
                scale = max(1.0, abs(a), abs(b))
                if abs(a - b) > 1e-9 * tol_scale * scale:
                    raise AssertionError(f"n={n}, x={x}: {a} vs {b}")

    def convention_relations():
        for n in range(13):
            for x in rng.uniform(-3.0, 3.0, size=8):
                lhs = hermite.hermite_prob(n, float(x))
                rhs = 2.0 ** (-n / 2) * hermite.hermite_phys(n, float(x) / np.sqrt(2.0))
                scale = max(1.0, abs(lhs), abs(rhs))
                if abs(lhs - rhs) > 1e-9 * tol_scale * scale:
                    raise AssertionError(f"probabilists' from physicists', n={n}, x={x}")
                lhs2 = hermite.hermite_phys(n, float(x))
                rhs2 = 2.0 ** (n / 2) * hermite.hermite_prob(n, np.sqrt(2.0) * float(x))
                scale2 = max(1.0, abs(lhs2), abs(rhs2))
                if abs(lhs2 - rhs2) > 1e-9 * tol_scale * scale2:
                    raise AssertionError(f"physicists' from probabilists', n={n}, x={x}")

    def binomial_expansion():
        for _ in range(100):
            n = int(rng.integers(0, 11))
            theta = rng.uniform(0.0, 2.0 * np.pi)
            alpha, beta = np.cos(theta), np.sin(theta)
            x, y = rng.uniform(-3.0, 3.0, size=2)
            lhs = hermite.hermite_prob(n, alpha * x + beta * y)
            rhs = hermite.hermite_binomial_sum(n, alpha, beta, x, y)
            scale = max(
                1.0,
                sum(
                    abs(comb(n, k) * alpha**k * beta ** (n - k))
                    * abs(hermite.hermite_prob(k, x))
                    * abs(hermite.hermite_prob(n - k, y))
                    for k in range(n + 1)
                ),
            )
            if abs(lhs - rhs) > 1e-9 * tol_scale * scale:
                raise AssertionError(f"n={n}, alpha={alpha}: {lhs} vs {rhs}")

    def quadrature_sanity():
        rule = hermite.gaussian_quadrature()
        if (rule.weights <= 0).any():
            raise AssertionError("non-positive quadrature weight")
        _assert_close(rule.weights.sum(), 1.0, 1e-12 * tol_scale, "weights sum to one")
        _assert_close(
            hermite.gh_expectation(lambda t: t * t), 1.0, 1e-10 * tol_scale,
            "second moment",
        )
        for n in range(1, 13):
            val = hermite.gh_expectation(lambda t: hermite.hermite_prob(n, t))
            if abs(val) > 1e-8 * tol_scale:
                raise AssertionError(f"degree {n} mean {val} should vanish")

    s.check("orthogonality matrix equals diag(n!)", orthogonality_matrix)
    s.check("recurrence matches alternating sum", recurrence_vs_sum)
    s.check("convention cross relations", convention_relations)
    s.check("binomial expansion", binomial_expansion)
    s.check("quadrature rule sanity", quadrature_sanity)
    return s.results


# ---------------------------------------------------------------------------
# wick


def suite_wick(seed: int = 0, tol_scale: float = 1.0, samples: int = DEFAULT_SAMPLES):
    rng = np.random.default_rng(seed)
    s = _Suite()
    m, d = 2, 3

    def polarization_vs_symmetrization():
        for n in (2, 3):
            xs = _random_seqvecs(rng, n, m, d)
            kernel = wick.polarize(xs)
            dense = wick.dense_from_kernel(kernel)
            plain = np.array(1.0)
            for v in xs:
                plain = np.multiply.outer(plain, v.ravel())
            target = wick._symmetrize_array(plain)
            _assert_close(dense.array, target, 1e-12 * tol_scale, f"degree {n}")
        x = rng.standard_normal((m, d))
        kernel = wick.polarize([x, x, x])
        dense = wick.dense_from_kernel(kernel)
        power = np.array(1.0)
        for _ in range(3):
            power = np.multiply.outer(power, x.ravel())
        _assert_close(dense.array, power, 1e-12 * tol_scale, "repeated vector power")

    def permutation_invariance():
        xs = _random_seqvecs(rng, 3, m, d)
        dense = wick.dense_from_kernel(wick.polarize(xs))
        import itertools as it

        for perm in it.permutations(range(3)):
            _assert_close(
                np.transpose(dense.array, perm), dense.array, 1e-12 * tol_scale,
                f"permutation {perm}",
            )

    def symmetrization_properties():
        arr = rng.standard_normal((m * d, m * d))
        t = wick.DenseTensor(degree=2, dims=(m, d), array=arr)
        sym1 = wick.symmetrize_dense(t)
        sym2 = wick.symmetrize_dense(sym1)
        _assert_close(sym2.array, sym1.array, 1e-14 * tol_scale, "idempotent")
        _assert_close(sym1.array, 0.5 * (arr + arr.T), 1e-14 * tol_scale, "pair average")

    def low_degree_values():
        cov = _random_cov(rng, d)
        phi = rng.standard_normal((m, d))
        w = rng.standard_normal((m, d))
        p = measure.pairing(phi, w)
        na2 = core.inner_a(phi, phi, cov)
        _assert_close(
            wick.wick_eval(wick.SymKernel.constant(1.0, m, d), cov, w), 1.0,
            1e-14 * tol_scale, "degree 0",
        )
        _assert_close(
            wick.wick_eval(wick.SymKernel.rank_one(phi, 1), cov, w), p,
            1e-12 * tol_scale * max(1.0, abs(p)), "degree 1",
        )
        _assert_close(
            wick.wick_eval(wick.SymKernel.rank_one(phi, 2), cov, w),
            p * p - na2,
            1e-10 * tol_scale * max(1.0, abs(p * p - na2)),
            "degree 2",
        )

    def recursion_vs_closed_form():
        for _ in range(50):
            n = int(rng.integers(0, 5))
            cov = _random_cov(rng, d)
            w = rng.standard_normal((m, d))
            rec = wick.wick_dense_tensor(n, cov, w)
            closed = wick.wick_dense_closed_form(n, cov, w)
            scale = max(1.0, float(np.abs(closed).max()))
            _assert_close(rec, closed, 1e-10 * tol_scale * scale, f"degree {n}")

    def dense_vs_polarized_evaluation():
        for _ in range(25):
            n = int(rng.integers(1, 5))
            cov = _random_cov(rng, d)
            w = rng.standard_normal((m, d))
            xs = _random_seqvecs(rng, n, m, d)
            kernel = wick.polarize(xs)
            dense = wick.dense_from_kernel(kernel)
            a = wick.wick_eval(kernel, cov, w)
            b = wick.wick_eval_dense(n, cov, w, dense)
            _assert_close(a, b, 1e-10 * tol_scale * max(1.0, abs(a)), f"degree {n}")

    def inverse_relation():
        for n in range(5):
            cov = _random_cov(rng, d)
            w = rng.standard_normal((m, d))
            phi = rng.standard_normal((m, d))
            rebuilt = wick.monomial_dense_from_wick(n, cov, w)
            power = np.array(1.0)
            for _ in range(n):
                power = np.multiply.outer(power, phi.ravel())
            lhs = float(np.sum(rebuilt * power))
            rhs = measure.pairing(phi, w) ** n
            _assert_close(lhs, rhs, 1e-10 * tol_scale * max(1.0, abs(rhs)), f"degree {n}")

    def inner_product_routes():
        for _ in range(25):
            n = int(rng.integers(0, 5))
            cov = _random_cov(rng, d)
            k1 = wick.polarize(_random_seqvecs(rng, n, m, d)) if n else wick.SymKernel.constant(
                float(rng.standard_normal()), m, d
            )
            k2 = wick.polarize(_random_seqvecs(rng, n, m, d)) if n else wick.SymKernel.constant(
                float(rng.standard_normal()), m, d
            )
            a = wick.kernel_inner_a(k1, k2, cov)
            b = wick.dense_inner_a(
                wick.dense_from_kernel(k1), wick.dense_from_kernel(k2), cov
            )
            _assert_close(a, b, 1e-10 * tol_scale * max(1.0, abs(a)), f"degree {n}")
        cov = _random_cov(rng, d)
        phi, psi = _random_seqvecs(rng, 2, m, d)
        for n in range(1, 5):
            a = wick.kernel_inner_a(
                wick.SymKernel.rank_one(phi, n), wick.SymKernel.rank_one(psi, n), cov
            )
            b = core.inner_a(phi, psi, cov) ** n
            _assert_close(a, b, 1e-12 * tol_scale * max(1.0, abs(b)), "rank-one powers")

    def repolarization_invariance():
        cov = _random_cov(rng, d)
        w = rng.standard_normal((m, d))
        x1, x2 = _random_seqvecs(rng, 2, m, d)
        k_a = wick.polarize([x1, x2])
        k_b = wick.SymKernel(
            degree=2,
            terms=(
                wick.RankOnePower(0.25, x1 + x2, 2),
                wick.RankOnePower(-0.25, x1 - x2, 2),
            ),
        )
        _assert_close(
            wick.dense_from_kernel(k_a).array,
            wick.dense_from_kernel(k_b).array,
            1e-12 * tol_scale,
            "same tensor",
        )
        va = wick.wick_eval(k_a, cov, w)
        vb = wick.wick_eval(k_b, cov, w)
        _assert_close(va, vb, 1e-9 * tol_scale * max(1.0, abs(va)), "same value")

    s.check("polarization matches dense symmetrization", polarization_vs_symmetrization)
    s.check("dense expansion is permutation invariant", permutation_invariance)
    s.check("symmetrization properties", symmetrization_properties)
    s.check("low-degree Wick values", low_degree_values)
    s.check("recursion matches closed form", recursion_vs_closed_form)
    s.check("polarized and dense evaluation agree", dense_vs_polarized_evaluation)
    s.check("plain monomials rebuilt from Wick terms", inverse_relation)
    s.check("kernel inner product matches dense contraction", inner_product_routes)
    s.check("evaluation invariant under re-polarization", repolarization_invariance)
    return s.results


# ---------------------------------------------------------------------------
# measure


def _wick_pair_expectation(phi, n, psi, m_deg, cov) -> float:
    """E[:phi^n: :psi^m:] by expanding both Wick monomials into plain
    monomials and applying the pair-partition oracle."""
    na2 = core.inner_a(phi, phi, cov)
    nb2 = core.inner_a(psi, psi, cov)
    total = 0.0
    for k in range(n // 2 + 1):
        ck = (-1) ** k * factorial(n) / (2**k * factorial(k) * factorial(n - 2 * k))
        for l in range(m_deg // 2 + 1):
            cl = (-1) ** l * factorial(m_deg) / (
                2**l * factorial(l) * factorial(m_deg - 2 * l)
            )
            factors = [phi] * (n - 2 * k) + [psi] * (m_deg - 2 * l)
            total += ck * cl * na2**k * nb2**l * measure.isserlis_moment(factors, cov)
    return total


def suite_measure(seed: int = 0, tol_scale: float = 1.0, samples: int = DEFAULT_SAMPLES):
    rng = np.random.default_rng(seed)
    s = _Suite()
    m, d = 2, 3
    dims = core.TruncationDims(m, d)

    def determinism():
        cov = _random_cov(rng, d)
        b1 = measure.sample_mu_a(cov, dims, 500, seed=1234)
        b2 = measure.sample_mu_a(cov, dims, 500, seed=1234)
        if not np.array_equal(b1.samples, b2.samples):
            raise AssertionError("same seed produced different batches")

    def variance_isometry():
        cov = _random_cov(rng, d)
        batch = measure.sample_mu_a(cov, dims, samples, seed=seed + 1)
        phi = rng.standard_normal((m, d))
        p = measure.pairings(phi, batch)
        var = p.var(ddof=1)
        se = var * np.sqrt(2.0 / (batch.count - 1))
        target = core.inner_a(phi, phi, cov)
        if abs(var - target) > 4.0 * se:
            raise AssertionError(f"variance {var:.5f} vs {target:.5f} (se {se:.2e})")
        return f"var {var:.5f} ~ {target:.5f}"

    def characteristic_function():
        cov = _random_cov(rng, d)
        batch = measure.sample_mu_a(cov, dims, samples, seed=seed + 2)
        phi = 0.7 * rng.standard_normal((m, d))
        est = measure.char_function_mc(phi, batch)
        target = np.exp(-0.5 * core.inner_a(phi, phi, cov))
        if abs(est.value.real - target) > 4.0 * est.std_error.real:
            raise AssertionError(
                f"real part {est.value.real:.5f} vs {target:.5f} "
                f"(se {est.std_error.real:.2e})"
            )
        if abs(est.value.imag) > 4.0 * est.std_error.imag:
            raise AssertionError(f"imaginary part {est.value.imag:.2e} not near zero")
        zero = measure.char_function_mc(np.zeros((m, d)), batch)
        if zero.value != 1.0 + 0.0j or zero.std_error != 0.0 + 0.0j:
            raise AssertionError("characteristic function at zero must be exactly one")

    def pair_partition_oracle():
        cov = _random_cov(rng, d)
        phi, psi, chi = _random_seqvecs(rng, 3, m, d)
        _assert_close(
            measure.isserlis_moment([phi, psi], cov),
            core.inner_a(phi, psi, cov),
            1e-12 * tol_scale * max(1.0, abs(core.inner_a(phi, psi, cov))),
            "pair",
        )
        if measure.isserlis_moment([phi, psi, chi], cov) != 0.0:
            raise AssertionError("odd moment must vanish")
        _assert_close(
            measure.isserlis_moment([phi] * 4, cov),
            3.0 * core.inner_a(phi, phi, cov) ** 2,
            1e-12 * tol_scale * max(1.0, 3.0 * core.inner_a(phi, phi, cov) ** 2),
            "quartic",
        )
        if measure.isserlis_moment([], cov) != 1.0:
            raise AssertionError("empty product must be one")

    def mc_vs_oracle():
        cov = _random_cov(rng, d)
        batch = measure.sample_mu_a(cov, dims, samples, seed=seed + 3)
        for n in (2, 3, 4):
            phis = [0.8 * rng.standard_normal((m, d)) for _ in range(n)]
            prod = np.ones(batch.count)
            for p in phis:
                prod = prod * measure.pairings(p, batch)
            mean = prod.mean()
            se = prod.std(ddof=1) / np.sqrt(batch.count)
            target = measure.isserlis_moment(phis, cov)
            if abs(mean - target) > 4.0 * se:
                raise AssertionError(
                    f"{n} factors: mean {mean:.5f} vs {target:.5f} (se {se:.2e})"
                )

    def wick_orthogonality_exact():
        for _ in range(20):
            cov = _random_cov(rng, d)
            phi, psi = _random_seqvecs(rng, 2, m, d)
            for n in range(5):
                for m_deg in range(5):
                    val = _wick_pair_expectation(phi, n, psi, m_deg, cov)
                    target = (
                        factorial(n) * core.inner_a(phi, psi, cov) ** n
                        if n == m_deg
                        else 0.0
                    )
                    if abs(val - target) > 1e-9 * tol_scale * max(1.0, abs(target)):
                        raise AssertionError(
                            f"n={n}, m={m_deg}: {val} vs {target}"
                        )

    def pushforward():
        cov = _random_cov(rng, d)
        batch = measure.sample_mu_a(cov, dims, samples, seed=seed + 4)
        raw = _random_seqvecs(rng, 3, m, d)
        basis = core.gram_schmidt(raw, lambda f, g: core.inner_a(f, g, cov))
        report = measure.pushforward_check(basis, batch, cov)
        if not report.passed:
            raise AssertionError("; ".join(report.failures))
        prod_lhs = np.ones(batch.count)
        prod_rhs = 1.0
        for b in basis[:2]:
            p = measure.pairings(b, batch)
            prod_lhs = prod_lhs * p**2
            prod_rhs *= float((p**2).mean())
        lhs_mean = prod_lhs.mean()
        lhs_se = prod_lhs.std(ddof=1) / np.sqrt(batch.count)
        if abs(lhs_mean - prod_rhs) > 6.0 * lhs_se:
            raise AssertionError(
                f"product moments do not factorize: {lhs_mean:.4f} vs {prod_rhs:.4f}"
            )

    s.check("seeded batches are reproducible", determinism)
    s.check("pairing variance matches the weighted norm", variance_isometry)
    s.check("characteristic function", characteristic_function)
    s.check("pair-partition oracle base cases", pair_partition_oracle)
    s.check("Monte Carlo product moments match the oracle", mc_vs_oracle)
    s.check("exact Wick orthogonality via the oracle", wick_orthogonality_exact)
    s.check("orthonormal pushforward is standard normal", pushforward)
    return s.results


# ---------------------------------------------------------------------------
# chaos


def _random_expansion(rng, m, d, max_degree=2) -> chaos_mod.ChaosExpansion:
    kernels: dict[int, wick.SymKernel] = {
        0: wick.SymKernel.constant(float(rng.standard_normal()), m, d)
    }
    for n in range(1, max_degree + 1):
        kernels[n] = wick.polarize([0.7 * rng.standard_normal((m, d)) for _ in range(n)])
    return chaos_mod.ChaosExpansion(kernels=kernels)


def suite_chaos(seed: int = 0, tol_scale: float = 1.0, samples: int = DEFAULT_SAMPLES):
    rng = np.random.default_rng(seed)
    s = _Suite()
    m, d = 2, 3
    dims = core.TruncationDims(m, d)

    def worked_example():
        a = np.eye(4)
        a[0, 0] = a[1, 1] = 1.0
        a[0, 1] = a[1, 0] = 0.5
        cov = core.Covariance(a)
        f = rng.standard_normal((3, 4))
        e1 = np.array([1.0, 0.0, 0.0, 0.0])
        e2 = np.array([0.0, 1.0, 0.0, 0.0])
        target1 = core.bullet(f[:, 0] + 0.5 * f[:, 1], e1)
        _assert_close(
            chaos_mod.cond_exp_monomial(f, [e1], cov), target1, 1e-12 * tol_scale,
            "single conditioning vector",
        )
        target2 = core.bullet(f[:, 0], e1) + core.bullet(f[:, 1], e2)
        _assert_close(
            chaos_mod.cond_exp_monomial(f, [e1, e2], cov), target2, 1e-12 * tol_scale,
            "two conditioning vectors",
        )
        full = chaos_mod.cond_exp_monomial(f, [np.eye(4)[k] for k in range(4)], cov)
        _assert_close(full, f, 1e-12 * tol_scale, "full span leaves the kernel unchanged")

    def idempotence_and_contraction():
        for _ in range(20):
            cov = _random_cov(rng, d)
            expansion = _random_expansion(rng, m, d)
            cond = chaos_mod.ConditioningSet.from_vectors(
                _random_seqvecs(rng, 2, m, d), cov
            )
            once = chaos_mod.cond_exp_chaos(expansion, cond, cov)
            twice = chaos_mod.cond_exp_chaos(once, cond, cov)
            for n in once.degrees:
                for t1, t2 in zip(once.kernels[n].terms, twice.kernels[n].terms):
                    scale = max(1.0, float(np.abs(t1.base).max()))
                    _assert_close(
                        t2.base, t1.base, 1e-10 * tol_scale * scale,
                        f"degree {n} idempotence",
                    )
            if chaos_mod.chaos_norm(once, cov) > chaos_mod.chaos_norm(
                expansion, cov
            ) * (1.0 + 1e-10 * tol_scale) + 1e-10 * tol_scale:
                raise AssertionError("conditioning expanded the chaos norm")

    def degree_one_additivity():
        for _ in range(20):
            cov = _random_cov(rng, d)
            f = rng.standard_normal((m, d))
            raw = [rng.standard_normal(d) for _ in range(2)]
            basis = core.gram_schmidt_a(raw, cov)
            joint = chaos_mod.cond_exp_monomial(f, basis, cov)
            separate = sum(chaos_mod.cond_exp_monomial(f, [x], cov) for x in basis)
            _assert_close(joint, separate, 1e-10 * tol_scale, "additive over vectors")

    def span_invariance():
        for _ in range(20):
            cov = _random_cov(rng, d)
            f = rng.standard_normal((m, d))
            xs = [rng.standard_normal(d) for _ in range(2)]
            mix = rng.standard_normal((2, 2)) + 2.0 * np.eye(2)
            ys = [mix[0, 0] * xs[0] + mix[0, 1] * xs[1], mix[1, 0] * xs[0] + mix[1, 1] * xs[1]]
            _assert_close(
                chaos_mod.cond_exp_monomial(f, xs, cov),
                chaos_mod.cond_exp_monomial(f, ys, cov),
                1e-10 * tol_scale,
                "same span, same projection",
            )

    def chaos_vs_monomial():
        for _ in range(10):
            cov = _random_cov(rng, d)
            f = rng.standard_normal((m, d))
            xs = [rng.standard_normal(d) for _ in range(2)]
            basis = core.gram_schmidt_a(xs, cov)
            h_basis = np.eye(m)
            cond = chaos_mod.ConditioningSet(
                basis=tuple(
                    core.bullet(h_basis[i], x) for i in range(m) for x in basis
                )
            )
            expansion = chaos_mod.ChaosExpansion(
                kernels={1: wick.SymKernel.rank_one(f, 1)}
            )
            conditioned = chaos_mod.cond_exp_chaos(expansion, cond, cov)
            kernel_sum = np.zeros((m, d))
            for t in conditioned.kernels[1].terms:
                kernel_sum = kernel_sum + t.coeff * t.base
            _assert_close(
                kernel_sum,
                chaos_mod.cond_exp_monomial(f, xs, cov),
                1e-10 * tol_scale,
                "finite-rank kernel form",
            )

    def inner_product_structure():
        cov = _random_cov(rng, d)
        phi, psi = _random_seqvecs(rng, 2, m, d)
        e_n = chaos_mod.ChaosExpansion(kernels={2: wick.SymKernel.rank_one(phi, 2)})
        e_m = chaos_mod.ChaosExpansion(kernels={3: wick.SymKernel.rank_one(psi, 3)})
        if chaos_mod.chaos_inner(e_n, e_m, cov) != 0.0:
            raise AssertionError("different degrees must be orthogonal")
        for n in range(1, 4):
            e = chaos_mod.ChaosExpansion(kernels={n: wick.SymKernel.rank_one(phi, n)})
            val = chaos_mod.chaos_inner(e, e, cov)
            target = factorial(n) * core.inner_a(phi, phi, cov) ** n
            _assert_close(
                val, target, 1e-10 * tol_scale * max(1.0, abs(target)), f"degree {n} norm"
            )
        batch = measure.sample_mu_a(cov, dims, samples, seed=seed + 11)
        f_exp = _random_expansion(rng, m, d)
        g_exp = _random_expansion(rng, m, d)
        prod = chaos_mod.eval_expansion(f_exp, cov, batch.samples) * chaos_mod.eval_expansion(
            g_exp, cov, batch.samples
        )
        mean = prod.mean()
        se = prod.std(ddof=1) / np.sqrt(batch.count)
        target = chaos_mod.chaos_inner(f_exp, g_exp, cov)
        if abs(mean - target) > 4.0 * se:
            raise AssertionError(f"MC {mean:.5f} vs exact {target:.5f} (se {se:.2e})")

    def expansion_mean():
        cov = _random_cov(rng, d)
        batch = measure.sample_mu_a(cov, dims, samples, seed=seed + 12)
        expansion = _random_expansion(rng, m, d)
        values = chaos_mod.eval_expansion(expansion, cov, batch.samples)
        mean = values.mean()
        se = values.std(ddof=1) / np.sqrt(batch.count)
        target = expansion.kernels[0].terms[0].coeff
        if abs(mean - target) > 4.0 * se:
            raise AssertionError(f"mean {mean:.5f} vs constant {target:.5f}")

    def residual_tests():
        cov = _random_cov(rng, d)
        batch = measure.sample_mu_a(cov, dims, samples, seed=seed + 13)
        cond = chaos_mod.ConditioningSet.from_vectors(
            _random_seqvecs(rng, 2, m, d), cov
        )
        tests = [
            lambda c: np.ones(c.shape[0]),
            lambda c: c[:, 0],
            lambda c: c[:, 0] * c[:, -1],
            lambda c: c[:, 0] ** 2 - 1.0,
        ]
        for i in range(8):
            expansion = _random_expansion(rng, m, d)
            est = chaos_mod.mc_cond_check(expansion, cond, cov, tests[i % len(tests)], batch)
            if abs(est.value) > 4.0 * est.std_error + 1e-12:
                raise AssertionError(
                    f"residual {est.value:.4e} outside 4 se ({est.std_error:.2e})"
                )
        psi = cond.basis[0]
        measurable = chaos_mod.ChaosExpansion(
            kernels={2: wick.SymKernel.rank_one(psi, 2)}
        )
        est = chaos_mod.mc_cond_check(measurable, cond, cov, tests[2], batch)
        if abs(est.value) > 1e-10 or est.std_error > 1e-10:
            raise AssertionError("measurable functional must have zero residual")

    def growing_conditioning_rank():
        cov = _random_cov(rng, d)
        expansion = _random_expansion(rng, m, d)
        full_norm = chaos_mod.chaos_norm(expansion, cov)
        vectors = _random_seqvecs(rng, 4, m, d)
        prev = -1.0
        for q in range(1, 5):
            cond = chaos_mod.ConditioningSet.from_vectors(vectors[:q], cov)
            norm = chaos_mod.chaos_norm(
                chaos_mod.cond_exp_chaos(expansion, cond, cov), cov
            )
            if norm < prev - 1e-10 * tol_scale:
                raise AssertionError("projection norm decreased as the set grew")
            if norm > full_norm * (1.0 + 1e-10 * tol_scale):
                raise AssertionError("projection norm exceeded the full norm")
            prev = norm
        return "projection norms stabilize monotonically"

    s.check("worked conditional-expectation example", worked_example)
    s.check("projection idempotence and contraction", idempotence_and_contraction)
    s.check("degree-1 additivity", degree_one_additivity)
    s.check("span invariance", span_invariance)
    s.check("kernel-wise and direct degree-1 projections agree", chaos_vs_monomial)
    s.check("chaos inner product structure", inner_product_structure)
    s.check("expansion mean equals its constant term", expansion_mean)
    s.check("conditional residuals vanish weakly", residual_tests)
    s.check("growing conditioning rank stabilizes", growing_conditioning_rank)
    return s.results


# ---------------------------------------------------------------------------
# closure


def suite_closure(seed: int = 0, tol_scale: float = 1.0, samples: int = DEFAULT_SAMPLES):
    rng = np.random.default_rng(seed)
    s = _Suite()

    def coefficient_values():
        coeffs = closure_mod.build_moment_system(3)
        if coeffs.b[0, 1] != 1.0:
            raise AssertionError("b[0,1] must be exactly 1")
        if coeffs.b[1, 0] != 1.0 / 3.0 or coeffs.b[1, 2] != 2.0 / 3.0:
            raise AssertionError("b[1,*] mismatch")
        for k in range(4):
            for l in range(5):
                if l not in (k - 1, k + 1) and coeffs.b[k, l] != 0.0:
                    raise AssertionError(f"b[{k},{l}] must be zero")

    def absorption_and_source():
        params = closure_mod.MaterialParams(
            a=0.0, b=1.0, cells=4, sigma=2.0, kappa=3.0, source=5.0
        )
        c = closure_mod._absorption(params, 2)
        if not (np.all(c[:, 0] == 3.0) and np.all(c[:, 1:] == 5.0)):
            raise AssertionError("absorption coefficients mismatch")
        q = closure_mod._source_term(params, 2, 0.0)
        if not (np.all(q[:, 0] == 2.0 * 3.0 * 5.0) and np.all(q[:, 1:] == 0.0)):
            raise AssertionError("source must feed only moment 0")

    def closure_rows():
        n = 2
        if closure_mod.closure_row(closure_mod.ClosureSpec(kind="pn"), n).any():
            raise AssertionError("truncation closure row must be zero")
        ident = closure_mod.ClosureSpec(kind="optimal_prediction", correlation=np.eye(n + 2))
        if closure_mod.closure_row(ident, n).any():
            raise AssertionError("identity correlation must reduce to truncation")
        spec = closure_mod.ClosureSpec(
            kind="optimal_prediction", correlation=np.array([[1.0, 0.5], [0.5, 1.0]])
        )
        _assert_close(closure_mod.closure_row(spec, 0), [0.5], 1e-14 * tol_scale, "1x1 block")
        g = rng.standard_normal((n + 2, n + 2))
        corr = g @ g.T + (n + 2) * np.eye(n + 2)
        r1 = closure_mod.closure_row(
            closure_mod.ClosureSpec(kind="optimal_prediction", correlation=corr), n
        )
        r2 = closure_mod.closure_row(
            closure_mod.ClosureSpec(kind="optimal_prediction", correlation=3.7 * corr), n
        )
        _assert_close(r1, r2, 1e-12 * tol_scale * max(1.0, np.abs(r1).max()), "scale invariance")

    def _bump_initial(params, order):
        x = params.x_centers
        values = np.zeros((params.cells, order + 1))
        values[:, 0] = np.exp(-0.5 * ((x - 0.5) / 0.08) ** 2)
        return closure_mod.MomentGrid(t=0.0, values=values)

    def truncation_equals_identity_prediction():
        params = closure_mod.MaterialParams(
            a=0.0, b=1.0, cells=100, sigma=0.3, kappa=0.2, source=0.1
        )
        order = 3
        initial = _bump_initial(params, order)
        dt = 0.004
        pn = closure_mod.solve_closure(
            initial, params, closure_mod.ClosureSpec(kind="pn"), t_final=200 * dt, dt=dt
        )
        op = closure_mod.solve_closure(
            initial,
            params,
            closure_mod.ClosureSpec(kind="optimal_prediction", correlation=np.eye(order + 2)),
            t_final=200 * dt,
            dt=dt,
        )
        for g1, g2 in zip(pn, op):
            if not np.array_equal(g1.values, g2.values):
                raise AssertionError("identity-correlation run deviated from truncation")
        block = np.eye(order + 2)
        block[: order + 1, : order + 1] += 0.2
        op2 = closure_mod.solve_closure(
            initial,
            params,
            closure_mod.ClosureSpec(kind="optimal_prediction", correlation=block),
            t_final=50 * dt,
            dt=dt,
        )
        pn2 = closure_mod.solve_closure(
            initial, params, closure_mod.ClosureSpec(kind="pn"), t_final=50 * dt, dt=dt
        )
        for g1, g2 in zip(pn2, op2):
            if not np.array_equal(g1.values, g2.values):
                raise AssertionError("block-diagonal correlation deviated from truncation")

    def conservation():
        params = closure_mod.MaterialParams(
            a=0.0, b=1.0, cells=64, sigma=0.0, kappa=0.0, source=0.0
        )
        order = 3
        initial_values = rng.standard_normal((64, order + 1))
        state = closure_mod.MomentGrid(t=0.0, values=initial_values)
        coeffs = closure_mod.build_moment_system(order)
        spec = closure_mod.ClosureSpec(kind="pn")
        sums = state.values.sum(axis=0)
        for _ in range(20):
            state = closure_mod.step(state, coeffs, params, spec, dt=0.005)
            _assert_close(
                state.values.sum(axis=0), sums,
                1e-12 * tol_scale * max(1.0, np.abs(sums).max()),
                "per-moment spatial sums",
            )

    def local_balance():
        params0 = closure_mod.MaterialParams(
            a=0.0, b=1.0, cells=16, sigma=0.0, kappa=0.0, source=0.0
        )
        order = 2
        const = closure_mod.MomentGrid(t=0.0, values=np.tile([2.0, -1.0, 0.5], (16, 1)))
        coeffs = closure_mod.build_moment_system(order)
        spec = closure_mod.ClosureSpec(kind="pn")
        after = closure_mod.step(const, coeffs, params0, spec, dt=0.01)
        _assert_close(after.values, const.values, 0.0, "free constant state is stationary")
        kappa = 0.7
        params1 = closure_mod.MaterialParams(
            a=0.0, b=1.0, cells=16, sigma=0.0, kappa=kappa, source=0.0
        )
        decayed = closure_mod.step(const, coeffs, params1, spec, dt=0.01)
        _assert_close(
            decayed.values[:, 0], const.values[:, 0] * (1.0 - kappa * 0.01),
            1e-14 * tol_scale, "explicit absorption factor",
        )
        params2 = closure_mod.MaterialParams(
            a=0.0, b=1.0, cells=16, sigma=0.0, kappa=kappa, source=1.5
        )
        zero = closure_mod.MomentGrid(t=0.0, values=np.zeros((16, order + 1)))
        sourced = closure_mod.step(zero, coeffs, params2, spec, dt=0.01)
        if not (sourced.values[:, 0] > 0).all():
            raise AssertionError("source must grow moment 0")
        if sourced.values[:, 1:].any():
            raise AssertionError("higher moments must stay zero without scattering")

    def weak_form_projection():
        for _ in range(10):
            d = int(rng.integers(3, 9))
            m = int(rng.integers(1, 4))
            cov = _random_cov(rng, d)
            cut = int(rng.integers(1, d))
            blocks = core.block_projection(cov, cut)
            phi = rng.standard_normal((m, d))
            omega = rng.standard_normal((m, d))
            lhs = measure.pairing(core.apply_matrix(blocks.p, phi), omega)
            rhs = measure.pairing(phi, core.apply_matrix(blocks.pt, omega))
            _assert_close(
                lhs, rhs, 1e-12 * tol_scale * max(1.0, abs(lhs)), "adjoint pairing"
            )

    def refinement_study():
        params = closure_mod.MaterialParams(
            a=0.0, b=1.0, cells=100, sigma=0.0, kappa=0.0, source=0.0
        )
        dt = 0.004
        finals = {}
        for order in (3, 5, 7):
            initial = _bump_initial(params, order)
            run = closure_mod.solve_closure(
                initial, params, closure_mod.ClosureSpec(kind="pn"),
                t_final=0.4, dt=dt, output_stride=10**9,
            )
            finals[order] = run[-1].values
        d_35 = np.linalg.norm(finals[3][:, :4] - finals[5][:, :4])
        d_57 = np.linalg.norm(finals[5][:, :4] - finals[7][:, :4])
        if not d_57 < d_35:
            raise AssertionError(f"refinement not monotone: {d_35:.3e} then {d_57:.3e}")
        return f"inter-order distances {d_35:.3e} > {d_57:.3e}"

    def cfl_guard():
        params = closure_mod.MaterialParams(
            a=0.0, b=1.0, cells=16, sigma=0.0, kappa=0.0, source=0.0
        )
        coeffs = closure_mod.build_moment_system(2)
        state = closure_mod.MomentGrid(t=0.0, values=np.ones((16, 3)))
        try:
            closure_mod.step(
                state, coeffs, params, closure_mod.ClosureSpec(kind="pn"), dt=10.0
            )
        except ValueError:
            return "oversized step rejected"
        raise AssertionError("CFL violation went unnoticed")

    s.check("advection coefficient values", coefficient_values)
    s.check("absorption and source structure", absorption_and_source)
    s.check("closure rows", closure_rows)
    s.check("identity correlation reproduces truncation", truncation_equals_identity_prediction)
    s.check("free streaming conserves spatial sums", conservation)
    s.check("pointwise balance of the explicit step", local_balance)
    s.check("weak-form projection identity", weak_form_projection)
    s.check("truncation refinement is monotone", refinement_study)
    s.check("CFL guard", cfl_guard)
    return s.results


_SUITES = {
    "core": suite_core,
    "hermite": suite_hermite,
    "wick": suite_wick,
    "measure": suite_measure,
    "chaos": suite_chaos,
    "closure": suite_closure,
}


def run_suite(
    name: str,
    seed: int = 0,
    tol_scale: float = 1.0,
    samples: int = DEFAULT_SAMPLES,
) -> list[CheckResult]:
    """Run one module suite (or all of them) and return its check results."""
    if name == "all":
        results = []
        for suite_name in SUITE_NAMES:
            for res in _SUITES[suite_name](seed=seed, tol_scale=tol_scale, samples=samples):
                results.append(
                    CheckResult(f"{suite_name}: {res.name}", res.passed, res.detail)
                )
        return results
    if name not in _SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return _SUITES[name](seed=seed, tol_scale=tol_scale, samples=samples)
