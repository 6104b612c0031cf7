"""Sampling of the correlated Gaussian measure and exact moment oracles.

A sample is an m-by-d matrix W = Z L^T with Z filled by independent
standard normals and L the Cholesky factor of the covariance weight A.
Linear statistics then carry the weighted geometry exactly:

    Cov( <phi, W>, <psi, W> ) = (phi, psi)_A,

so an A-orthonormal family of sequence vectors pushes the sample forward
to independent standard normals (``pushforward_check`` verifies this
empirically on a batch).

``isserlis_moment`` is the exact counterpart: it evaluates
E[ prod_i <phi_i, W> ] as a sum over perfect matchings of products of
pairwise weighted inner products, giving a Monte-Carlo-free oracle for
product moments (zero for an odd number of factors).

Sampling is deterministic per seed within a build (PCG64 generator);
batches are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Covariance, TruncationDims, inner_a

__all__ = [
    "SampleBatch",
    "McEstimate",
    "PushforwardReport",
    "sample_mu_a",
    "pairing",
    "pairings",
    "char_function_mc",
    "isserlis_moment",
    "pushforward_check",
]

ISSERLIS_MAX_FACTORS = 10


@dataclass(frozen=True)
class SampleBatch:
    """Stack of samples with shape (count, m, d), plus the seed that
    produced it.  Same covariance, dims, seed and count always reproduce
    the identical batch within a build."""

    samples: np.ndarray
    seed: int
    count: int

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 3 or arr.shape[0] != self.count:
            raise ValueError(
                f"samples must have shape (count, m, d) with count={self.count}, got {arr.shape}"
            )
        if arr is self.samples and arr.flags.writeable:
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo estimate with standard error of the mean.

    For complex-valued statistics both fields are complex and hold the
    componentwise (real, imaginary) values.
    """

    value: float | complex
    std_error: float | complex
    count: int

    def __post_init__(self):
        se = self.std_error
        if isinstance(se, complex):
            if se.real < 0 or se.imag < 0:
                raise ValueError("standard errors must be non-negative")
        elif se < 0:
            raise ValueError("standard errors must be non-negative")


def sample_mu_a(cov: Covariance, dims: TruncationDims, count: int, seed: int) -> SampleBatch:
    """Draw ``count`` samples W = Z L^T of the weighted Gaussian measure.

    Z has independent standard normal entries, so <phi, W> is centered
    Gaussian with Cov(<phi, W>, <psi, W>) = (phi, psi)_A.
    """
    if count <= 0:
        raise ValueError(f"count must be positive, got {count}")
    if dims.d != cov.dim:
        raise ValueError(f"dims.d={dims.d} does not match covariance dim {cov.dim}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, dims.m, dims.d))
    samples = z @ cov.chol.T
    samples.setflags(write=False)
    return SampleBatch(samples=samples, seed=seed, count=count)


def pairing(phi, w) -> float:
    """Frobenius pairing <phi, w> of two m-by-d matrices."""
    p = np.asarray(phi, dtype=float)
    w_arr = np.asarray(w, dtype=float)
    if p.shape != w_arr.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {w_arr.shape}")
    return float(np.sum(p * w_arr))


def pairings(phi, batch: SampleBatch) -> np.ndarray:
    """Vector of pairings <phi, W_i> over a batch."""
    p = np.asarray(phi, dtype=float)
    if p.shape != batch.samples.shape[1:]:
        raise ValueError(
            f"phi shape {p.shape} does not match batch sample shape {batch.samples.shape[1:]}"
        )
    return np.einsum("ij,nij->n", p, batch.samples)


def _mean_estimate(values: np.ndarray) -> tuple[float, float]:
    n = values.shape[0]
    mean = float(values.mean())
    se = float(values.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, se


def char_function_mc(phi, batch: SampleBatch) -> McEstimate:
    """Empirical characteristic function at phi: sample mean of
    exp(i <phi, W>) with componentwise standard errors.

    Converges to exp(-0.5 * ||phi||_A^2) (real part; imaginary part zero
    by symmetry of the centered measure).
    """
    if batch.count == 0:
        raise ValueError("empty batch")
    p = pairings(phi, batch)
    re_mean, re_se = _mean_estimate(np.cos(p))
    im_mean, im_se = _mean_estimate(np.sin(p))
    return McEstimate(
        value=complex(re_mean, im_mean),
        std_error=complex(re_se, im_se),
        count=batch.count,
    )


def isserlis_moment(phis, cov: Covariance) -> float:
    """Exact E[ prod_i <phi_i, W> ] by pair-partition enumeration.

    Sums over all perfect matchings of the factor list the products of
    pairwise weighted inner products; 0 for an odd number of factors, 1
    for an empty product.  Limited to 10 factors (enumeration grows as
    (n-1)!!).
    """
    phis = [np.asarray(p, dtype=float) for p in phis]
    n = len(phis)
    if n > ISSERLIS_MAX_FACTORS:
        raise ValueError(f"at most {ISSERLIS_MAX_FACTORS} factors supported, got {n}")
    if n % 2 == 1:
        return 0.0
    if n == 0:
        return 1.0
    gram = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            gram[i, j] = gram[j, i] = inner_a(phis[i], phis[j], cov)

    def match(indices: tuple[int, ...]) -> float:
        if not indices:
            return 1.0
        first, rest = indices[0], indices[1:]
        total = 0.0
        for k in range(len(rest)):
            total += gram[first, rest[k]] * match(rest[:k] + rest[k + 1 :])
        return total

    return match(tuple(range(n)))


@dataclass(frozen=True)
class PushforwardReport:
    """Empirical check that A-orthonormal observables are independent
    standard normals: componentwise means and variances with their
    standard errors, pairwise sample covariances, and the statistics that
    fell outside four standard errors of (0, 1, 0)."""

    means: np.ndarray
    mean_errors: np.ndarray
    variances: np.ndarray
    variance_errors: np.ndarray
    covariances: np.ndarray
    covariance_errors: np.ndarray
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def pushforward_check(
    phis,
    batch: SampleBatch,
    cov: Covariance,
    orthonormal_tol: float = 1e-8,
    sigma_band: float = 4.0,
) -> PushforwardReport:
    """Compare the empirical law of (<phi_i, W>)_i against independent
    standard normals.

    Requires the phis to be A-orthonormal within ``orthonormal_tol``.
    Flags any mean, variance or pairwise covariance outside ``sigma_band``
    standard errors of (0, 1, 0).
    """
    phis = [np.asarray(p, dtype=float) for p in phis]
    q = len(phis)
    if q == 0:
        raise ValueError("need at least one observable")
    for i in range(q):
        for j in range(i, q):
            target = 1.0 if i == j else 0.0
            val = inner_a(phis[i], phis[j], cov)
            if abs(val - target) > orthonormal_tol:
                raise ValueError(
                    f"observables are not A-orthonormal: (phi_{i}, phi_{j})_A = {val:.3e}"
                )
    coords = np.stack([pairings(p, batch) for p in phis], axis=1)
    n = batch.count
    means = coords.mean(axis=0)
    variances = coords.var(axis=0, ddof=1)
    mean_errors = np.sqrt(variances / n)
    variance_errors = variances * np.sqrt(2.0 / (n - 1))
    centered = coords - means
    covariances = (centered.T @ centered) / (n - 1)
    covariance_errors = np.sqrt(
        (np.outer(variances, variances) + covariances**2) / n
    )
    failures = []
    for i in range(q):
        if abs(means[i]) > sigma_band * mean_errors[i]:
            failures.append(f"mean[{i}] = {means[i]:.4e} (se {mean_errors[i]:.2e})")
        if abs(variances[i] - 1.0) > sigma_band * variance_errors[i]:
            failures.append(
                f"var[{i}] = {variances[i]:.6f} (se {variance_errors[i]:.2e})"
            )
        for j in range(i + 1, q):
            if abs(covariances[i, j]) > sigma_band * covariance_errors[i, j]:
                failures.append(
                    f"cov[{i},{j}] = {covariances[i, j]:.4e} (se {covariance_errors[i, j]:.2e})"
                )
    return PushforwardReport(
        means=means,
        mean_errors=mean_errors,
        variances=variances,
        variance_errors=variance_errors,
        covariances=covariances,
        covariance_errors=covariance_errors,
        failures=tuple(failures),
    )
