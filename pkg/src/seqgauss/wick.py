"""Symmetric tensor kernels and Wick-ordered monomial evaluation.

Degree-n kernels are stored in polarized form: a weighted list of n-th
tensor powers ``sum_i coeff_i * base_i^(x)n`` (``SymKernel``).  Any
elementary symmetric product x_1 (x) ... (x) x_n expands into 2^n such
powers via the polarization identity (``polarize``), so the polarized form
spans the whole symmetric subspace.  Rank-one powers are symmetric by
construction, hence so is every stored kernel.

Evaluation of the Wick-ordered monomial of a rank-one power against a
sample W reduces to a scalar Hermite call,

    :<phi^(x)n, W^(x)n>:  =  ||phi||_A^n  H_n( <phi, W> / ||phi||_A ),

which is what ``wick_eval`` uses on every term (a zero-norm base
contributes 0 for n >= 1, and the bare coefficient at degree 0).

For cross-checking at small sizes the module carries a dense
representation (``DenseTensor``, full (m*d)^n arrays, capped at degree 4
and m*d <= 6) together with two independent constructions of the Wick
functional: the two-term recursion

    :W^0: = 1,  :W^1: = W,
    :W^n: = sym(W (x) :W^(n-1):) - (n-1) sym(T (x) :W^(n-2):)

with T the weighted pairing matrix, and the closed alternating sum over
trace insertions.  ``wick_eval_dense`` pairs the recursion-built
functional with a dense kernel; the closed form and the inverse relation
(rebuilding plain monomials from Wick ones) are exposed for the
verification suites.

Sequence vectors are flattened row-major (C order) into vectors of length
m*d wherever a dense index is needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial

import numpy as np

from .core import Covariance, inner_a, norm_a
from .hermite import hermite_prob

__all__ = [
    "RankOnePower",
    "SymKernel",
    "DenseTensor",
    "polarize",
    "symmetrize_dense",
    "dense_from_kernel",
    "weight_pairing_matrix",
    "wick_eval",
    "wick_dense_tensor",
    "wick_dense_closed_form",
    "monomial_dense_from_wick",
    "wick_eval_dense",
    "kernel_inner_a",
    "dense_inner_a",
]

DENSE_MAX_DEGREE = 4
DENSE_MAX_FLAT_DIM = 6


@dataclass(frozen=True)
class RankOnePower:
    """One polarized term: ``coeff * base^(x)degree`` with base an m-by-d
    sequence vector."""

    coeff: float
    base: np.ndarray
    degree: int

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError(f"degree must be non-negative, got {self.degree}")
        base = np.array(self.base, dtype=float)
        if base.ndim != 2:
            raise ValueError(f"base must be an m-by-d matrix, got shape {base.shape}")
        base.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "coeff", float(self.coeff))


@dataclass(frozen=True)
class SymKernel:
    """Symmetric degree-n kernel as a list of rank-one powers of equal
    degree and dimensions."""

    degree: int
    terms: tuple[RankOnePower, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        object.__setattr__(self, "terms", terms)
        for t in terms:
            if t.degree != self.degree:
                raise ValueError(
                    f"term of degree {t.degree} in kernel of degree {self.degree}"
                )
        shapes = {t.base.shape for t in terms}
        if len(shapes) > 1:
            raise ValueError(f"inconsistent base shapes {shapes}")

    @property
    def dims(self) -> tuple[int, int]:
        if not self.terms:
            raise ValueError("kernel has no terms")
        return self.terms[0].base.shape

    @classmethod
    def rank_one(cls, base, degree: int, coeff: float = 1.0) -> "SymKernel":
        return cls(degree=degree, terms=(RankOnePower(coeff, base, degree),))

    @classmethod
    def constant(cls, value: float, m: int, d: int) -> "SymKernel":
        return cls.rank_one(np.zeros((m, d)), degree=0, coeff=value)

    def scaled(self, factor: float) -> "SymKernel":
        return SymKernel(
            degree=self.degree,
            terms=tuple(RankOnePower(factor * t.coeff, t.base, t.degree) for t in self.terms),
        )


@dataclass(frozen=True)
class DenseTensor:
    """Dense degree-n tensor over flattened sequence vectors; oracle only,
    limited to degree <= 4 and m*d <= 6."""

    degree: int
    dims: tuple[int, int]
    array: np.ndarray

    def __post_init__(self):
        m, d = self.dims
        flat = m * d
        _check_dense_limits(self.degree, flat)
        arr = np.array(self.array, dtype=float)
        expected = (flat,) * self.degree
        if arr.shape != expected:
            raise ValueError(f"array shape {arr.shape} does not match {expected}")
        arr.setflags(write=False)
        object.__setattr__(self, "array", arr)


def _check_dense_limits(degree: int, flat_dim: int) -> None:
    if degree > DENSE_MAX_DEGREE:
        raise ValueError(
            f"dense tensors are limited to degree {DENSE_MAX_DEGREE}, got {degree}"
        )
    if flat_dim > DENSE_MAX_FLAT_DIM:
        raise ValueError(
            f"dense tensors are limited to m*d <= {DENSE_MAX_FLAT_DIM}, got {flat_dim}"
        )


def polarize(xs) -> SymKernel:
    """Polarized form of the symmetric product x_1 (x) ... (x) x_n.

    Returns the 2^n rank-one powers ``prod(signs) / (2^n n!) *
    (sum_i signs_i x_i)^(x)n`` whose sum is the symmetrized product.  Term
    count doubles per factor; intended for small n.
    """
    vecs = [np.asarray(x, dtype=float) for x in xs]
    if not vecs:
        raise ValueError("polarize requires at least one vector")
    n = len(vecs)
    shape = vecs[0].shape
    for v in vecs:
        if v.shape != shape or v.ndim != 2:
            raise ValueError("polarize requires m-by-d matrices of equal shape")
    scale = 1.0 / (2**n * factorial(n))
    terms = []
    for signs in itertools.product((1.0, -1.0), repeat=n):
        base = sum(s * v for s, v in zip(signs, vecs))
        terms.append(RankOnePower(np.prod(signs) * scale, base, n))
    return SymKernel(degree=n, terms=tuple(terms))


def symmetrize_dense(t: DenseTensor) -> DenseTensor:
    """Average over all axis permutations; idempotent."""
    arr = _symmetrize_array(t.array)
    return DenseTensor(degree=t.degree, dims=t.dims, array=arr)


def _symmetrize_array(arr: np.ndarray) -> np.ndarray:
    n = arr.ndim
    if n <= 1:
        return arr
    acc = np.zeros_like(arr)
    perms = list(itertools.permutations(range(n)))
    for perm in perms:
        acc += np.transpose(arr, perm)
    return acc / len(perms)


def dense_from_kernel(kernel: SymKernel) -> DenseTensor:
    """Expand a polarized kernel into its dense tensor."""
    m, d = kernel.dims
    flat = m * d
    _check_dense_limits(kernel.degree, flat)
    arr = np.zeros((flat,) * kernel.degree)
    for t in kernel.terms:
        v = t.base.ravel()
        power = np.array(1.0)
        for _ in range(kernel.degree):
            power = np.multiply.outer(power, v)
        arr = arr + t.coeff * power
    return DenseTensor(degree=kernel.degree, dims=(m, d), array=arr)


def weight_pairing_matrix(cov: Covariance, m: int) -> np.ndarray:
    """Matrix T of the weighted pairing on flattened sequence vectors:
    ``f.ravel() @ T @ g.ravel() == inner_a(f, g, cov)``."""
    return np.kron(np.eye(m), cov.matrix)


def _pairings(phi: np.ndarray, w) -> np.ndarray:
    """Frobenius pairing of phi with one sample (m, d) or a batch (..., m, d)."""
    return np.einsum("ij,...ij->...", phi, np.asarray(w, dtype=float))


def wick_eval(kernel: SymKernel, cov: Covariance, w):
    """Evaluate the Wick-ordered monomial of ``kernel`` at sample(s) ``w``.

    Sums ``coeff * ||base||_A^n * H_n(<base, w> / ||base||_A)`` over the
    polarized terms.  ``w`` may be one m-by-d sample or a stacked batch
    with leading axes; the result is a float or an array accordingly.
    """
    w_arr = np.asarray(w, dtype=float)
    single = w_arr.ndim == 2
    total = np.zeros(() if single else w_arr.shape[:-2])
    for t in kernel.terms:
        if t.base.shape != w_arr.shape[-2:]:
            raise ValueError(
                f"kernel dims {t.base.shape} do not match sample dims {w_arr.shape[-2:]}"
            )
        n = t.degree
        if n == 0:
            total = total + t.coeff
            continue
        na = norm_a(t.base, cov)
        if na == 0.0:
            continue
        p = _pairings(t.base, w_arr)
        total = total + t.coeff * na**n * hermite_prob(n, p / na)
    return float(total) if single else np.asarray(total)


def wick_dense_tensor(n: int, cov: Covariance, w) -> np.ndarray:
    """Dense Wick functional of degree n at sample w, built by the two-term
    recursion with the weighted pairing matrix."""
    w_arr = np.asarray(w, dtype=float)
    m, d = w_arr.shape
    _check_dense_limits(n, m * d)
    if d != cov.dim:
        raise ValueError(f"sample has {d} columns but covariance dim is {cov.dim}")
    wf = w_arr.ravel()
    t_mat = weight_pairing_matrix(cov, m)
    prev2 = np.array(1.0)
    if n == 0:
        return prev2
    prev1 = wf
    for k in range(2, n + 1):
        cur = _symmetrize_array(np.multiply.outer(wf, prev1))
        cur = cur - (k - 1) * _symmetrize_array(np.multiply.outer(t_mat, prev2))
        prev2, prev1 = prev1, cur
    return prev1


def wick_dense_closed_form(n: int, cov: Covariance, w) -> np.ndarray:
    """Dense Wick functional of degree n via the closed alternating sum

    sum_k (-1)^k n! / (2^k k! (n-2k)!) sym(T^(x)k (x) w^(x)(n-2k));

    independent of the recursion in ``wick_dense_tensor``.
    """
    w_arr = np.asarray(w, dtype=float)
    m, d = w_arr.shape
    _check_dense_limits(n, m * d)
    wf = w_arr.ravel()
    t_mat = weight_pairing_matrix(cov, m)
    total = np.zeros((m * d,) * n)
    if n == 0:
        return np.array(1.0)
    for k in range(n // 2 + 1):
        coeff = (-1) ** k * factorial(n) / (2**k * factorial(k) * factorial(n - 2 * k))
        piece = np.array(1.0)
        for _ in range(k):
            piece = np.multiply.outer(piece, t_mat)
        for _ in range(n - 2 * k):
            piece = np.multiply.outer(piece, wf)
        total = total + coeff * _symmetrize_array(piece)
    return total


def monomial_dense_from_wick(n: int, cov: Covariance, w) -> np.ndarray:
    """Rebuild the plain monomial tensor w^(x)n from Wick functionals via

    sum_k n! / (2^k k! (n-2k)!) sym(T^(x)k (x) :w^(x)(n-2k):).
    """
    w_arr = np.asarray(w, dtype=float)
    m, d = w_arr.shape
    _check_dense_limits(n, m * d)
    t_mat = weight_pairing_matrix(cov, m)
    if n == 0:
        return np.array(1.0)
    total = np.zeros((m * d,) * n)
    for k in range(n // 2 + 1):
        coeff = factorial(n) / (2**k * factorial(k) * factorial(n - 2 * k))
        piece = np.array(1.0)
        for _ in range(k):
            piece = np.multiply.outer(piece, t_mat)
        piece = np.multiply.outer(piece, wick_dense_tensor(n - 2 * k, cov, w_arr))
        total = total + coeff * _symmetrize_array(piece)
    return total


def wick_eval_dense(n: int, cov: Covariance, w, t: DenseTensor) -> float:
    """Pair the recursion-built dense Wick functional with a dense kernel.

    Agrees with ``wick_eval`` on the polarized form of ``t`` (the dense
    functional is symmetric, so a non-symmetric ``t`` is implicitly read
    through its symmetrization).
    """
    if t.degree != n:
        raise ValueError(f"kernel degree {t.degree} does not match n={n}")
    functional = wick_dense_tensor(n, cov, w)
    return float(np.sum(functional * t.array))


def kernel_inner_a(k1: SymKernel, k2: SymKernel, cov: Covariance) -> float:
    """Weighted inner product of two degree-n kernels:
    ``sum_ij a_i b_j (base_i, base_j)_A^n`` (coefficient product at degree 0)."""
    if k1.degree != k2.degree:
        raise ValueError(f"degree mismatch: {k1.degree} vs {k2.degree}")
    n = k1.degree
    total = 0.0
    for t1 in k1.terms:
        for t2 in k2.terms:
            total += t1.coeff * t2.coeff * inner_a(t1.base, t2.base, cov) ** n
    return total


def dense_inner_a(t1: DenseTensor, t2: DenseTensor, cov: Covariance) -> float:
    """Weighted contraction of two dense tensors: every axis pair is
    coupled through the weighted pairing matrix.  Oracle counterpart of
    ``kernel_inner_a``."""
    if t1.degree != t2.degree:
        raise ValueError(f"degree mismatch: {t1.degree} vs {t2.degree}")
    if t1.dims != t2.dims:
        raise ValueError(f"dims mismatch: {t1.dims} vs {t2.dims}")
    m, _ = t1.dims
    t_mat = weight_pairing_matrix(cov, m)
    weighted = t2.array
    for _ in range(t2.degree):
        weighted = np.tensordot(weighted, t_mat, axes=([0], [0]))
    return float(np.sum(t1.array * weighted))
