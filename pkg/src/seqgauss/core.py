"""Linear algebra on truncated sequence spaces with a covariance weight.

The ambient space is the set of m-by-d real matrices F, read as a
d-sequence of vectors in R^m (column k of F is the k-th sequence entry).
We call such a matrix a *sequence vector*.  Two bilinear maps connect the
pieces:

* ``bullet(h, x)`` embeds a vector h in R^m and a coefficient sequence x
  in R^d as the rank-one sequence vector with k-th column ``x[k] * h``.
* ``bracket(f, x)`` contracts a sequence vector against a coefficient
  sequence, returning ``sum_k x[k] * f_k`` in R^m.

A symmetric positive-definite d-by-d matrix A (the covariance weight)
induces the weighted inner product ``(f, g)_A = (f, g A)_F`` used
throughout the package; ``Covariance`` caches its Cholesky factor.  The
module also provides A-orthogonal Gram-Schmidt, the extension of a d-by-d
operator to sequence vectors, the block form of the A-orthogonal
projection onto leading coordinates, and positive-semidefiniteness
helpers (Schur products preserve PSD).

All values are immutable after construction; every function is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "TruncationDims",
    "Covariance",
    "ProjectionBlocks",
    "bullet",
    "bracket",
    "inner_l2",
    "inner_a",
    "norm_a",
    "apply_matrix",
    "apply_extended",
    "gram_schmidt",
    "gram_schmidt_a",
    "block_projection",
    "psd_check",
    "hadamard",
]


def _as_matrix(f, name: str = "f") -> np.ndarray:
    arr = np.asarray(f, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _as_vector(x, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class TruncationDims:
    """Truncation sizes: m entries per vector, d sequence positions."""

    m: int
    d: int

    def __post_init__(self):
        if self.m < 1 or self.d < 1:
            raise ValueError(f"dims must be positive, got m={self.m}, d={self.d}")


class Covariance:
    """Symmetric positive-definite weight matrix with cached Cholesky factor.

    Symmetry is required up to 1e-12 relative to the largest entry and the
    matrix must be strictly positive definite; construction fails loudly
    otherwise (no jitter is added, since the weighted norm would degenerate).
    """

    SYMMETRY_RTOL = 1e-12

    def __init__(self, matrix) -> None:
        a = _as_matrix(matrix, "covariance matrix")
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"covariance matrix must be square, got {a.shape}")
        scale = np.abs(a).max() or 1.0
        if np.abs(a - a.T).max() > self.SYMMETRY_RTOL * scale:
            raise ValueError("covariance matrix is not symmetric")
        a = 0.5 * (a + a.T)
        try:
            chol = np.linalg.cholesky(a)
        except np.linalg.LinAlgError:
            raise ValueError("covariance matrix is not positive definite") from None
        a.setflags(write=False)
        chol.setflags(write=False)
        self._matrix = a
        self._chol = chol

    @classmethod
    def identity(cls, d: int) -> "Covariance":
        return cls(np.eye(d))

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def chol(self) -> np.ndarray:
        """Lower-triangular L with ``matrix = L @ L.T``."""
        return self._chol

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def apply(self, x) -> np.ndarray:
        """Matrix-vector product A x on coefficient sequences."""
        return self._matrix @ _as_vector(x)

    def inner(self, x, y) -> float:
        """Weighted inner product (x, A y) on R^d."""
        return float(_as_vector(x) @ self._matrix @ _as_vector(y))

    def __repr__(self) -> str:  # pragma: no cover
        return f"Covariance(dim={self.dim})"


@dataclass(frozen=True)
class ProjectionBlocks:
    """Block matrices of the A-orthogonal projection onto the first ``cut``
    coordinates: P fixes those coordinates and fills them from the rest via
    the covariance blocks, while its weighted adjoint PT satisfies
    ``A P = PT A``."""

    cut: int
    p: np.ndarray
    pt: np.ndarray


def bullet(h, x) -> np.ndarray:
    """Rank-one embedding: column k of the result is ``x[k] * h``.

    Satisfies the norm identity ||bullet(h, x)||_F = ||h|| * ||x||.
    """
    hv = _as_vector(h, "h")
    xv = _as_vector(x, "x")
    return np.outer(hv, xv)


def bracket(f, x) -> np.ndarray:
    """Contraction sum_k x[k] * f_k, i.e. the matrix-vector product F x."""
    fm = _as_matrix(f, "f")
    xv = _as_vector(x, "x")
    if fm.shape[1] != xv.shape[0]:
        raise ValueError(
            f"sequence length mismatch: f has {fm.shape[1]} columns, x has {xv.shape[0]}"
        )
    return fm @ xv


def inner_l2(f, g) -> float:
    """Frobenius inner product sum_k (f_k, g_k)."""
    fm = _as_matrix(f, "f")
    gm = _as_matrix(g, "g")
    if fm.shape != gm.shape:
        raise ValueError(f"shape mismatch: {fm.shape} vs {gm.shape}")
    return float(np.sum(fm * gm))


def apply_matrix(m: np.ndarray, f) -> np.ndarray:
    """Extend a d-by-d matrix M to sequence vectors: column l of the result
    is ``sum_k M[l, k] * f_k``, i.e. ``F @ M.T``.

    The extension is basis independent: expanding f against any orthonormal
    basis (b_k) of R^d and mapping each b_k through M gives the same matrix.
    """
    fm = _as_matrix(f, "f")
    mm = _as_matrix(m, "operator matrix")
    if mm.shape[0] != mm.shape[1] or mm.shape[0] != fm.shape[1]:
        raise ValueError(
            f"operator of shape {mm.shape} cannot act on sequence of length {fm.shape[1]}"
        )
    return fm @ mm.T


def apply_extended(cov: Covariance, f) -> np.ndarray:
    """Apply the covariance weight to a sequence vector (``F @ A``)."""
    return apply_matrix(cov.matrix, f)


def inner_a(f, g, cov: Covariance) -> float:
    """Weighted inner product (f, g)_A = trace(F^T G A); symmetric in f, g."""
    fm = _as_matrix(f, "f")
    gm = _as_matrix(g, "g")
    if fm.shape != gm.shape:
        raise ValueError(f"shape mismatch: {fm.shape} vs {gm.shape}")
    if fm.shape[1] != cov.dim:
        raise ValueError(
            f"sequence length {fm.shape[1]} does not match covariance dim {cov.dim}"
        )
    return float(np.sum(fm * (gm @ cov.matrix)))


def norm_a(f, cov: Covariance) -> float:
    """Weighted norm ||f||_A; clamps tiny negative rounding to zero."""
    return float(np.sqrt(max(inner_a(f, f, cov), 0.0)))


def gram_schmidt(
    vectors: Sequence,
    inner: Callable[[np.ndarray, np.ndarray], float],
    tol: float = 1e-12,
) -> list[np.ndarray]:
    """Orthonormalize ``vectors`` with respect to an inner product.

    Modified Gram-Schmidt with one re-orthogonalization pass.  A vector
    whose residual norm falls to ``tol`` times its input norm (or to zero)
    is dropped as dependent; input order is preserved otherwise.  Raises if
    the input list is empty or every vector is dropped.
    """
    if len(vectors) == 0:
        raise ValueError("cannot orthonormalize an empty list")
    basis: list[np.ndarray] = []
    for v in vectors:
        w = np.array(v, dtype=float)
        scale = np.sqrt(max(inner(w, w), 0.0))
        for _ in range(2):
            for b in basis:
                w = w - inner(w, b) * b
        residual = np.sqrt(max(inner(w, w), 0.0))
        if residual <= tol * scale or residual == 0.0:
            continue
        basis.append(w / residual)
    if not basis:
        raise ValueError("all input vectors are zero or dependent")
    return basis


def gram_schmidt_a(xs: Sequence, cov: Covariance, tol: float = 1e-12) -> list[np.ndarray]:
    """A-orthonormalize a list of coefficient sequences in R^d."""
    vecs = [_as_vector(x, "conditioning vector") for x in xs]
    for v in vecs:
        if v.shape[0] != cov.dim:
            raise ValueError(
                f"vector of length {v.shape[0]} does not match covariance dim {cov.dim}"
            )
    return gram_schmidt(vecs, cov.inner, tol=tol)


def block_projection(cov: Covariance, cut: int) -> ProjectionBlocks:
    """Block form of the A-orthogonal projection onto the first ``cut``
    coordinates of R^d.

    With A split at ``cut`` into blocks [[A_cc, A_cf], [A_fc, A_ff]],

        P  = [[I, A_cc^-1 A_cf], [0, 0]]      (P^2 = P, range = leading span)
        PT = [[I, 0], [A_fc A_cc^-1, 0]]      (A P = PT A)

    so (x, P y)_A = (P x, y)_A and ||P x||_A <= ||x||_A for all x.
    """
    d = cov.dim
    if not 1 <= cut < d:
        raise ValueError(f"cut must satisfy 1 <= cut < {d}, got {cut}")
    a = cov.matrix
    a_cc = a[:cut, :cut]
    a_cf = a[:cut, cut:]
    try:
        coupling = np.linalg.solve(a_cc, a_cf)
    except np.linalg.LinAlgError:
        raise ValueError("leading covariance block is singular") from None
    p = np.zeros((d, d))
    p[:cut, :cut] = np.eye(cut)
    p[:cut, cut:] = coupling
    pt = np.zeros((d, d))
    pt[:cut, :cut] = np.eye(cut)
    pt[cut:, :cut] = coupling.T
    p.setflags(write=False)
    pt.setflags(write=False)
    return ProjectionBlocks(cut=cut, p=p, pt=pt)


def psd_check(m, tol: float = 1e-9) -> bool:
    """True iff the symmetric matrix m has smallest eigenvalue >= -tol * ||m||.

    The tolerance is relative to the spectral norm; raises on non-symmetric
    input (symmetry is checked against the same relative tolerance).
    """
    mm = _as_matrix(m, "matrix")
    if mm.shape[0] != mm.shape[1]:
        raise ValueError(f"matrix must be square, got {mm.shape}")
    scale = np.abs(mm).max() or 1.0
    if np.abs(mm - mm.T).max() > max(tol, 1e-12) * scale:
        raise ValueError("matrix is not symmetric")
    eigs = np.linalg.eigvalsh(0.5 * (mm + mm.T))
    spectral = np.abs(eigs).max() if eigs.size else 0.0
    return bool(eigs.min() >= -tol * spectral)


def hadamard(m1, m2) -> np.ndarray:
    """Entrywise (Schur) product; preserves positive semidefiniteness."""
    a = _as_matrix(m1, "m1")
    b = _as_matrix(m2, "m2")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a * b
