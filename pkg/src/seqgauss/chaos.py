"""Chaos expansions and conditional expectations as weighted projections.

A chaos expansion is a finite map degree -> symmetric kernel; its value at
a sample W is the sum of the Wick-ordered monomials of its kernels, and
the inner product of two expansions is

    (F, G) = sum_n n! (f_n, g_n)_A ,

reflecting the orthogonality of Wick monomials of different degrees.

Conditioning on the sigma-algebra generated by the linear observables
<psi_1, .>, ..., <psi_q, .> of an A-orthonormal family acts kernel-wise:
each rank-one term ``coeff * base^(x)n`` maps to ``coeff *
(proj base)^(x)n`` where ``proj`` is the A-orthogonal projection onto
span{psi_k}.  The operation is idempotent and contractive, and the result
only depends on the span of the conditioning family (non-orthonormal
input is orthonormalized internally where noted).

For a single degree-1 functional <f, .> conditioned on coefficient
sequences x_1, ..., x_q in R^d, the projected kernel has the explicit
form ``sum_k bullet(bracket(f, A x_k), x_k)`` over an A-orthonormalized
family; ``cond_exp_monomial`` computes it directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .core import Covariance, bracket, bullet, gram_schmidt, gram_schmidt_a, inner_a
from .measure import McEstimate, SampleBatch, pairings
from .wick import RankOnePower, SymKernel, kernel_inner_a, wick_eval

__all__ = [
    "ChaosExpansion",
    "ConditioningSet",
    "eval_expansion",
    "chaos_inner",
    "chaos_norm",
    "project_onto_set",
    "cond_exp_chaos",
    "cond_exp_monomial",
    "mc_cond_check",
]

ORTHONORMAL_TOL = 1e-8


@dataclass(frozen=True)
class ChaosExpansion:
    """Finite chaos expansion: map from degree to symmetric kernel."""

    kernels: dict[int, SymKernel]

    def __post_init__(self):
        for n, k in self.kernels.items():
            if k.degree != n:
                raise ValueError(f"kernel of degree {k.degree} stored under key {n}")

    @property
    def degrees(self) -> list[int]:
        return sorted(self.kernels)


@dataclass(frozen=True)
class ConditioningSet:
    """A-orthonormal family of sequence vectors spanning the conditioning
    subspace."""

    basis: tuple[np.ndarray, ...]

    def __post_init__(self):
        basis = tuple(np.array(b, dtype=float) for b in self.basis)
        if not basis:
            raise ValueError("conditioning set must be non-empty")
        shape = basis[0].shape
        for b in basis:
            if b.shape != shape:
                raise ValueError("conditioning vectors must share one shape")
            b.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def from_vectors(cls, vectors, cov: Covariance, tol: float = 1e-12) -> "ConditioningSet":
        """Build a conditioning set by A-orthonormalizing arbitrary
        sequence vectors (dependent inputs are dropped)."""
        vecs = [np.asarray(v, dtype=float) for v in vectors]
        basis = gram_schmidt(vecs, lambda f, g: inner_a(f, g, cov), tol=tol)
        return cls(basis=tuple(basis))

    def validate(self, cov: Covariance, tol: float = ORTHONORMAL_TOL) -> None:
        for i, bi in enumerate(self.basis):
            for j in range(i, len(self.basis)):
                target = 1.0 if i == j else 0.0
                val = inner_a(bi, self.basis[j], cov)
                if abs(val - target) > tol:
                    raise ValueError(
                        f"conditioning set is not A-orthonormal: "
                        f"(psi_{i}, psi_{j})_A = {val:.3e}"
                    )


def eval_expansion(expansion: ChaosExpansion, cov: Covariance, w):
    """Value of the expansion at one sample or a stacked batch of samples."""
    w_arr = np.asarray(w, dtype=float)
    single = w_arr.ndim == 2
    total = np.zeros(() if single else w_arr.shape[:-2])
    for n in expansion.degrees:
        total = total + wick_eval(expansion.kernels[n], cov, w_arr)
    return float(total) if single else np.asarray(total)


def chaos_inner(e1: ChaosExpansion, e2: ChaosExpansion, cov: Covariance) -> float:
    """Inner product sum_n n! (f_n, g_n)_A over shared degrees."""
    total = 0.0
    for n in e1.degrees:
        if n in e2.kernels:
            total += factorial(n) * kernel_inner_a(e1.kernels[n], e2.kernels[n], cov)
    return total


def chaos_norm(expansion: ChaosExpansion, cov: Covariance) -> float:
    return float(np.sqrt(max(chaos_inner(expansion, expansion, cov), 0.0)))


def project_onto_set(phi, conditioning: ConditioningSet, cov: Covariance) -> np.ndarray:
    """A-orthogonal projection of a sequence vector onto the conditioning
    span: sum_k (phi, psi_k)_A psi_k."""
    p = np.asarray(phi, dtype=float)
    out = np.zeros_like(p)
    for psi in conditioning.basis:
        out = out + inner_a(p, psi, cov) * psi
    return out


def cond_exp_chaos(
    expansion: ChaosExpansion,
    conditioning: ConditioningSet,
    cov: Covariance,
) -> ChaosExpansion:
    """Conditional expectation of a chaos expansion given the linear
    observables of the conditioning set.

    Projects every rank-one base onto the conditioning span, term by term
    and degree by degree (degree-0 kernels are unchanged).  Idempotent and
    contractive in the chaos norm; raises if the conditioning set is not
    A-orthonormal.
    """
    conditioning.validate(cov)
    kernels: dict[int, SymKernel] = {}
    for n, kernel in expansion.kernels.items():
        if n == 0:
            kernels[n] = kernel
            continue
        terms = tuple(
            RankOnePower(t.coeff, project_onto_set(t.base, conditioning, cov), n)
            for t in kernel.terms
        )
        kernels[n] = SymKernel(degree=n, terms=terms)
    return ChaosExpansion(kernels=kernels)


def cond_exp_monomial(f, xs, cov: Covariance, tol: float = 1e-12) -> np.ndarray:
    """Kernel of the conditional expectation of <f, .> given the
    coefficient sequences ``xs`` in R^d.

    The inputs are A-orthonormalized first (the result depends only on
    their span); the projected kernel is
    ``sum_k bullet(bracket(f, A x_k), x_k)``.  Raises if the conditioning
    span is degenerate (every input dropped).
    """
    fm = np.asarray(f, dtype=float)
    basis = gram_schmidt_a(xs, cov, tol=tol)
    out = np.zeros_like(fm)
    for x in basis:
        out = out + bullet(bracket(fm, cov.apply(x)), x)
    return out


def mc_cond_check(
    expansion: ChaosExpansion,
    conditioning: ConditioningSet,
    cov: Covariance,
    g,
    batch: SampleBatch,
) -> McEstimate:
    """Monte Carlo residual test of the conditional expectation: estimates

        E[ (F - E[F | conditioning]) * g(<psi_1, W>, ..., <psi_q, W>) ]

    which is zero for any test function of the conditioning coordinates
    (use polynomial g of modest degree, <= 6, so moments exist cleanly).
    ``g`` receives a (count, q) array of coordinates and may return a
    (count,) array; a per-sample scalar function also works.
    """
    if batch.count == 0:
        raise ValueError("empty batch")
    conditioned = cond_exp_chaos(expansion, conditioning, cov)
    residual = eval_expansion(expansion, cov, batch.samples) - eval_expansion(
        conditioned, cov, batch.samples
    )
    coords = np.stack([pairings(psi, batch) for psi in conditioning.basis], axis=1)
    try:
        gvals = np.asarray(g(coords), dtype=float)
        if gvals.shape != (batch.count,):
            raise ValueError
    except (TypeError, ValueError):
        gvals = np.array([float(g(row)) for row in coords])
    values = residual * gvals
    n = batch.count
    mean = float(values.mean())
    se = float(values.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return McEstimate(value=mean, std_error=se, count=n)
