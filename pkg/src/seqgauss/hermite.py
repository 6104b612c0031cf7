"""Hermite polynomials in both normalizations plus a Gaussian quadrature oracle.

``hermite_prob`` evaluates the probabilists' polynomials (orthogonal under
the standard normal distribution with squared norms n!), ``hermite_phys``
the physicists' ones.  Evaluation uses the stable three-term recurrences

    H_{n+1}(x) = x H_n(x) - n H_{n-1}(x)
    G_{n+1}(x) = 2x G_n(x) - 2n G_{n-1}(x)

while ``hermite_prob_sum`` keeps the explicit alternating factorial sum as
an independent cross-check.  The two conventions are linked by
H_n(x) = 2^(-n/2) G_n(x / sqrt(2)) and G_n(x) = 2^(n/2) H_n(sqrt(2) x).

``gh_expectation`` integrates against the standard normal density by
Gauss-Hermite quadrature, exact for polynomials of degree < 2 * order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureRule",
    "hermite_prob",
    "hermite_phys",
    "hermite_prob_sum",
    "hermite_binomial_sum",
    "gaussian_quadrature",
    "gh_expectation",
]

DEFAULT_QUADRATURE_ORDER = 40


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights normalized so the weights sum to one, making
    ``sum(weights * g(nodes))`` an expectation under the standard normal."""

    nodes: np.ndarray
    weights: np.ndarray


def hermite_prob(n: int, x):
    """Probabilists' Hermite polynomial of degree n at x (scalar or array)."""
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    xa = np.asarray(x, dtype=float)
    prev = np.ones_like(xa)
    if n == 0:
        return prev if xa.ndim else float(prev)
    cur = xa.copy()
    for k in range(1, n):
        prev, cur = cur, xa * cur - k * prev
    return cur if xa.ndim else float(cur)


def hermite_phys(n: int, x):
    """Physicists' Hermite polynomial of degree n at x (scalar or array)."""
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    xa = np.asarray(x, dtype=float)
    prev = np.ones_like(xa)
    if n == 0:
        return prev if xa.ndim else float(prev)
    cur = 2.0 * xa
    for k in range(1, n):
        prev, cur = cur, 2.0 * xa * cur - 2.0 * k * prev
    return cur if xa.ndim else float(cur)


def hermite_prob_sum(n: int, x) -> float:
    """Closed alternating sum form of ``hermite_prob``; cross-check only.

    sum_{k=0}^{floor(n/2)} (-1)^k n! / (2^k k! (n-2k)!) x^(n-2k)
    """
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    total = 0.0
    for k in range(n // 2 + 1):
        coeff = (-1) ** k * factorial(n) / (2**k * factorial(k) * factorial(n - 2 * k))
        total += coeff * float(x) ** (n - 2 * k)
    return total


def hermite_binomial_sum(n: int, alpha: float, beta: float, x: float, y: float) -> float:
    """Right side of the binomial expansion of H_n(alpha x + beta y) for
    alpha^2 + beta^2 = 1, with the convention 0^0 = 1:

    sum_k C(n, k) alpha^k beta^(n-k) H_k(x) H_{n-k}(y)
    """
    total = 0.0
    for k in range(n + 1):
        # float exponentiation already follows 0.0 ** 0 == 1.0
        total += (
            comb(n, k)
            * alpha**k
            * beta ** (n - k)
            * hermite_prob(k, x)
            * hermite_prob(n - k, y)
        )
    return total


@lru_cache(maxsize=None)
def gaussian_quadrature(order: int = DEFAULT_QUADRATURE_ORDER) -> QuadratureRule:
    """Gauss-Hermite rule for the standard normal, cached per order."""
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    nodes, weights = np.polynomial.hermite_e.hermegauss(order)
    weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights)


def gh_expectation(g: Callable, order: int = DEFAULT_QUADRATURE_ORDER) -> float:
    """Expectation of g under the standard normal by Gauss-Hermite quadrature.

    Exact (to rounding) for polynomial g of degree <= 2 * order - 1.  g may
    be vectorized over an array of nodes; a scalar-only g also works.
    """
    rule = gaussian_quadrature(order)
    try:
        values = np.asarray(g(rule.nodes), dtype=float)
        if values.shape != rule.nodes.shape:
            raise ValueError
    except (TypeError, ValueError):
        values = np.array([float(g(t)) for t in rule.nodes])
    return float(np.sum(rule.weights * values))
