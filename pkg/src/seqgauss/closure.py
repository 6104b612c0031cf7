"""One-dimensional radiative-transfer moment hierarchy with two closures.

Projecting the transfer equation onto Legendre polynomials (squared norms
2/(2l+1), quoted for orientation only) yields the tridiagonal system

    dI_k/dt + b_{k,k-1} dI_{k-1}/dx + b_{k,k+1} dI_{k+1}/dx = -c_k I_k + q_k

with advection weights b_{k,k+1} = (k+1)/(2k+1) and b_{k,k-1} = k/(2k+1),
absorption c_0 = kappa and c_k = kappa + sigma for k > 0, and source
q_0 = 2 kappa q (higher moments unsourced).  Keeping moments 0..N leaves
the unresolved I_{N+1} in the last equation.  Two closures are offered:

* ``pn``: truncate, I_{N+1} = 0.
* ``optimal_prediction``: given a correlation matrix A over the moment
  indices, replace I_{N+1} by its best linear prediction from the
  resolved moments, r I_C with r = A_fc A_cc^{-1} (the row of the block
  coupling for index N+1).  The row is invariant under positive scaling
  of A, and a block-diagonal A (no resolved/unresolved coupling) gives
  r = 0, i.e. exactly the truncation closure.

Moments are numbered 0..N here, matching the physics convention; the
block projection in :mod:`seqgauss.core` counts leading coordinates
starting at 1, so a closure at order N corresponds to ``cut = N + 1``.

Time integration is one-step explicit Lax-Friedrichs on a uniform
periodic grid (conservative: spatial sums of each moment are exact
invariants of the pure-advection system).  The step enforces the CFL
bound dt <= cfl * dx / rho(B) with rho the spectral radius of the closed
advection matrix, computed numerically since the closure row can enlarge
it (it may even make the closed system non-hyperbolic; blow-up is
detected and reported, not prevented).  The source is evaluated at the
step start time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "MomentSystemCoeffs",
    "MaterialParams",
    "ClosureSpec",
    "MomentGrid",
    "build_moment_system",
    "closure_row",
    "closed_advection_matrix",
    "step",
    "solve_closure",
]

PN = "pn"
OPTIMAL_PREDICTION = "optimal_prediction"
DEFAULT_CFL = 0.9


@dataclass(frozen=True)
class MomentSystemCoeffs:
    """Advection coefficients of the moment hierarchy up to order N.

    ``b`` has shape (N+1, N+2): row k holds the couplings of moment k to
    its neighbours, including the unresolved column N+1.
    """

    order: int
    b: np.ndarray


@dataclass(frozen=True)
class MaterialParams:
    """Material data on a uniform grid of J cells over (a, b).

    ``sigma`` (scattering) and ``kappa`` (absorption) are per-cell arrays;
    ``source`` is a per-cell array or a callable (x_centers, t) -> array
    evaluated at the start of each step.
    """

    a: float
    b: float
    cells: int
    sigma: np.ndarray
    kappa: np.ndarray
    source: np.ndarray | Callable[[np.ndarray, float], np.ndarray]

    def __post_init__(self):
        if self.cells < 2:
            raise ValueError(f"need at least 2 cells, got {self.cells}")
        if not self.b > self.a:
            raise ValueError(f"domain ({self.a}, {self.b}) is empty")
        sigma = _per_cell(self.sigma, self.cells, "sigma")
        kappa = _per_cell(self.kappa, self.cells, "kappa")
        if (sigma < 0).any():
            raise ValueError("sigma must be non-negative")
        if (kappa < 0).any():
            raise ValueError("kappa must be non-negative")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "kappa", kappa)
        if not callable(self.source):
            object.__setattr__(
                self, "source", _per_cell(self.source, self.cells, "source")
            )

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.cells

    @property
    def x_centers(self) -> np.ndarray:
        return self.a + (np.arange(self.cells) + 0.5) * self.dx

    def source_values(self, t: float) -> np.ndarray:
        if callable(self.source):
            return _per_cell(self.source(self.x_centers, t), self.cells, "source")
        return self.source


def _per_cell(values, cells: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = np.full(cells, float(arr))
    if arr.shape != (cells,):
        raise ValueError(f"{name} must be scalar or length-{cells}, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class ClosureSpec:
    """Closure choice: plain truncation (``pn``) or best linear prediction
    of the first unresolved moment from a correlation matrix
    (``optimal_prediction``)."""

    kind: str
    correlation: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (PN, OPTIMAL_PREDICTION):
            raise ValueError(f"unknown closure kind {self.kind!r}")
        if self.kind == OPTIMAL_PREDICTION:
            if self.correlation is None:
                raise ValueError("optimal_prediction closure requires a correlation matrix")
            corr = np.asarray(self.correlation, dtype=float)
            if corr.ndim != 2 or corr.shape[0] != corr.shape[1]:
                raise ValueError(f"correlation matrix must be square, got {corr.shape}")
            object.__setattr__(self, "correlation", corr)


@dataclass(frozen=True)
class MomentGrid:
    """Moment values on the grid at one time: entry (j, k) is I_k at cell j."""

    t: float
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"values must be (cells, N+1), got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("moment grid contains non-finite values")
        if arr is self.values and arr.flags.writeable:
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def order(self) -> int:
        return self.values.shape[1] - 1


def build_moment_system(order: int) -> MomentSystemCoeffs:
    """Advection coefficients b_{k,k+1} = (k+1)/(2k+1), b_{k,k-1} = k/(2k+1)."""
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    b = np.zeros((order + 1, order + 2))
    for k in range(order + 1):
        b[k, k + 1] = (k + 1) / (2 * k + 1)
        if k >= 1:
            b[k, k - 1] = k / (2 * k + 1)
    b.setflags(write=False)
    return MomentSystemCoeffs(order=order, b=b)


def closure_row(spec: ClosureSpec, order: int) -> np.ndarray:
    """Row r with I_{N+1} ~ r @ (I_0, ..., I_N); zero for the truncation
    closure.

    For optimal prediction the correlation matrix must cover indices
    0..N+1 and its leading (N+1) x (N+1) block must be invertible; r is
    invariant under positive rescaling of the matrix.
    """
    if spec.kind == PN:
        return np.zeros(order + 1)
    corr = spec.correlation
    if corr.shape[0] < order + 2:
        raise ValueError(
            f"correlation matrix of size {corr.shape[0]} too small for order {order}"
        )
    a_cc = corr[: order + 1, : order + 1]
    a_fc = corr[order + 1, : order + 1]
    try:
        return np.linalg.solve(a_cc.T, a_fc)
    except np.linalg.LinAlgError:
        raise ValueError("leading correlation block is singular") from None


def closed_advection_matrix(coeffs: MomentSystemCoeffs, spec: ClosureSpec) -> np.ndarray:
    """Square advection matrix with the closure row folded into the last
    equation."""
    n = coeffs.order
    mat = coeffs.b[:, : n + 1].copy()
    mat[n, :] += coeffs.b[n, n + 1] * closure_row(spec, n)
    return mat


def _absorption(params: MaterialParams, order: int) -> np.ndarray:
    c = np.empty((params.cells, order + 1))
    c[:, 0] = params.kappa
    if order >= 1:
        c[:, 1:] = (params.kappa + params.sigma)[:, None]
    return c


def _source_term(params: MaterialParams, order: int, t: float) -> np.ndarray:
    q = np.zeros((params.cells, order + 1))
    q[:, 0] = 2.0 * params.kappa * params.source_values(t)
    return q


def step(
    state: MomentGrid,
    coeffs: MomentSystemCoeffs,
    params: MaterialParams,
    spec: ClosureSpec,
    dt: float,
    cfl: float = DEFAULT_CFL,
) -> MomentGrid:
    """One explicit Lax-Friedrichs step with periodic boundaries.

    Raises on CFL violation (dt > cfl * dx / rho of the closed advection
    matrix) and on non-finite output, reporting time and first bad cell.
    """
    if state.order != coeffs.order:
        raise ValueError(
            f"state order {state.order} does not match coefficients order {coeffs.order}"
        )
    if state.values.shape[0] != params.cells:
        raise ValueError(
            f"state has {state.values.shape[0]} cells, params have {params.cells}"
        )
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    b_closed = closed_advection_matrix(coeffs, spec)
    rho = float(np.abs(np.linalg.eigvals(b_closed)).max())
    if rho > 0.0 and dt > cfl * params.dx / rho * (1.0 + 1e-12):
        raise ValueError(
            f"CFL violation: dt = {dt:.6g} exceeds {cfl:.3g} * dx / rho = "
            f"{cfl * params.dx / rho:.6g}"
        )
    u = state.values
    left = np.roll(u, 1, axis=0)
    right = np.roll(u, -1, axis=0)
    # overflow here is caught by the finiteness check below, not warned about
    with np.errstate(over="ignore", invalid="ignore"):
        advected = (
            0.5 * (left + right)
            - (dt / (2.0 * params.dx)) * (right - left) @ b_closed.T
        )
        new = advected - dt * _absorption(params, state.order) * u
        new = new + dt * _source_term(params, state.order, state.t)
    t_new = state.t + dt
    if not np.all(np.isfinite(new)):
        bad = np.argwhere(~np.isfinite(new))[0]
        raise ValueError(
            f"solution blew up at t = {t_new:.6g}: non-finite moment {bad[1]} "
            f"in cell {bad[0]}"
        )
    return MomentGrid(t=t_new, values=new)


def solve_closure(
    initial: MomentGrid,
    params: MaterialParams,
    spec: ClosureSpec,
    t_final: float,
    dt: float | None = None,
    output_stride: int = 1,
    cfl: float = DEFAULT_CFL,
) -> list[MomentGrid]:
    """March the closed system to ``t_final``, collecting snapshots.

    With ``dt`` omitted the largest CFL-stable step is used.  The step
    count is ``round(t_final / dt)`` (at least one), so the reached end
    time is ``steps * dt``.  Snapshots are the initial state, every
    ``output_stride``-th step, and the final state.
    """
    if t_final <= 0:
        raise ValueError(f"t_final must be positive, got {t_final}")
    if output_stride < 1:
        raise ValueError(f"output_stride must be >= 1, got {output_stride}")
    coeffs = build_moment_system(initial.order)
    if dt is None:
        b_closed = closed_advection_matrix(coeffs, spec)
        rho = float(np.abs(np.linalg.eigvals(b_closed)).max())
        if rho == 0.0:
            raise ValueError("advection-free system: provide dt explicitly")
        dt = cfl * params.dx / rho
    n_steps = max(1, round(t_final / dt))
    snapshots = [initial]
    state = initial
    for i in range(1, n_steps + 1):
        state = step(state, coeffs, params, spec, dt, cfl=cfl)
        if i % output_stride == 0 or i == n_steps:
            snapshots.append(state)
    return snapshots
