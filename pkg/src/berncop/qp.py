"""Exact margin-matching quadratic program.

Solves  min ||x - a||^2  subject to every margin of x equal to 1/m_i and
x >= 0, with a primal-feasible active-set iteration.  The equality system
projects exactly at every step, complementarity is exact by construction,
and the returned multipliers certify the KKT conditions.  Instances are
tiny (at most a few thousand variables), so dense linear algebra is used
throughout.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DomainError, NumericError
from .fit import ContingencyTensor

_STATIONARITY_TOL = 1e-10
_MULTIPLIER_TOL = 1e-10
_STEP_TOL = 1e-12


def margin_constraints(sizes):
    """Full equality system (A, b): one row per axis index, A x sums the
    cells with that index, b = 1/m_i.  The system has one redundant row per
    axis beyond the first (all axis totals equal 1)."""
    sizes = tuple(int(m) for m in sizes)
    n_var = int(np.prod(sizes))
    grids = np.indices(sizes).reshape(len(sizes), n_var)
    rows = []
    targets = []
    for axis, m in enumerate(sizes):
        for k in range(m):
            row = np.zeros(n_var)
            row[grids[axis] == k] = 1.0
            rows.append(row)
            targets.append(1.0 / m)
    return np.array(rows), np.array(targets)


def _reduced_rows(sizes):
    """Row indices kept after dropping the last margin row of each axis
    beyond the first (the deterministic redundancy removal)."""
    keep = []
    offset = 0
    for axis, m in enumerate(sizes):
        for k in range(m):
            if axis == 0 or k < m - 1:
                keep.append(offset + k)
        offset += m
    return np.array(keep, dtype=int)


@dataclass
class QpSolution:
    """Minimizer plus the certificates needed to verify optimality."""

    x: np.ndarray
    objective: float
    iterations: int
    active: np.ndarray
    eq_multipliers: np.ndarray
    bound_multipliers: np.ndarray
    stationarity_residual: float


@dataclass
class KktReport:
    """Maximum violations of the three KKT condition groups."""

    stationarity: float
    feasibility: float
    complementarity: float
    min_multiplier: float
    tol: float = 1e-8

    @property
    def passed(self) -> bool:
        return (
            self.stationarity < self.tol
            and self.feasibility < self.tol
            and self.complementarity < self.tol
            and self.min_multiplier > -self.tol
        )

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (
            f"KKT stationarity {self.stationarity:.3e}, feasibility "
            f"{self.feasibility:.3e}, complementarity {self.complementarity:.3e} "
            f"-> {status}"
        )


def _target(a):
    if isinstance(a, ContingencyTensor):
        return a.frequencies(), a.sizes
    arr = np.asarray(a, dtype=float)
    return arr, arr.shape


def _feasible_initial(initial, A_red, b_red, n_var):
    """Project a proposed start onto the equality set; if that leaves
    negative cells, blend toward the (strictly interior) uniform tensor."""
    x0 = np.asarray(initial, dtype=float).ravel().copy()
    if x0.size != n_var:
        raise DataError(f"initial has {x0.size} cells, expected {n_var}")
    resid = b_red - A_red @ x0
    if np.max(np.abs(resid)) > 1e-12:
        gram = A_red @ A_red.T
        lam, *_ = np.linalg.lstsq(gram, resid, rcond=None)
        x0 = x0 + A_red.T @ lam
    if x0.min() < 0.0:
        uniform = np.full(n_var, 1.0 / n_var)
        neg = x0 < 0.0
        t = np.max(-x0[neg] / (uniform[neg] - x0[neg]))
        x0 = (1.0 - t) * x0 + t * uniform
    x0[x0 < 0.0] = 0.0
    return x0


def solve(a, initial=None) -> QpSolution:
    """Minimize ||x - a||^2 over {uniform margins, x >= 0}.

    ``a`` is a ContingencyTensor (target = relative frequencies) or a float
    tensor.  ``initial``, when given, is re-projected onto the feasible set
    if necessary; the default start is the shift-normalized closed-form
    table when all axes share one size, otherwise the uniform tensor.
    """
    target, sizes = _target(a)
    a_flat = target.ravel()
    n_var = a_flat.size
    A_full, b_full = margin_constraints(sizes)
    keep = _reduced_rows(sizes)
    A_red = A_full[keep]
    b_red = b_full[keep]

    if initial is None:
        if isinstance(a, ContingencyTensor) and len(set(sizes)) == 1:
            from .fit import shift_normalize, uniformize_closed_form

            initial = shift_normalize(uniformize_closed_form(a))
        else:
            initial = np.full(n_var, 1.0 / n_var)
    x = _feasible_initial(initial, A_red, b_red, n_var)

    working = x == 0.0
    max_iter = 10 * n_var
    lam_red = np.zeros(len(keep))
    mu = np.zeros(n_var)
    stat_res = np.inf

    iteration = 0
    while True:
        iteration += 1
        if iteration > max_iter:
            raise NumericError(
                f"active-set iteration cap {max_iter} exceeded; "
                "the instance is degenerate"
            )
        free = ~working
        A_f = A_red[:, free]
        rhs = b_red - A_f @ a_flat[free]
        gram = A_f @ A_f.T
        lam_eqp, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
        x_hat = np.zeros(n_var)
        x_hat[free] = a_flat[free] + A_f.T @ lam_eqp
        step = x_hat - x
        step[working] = 0.0

        if np.max(np.abs(step)) < _STEP_TOL:
            # At the EQP optimum: check bound multipliers for optimality.
            grad = 2.0 * (x - a_flat)
            lam_red, *_ = np.linalg.lstsq(A_f.T, -grad[free], rcond=None)
            mu = np.zeros(n_var)
            mu_working = grad[working] + A_red[:, working].T @ lam_red
            mu[working] = mu_working
            stat_res = float(
                np.max(np.abs(grad + A_red.T @ lam_red - mu)) if n_var else 0.0
            )
            negative = np.nonzero(working & (mu < -_MULTIPLIER_TOL))[0]
            if negative.size == 0 and stat_res < _STATIONARITY_TOL:
                break
            if negative.size == 0:
                # Residual stalls without a releasable constraint: accept if
                # it certifies optimality at a looser-but-safe level.
                if stat_res < 1e-8:
                    break
                raise NumericError(
                    f"stationarity residual {stat_res:.3e} not reducible"
                )
            working[negative[0]] = False  # Bland: smallest index leaves
            continue

        blocking = np.nonzero(free & (step < -1e-15) & (x + step < 0.0))[0]
        if blocking.size:
            alphas = -x[blocking] / step[blocking]
            alpha = min(1.0, float(alphas.min()))
        else:
            alpha = 1.0
        x = x + alpha * step
        x[working] = 0.0
        if alpha < 1.0:
            hits = blocking[np.abs(alphas - alpha) <= 1e-12 * max(1.0, alpha)]
            j = int(hits.min()) if hits.size else int(blocking[np.argmin(alphas)])
            working[j] = True  # Bland: smallest blocking index enters
            x[j] = 0.0
        x[x < 0.0] = 0.0

    mu[mu < 0.0] = 0.0
    x[x < 0.0] = 0.0
    lam_full = np.zeros(len(b_full))
    lam_full[keep] = lam_red
    diff = x - a_flat
    return QpSolution(
        x=x.reshape(sizes),
        objective=float(diff @ diff),
        iterations=iteration,
        active=np.nonzero(working)[0],
        eq_multipliers=lam_full,
        bound_multipliers=mu,
        stationarity_residual=stat_res,
    )


def kkt_residual(sol: QpSolution, a) -> KktReport:
    """Re-derive the KKT violations of a solution from scratch.

    Uses the full (redundant) equality system; multipliers for the dropped
    rows are zero, which is valid because those rows are linear combinations
    of the kept ones.
    """
    target, sizes = _target(a)
    if target.shape != sol.x.shape:
        raise DataError(f"shapes {target.shape} and {sol.x.shape} do not match")
    A_full, b_full = margin_constraints(sizes)
    x = sol.x.ravel()
    mu = sol.bound_multipliers
    grad = 2.0 * (x - target.ravel())
    stationarity = float(np.max(np.abs(grad + A_full.T @ sol.eq_multipliers - mu)))
    feasibility = float(
        max(np.max(np.abs(A_full @ x - b_full)), max(0.0, -x.min()))
    )
    complementarity = float(np.max(np.abs(mu * x)))
    return KktReport(
        stationarity=stationarity,
        feasibility=feasibility,
        complementarity=complementarity,
        min_multiplier=float(mu.min()) if mu.size else 0.0,
    )
