"""From raw observations to a uniform-margin joint.

Pipeline: coordinate-wise relative ranks place the sample in the unit cube;
binning the ranks on a product grid gives a contingency tensor whose margins
are generally not uniform; a least-squares margin correction (closed-form
Lagrange solution, optionally followed by a shift-and-normalize feasibility
repair, or the exact nonnegativity-constrained quadratic program) produces
the probability tensor that induces the grid-type and Bernstein copulas.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import rankdata

from .errors import DataError, DomainError
from .model import DiscreteJoint
from .partition import cell_index


@dataclass(frozen=True)
class ContingencyTensor:
    """Integer cell counts of binned pseudo-observations.

    Relative frequencies are derived on demand; with ``exact=True`` they are
    Fractions, so margin identities can be checked without rounding error.
    """

    counts: np.ndarray
    n: int

    @classmethod
    def from_counts(cls, counts) -> "ContingencyTensor":
        counts = np.asarray(counts)
        if not np.issubdtype(counts.dtype, np.integer):
            rounded = np.rint(counts)
            if np.max(np.abs(counts - rounded)) > 1e-9:
                raise DataError("counts must be integers")
            counts = rounded.astype(np.int64)
        if counts.min() < 0:
            raise DataError("counts must be nonnegative")
        total = int(counts.sum())
        if total == 0:
            raise DataError("empty contingency tensor")
        return cls(counts=counts.astype(np.int64), n=total)

    @property
    def d(self) -> int:
        return self.counts.ndim

    @property
    def sizes(self) -> tuple:
        return self.counts.shape

    def frequencies(self, exact: bool = False) -> np.ndarray:
        if exact:
            out = np.empty(self.sizes, dtype=object)
            flat_counts = self.counts.ravel()
            flat = out.reshape(-1)
            for i in range(flat_counts.size):
                flat[i] = Fraction(int(flat_counts[i]), self.n)
            return out
        return self.counts / self.n


@dataclass(frozen=True)
class PseudoObservations:
    """Relative ranks of a multivariate sample; all points lie in (0, 1]."""

    points: np.ndarray

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


def pseudo_observations(data) -> PseudoObservations:
    """Coordinate-wise ranks divided by n; ties get the average rank.

    A constant column has no usable ordering and is rejected.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise DataError("observations must be an n x d matrix")
    n = data.shape[0]
    if n < 2:
        raise DataError("need at least two observations")
    if not np.all(np.isfinite(data)):
        raise DataError("observations contain non-finite values")
    cols = []
    for j in range(data.shape[1]):
        col = data[:, j]
        if np.ptp(col) == 0.0:
            raise DataError(f"column {j} is constant; dependence is undefined")
        cols.append(rankdata(col, method="average") / n)
    return PseudoObservations(points=np.column_stack(cols))


def contingency_table(obs: PseudoObservations, sizes) -> ContingencyTensor:
    """Bin pseudo-observations into the half-open grid cells (k/m, (k+1)/m]."""
    if np.isscalar(sizes):
        sizes = (int(sizes),) * obs.d
    sizes = tuple(int(m) for m in sizes)
    if len(sizes) != obs.d:
        raise DomainError(f"need {obs.d} grid sizes, got {len(sizes)}")
    if any(m < 1 for m in sizes):
        raise DomainError("grid sizes must be >= 1")
    counts = np.zeros(sizes, dtype=np.int64)
    idx = tuple(cell_index(obs.points[:, i], sizes[i]) for i in range(obs.d))
    np.add.at(counts, idx, 1)
    return ContingencyTensor(counts=counts, n=obs.n)


def _common_size(sizes) -> int:
    m = sizes[0]
    if any(s != m for s in sizes):
        raise DomainError(
            "margin uniformization requires a common grid size on every axis"
        )
    return int(m)


def uniformize_closed_form(table: ContingencyTensor, exact: bool = False) -> np.ndarray:
    """Least-squares margin correction without the nonnegativity constraints.

    For relative frequencies a on an m^d grid the unconstrained optimum is

        x[i_1..i_d] = a[i_1..i_d] - (1/m^(d-1)) * sum_k margin_k(i_k) + d/m^d

    where margin_k(i) sums a over all cells with k-th index i.  Every margin
    of x equals 1/m exactly; entries may be negative.  With ``exact=True``
    the arithmetic runs on Fractions and the identities are exact, not just
    within float rounding.
    """
    m = _common_size(table.sizes)
    d = table.d
    a = table.frequencies(exact=exact)
    if exact:
        scale = Fraction(1, m ** (d - 1))
        const = Fraction(d, m**d)
    else:
        scale = 1.0 / m ** (d - 1)
        const = d / m**d
    x = a + const
    for axis in range(d):
        margin = a.sum(axis=tuple(i for i in range(d) if i != axis))
        shape = [1] * d
        shape[axis] = m
        x = x - scale * margin.reshape(shape)
    return x


def shift_normalize(x: np.ndarray) -> np.ndarray:
    """Feasibility repair: add a = -min(x) to every cell (if the minimum is
    negative) and renormalize by 1 + m^d * a.  Margins stay exactly 1/m;
    already-nonnegative input is returned unchanged."""
    x = np.asarray(x)
    mn = x.min()
    if mn >= 0:
        return x
    shift = -mn
    return (x + shift) / (1 + x.size * shift)


def quadratic_error(x, table: ContingencyTensor) -> float:
    """Sum of squared deviations between a corrected tensor and the exact
    relative frequencies counts/n."""
    x = np.asarray(x)
    if x.shape != table.sizes:
        raise DataError(f"shape {x.shape} does not match table {table.sizes}")
    diff = x - table.frequencies()
    return float((diff * diff).sum())


def closed_form_multipliers(table: ContingencyTensor) -> list:
    """Lagrange multipliers of the unconstrained margin problem, one vector
    per axis: lambda_k(i) = margin_k(i)/m^(d-1) - 1/m^d."""
    m = _common_size(table.sizes)
    d = table.d
    a = table.frequencies()
    out = []
    for axis in range(d):
        margin = a.sum(axis=tuple(i for i in range(d) if i != axis))
        out.append(margin / m ** (d - 1) - 1.0 / m**d)
    return out


@dataclass
class FitReport:
    """Record of one fitting run: method, grid, and the quadratic errors of
    the candidate tables against the raw relative frequencies."""

    method: str
    sizes: tuple
    n: int
    shift: float
    quadratic_error_shifted: float
    quadratic_error_qp: float | None = None
    qp_iterations: int | None = None
    notes: dict = field(default_factory=dict)

    @property
    def quadratic_error(self) -> float:
        if self.method == "qp" and self.quadratic_error_qp is not None:
            return self.quadratic_error_qp
        return self.quadratic_error_shifted

    def to_json(self) -> str:
        payload = {
            "method": self.method,
            "grid": list(self.sizes),
            "n_observations": self.n,
            "shift": self.shift,
            "quadratic_error_shifted": self.quadratic_error_shifted,
            "quadratic_error_qp": self.quadratic_error_qp,
            "qp_iterations": self.qp_iterations,
            "quadratic_error": self.quadratic_error,
        }
        payload.update(self.notes)
        return json.dumps(payload, indent=2, sort_keys=True)


@dataclass
class FitResult:
    joint: DiscreteJoint
    report: FitReport
    table: ContingencyTensor


def fit(source, sizes=None, method: str = "closed_form") -> FitResult:
    """Full pipeline from raw data or a contingency tensor to a joint.

    ``source`` is either an n x d matrix of raw observations (then ``sizes``
    selects the grid) or a ready ContingencyTensor.  ``method`` picks the
    margin correction: "closed_form" (Lagrange solution plus shift repair)
    or "qp" (exact nonnegativity-constrained optimum, seeded with the
    closed-form table).
    """
    if method not in ("closed_form", "qp"):
        raise DomainError(f"unknown fit method {method!r}")
    if isinstance(source, ContingencyTensor):
        table = source
    else:
        if sizes is None:
            raise DomainError("grid sizes are required when fitting raw data")
        table = contingency_table(pseudo_observations(source), sizes)
    x = uniformize_closed_form(table)
    shift = float(max(0.0, -x.min()))
    y = shift_normalize(x)
    report = FitReport(
        method=method,
        sizes=table.sizes,
        n=table.n,
        shift=shift,
        quadratic_error_shifted=quadratic_error(y, table),
    )
    if method == "qp":
        from . import qp

        sol = qp.solve(table, initial=y)
        report.quadratic_error_qp = quadratic_error(sol.x, table)
        report.qp_iterations = sol.iterations
        chosen = sol.x
    else:
        chosen = y
    return FitResult(joint=DiscreteJoint(chosen), report=report, table=table)
