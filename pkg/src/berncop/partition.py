"""Partition-of-unity function families on the unit interval.

A family phi(m, k, .) with 0 <= k <= m-1 qualifies when every member is
nonnegative, integrates to 1/m over [0, 1], and the members sum to 1
pointwise.  Two concrete families are provided: Bernstein polynomials of
degree m-1 (smooth) and interval indicators on the m-cell grid (piecewise
constant), plus a coarsening construction that merges K adjacent members
of a finer family into one.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_LOG_SPACE_MIN_DEGREE = 21  # direct comb/power evaluation below, log-space above


def bernstein_basis(m: int, k: int, z: float) -> float:
    """Evaluate the Bernstein polynomial comb(m, k) * z**k * (1-z)**(m-k).

    Parameters
    ----------
    m : int
        Degree, m >= 0.
    k : int
        Index, 0 <= k <= m.
    z : float
        Point in [0, 1].

    Stable for degrees up to at least 64: for m >= 21 the binomial factor is
    folded into exponent space so no intermediate overflows.
    """
    if m < 0 or k < 0 or k > m:
        raise DomainError(f"index k={k} outside 0..{m}")
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"z={z} outside [0, 1]")
    if m < _LOG_SPACE_MIN_DEGREE:
        return math.comb(m, k) * z**k * (1.0 - z) ** (m - k)
    if z == 0.0:
        return 1.0 if k == 0 else 0.0
    if z == 1.0:
        return 1.0 if k == m else 0.0
    log_comb = math.lgamma(m + 1) - math.lgamma(k + 1) - math.lgamma(m - k + 1)
    return math.exp(log_comb + k * math.log(z) + (m - k) * math.log1p(-z))


def bernstein_basis_derivative(m: int, k: int, z: float) -> float:
    """d/dz of the degree-m Bernstein polynomial, via the degree-reduction
    identity m * [B(m-1, k-1, z) - B(m-1, k, z)] with out-of-range terms 0."""
    if m < 0 or k < 0 or k > m:
        raise DomainError(f"index k={k} outside 0..{m}")
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"z={z} outside [0, 1]")
    if m == 0:
        return 0.0
    lower = bernstein_basis(m - 1, k - 1, z) if k >= 1 else 0.0
    upper = bernstein_basis(m - 1, k, z) if k <= m - 1 else 0.0
    return m * (lower - upper)


def bernstein_weights(m: int, z) -> np.ndarray:
    """All Bernstein basis values of degree m at z, via the de Casteljau
    recurrence.

    Returns an array of shape (..., m+1) for array-valued z.  The recurrence
    uses only convex combinations, so the values are nonnegative and sum to 1
    to within a few ulp for any degree.
    """
    z = np.asarray(z, dtype=float)
    out = np.zeros(z.shape + (m + 1,))
    out[..., 0] = 1.0
    zc = z[..., None]
    for degree in range(1, m + 1):
        prev = out[..., :degree].copy()
        out[..., : degree + 1] = 0.0
        out[..., :degree] += (1.0 - zc) * prev
        out[..., 1 : degree + 1] += zc * prev
    return out


def cell_index(z, m: int) -> np.ndarray:
    """Grid cell of z under the half-open partition (k/m, (k+1)/m], k=0..m-1.

    z = 0 is assigned to cell 0 so the map is total on [0, 1].
    """
    z = np.asarray(z, dtype=float)
    idx = np.ceil(z * m).astype(int) - 1
    return np.clip(idx, 0, m - 1)


def indicator_basis(m: int, k: int, z: float) -> float:
    """Indicator of the half-open cell (k/m, (k+1)/m]; z = 0 belongs to cell 0."""
    if m < 1 or k < 0 or k > m - 1:
        raise DomainError(f"index k={k} outside 0..{m - 1}")
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"z={z} outside [0, 1]")
    if z == 0.0:
        return 1.0 if k == 0 else 0.0
    return 1.0 if k / m < z <= (k + 1) / m else 0.0


class PartitionFamily:
    """A partition-of-unity family phi(m, k, .) on [0, 1].

    ``evaluate`` gives single members; ``weights`` returns the length-m vector
    (phi(m, 0, z), ..., phi(m, m-1, z)) and is the path used by the copula
    density evaluators, vectorized over z where the family supports it.
    """

    def __init__(self, name: str, evaluator, weights_fn=None):
        self.name = name
        self._evaluator = evaluator
        self._weights_fn = weights_fn

    def evaluate(self, m: int, k: int, z: float) -> float:
        if m < 1 or k < 0 or k > m - 1:
            raise DomainError(f"index k={k} outside 0..{m - 1}")
        if not 0.0 <= z <= 1.0:
            raise DomainError(f"z={z} outside [0, 1]")
        return self._evaluator(m, k, z)

    def weights(self, m: int, z) -> np.ndarray:
        """phi(m, k, z) for k = 0..m-1; shape (..., m) for array z."""
        if m < 1:
            raise DomainError("m must be >= 1")
        if self._weights_fn is not None:
            return self._weights_fn(m, z)
        z = np.asarray(z, dtype=float)
        flat = z.ravel()
        out = np.array([[self._evaluator(m, k, zz) for k in range(m)] for zz in flat])
        return out.reshape(z.shape + (m,))

    def __repr__(self):
        return f"PartitionFamily({self.name!r})"


def _indicator_weights(m, z):
    z = np.asarray(z, dtype=float)
    idx = cell_index(z, m)
    out = np.zeros(z.shape + (m,))
    np.put_along_axis(out, idx[..., None], 1.0, axis=-1)
    return out


BERNSTEIN = PartitionFamily(
    "bernstein",
    lambda m, k, z: bernstein_basis(m - 1, k, z),
    weights_fn=lambda m, z: bernstein_weights(m - 1, z),
)

INDICATOR = PartitionFamily("indicator", indicator_basis, weights_fn=_indicator_weights)


def coarsen(base: PartitionFamily, K: int) -> PartitionFamily:
    """Merge K adjacent members of the refined family into one:
    phi_K(m, k, .) = sum_{j=0}^{K-1} phi(K*m, K*k + j, .).

    The result is again a partition of unity: each member integrates to
    K * 1/(K*m) = 1/m and the pointwise sum telescopes to the full fine sum.
    """
    if K < 1:
        raise DomainError("K must be a positive integer")

    def evaluator(m, k, z):
        return sum(base.evaluate(K * m, K * k + j, z) for j in range(K))

    def weights_fn(m, z):
        fine = base.weights(K * m, z)
        return fine.reshape(fine.shape[:-1] + (m, K)).sum(axis=-1)

    return PartitionFamily(f"{base.name}[K={K}]", evaluator, weights_fn=weights_fn)


def _adaptive_simpson(f, a, b, tol, max_depth=60):
    """Recursive adaptive Simpson quadrature with Richardson correction."""

    def simpson(fa, fm, fb, a_, b_):
        return (b_ - a_) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a_, b_, fa, fm, fb, whole, tol_, depth):
        mid = 0.5 * (a_ + b_)
        lm = 0.5 * (a_ + mid)
        rm = 0.5 * (mid + b_)
        flm = f(lm)
        frm = f(rm)
        left = simpson(fa, flm, fm, a_, mid)
        right = simpson(fm, frm, fb, mid, b_)
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * tol_:
            return left + right + (left + right - whole) / 15.0
        return recurse(a_, mid, fa, flm, fm, left, tol_ / 2.0, depth + 1) + recurse(
            mid, b_, fm, frm, fb, right, tol_ / 2.0, depth + 1
        )

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = simpson(fa, fm, fb, a, b)
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


@dataclass
class PartitionReport:
    """Outcome of checking the two partition-of-unity conditions."""

    family: str
    m: int
    tol: float
    max_integral_error: float
    max_sum_error: float
    passed: bool

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (
            f"{self.family} m={self.m}: integral err {self.max_integral_error:.3e}, "
            f"sum err {self.max_sum_error:.3e} -> {status}"
        )


def validate_partition(
    family: PartitionFamily, m: int, tol: float = 1e-10, sweep_points: int = 1001
) -> PartitionReport:
    """Check that every member integrates to 1/m (adaptive Simpson at
    absolute tolerance tol/10) and that members sum to 1 on a pointwise
    sweep of at least 1001 points."""
    if m < 1:
        raise DomainError("m must be >= 1")
    if tol <= 0:
        raise DomainError("tol must be > 0")
    target = 1.0 / m
    integral_err = 0.0
    for k in range(m):
        val = _adaptive_simpson(lambda z: family.evaluate(m, k, z), 0.0, 1.0, tol / 10.0)
        integral_err = max(integral_err, abs(val - target))
    zs = np.linspace(0.0, 1.0, max(sweep_points, 1001))
    sums = family.weights(m, zs).sum(axis=-1)
    sum_err = float(np.max(np.abs(sums - 1.0)))
    return PartitionReport(
        family=family.name,
        m=m,
        tol=tol,
        max_integral_error=float(integral_err),
        max_sum_error=sum_err,
        passed=integral_err < tol and sum_err < tol,
    )
