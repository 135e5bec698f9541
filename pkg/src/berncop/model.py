"""Discrete uniform-margin joints and the copula densities they induce.

A :class:`DiscreteJoint` is a probability tensor p(k_1, ..., k_d) on a
product grid whose one-dimensional margins are all exactly uniform.  Such a
tensor induces a copula density in two canonical ways: spreading each cell's
mass uniformly over its grid cell (grid-type), or mixing products of
Bernstein polynomials with the cell masses as weights (Bernstein).  Both are
special cases of the generic partition-of-unity mixture

    c(u) = sum_k p(k) * prod_i m_i * phi(m_i, k_i, u_i).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DomainError
from .partition import BERNSTEIN, INDICATOR, PartitionFamily, bernstein_weights, cell_index

MAX_CELLS = 10_000_000


class DiscreteJoint:
    """Immutable probability tensor with uniform one-dimensional margins.

    Parameters
    ----------
    p : array_like
        Dense tensor of cell probabilities, shape (m_1, ..., m_d).
    margin_tol : float
        Largest tolerated absolute deviation of any margin entry from
        1/m_i.  Internally fitted tensors meet the default 1e-10; data
        ingested from files goes through :func:`from_table`, which relaxes
        this to 1e-6.
    """

    def __init__(self, p, margin_tol: float = 1e-10):
        p = np.array(p, dtype=float)
        if p.ndim < 1:
            raise DataError("probability tensor must have at least one axis")
        if p.size > MAX_CELLS:
            raise DataError(f"grid of {p.size} cells exceeds the {MAX_CELLS} cap")
        if not np.all(np.isfinite(p)):
            raise DataError("probability tensor contains non-finite entries")
        if p.min() < -1e-15:
            raise DataError(f"negative probability {p.min()}")
        p[p < 0] = 0.0
        total = p.sum()
        if abs(total - 1.0) > 1e-12:
            raise DataError(f"probabilities sum to {total}, not 1")
        for axis in range(p.ndim):
            m = p.shape[axis]
            margin = p.sum(axis=tuple(i for i in range(p.ndim) if i != axis))
            worst = np.max(np.abs(margin - 1.0 / m))
            if worst > margin_tol:
                k = int(np.argmax(np.abs(margin - 1.0 / m)))
                raise DataError(
                    f"margin of axis {axis} is not uniform: entry {k} is "
                    f"{margin[k]:.10g}, expected {1.0 / m:.10g} "
                    f"(worst deviation {worst:.3g}, tol {margin_tol:.3g})"
                )
        p.flags.writeable = False
        self.p = p

    @property
    def d(self) -> int:
        return self.p.ndim

    @property
    def sizes(self) -> tuple:
        return self.p.shape

    def __repr__(self):
        shape = "x".join(str(m) for m in self.sizes)
        return f"DiscreteJoint({shape})"


@dataclass(frozen=True)
class DensityBound:
    """An upper bound M for a Bernstein copula density over the unit cube."""

    M: float
    method: str  # "analytic" | "numeric-refined"


def independence_joint(sizes) -> DiscreteJoint:
    """The uniform tensor: every cell carries 1/(m_1*...*m_d)."""
    sizes = tuple(int(m) for m in (sizes if np.iterable(sizes) else (sizes,)))
    if any(m < 1 for m in sizes):
        raise DomainError("grid sizes must be >= 1")
    return DiscreteJoint(np.full(sizes, 1.0 / np.prod(sizes)))


def from_table(table, orientation: str = "math", margin_tol: float = 1e-6) -> DiscreteJoint:
    """Build a 2-d DiscreteJoint from a probability matrix.

    orientation="math" uses the matrix indices directly (axis 0 = first
    component, ascending).  orientation="scatterplot" ingests a matrix laid
    out the way such tables are usually printed, with row labels descending
    from the top; the rows are flipped so that the bottom printed row becomes
    index 0 and both axes ascend with the underlying ranks.
    """
    table = np.asarray(table, dtype=float)
    if table.ndim != 2:
        raise DomainError("from_table expects a 2-d matrix")
    if orientation not in ("math", "scatterplot"):
        raise DomainError(f"unknown orientation {orientation!r}")
    if table.min() < 0:
        raise DataError(f"negative table entry {table.min()}")
    total = table.sum()
    if abs(total - 1.0) > 1e-9:
        raise DataError(f"table sums to {total}, not 1")
    if orientation == "scatterplot":
        table = np.flipud(table)
    return DiscreteJoint(table / total, margin_tol=margin_tol)


def _as_points(u, d):
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 1
    if scalar:
        u = u[None, :]
    if u.ndim != 2 or u.shape[1] != d:
        raise DomainError(f"expected points of dimension {d}, got shape {u.shape}")
    if u.size and (u.min() < 0.0 or u.max() > 1.0):
        raise DomainError("points must lie in the unit cube")
    return u, scalar


def _mixture(tensor, weight_mats):
    """sum_k tensor[k] * prod_i W_i[n, k_i] for a batch of n points."""
    t = np.tensordot(weight_mats[0], tensor, axes=([1], [0]))
    for w in weight_mats[1:]:
        t = np.einsum("nk,nk...->n...", w, t)
    return t


def generic_density(joint: DiscreteJoint, family: PartitionFamily, u):
    """Partition-of-unity copula density at u (point or batch of points)."""
    pts, scalar = _as_points(u, joint.d)
    mats = [
        joint.sizes[i] * family.weights(joint.sizes[i], pts[:, i]) for i in range(joint.d)
    ]
    vals = _mixture(joint.p, mats)
    return float(vals[0]) if scalar else vals


def bernstein_density(joint: DiscreteJoint, u):
    """Bernstein copula density: the generic mixture with the Bernstein family."""
    return generic_density(joint, BERNSTEIN, u)


def grid_density(joint: DiscreteJoint, u):
    """Grid-type (checkerboard) copula density: cellwise constant mass spread."""
    pts, scalar = _as_points(u, joint.d)
    idx = tuple(cell_index(pts[:, i], joint.sizes[i]) for i in range(joint.d))
    vals = joint.p[idx]
    for m in joint.sizes:
        vals = vals * m
    return float(vals[0]) if scalar else vals


def bernstein_cdf(joint: DiscreteJoint, x):
    """Bernstein copula CDF.

    C(x) = sum over k_i = 0..m_i of P(all U_i < k_i) * prod_i B(m_i, k_i, x_i);
    the strict-orthant probabilities vanish whenever some k_i = 0, so the sum
    effectively starts at 1.  Agrees with the integral of the density.
    """
    pts, scalar = _as_points(x, joint.d)
    lower = joint.p
    for axis in range(joint.d):
        lower = lower.cumsum(axis=axis)
    orthant = np.zeros(tuple(m + 1 for m in joint.sizes))
    orthant[tuple(slice(1, None) for _ in joint.sizes)] = lower
    mats = [bernstein_weights(m, pts[:, i]) for i, m in enumerate(joint.sizes)]
    vals = np.clip(_mixture(orthant, mats), 0.0, 1.0)
    return float(vals[0]) if scalar else vals


def marginal_joint(joint: DiscreteJoint, keep) -> DiscreteJoint:
    """Marginalize onto the given ascending, non-empty, strict subset of axes."""
    keep = tuple(int(i) for i in keep)
    if not keep or len(keep) >= joint.d:
        raise DomainError("keep must be a non-empty strict subset of the axes")
    if any(i < 0 or i >= joint.d for i in keep) or list(keep) != sorted(set(keep)):
        raise DomainError(f"keep={keep} is not an ascending subset of 0..{joint.d - 1}")
    dropped = tuple(i for i in range(joint.d) if i not in keep)
    return DiscreteJoint(joint.p.sum(axis=dropped))


def density_bound(joint: DiscreteJoint, inflation: float = 1.05) -> DensityBound:
    """Upper bound for the Bernstein density of the joint.

    The analytic bound M0 = prod(m_i) * max_k p(k) always dominates the
    density because the per-cell basis products are a convex combination.
    The refined bound inflates the maximum found by grid search (d <= 2) or
    random multistart local search (d > 2) by 5 percent and keeps whichever
    of the two is smaller.  Correctness of rejection sampling needs only
    c <= M, so the inflation trades a little efficiency for safety.
    """
    m0 = float(np.prod(joint.sizes) * joint.p.max())
    if joint.d <= 2:
        axes = [np.linspace(0.0, 1.0, 101) for _ in range(joint.d)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.column_stack([g.ravel() for g in mesh])
        found = float(np.max(bernstein_density(joint, pts)))
    else:
        from scipy.optimize import minimize

        probe_rng = np.random.default_rng(0x5EED)
        pts = probe_rng.random((4096, joint.d))
        dens = bernstein_density(joint, pts)
        found = float(np.max(dens))
        starts = pts[np.argsort(dens)[-16:]]
        for s in starts:
            res = minimize(
                lambda v: -bernstein_density(joint, np.clip(v, 0.0, 1.0)),
                s,
                method="L-BFGS-B",
                bounds=[(0.0, 1.0)] * joint.d,
            )
            found = max(found, float(-res.fun))
    refined = min(inflation * found, m0)
    if refined < m0:
        return DensityBound(M=refined, method="numeric-refined")
    return DensityBound(M=m0, method="analytic")


def density_grid(joint: DiscreteJoint, resolution: int, kind: str = "bernstein") -> np.ndarray:
    """Sample the density at cell midpoints of a resolution x resolution
    lattice; entry [i, j] is the density at ((i+0.5)/r, (j+0.5)/r)."""
    if joint.d != 2:
        raise DomainError("density_grid emits matrices for 2-d joints only")
    if resolution < 2:
        raise DomainError("resolution must be >= 2")
    mids = (np.arange(resolution) + 0.5) / resolution
    gx, gy = np.meshgrid(mids, mids, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    if kind == "bernstein":
        vals = bernstein_density(joint, pts)
    elif kind == "grid":
        vals = grid_density(joint, pts)
    else:
        raise DomainError(f"unknown density kind {kind!r}")
    return vals.reshape(resolution, resolution)


def write_joint_csv(joint: DiscreteJoint, path) -> None:
    """Serialize a joint to CSV: `# dims:` header, then a row-major matrix
    for d = 2 (one CSV row per axis-0 index) or flattened index-value rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# dims: " + ",".join(str(m) for m in joint.sizes) + "\n")
        if joint.d == 2:
            for row in joint.p:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        else:
            for idx in np.ndindex(*joint.sizes):
                cells = ",".join(str(i) for i in idx)
                fh.write(f"{cells},{joint.p[idx]:.17g}\n")


def read_joint_csv(path, margin_tol: float = 1e-6) -> DiscreteJoint:
    """Load a joint written by :func:`write_joint_csv`.  A plain matrix file
    without the dims header is accepted as a 2-d joint."""
    dims = None
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "dims:" in line:
                    spec = line.split("dims:", 1)[1]
                    dims = tuple(int(tok) for tok in spec.split(",") if tok.strip())
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: no data rows")
    if dims is None or len(dims) == 2:
        p = np.asarray(rows, dtype=float)
        if dims is not None and p.shape != dims:
            raise DataError(f"{path}: matrix shape {p.shape} does not match dims {dims}")
    else:
        p = np.zeros(dims)
        for row in rows:
            if len(row) != len(dims) + 1:
                raise DataError(f"{path}: expected {len(dims) + 1} fields per row")
            idx = tuple(int(v) for v in row[:-1])
            p[idx] = row[-1]
    return DiscreteJoint(p, margin_tol=margin_tol)
