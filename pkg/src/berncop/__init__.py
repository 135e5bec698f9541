"""berncop: grid-type and Bernstein copulas fitted from contingency tables,
sampled by acceptance-rejection, and aggregated into PML-by-return-period
loss estimates."""

from .errors import DataError, DomainError, NumericError
from .fit import (
    ContingencyTensor,
    FitReport,
    FitResult,
    PseudoObservations,
    contingency_table,
    fit,
    pseudo_observations,
    quadratic_error,
    shift_normalize,
    uniformize_closed_form,
)
from .model import (
    DensityBound,
    DiscreteJoint,
    bernstein_cdf,
    bernstein_density,
    density_bound,
    density_grid,
    from_table,
    generic_density,
    grid_density,
    independence_joint,
    marginal_joint,
    read_joint_csv,
    write_joint_csv,
)
from .partition import (
    BERNSTEIN,
    INDICATOR,
    PartitionFamily,
    bernstein_basis,
    bernstein_basis_derivative,
    coarsen,
    indicator_basis,
    validate_partition,
)
from .qp import KktReport, QpSolution, kkt_residual, solve
from .rng import RandomSource
from .risk import (
    CompareConfig,
    MarginalModel,
    RiskReport,
    Scenario,
    compare_scenarios,
    fit_qq,
    load_config,
    pml_curve,
    quantile,
    simulate_aggregate,
)
from .sampling import (
    SampleBatch,
    estimate_gaussian_correlation,
    inverse_normal_cdf,
    sample_bernstein,
    sample_gaussian_copula,
    sample_grid,
    sample_independence,
)

__version__ = "0.1.0"

__all__ = [
    "BERNSTEIN",
    "INDICATOR",
    "CompareConfig",
    "ContingencyTensor",
    "DataError",
    "DensityBound",
    "DiscreteJoint",
    "DomainError",
    "FitReport",
    "FitResult",
    "KktReport",
    "MarginalModel",
    "NumericError",
    "PartitionFamily",
    "PseudoObservations",
    "QpSolution",
    "RandomSource",
    "RiskReport",
    "SampleBatch",
    "Scenario",
    "bernstein_basis",
    "bernstein_basis_derivative",
    "bernstein_cdf",
    "bernstein_density",
    "coarsen",
    "compare_scenarios",
    "contingency_table",
    "density_bound",
    "density_grid",
    "estimate_gaussian_correlation",
    "fit",
    "fit_qq",
    "from_table",
    "generic_density",
    "grid_density",
    "independence_joint",
    "indicator_basis",
    "inverse_normal_cdf",
    "kkt_residual",
    "load_config",
    "marginal_joint",
    "pml_curve",
    "pseudo_observations",
    "quadratic_error",
    "quantile",
    "read_joint_csv",
    "sample_bernstein",
    "sample_gaussian_copula",
    "sample_grid",
    "sample_independence",
    "shift_normalize",
    "simulate_aggregate",
    "solve",
    "uniformize_closed_form",
    "validate_partition",
    "write_joint_csv",
]
