"""Bundled example data: a 34-year two-peril contingency table and the
marginal loss models estimated for the same series.

The raw loss series is not distributed; the 10x10 table of rank-bin counts
is all the dependence fitting needs, and the margins are given directly by
their fitted (mu, sigma) parameters.
"""

from importlib import resources

import numpy as np

from .fit import ContingencyTensor
from .risk import MarginalModel


def storm_flood_counts_path() -> str:
    """Filesystem path of the bundled counts CSV."""
    return str(resources.files("berncop").joinpath("data/storm_flood_counts.csv"))


def storm_flood_counts() -> ContingencyTensor:
    """The 10x10 integer count table of the bundled storm/flood example."""
    from .io_utils import read_matrix_csv

    counts = read_matrix_csv(storm_flood_counts_path())
    return ContingencyTensor.from_counts(np.rint(counts).astype(np.int64))


def storm_flood_margins() -> list:
    """Marginal loss models of the example: Gumbel log-losses for storm
    (Frechet losses, tail index 1/0.8872), normal log-losses for flood
    (lognormal losses)."""
    return [
        MarginalModel(family="gumbel_log", mu=16.367, sigma=0.8872),
        MarginalModel(family="normal_log", mu=16.625, sigma=0.9777),
    ]
