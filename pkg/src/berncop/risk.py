"""Marginal loss models, aggregation, and PML-by-return-period reporting.

Margins are parameterized on the log-loss scale: a Gumbel log-loss yields
Frechet-distributed losses with tail index 1/sigma, a normal log-loss yields
lognormal losses.  Copula samples are pushed through the marginal quantiles,
summed per scenario, and summarized as empirical quantiles at levels
1 - 1/T for the requested return periods T.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DomainError
from .model import DiscreteJoint, read_joint_csv
from .rng import RandomSource
from .sampling import (
    SampleBatch,
    inverse_normal_cdf,
    sample_bernstein,
    sample_gaussian_copula,
    sample_grid,
    sample_independence,
)

FAMILIES = ("gumbel_log", "normal_log")


@dataclass(frozen=True)
class MarginalModel:
    """Parametric marginal loss law on the log scale.

    family "gumbel_log": loss quantile exp(mu - sigma * ln(-ln u)), i.e.
    Frechet losses with tail index alpha = 1/sigma.  family "normal_log":
    exp(mu + sigma * ndtri(u)), i.e. lognormal losses.
    """

    family: str
    mu: float
    sigma: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown margin family {self.family!r}")
        if not self.sigma > 0:
            raise DomainError("sigma must be > 0")


def quantile(model: MarginalModel, u):
    """Loss quantile at probability u (scalar or array), u in (0, 1)."""
    arr = np.asarray(u, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if arr.size and (arr.min() <= 0.0 or arr.max() >= 1.0):
        raise DomainError("u must lie strictly inside (0, 1)")
    if model.family == "gumbel_log":
        log_loss = model.mu - model.sigma * np.log(-np.log(arr))
    else:
        log_loss = model.mu + model.sigma * inverse_normal_cdf(arr)
    out = np.exp(log_loss)
    return float(out[0]) if scalar else out


def fit_qq(sample, family: str) -> MarginalModel:
    """Estimate (mu, sigma) by the least-squares line of sorted log-losses
    against the theoretical log-law quantiles at positions (i - 0.5)/n."""
    sample = np.asarray(sample, dtype=float)
    if sample.ndim != 1 or sample.size < 3:
        raise DataError("need a flat sample of at least three losses")
    if sample.min() <= 0.0:
        raise DomainError("losses must be positive; log-loss undefined")
    if family not in FAMILIES:
        raise DomainError(f"unknown margin family {family!r}")
    n = sample.size
    positions = (np.arange(1, n + 1) - 0.5) / n
    if family == "gumbel_log":
        theoretical = -np.log(-np.log(positions))
    else:
        theoretical = inverse_normal_cdf(positions)
    sigma, mu = np.polyfit(theoretical, np.sort(np.log(sample)), 1)
    if not sigma > 0:
        raise DataError(f"degenerate sample: fitted sigma {sigma} is not positive")
    return MarginalModel(family=family, mu=float(mu), sigma=float(sigma))


def simulate_aggregate(batch, margins) -> np.ndarray:
    """Aggregate loss per sample row: S_j = sum_i quantile(margin_i, u_ji).

    Coordinates are nudged into the open interval (0, 1) before the quantile
    transform; copula samplers emit half-open uniforms, so an exact 0 or 1
    occurs with probability zero but would break the log transforms.
    """
    pts = batch.points if isinstance(batch, SampleBatch) else np.asarray(batch, float)
    if pts.ndim != 2 or pts.shape[1] != len(margins):
        raise DomainError(
            f"batch dimension {pts.shape[1] if pts.ndim == 2 else '?'} does not "
            f"match {len(margins)} margins"
        )
    u = np.clip(pts, 1e-12, np.nextafter(1.0, 0.0))
    total = np.zeros(pts.shape[0])
    for i, margin in enumerate(margins):
        total += quantile(margin, u[:, i])
    return total


def pml_curve(losses, return_periods) -> np.ndarray:
    """Empirical quantiles of the losses at levels 1 - 1/T.

    Order statistics sit at plotting positions (i - 0.5)/n and are linearly
    interpolated; levels outside the covered range clamp to the extreme
    order statistics.
    """
    losses = np.asarray(losses, dtype=float)
    if losses.size == 0:
        raise DataError("empty loss vector")
    periods = np.asarray(return_periods, dtype=float)
    if np.any(periods <= 1.0):
        raise DomainError("return periods must exceed 1 year")
    levels = 1.0 - 1.0 / periods
    n = losses.size
    positions = (np.arange(1, n + 1) - 0.5) / n
    return np.interp(levels, positions, np.sort(losses))


@dataclass
class Scenario:
    """One simulation arm: a copula specification plus a label."""

    label: str
    kind: str  # bernstein | grid | independence | gaussian
    joint: DiscreteJoint | None = None
    corr: np.ndarray | None = None

    def validate(self, d: int) -> None:
        if self.kind in ("bernstein", "grid"):
            if self.joint is None:
                raise DataError(f"scenario {self.label!r}: missing fitted joint")
            if self.joint.d != d:
                raise DataError(
                    f"scenario {self.label!r}: joint dimension {self.joint.d} "
                    f"does not match {d} margins"
                )
        elif self.kind == "gaussian":
            if self.corr is None:
                raise DataError(f"scenario {self.label!r}: missing corr")
            if np.asarray(self.corr).shape != (d, d):
                raise DataError(
                    f"scenario {self.label!r}: corr must be {d}x{d}"
                )
        elif self.kind != "independence":
            raise DataError(f"scenario {self.label!r}: unknown kind {self.kind!r}")


@dataclass
class CompareConfig:
    margins: list
    scenarios: list
    n: int
    seed: int
    return_periods: list

    def validate(self) -> None:
        if not self.margins:
            raise DataError("config field 'margins' is empty")
        if not self.scenarios:
            raise DataError("config field 'scenarios' is empty")
        if self.n < 1:
            raise DataError("config field 'n' must be >= 1")
        if not self.return_periods or any(t <= 1 for t in self.return_periods):
            raise DataError("config field 'return_periods' must all exceed 1")
        labels = [s.label for s in self.scenarios]
        if len(set(labels)) != len(labels):
            raise DataError("config field 'scenarios' has duplicate labels")
        for scenario in self.scenarios:
            scenario.validate(len(self.margins))


@dataclass
class ScenarioResult:
    label: str
    kind: str
    pml: np.ndarray
    acceptance_rate: float
    proposals: int


@dataclass
class RiskReport:
    """PML table per scenario, with everything needed to rerun it."""

    results: list
    return_periods: list
    n: int
    seed: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for res in self.results:
            if np.any(np.diff(res.pml) < 0):
                raise DataError(
                    f"scenario {res.label!r}: PML must be non-decreasing in T"
                )

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# seed={self.seed}, n={self.n}\n")
            fh.write("scenario," + ",".join(f"T={t:g}" for t in self.return_periods) + "\n")
            for res in self.results:
                fh.write(res.label + "," + ",".join(f"{v:.17g}" for v in res.pml) + "\n")


def _margin_from_spec(spec, base_dir) -> MarginalModel:
    if "family" not in spec:
        raise DataError("config field 'margins' entries need a 'family'")
    family = spec["family"]
    if "fit_from" in spec:
        from .io_utils import read_matrix_csv

        path = _resolve(spec["fit_from"], base_dir)
        data = read_matrix_csv(path)
        column = int(spec.get("column", 0))
        if column >= data.shape[1]:
            raise DataError(f"margin fit column {column} out of range for {path}")
        return fit_qq(data[:, column], family)
    try:
        return MarginalModel(family=family, mu=float(spec["mu"]), sigma=float(spec["sigma"]))
    except KeyError as exc:
        raise DataError(f"config field 'margins' entries need {exc.args[0]!r}") from exc


def _resolve(path, base_dir):
    import os

    return path if os.path.isabs(path) else os.path.join(base_dir, path)


def load_config(source, base_dir: str = ".") -> CompareConfig:
    """Build a CompareConfig from a JSON file path or an equivalent dict."""
    if isinstance(source, (str, bytes)) or hasattr(source, "read"):
        with open(source, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    else:
        raw = source
    for required in ("margins", "scenarios", "n", "seed", "return_periods"):
        if required not in raw:
            raise DataError(f"config is missing required field {required!r}")
    margins = [_margin_from_spec(m, base_dir) for m in raw["margins"]]
    scenarios = []
    for spec in raw["scenarios"]:
        if "kind" not in spec:
            raise DataError("config field 'scenarios' entries need a 'kind'")
        kind = spec["kind"]
        joint = None
        corr = None
        if kind in ("bernstein", "grid"):
            if "joint" not in spec:
                raise DataError(f"scenario of kind {kind!r} needs a 'joint' CSV path")
            joint = read_joint_csv(_resolve(spec["joint"], base_dir))
        if kind == "gaussian":
            if "corr" in spec:
                corr = np.asarray(spec["corr"], dtype=float)
            elif "data" in spec:
                from .fit import pseudo_observations
                from .io_utils import read_matrix_csv
                from .sampling import estimate_gaussian_correlation

                data = read_matrix_csv(_resolve(spec["data"], base_dir))
                corr = estimate_gaussian_correlation(pseudo_observations(data))
            else:
                raise DataError("gaussian scenario needs 'corr' or 'data'")
        scenarios.append(
            Scenario(label=spec.get("label", kind), kind=kind, joint=joint, corr=corr)
        )
    config = CompareConfig(
        margins=margins,
        scenarios=scenarios,
        n=int(raw["n"]),
        seed=int(raw["seed"]),
        return_periods=list(raw["return_periods"]),
    )
    config.validate()
    return config


def sample_scenario(scenario: Scenario, d: int, n: int, rng: RandomSource) -> SampleBatch:
    """Draw the copula sample for one scenario."""
    if scenario.kind == "bernstein":
        return sample_bernstein(scenario.joint, None, n, rng)
    if scenario.kind == "grid":
        return sample_grid(scenario.joint, n, rng)
    if scenario.kind == "independence":
        return sample_independence(d, n, rng)
    if scenario.kind == "gaussian":
        return sample_gaussian_copula(scenario.corr, n, rng)
    raise DataError(f"unknown scenario kind {scenario.kind!r}")


def compare_scenarios(config: CompareConfig) -> RiskReport:
    """Run every configured scenario with its own derived random stream and
    assemble the PML table.

    Scenario i uses the sub-stream spawn(i) of the base seed, so single
    scenarios can be reproduced in isolation and adding a scenario does not
    perturb the others.
    """
    config.validate()
    base = RandomSource(config.seed)
    results = []
    metadata = {"gaussian_estimator": "normal-scores"} if any(
        s.kind == "gaussian" for s in config.scenarios
    ) else {}
    for index, scenario in enumerate(config.scenarios):
        rng = base.spawn(index)
        batch = sample_scenario(scenario, len(config.margins), config.n, rng)
        losses = simulate_aggregate(batch, config.margins)
        results.append(
            ScenarioResult(
                label=scenario.label,
                kind=scenario.kind,
                pml=pml_curve(losses, config.return_periods),
                acceptance_rate=batch.acceptance_rate,
                proposals=batch.proposals,
            )
        )
    return RiskReport(
        results=results,
        return_periods=list(config.return_periods),
        n=config.n,
        seed=config.seed,
        metadata=metadata,
    )


def frechet_tail_index(model: MarginalModel) -> float:
    """Tail index of the loss law for a Gumbel log-loss margin."""
    if model.family != "gumbel_log":
        raise DomainError("tail index applies to gumbel_log margins")
    return 1.0 / model.sigma


def lognormal_mean(model: MarginalModel) -> float:
    """Mean of the loss law for a normal log-loss margin."""
    if model.family != "normal_log":
        raise DomainError("lognormal mean applies to normal_log margins")
    return math.exp(model.mu + 0.5 * model.sigma**2)
