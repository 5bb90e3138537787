"""Repeated seeded experiments comparing the delta estimators.

Each repeat ``k`` uses seed ``base_seed + k``; all estimators of a repeat
share the same paths. Per-seed results are gathered in seed order before
any aggregation, so output does not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import regression
from .errors import StochADError
from .estimators import (
    EstimatorKind,
    EstimatorSpec,
    ShiftConvention,
    WidthUnit,
    estimate_delta,
    table_estimators,
)
from .model_bs import (
    REFERENCE_OPTION,
    REFERENCE_PARAMS,
    BlackScholesParams,
    DigitalOption,
    analytic_digital_delta,
    generate_terminal,
    standard_normals,
)
from .randomvar import RandomVariable

log = logging.getLogger(__name__)

MAX_FAILURE_RATE = 0.5
TABLE_COLUMNS = ("Method", "Value", "Bias", "StdDev", "Improve")


class ExperimentFailure(StochADError):
    """More than half of the seeds failed for some estimator."""


@dataclass(frozen=True)
class ExperimentConfig:
    params: BlackScholesParams = REFERENCE_PARAMS
    option: DigitalOption = REFERENCE_OPTION
    n: int = 200_000
    repeats: int = 1000
    base_seed: int = 0
    w: float = 0.05
    w_phi: float = 0.5
    m: int = 2
    regression: str = "distribution"
    width_unit: WidthUnit = WidthUnit.STDDEV
    shift_convention: ShiftConvention = ShiftConvention.HALF
    workers: int = 1

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def seeds(self) -> range:
        return range(self.base_seed, self.base_seed + self.repeats)

    def estimators(self, w: float | None = None) -> list[EstimatorSpec]:
        return table_estimators(self.w if w is None else w, self.w_phi, self.m, self.regression,
                                self.width_unit, self.shift_convention)


@dataclass
class EstimatorStats:
    label: str
    kind: EstimatorKind
    mean: float
    bias: float
    stddev: float
    improvement: float | None
    successes: int
    failures: int
    values: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))


@dataclass
class ExperimentStats:
    config: ExperimentConfig
    analytic: float
    rows: list[EstimatorStats]

    def row(self, kind) -> EstimatorStats:
        kind = EstimatorKind(kind)
        return next(r for r in self.rows if r.kind is kind)


def evaluate_seed(specs: list[EstimatorSpec], params: BlackScholesParams, option: DigitalOption,
                  n: int, seed: int) -> list[float]:
    """All estimators on one seed's paths; NaN marks a failed estimate."""
    normals = standard_normals(n, seed)
    out = []
    for spec in specs:
        try:
            out.append(estimate_delta(spec, params, option, n, seed, normals))
        except StochADError as exc:
            log.debug("seed %d, %s: %s", seed, spec.label, exc)
            out.append(math.nan)
    return out


def _evaluate_job(job):
    return evaluate_seed(*job)


def evaluate_seeds(specs, params, option, n, seeds, workers: int = 1) -> np.ndarray:
    """Matrix of estimates, one row per seed (in seed order)."""
    jobs = [(specs, params, option, n, seed) for seed in seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_evaluate_job(job) for job in jobs]
    return np.array(results, dtype=np.float64).reshape(len(jobs), len(specs))


def aggregate(specs: list[EstimatorSpec], estimates: np.ndarray, analytic: float) -> list[EstimatorStats]:
    repeats = estimates.shape[0]
    rows = []
    for j, spec in enumerate(specs):
        column = estimates[:, j]
        ok = column[~np.isnan(column)]
        failures = repeats - ok.size
        if failures > MAX_FAILURE_RATE * repeats:
            raise ExperimentFailure(f"{spec.label}: {failures} of {repeats} seeds failed")
        mean = float(np.mean(ok))
        stddev = float(np.std(ok, ddof=1)) if ok.size > 1 else 0.0
        if spec.kind is EstimatorKind.ANALYTIC:
            stddev = 0.0
        rows.append(EstimatorStats(spec.label, spec.kind, mean, mean - analytic, stddev,
                                   None, ok.size, failures, ok))
    fd = next((r for r in rows if r.kind is EstimatorKind.FINITE_DIFFERENCE), None)
    for row in rows:
        if fd is None or row is fd:
            continue
        row.improvement = fd.stddev / row.stddev if row.stddev > 0 else math.inf
    return rows


def run_experiment(config: ExperimentConfig) -> ExperimentStats:
    """Mean, bias, standard deviation and improvement for every estimator."""
    if config.repeats == 1:
        warnings.warn("a single repeat gives no spread; StdDev is reported as 0", stacklevel=2)
    specs = config.estimators()
    estimates = evaluate_seeds(specs, config.params, config.option, config.n, config.seeds, config.workers)
    analytic = analytic_digital_delta(config.params, config.option.K)
    return ExperimentStats(config, analytic, aggregate(specs, estimates, analytic))


def _fmt(value: float | None) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf"
    if math.isnan(value):
        return "nan"
    return f"{value:.6f}"


def table_csv(stats: ExperimentStats) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_COLUMNS)
    for row in stats.rows:
        writer.writerow([row.label, _fmt(row.mean), _fmt(row.bias), _fmt(row.stddev),
                         _fmt(row.improvement)])
    return buf.getvalue()


def table_text(stats: ExperimentStats) -> str:
    cfg = stats.config
    lines = [f"w={cfg.w:g} w_phi={cfg.w_phi:g} m={cfg.m} ({cfg.regression} regression, "
             f"width unit {WidthUnit(cfg.width_unit).value}), {cfg.repeats} x {cfg.n} paths",
             f"{'Method':<28}{'Value':>9}{'Bias':>9}{'StdDev':>9}{'Improve':>9}{'Failed':>8}"]
    for row in stats.rows:
        improve = "" if row.improvement is None else (
            "inf" if math.isinf(row.improvement) else f"{row.improvement:.2f}")
        lines.append(f"{row.label:<28}{row.mean:>9.4f}{row.bias:>9.4f}{row.stddev:>9.4f}"
                     f"{improve:>9}{row.failures:>8}")
    return "\n".join(lines)


def width_sweep(config: ExperimentConfig, widths) -> str:
    """CSV ``width,seed,estimator,delta`` for every width, seed and Monte-Carlo estimator."""
    widths = list(widths)
    if not widths:
        raise ValueError("widths must not be empty")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["width", "seed", "estimator", "delta"])
    for w in widths:
        specs = [s for s in config.estimators(w) if s.kind is not EstimatorKind.ANALYTIC]
        estimates = evaluate_seeds(specs, config.params, config.option, config.n,
                                   config.seeds, config.workers)
        for j, spec in enumerate(specs):
            failures = int(np.isnan(estimates[:, j]).sum())
            if failures > MAX_FAILURE_RATE * len(config.seeds):
                raise ExperimentFailure(f"{spec.label} at w={w:g}: {failures} seeds failed")
        for i, seed in enumerate(config.seeds):
            for j, spec in enumerate(specs):
                value = estimates[i, j]
                writer.writerow([_fmt(w), seed, spec.kind.value, "" if math.isnan(value) else _fmt(value)])
    return buf.getvalue()


@dataclass
class DensityDiagnostics:
    kind: str
    half_width: float
    estimate: float
    samples: regression.DensitySamples
    coefficients: np.ndarray

    def fitted(self) -> np.ndarray:
        powers = np.arange(self.coefficients.size) + (0 if self.kind == "density" else 1)
        return np.power.outer(self.samples.x, powers) @ self.coefficients

    def to_csv(self) -> str:
        names = ("x", "d_tilde", "d_star", "d_star_0") if self.kind == "density" else (
            "x", "D_hat", "D_star", "d_star_0")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(names)
        for x, y, f in zip(self.samples.x, self.samples.y, self.fitted()):
            writer.writerow([_fmt(x), _fmt(y), _fmt(f), _fmt(self.estimate)])
        return buf.getvalue()


def emit_density_diagnostics(params: BlackScholesParams, option: DigitalOption, n: int, seed: int,
                             w_phi: float = 0.5, m: int = 2, kind: str = "density") -> DensityDiagnostics:
    """Regression scatter of the trigger ``S_T - K`` and its fitted curve."""
    x = generate_terminal(params, n, seed) - option.K
    r = 0.5 * w_phi * RandomVariable(x).standard_deviation()
    if kind == "density":
        samples = regression.empirical_density_samples(x, r)
        coefficients = regression.fit_polynomial(samples, np.arange(m))
    elif kind == "distribution":
        samples = regression.empirical_distribution_samples(x, r)
        coefficients = regression.fit_polynomial(samples, np.arange(1, m + 1))
    else:
        raise ValueError(f"unknown regression kind {kind!r}")
    return DensityDiagnostics(kind, r, float(coefficients[0]), samples, coefficients)


def default_workers() -> int:
    return int(os.environ.get("STOCHAD_WORKERS", os.cpu_count() or 1))
