"""Monte Carlo verification harness for the convergence behavior.

Coefficient-error sweeps measure sup_{|q| <= M(N)} |reference - estimate|
per replicate, with the reference built from true volatility samples (plus
squared-jump coefficients when jumps are enabled).  Rate regression fits
the log-log decay; error-event frequencies track how often the sup-error
exceeds a threshold schedule; the jump-recovery experiment reproduces the
rescaled-estimator localization study on a 10^5-point grid.

All experiments draw per-replicate substreams from (master_seed, replicate)
so results are reproducible and replicates are independent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from ._csvio import fmt, write_csv
from .estimator import (
    EstimatorConfig,
    SpotEstimate,
    estimate_coefficients,
    fejer_inversion_bound_check,
)
from .fourier import (
    TWO_PI,
    fejer_polynomial,
    function_coefficients,
    increment_coefficients,
    jump_coefficients,
)
from .market_sim import (
    ConstantVol,
    JumpModelCPP,
    JumpRecord,
    PartitionSpec,
    SinusoidalShiftVol,
    VolatilityModel,
    simulate_path,
    subsample,
    substream_seed,
)


@dataclass(frozen=True)
class SweepConfig:
    """Specification of a coefficient-error sweep over Bohr cutoffs.

    The Fejer degree is coupled to the cutoff as
    degree = floor(coupling_scale * N**coupling_exponent) with the exponent
    restricted to (0, 1/2).  At least 30 replicates are required: every
    consumer makes a statistical claim.
    """

    n_values: tuple
    grid: PartitionSpec
    model: VolatilityModel
    jump_model: Optional[JumpModelCPP] = None
    coupling_scale: float = 1.0
    coupling_exponent: float = 0.4
    replicates: int = 50
    master_seed: int = 0

    def __post_init__(self):
        values = tuple(int(n) for n in self.n_values)
        if len(values) == 0:
            raise ValueError("n_values must be nonempty")
        if any(n < 1 for n in values):
            raise ValueError("n_values must be positive")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("n_values must be strictly increasing")
        object.__setattr__(self, "n_values", values)
        if not 0 < self.coupling_exponent < 0.5:
            raise ValueError(
                f"coupling_exponent must lie in (0, 1/2), got {self.coupling_exponent}"
            )
        if self.coupling_scale <= 0:
            raise ValueError(f"coupling_scale must be > 0, got {self.coupling_scale}")
        if int(self.replicates) != self.replicates or self.replicates < 30:
            raise ValueError(
                f"replicates must be an integer >= 30, got {self.replicates!r}"
            )
        object.__setattr__(self, "replicates", int(self.replicates))

    def degree_for(self, cutoff: int) -> int:
        return max(1, math.floor(self.coupling_scale * cutoff**self.coupling_exponent))

    @property
    def degrees(self) -> tuple:
        return tuple(self.degree_for(n) for n in self.n_values)


@dataclass(frozen=True)
class SweepResult:
    """Aggregated sweep output plus the raw per-replicate sup-errors."""

    n_values: tuple
    degrees: tuple
    mean_errors: np.ndarray = field(repr=False)
    std_errors: np.ndarray = field(repr=False)
    sup_errors: np.ndarray = field(repr=False)  # shape (replicates, len(n_values))


@dataclass(frozen=True)
class RateFit:
    """Least-squares log-log fit of error against cutoff."""

    slope: float
    intercept: float
    r_squared: float

    def __post_init__(self):
        if not -1e-12 <= self.r_squared <= 1 + 1e-12:
            raise ValueError(f"r_squared must lie in [0, 1], got {self.r_squared}")
        object.__setattr__(self, "r_squared", float(min(max(self.r_squared, 0.0), 1.0)))


def coefficient_error_sweep(config: SweepConfig) -> SweepResult:
    """Per-cutoff sup-band coefficient errors over seeded replicates.

    For each replicate, one path is simulated and observed on the full
    grid; for each cutoff N the error is sup over |q| <= degree(N) of
    |reference(q) - estimated(q)|, where the reference is the left-Riemann
    coefficient table of the true variance samples plus, when a jump model
    is present, the squared-jump coefficients of the exact jump record.
    """
    degrees = config.degrees
    table_band = max(n + d for n, d in zip(config.n_values, degrees))
    degree_max = max(degrees)
    sup = np.empty((config.replicates, len(config.n_values)))
    for rep in range(config.replicates):
        seed = substream_seed(config.master_seed, rep)
        path = simulate_path(config.model, config.grid, seed, config.jump_model)
        obs = subsample(path, config.grid)
        table = increment_coefficients(obs, table_band)
        reference = function_coefficients(path.times, path.volatility, degree_max)
        if config.jump_model is not None:
            record = path.jump_record
            reference = reference + jump_coefficients(
                record.times, record.sizes, degree_max
            )
        for j, (n, d) in enumerate(zip(config.n_values, degrees)):
            estimated = estimate_coefficients(obs, n, d, increment_table=table)
            sup[rep, j] = np.abs((estimated - reference.truncated(d)).values).max()
    return SweepResult(
        n_values=config.n_values,
        degrees=degrees,
        mean_errors=sup.mean(axis=0),
        std_errors=sup.std(axis=0, ddof=1),
        sup_errors=sup,
    )


def rate_regression(n_values, errors) -> RateFit:
    """Fit log(error) = slope * log(n) + intercept by least squares."""
    n_values = np.asarray(n_values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if n_values.size != errors.size:
        raise ValueError("n_values and errors must have equal length")
    if n_values.size < 4:
        raise ValueError(f"need >= 4 points for a rate fit, got {n_values.size}")
    if (errors <= 0).any():
        raise ValueError("errors must be positive to fit a log-log rate")
    x = np.log(n_values)
    y = np.log(errors)
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    total = float(np.sum((y - y.mean()) ** 2))
    residual = float(np.sum((y - predicted) ** 2))
    r_squared = 1.0 if total == 0.0 else 1.0 - residual / total
    return RateFit(float(slope), float(intercept), r_squared)


@dataclass(frozen=True)
class EventFrequencies:
    """Per-cutoff frequency of sup-error >= threshold."""

    n_values: tuple
    thresholds: np.ndarray = field(repr=False)
    frequencies: np.ndarray = field(repr=False)


def error_event_frequency(
    config: SweepConfig,
    thresholds: Callable | Sequence | None = None,
    *,
    result: SweepResult | None = None,
) -> EventFrequencies:
    """Empirical frequency of large coefficient errors per cutoff.

    `thresholds` maps each cutoff to tau(N) (callable, or a sequence
    aligned with n_values).  The default schedule anchors at the empirical
    95th percentile of the smallest cutoff and decays like
    (N / N_min)**-0.25.  Pass `result` to reuse an existing sweep.
    """
    if result is None:
        result = coefficient_error_sweep(config)
    n_values = np.asarray(result.n_values, dtype=float)
    if thresholds is None:
        anchor = float(np.quantile(result.sup_errors[:, 0], 0.95))
        taus = anchor * (n_values / n_values[0]) ** -0.25
    elif callable(thresholds):
        taus = np.array([float(thresholds(int(n))) for n in result.n_values])
    else:
        taus = np.asarray(thresholds, dtype=float)
        if taus.size != n_values.size:
            raise ValueError("threshold sequence must align with n_values")
    if (np.isnan(taus)).any() or (taus < 0).any():
        raise ValueError("thresholds must be nonnegative")
    frequencies = (result.sup_errors >= taus[None, :]).mean(axis=0)
    return EventFrequencies(result.n_values, taus, frequencies)


def _circular_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance on the circle of circumference 2*pi."""
    raw = np.abs(a - b) % TWO_PI
    return np.minimum(raw, TWO_PI - raw)


@dataclass(frozen=True)
class JumpRecoveryResult:
    """Rescaled-estimator outputs for several Fejer degrees on one path."""

    jump_record: JumpRecord
    estimates: Mapping[int, SpotEstimate]
    at_jump_values: Mapping[int, np.ndarray]
    off_jump_max: Mapping[int, float]
    harmonics: int
    off_jump_distance: float

    def summary_rows(self):
        """Rows (degree, kind, tau, true_square, value) for CSV export."""
        rows = []
        for degree in sorted(self.estimates):
            values = self.at_jump_values[degree]
            for tau, size, value in zip(
                self.jump_record.times, self.jump_record.sizes, values
            ):
                rows.append((degree, "at_jump", tau, size**2, value))
            rows.append((degree, "off_jump_max", "", "", self.off_jump_max[degree]))
        return rows


def jump_recovery_experiment(
    degrees: Sequence[int] = (10, 50, 100, 700),
    seed=0,
    *,
    grid_cells: int = 100_000,
    eval_points: int = 2001,
    harmonics: int | None = None,
    off_jump_distance: float = 0.1,
) -> JumpRecoveryResult:
    """Squared-jump recovery on the sinusoidal-shift + unit-jump benchmark.

    Simulates dP = sigma(sin t + 2) dW + dJ with sigma = 1 and compensated
    unit jumps at intensity 2 on a regular grid, then runs the rescaled
    estimator for each degree.  The summary reports the estimate at every
    true jump time plus the maximum estimate at evaluation points farther
    than `off_jump_distance` (circular distance) from all jumps.

    The default Bohr cutoff is the Nyquist band m // 2 rather than the
    capped general-purpose default: the diffusion leakage into the at-jump
    value scales like sqrt(V / N), so localization needs the full band.
    """
    degrees = tuple(int(d) for d in degrees)
    if len(degrees) == 0 or any(d < 1 for d in degrees):
        raise ValueError("degrees must be positive integers")
    grid = PartitionSpec.regular(grid_cells)
    model = SinusoidalShiftVol(1.0)
    jump_model = JumpModelCPP(intensity=2.0, marks="unit", compensate=True)
    path = simulate_path(model, grid, seed, jump_model)
    obs = subsample(path, grid)
    cutoff = max(1, obs.count // 2) if harmonics is None else int(harmonics)
    record = path.jump_record

    degree_max = max(degrees)
    table = estimate_coefficients(obs, cutoff, degree_max)
    eval_grid = np.linspace(-np.pi, np.pi, eval_points)
    if record.count:
        gaps = _circular_distance(eval_grid[:, None], record.times[None, :])
        off_mask = (gaps >= off_jump_distance).all(axis=1)
    else:
        off_mask = np.ones(eval_grid.size, dtype=bool)

    estimates: dict[int, SpotEstimate] = {}
    at_jump: dict[int, np.ndarray] = {}
    off_max: dict[int, float] = {}
    for degree in degrees:
        sub = table.truncated(degree)
        values = TWO_PI / degree * fejer_polynomial(sub, degree, eval_grid)
        config = EstimatorConfig(cutoff, degree, rescale_jumps=True, eval_grid=eval_grid)
        estimates[degree] = SpotEstimate(eval_grid, values, config, "quadratic_jumps")
        if record.count:
            at_jump[degree] = TWO_PI / degree * np.atleast_1d(
                fejer_polynomial(sub, degree, record.times)
            )
        else:
            at_jump[degree] = np.empty(0)
        off_max[degree] = float(values[off_mask].max()) if off_mask.any() else float("nan")
    return JumpRecoveryResult(
        jump_record=record,
        estimates=estimates,
        at_jump_values=at_jump,
        off_jump_max=off_max,
        harmonics=cutoff,
        off_jump_distance=off_jump_distance,
    )


@dataclass(frozen=True)
class InversionSweepResult:
    """Flat table of Fejer-inversion bound checks."""

    rows: tuple  # (set_index, order, t, error, bound, passed)

    @property
    def all_passed(self) -> bool:
        return all(row[5] for row in self.rows)


def inversion_bound_sweep(
    jump_sets: Sequence[JumpRecord],
    orders: Sequence[int],
    t_values,
    slack: float = 1e-9,
) -> InversionSweepResult:
    """fejer_inversion_bound_check over jump sets x orders x t grid."""
    t_values = np.atleast_1d(np.asarray(t_values, dtype=float))
    rows = []
    for set_index, record in enumerate(jump_sets):
        for order in orders:
            error, bound = fejer_inversion_bound_check(record, int(order), t_values)
            passed = error <= bound + slack
            rows.extend(
                (set_index, int(order), float(t), float(e), float(b), bool(ok))
                for t, e, b, ok in zip(t_values, error, bound, passed)
            )
    return InversionSweepResult(tuple(rows))


# ---------------------------------------------------------------------------
# config and result serialization


def load_sweep_config(path) -> SweepConfig:
    """Assemble a SweepConfig from a JSON document.

    Schema: {"model": {"kind": "constant"|"sinshift", ...}, "jumps":
    {"intensity", "marks", "compensate"} or null, "grid_cells": int,
    "n_values": [int, ...], "coupling": {"scale": float, "exponent": float},
    "replicates": int, "seed": int}.
    """
    with open(path) as fh:
        doc = json.load(fh)
    try:
        model = _model_from_json(doc["model"])
        jumps = doc.get("jumps")
        jump_model = None
        if jumps is not None:
            jump_model = JumpModelCPP(
                intensity=float(jumps["intensity"]),
                marks=str(jumps.get("marks", "unit")),
                compensate=bool(jumps.get("compensate", True)),
            )
        coupling = doc.get("coupling", {})
        return SweepConfig(
            n_values=tuple(doc["n_values"]),
            grid=PartitionSpec.regular(int(doc["grid_cells"])),
            model=model,
            jump_model=jump_model,
            coupling_scale=float(coupling.get("scale", 1.0)),
            coupling_exponent=float(coupling.get("exponent", 0.4)),
            replicates=int(doc.get("replicates", 50)),
            master_seed=int(doc.get("seed", 0)),
        )
    except KeyError as exc:
        raise ValueError(f"{path}: missing required config key {exc}") from None


def _model_from_json(spec: Mapping) -> VolatilityModel:
    kind = spec.get("kind")
    if kind == "constant":
        return ConstantVol(float(spec["value"]))
    if kind == "sinshift":
        return SinusoidalShiftVol(float(spec["scale"]))
    raise ValueError(f"unknown volatility model kind {kind!r}")


def write_sweep_csv(result: SweepResult, dest) -> None:
    rows = (
        (str(n), str(d), fmt(mean), fmt(std))
        for n, d, mean, std in zip(
            result.n_values, result.degrees, result.mean_errors, result.std_errors
        )
    )
    write_csv(dest, ("n", "degree", "mean_sup_error", "std_sup_error"), rows)


def write_rate_fit_csv(fit: RateFit, dest) -> None:
    write_csv(
        dest,
        ("slope", "intercept", "r_squared"),
        [(fmt(fit.slope), fmt(fit.intercept), fmt(fit.r_squared))],
    )


def write_event_frequency_csv(events: EventFrequencies, dest) -> None:
    rows = (
        (str(n), fmt(tau), fmt(freq))
        for n, tau, freq in zip(events.n_values, events.thresholds, events.frequencies)
    )
    write_csv(dest, ("n", "threshold", "frequency"), rows)


def write_inversion_sweep_csv(result: InversionSweepResult, dest) -> None:
    rows = (
        (str(si), str(order), fmt(t), fmt(err), fmt(bound), str(int(ok)))
        for si, order, t, err, bound, ok in result.rows
    )
    write_csv(dest, ("set", "order", "t", "error", "bound", "pass"), rows)


def write_jump_summary_csv(result: JumpRecoveryResult, dest) -> None:
    rows = (
        (
            str(degree),
            kind,
            fmt(tau) if tau != "" else "",
            fmt(square) if square != "" else "",
            fmt(value),
        )
        for degree, kind, tau, square, value in result.summary_rows()
    )
    write_csv(dest, ("degree", "kind", "tau", "true_square", "value"), rows)


# ---------------------------------------------------------------------------
# optional SVG plots (deterministic output: fixed hash salt, no timestamps)


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "spotfourier"
    return plt


def plot_error_vs_n(result: SweepResult, dest) -> None:
    """Log-log line plot of mean sup-error against the Bohr cutoff."""
    plt = _figure()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.loglog(result.n_values, result.mean_errors, marker="o")
    ax.set_xlabel("harmonics N")
    ax.set_ylabel("mean sup coefficient error")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(dest, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_estimates(estimates: Mapping[int, SpotEstimate], dest, jump_record=None) -> None:
    """Overlaid line plots of reconstructed paths for several degrees."""
    plt = _figure()
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for degree in sorted(estimates):
        est = estimates[degree]
        ax.plot(est.times, est.values, label=f"degree {degree}", linewidth=0.9)
    if jump_record is not None and jump_record.count:
        ax.scatter(
            jump_record.times,
            jump_record.sizes**2,
            marker="x",
            color="black",
            label="true squared jumps",
            zorder=5,
        )
    ax.set_xlabel("t")
    ax.set_ylabel("estimate")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(dest, format="svg", metadata={"Date": None})
    plt.close(fig)
