"""Spot volatility and squared-jump estimation from observed increments.

The production pipeline is

    increments -> increment_coefficients -> Bohr convolution band
               -> Fejer polynomial on the evaluation grid,

optionally rescaled by 2*pi/degree to recover squared jumps instead of the
spot variance.  A brute-force double-sum oracle over the rescaled Dirichlet
kernel provides an independent O(m^2) cross-check of the convolution path,
and residual diagnostics compare estimated coefficient bands against
reference tables built from true volatility samples.

Default tuning follows a Nyquist-style cap for the Bohr cutoff and a
sublinear degree coupling (degree ~ cutoff**0.4), which keeps the Fejer
degree well inside the theoretically admissible range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._csvio import fmt, write_csv
from .fourier import (
    TWO_PI,
    CoefficientTable,
    ObservedIncrements,
    fejer_polynomial,
    function_coefficients,
    increment_coefficients,
    jump_coefficients,
)
from .kernels import dirichlet_rescaled

# hard cap on the increment-coefficient band (memory/time guard)
_PRACTICAL_BAND = 1 << 20

# direct convolution up to ~1e8 products (tens of ms); FFT beyond that
_DIRECT_CONV_LIMIT = 100_000_000

# float comparison policy for coefficient-level equalities
ATOL = 1e-12
RTOL = 1e-10

_KINDS = ("volatility", "quadratic_jumps")


def default_harmonics(increment_count: int) -> int:
    """Nyquist-style default Bohr cutoff: min(m // 2, 4096)."""
    if increment_count < 1:
        raise ValueError(f"increment count must be >= 1, got {increment_count}")
    return max(1, min(increment_count // 2, 4096))


def default_degree(harmonics: int, scale: float = 1.0, exponent: float = 0.4) -> int:
    """Degree coupling floor(scale * harmonics**exponent), at least 1."""
    if harmonics < 1:
        raise ValueError(f"harmonics must be >= 1, got {harmonics}")
    if not 0 < exponent < 0.5:
        raise ValueError(f"exponent must lie in (0, 1/2), got {exponent}")
    if scale <= 0:
        raise ValueError(f"scale must be > 0, got {scale}")
    return max(1, math.floor(scale * harmonics**exponent))


@dataclass(frozen=True)
class EstimatorConfig:
    """Estimation parameters: Bohr cutoff, Fejer degree, output grid."""

    harmonics: int
    degree: int
    rescale_jumps: bool = False
    eval_grid: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if int(self.harmonics) != self.harmonics or self.harmonics < 1:
            raise ValueError(f"harmonics must be a positive integer, got {self.harmonics!r}")
        if int(self.degree) != self.degree or self.degree < 1:
            raise ValueError(f"degree must be a positive integer, got {self.degree!r}")
        object.__setattr__(self, "harmonics", int(self.harmonics))
        object.__setattr__(self, "degree", int(self.degree))
        grid = self.eval_grid
        if grid is None:
            grid = np.linspace(-np.pi, np.pi, 629)
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("eval_grid must be a nonempty 1-D array")
        if grid.size > 1 and not (np.diff(grid) > 0).all():
            raise ValueError("eval_grid must be strictly increasing")
        if grid[0] < -np.pi or grid[-1] > np.pi:
            raise ValueError("eval_grid must lie within [-pi, pi]")
        grid = grid.copy()
        grid.flags.writeable = False
        object.__setattr__(self, "eval_grid", grid)

    @property
    def increment_band(self) -> int:
        """Band the increment coefficients must cover: cutoff + degree."""
        return self.harmonics + self.degree


@dataclass(frozen=True)
class SpotEstimate:
    """Reconstructed real-valued path on an evaluation grid."""

    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    config: EstimatorConfig
    kind: str

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or values.ndim != 1 or times.size != values.size:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if not np.isfinite(values).all():
            raise ValueError("estimate values must be finite")
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        for name, array in (("times", times), ("values", values)):
            array = array.copy()
            array.flags.writeable = False
            object.__setattr__(self, name, array)


def _bohr_band(table: CoefficientTable, cutoff: int, band: int) -> CoefficientTable:
    """2*pi * (table (*)_cutoff table)(q) for |q| <= band, via convolution."""
    if table.q_max < cutoff + band:
        raise IndexError(
            f"increment table band {table.q_max} cannot cover cutoff+band = "
            f"{cutoff + band}"
        )
    left = table.band(cutoff)
    right = table.band(cutoff + band)
    if left.size * right.size <= _DIRECT_CONV_LIMIT:
        full = np.convolve(left, right)
        segment = full[2 * cutoff : 2 * cutoff + 2 * band + 1]
    else:
        segment = _band_convolve_fft(left, right, cutoff, band)
    return CoefficientTable(band, TWO_PI * segment / (2 * cutoff + 1))


def _band_convolve_fft(left: np.ndarray, right: np.ndarray, cutoff: int, band: int) -> np.ndarray:
    """Central band of the linear convolution via zero-padded FFTs.

    Used only when the direct product count is too large (Nyquist-scale
    cutoffs); FFT roundoff breaks the exact conjugate symmetry of the
    direct sum, so the band is re-symmetrized (the true sequence satisfies
    c(-q) = conj(c(q)) with c(0) = sum of squared magnitudes >= 0).
    """
    size = left.size + right.size - 1
    length = 1 << (size - 1).bit_length()
    full = np.fft.ifft(np.fft.fft(left, length) * np.fft.fft(right, length))
    segment = full[2 * cutoff : 2 * cutoff + 2 * band + 1]
    segment = 0.5 * (segment + np.conj(segment[::-1]))
    segment[band] = max(segment[band].real, 0.0)
    return segment


def estimate_coefficients(
    obs: ObservedIncrements,
    harmonics: int,
    band: int,
    *,
    increment_table: CoefficientTable | None = None,
) -> CoefficientTable:
    """Bohr-convolution volatility coefficients from observed increments.

    c(q) = 2*pi * (1/(2N+1)) * sum_{|l|<=N} G(l) * G(q-l) for |q| <= band,
    where G = increment_coefficients(obs, N + band) and N = harmonics.
    c(0) equals (2*pi/(2N+1)) * sum |G(l)|^2, hence is real and >= 0.

    Passing a precomputed ``increment_table`` (with band >= harmonics+band)
    lets sweeps over many cutoffs reuse one table.
    """
    harmonics = int(harmonics)
    band = int(band)
    if harmonics < 1:
        raise ValueError(f"harmonics must be >= 1, got {harmonics}")
    if band < 0:
        raise ValueError(f"band must be >= 0, got {band}")
    need = harmonics + band
    if need > _PRACTICAL_BAND:
        raise ValueError(
            f"requested band {need} exceeds the practical limit {_PRACTICAL_BAND}"
        )
    if increment_table is None:
        increment_table = increment_coefficients(obs, need)
    return _bohr_band(increment_table, harmonics, band)


def double_sum_oracle(obs: ObservedIncrements, harmonics: int, index: int) -> complex:
    """Brute-force O(m^2) evaluation of one estimated coefficient.

    (1/2pi) * sum_i sum_j exp(-i*q*t_j) * D~(t_i - t_j) * dX_i * dX_j with
    D~ the rescaled Dirichlet kernel of order `harmonics`.  Independent of
    the convolution path; exists purely as its correctness oracle.
    """
    if int(harmonics) < 1:
        raise ValueError(f"harmonics must be >= 1, got {harmonics}")
    if obs.count > 4096:
        raise ValueError("double_sum_oracle is O(m^2); use m <= 4096")
    times = obs.times
    incr = obs.increments
    kernel = dirichlet_rescaled(int(harmonics), times[:, None] - times[None, :])
    phased = np.exp(-1j * int(index) * times) * incr
    return complex(incr @ kernel @ phased) / TWO_PI


def estimate_spot_path(obs: ObservedIncrements, config: EstimatorConfig) -> SpotEstimate:
    """Fejer reconstruction of the spot variance path on the eval grid."""
    if config.rescale_jumps:
        raise ValueError(
            "config.rescale_jumps must be False for volatility estimation; "
            "use estimate_jump_squares for the rescaled variant"
        )
    table = estimate_coefficients(obs, config.harmonics, config.degree)
    values = fejer_polynomial(table, config.degree, config.eval_grid)
    return SpotEstimate(config.eval_grid, values, config, "volatility")


def estimate_jump_squares(obs: ObservedIncrements, config: EstimatorConfig) -> SpotEstimate:
    """Rescaled reconstruction (2*pi/degree) recovering squared jump sizes."""
    if not config.rescale_jumps:
        raise ValueError(
            "config.rescale_jumps must be True for squared-jump estimation; "
            "use estimate_spot_path for the unrescaled variant"
        )
    table = estimate_coefficients(obs, config.harmonics, config.degree)
    values = TWO_PI / config.degree * fejer_polynomial(table, config.degree, config.eval_grid)
    return SpotEstimate(config.eval_grid, values, config, "quadratic_jumps")


def residual_diagnostic(
    obs: ObservedIncrements,
    vol_times,
    vol_values,
    harmonics: int,
    band: int,
) -> CoefficientTable:
    """Estimated minus reference coefficients on |q| <= band.

    The reference comes from left-Riemann coefficients of the true
    volatility samples (simulation only).  For jump paths the residual
    retains the squared-jump coefficients on top of the estimation error;
    it is reported raw, not decomposed.
    """
    estimated = estimate_coefficients(obs, harmonics, band)
    reference = function_coefficients(vol_times, vol_values, band)
    return estimated - reference


def fejer_inversion_bound_check(jumps, order: int, t):
    """Fejer inversion error of the squared-jump function and its bound.

    error(t) = |(2*pi/order) * T_order(t) - dPhi2(t)| where T_order is the
    Fejer polynomial of the squared-jump coefficients and dPhi2 the exact
    squared jump at t (0 off the jump times).  bound(t) = (local squared
    jump mass within distance order**-0.5 of t, excluding t itself) +
    (total squared jump mass) * pi^2 / order.  Contract: error <= bound
    + 1e-9 whenever no jump sits within the peak of the wrapped kernel.

    `jumps` is a JumpRecord (or anything with times/sizes arrays); `t` may
    be a scalar or an array.  Returns (error, bound) matching t's shape.
    """
    order = int(order)
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    jump_times = np.asarray(jumps.times, dtype=float)
    jump_sizes = np.asarray(jumps.sizes, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    points = np.atleast_1d(t_arr)
    if points.size and (points.min() < -np.pi or points.max() > np.pi):
        raise ValueError("t must lie within [-pi, pi]")

    if jump_times.size == 0:
        error = np.zeros(points.size)
        bound = np.zeros(points.size)
    else:
        table = jump_coefficients(jump_times, jump_sizes, order)
        recon = TWO_PI / order * np.atleast_1d(
            fejer_polynomial(table, order, points)
        )
        squared = jump_sizes**2
        distance = np.abs(points[:, None] - jump_times[None, :])
        exact = np.where(distance == 0, squared[None, :], 0.0).sum(axis=1)
        delta = order**-0.5
        near = (distance > 0) & (distance < delta)
        local_mass = np.where(near, squared[None, :], 0.0).sum(axis=1)
        error = np.abs(recon - exact)
        bound = local_mass + squared.sum() * np.pi**2 / order

    if scalar:
        return float(error[0]), float(bound[0])
    return error, bound


def write_spot_estimate_csv(estimate: SpotEstimate, dest) -> None:
    """SpotEstimate serialization: CSV with header t,value."""
    rows = ((fmt(t), fmt(v)) for t, v in zip(estimate.times, estimate.values))
    write_csv(dest, ("t", "value"), rows)
