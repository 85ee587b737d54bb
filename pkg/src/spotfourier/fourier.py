"""Fourier coefficients of increments, functions and jumps on [-pi, pi].

All coefficients live in a ``CoefficientTable`` over a symmetric integer
band q = -Q..Q.  Accumulation uses an exact rFFT evaluation when the
timestamps form the canonical regular grid t_i = -pi + 2*pi*i/m (the FFT
computes literally the same finite sum, including the wrap for |q| >= m,
which is exact on this grid), and chunked vectorized trigonometric sums
otherwise.  Negative-q values are stored as conjugates of the positive-q
values, so conjugate symmetry of real-data tables is exact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._csvio import fmt, read_rows, write_csv

TWO_PI = 2.0 * np.pi

# tolerance for recognizing the canonical regular grid; linspace-produced
# grids deviate from the arange formula by at most a few ulp
_REGULAR_GRID_ATOL = 1e-13

# cap on direct-sum workspace: rows per chunk * m stays near this many cells
_CHUNK_CELLS = 4_000_000


@dataclass(frozen=True)
class CoefficientTable:
    """Complex Fourier coefficients on the symmetric band |q| <= q_max.

    Parameters
    ----------
    q_max : int
        Band half-width Q >= 0.
    values : ndarray
        Complex array of length 2*q_max + 1; entry k holds c(k - q_max).
    """

    q_max: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if int(self.q_max) != self.q_max or self.q_max < 0:
            raise ValueError(f"q_max must be a nonnegative integer, got {self.q_max!r}")
        object.__setattr__(self, "q_max", int(self.q_max))
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim != 1 or values.size != 2 * self.q_max + 1:
            raise ValueError(
                f"values must be a 1-D array of length {2 * self.q_max + 1}, "
                f"got shape {values.shape}"
            )
        if not np.isfinite(values).all():
            raise ValueError("coefficient values must be finite")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.q_max, self.q_max + 1)

    def value(self, q: int) -> complex:
        """c(q); out-of-band access is a contract violation, never zero-fill."""
        if abs(q) > self.q_max:
            raise IndexError(f"index {q} outside coefficient band |q| <= {self.q_max}")
        return complex(self.values[q + self.q_max])

    def __getitem__(self, q: int) -> complex:
        return self.value(q)

    def band(self, q_max: int) -> np.ndarray:
        """The raw values on the sub-band |q| <= q_max (view)."""
        if q_max > self.q_max:
            raise IndexError(
                f"requested band {q_max} exceeds available band {self.q_max}"
            )
        return self.values[self.q_max - q_max : self.q_max + q_max + 1]

    def truncated(self, q_max: int) -> "CoefficientTable":
        return CoefficientTable(q_max, self.band(q_max))

    def reflected_conjugate(self) -> "CoefficientTable":
        """The table u~ with u~(l) = conjugate(u(-l))."""
        return CoefficientTable(self.q_max, np.conj(self.values[::-1]))

    def conjugate_symmetry_defect(self) -> float:
        """max over the band of |c(-q) - conjugate(c(q))|."""
        return float(np.abs(self.values[::-1] - np.conj(self.values)).max())

    def __add__(self, other: "CoefficientTable") -> "CoefficientTable":
        self._check_same_band(other)
        return CoefficientTable(self.q_max, self.values + other.values)

    def __sub__(self, other: "CoefficientTable") -> "CoefficientTable":
        self._check_same_band(other)
        return CoefficientTable(self.q_max, self.values - other.values)

    def _check_same_band(self, other):
        if not isinstance(other, CoefficientTable):
            raise TypeError(f"expected CoefficientTable, got {type(other).__name__}")
        if other.q_max != self.q_max:
            raise ValueError(f"band mismatch: {self.q_max} vs {other.q_max}")


@dataclass(frozen=True)
class ObservedIncrements:
    """Timestamped increments of an observed path on [-pi, pi].

    ``times[i]`` is the left endpoint of the i-th observation interval and
    ``increments[i]`` the corresponding path increment.
    """

    times: np.ndarray = field(repr=False)
    increments: np.ndarray = field(repr=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        increments = np.asarray(self.increments, dtype=float)
        if times.ndim != 1 or increments.ndim != 1:
            raise ValueError("times and increments must be 1-D arrays")
        if times.size != increments.size:
            raise ValueError(
                f"length mismatch: {times.size} times vs {increments.size} increments"
            )
        if times.size < 1:
            raise ValueError("at least one increment is required")
        if not (np.diff(times) > 0).all():
            raise ValueError("times must be strictly increasing")
        if times[0] < -np.pi or times[-1] > np.pi:
            raise ValueError("times must lie within [-pi, pi]")
        if not np.isfinite(increments).all():
            raise ValueError("increments must be finite")
        for name, array in (("times", times), ("increments", increments)):
            array = array.copy()
            array.flags.writeable = False
            object.__setattr__(self, name, array)

    @property
    def count(self) -> int:
        return self.times.size


def _canonical_cells(times: np.ndarray) -> int | None:
    """Return m if times == -pi + 2*pi*arange(m)/m (within a few ulp)."""
    m = times.size
    step = TWO_PI / m
    canonical = -np.pi + step * np.arange(m)
    if np.abs(times - canonical).max() <= _REGULAR_GRID_ATOL:
        return m
    return None


def _half_band_direct(times: np.ndarray, weights: np.ndarray, q_max: int) -> np.ndarray:
    """sum_i exp(-i*q*t_i) * w_i for q = 0..q_max, chunked over q."""
    out = np.empty(q_max + 1, dtype=np.complex128)
    rows = max(1, _CHUNK_CELLS // max(1, times.size))
    for start in range(0, q_max + 1, rows):
        q = np.arange(start, min(start + rows, q_max + 1))
        out[q] = np.exp(-1j * q[:, None] * times[None, :]) @ weights
    return out


def _half_band_fft(weights: np.ndarray, cells: int, q_max: int) -> np.ndarray:
    """Same sum on the canonical grid: (-1)^q * rfft(w)[q mod m], q = 0..q_max."""
    spectrum = np.fft.rfft(weights)
    half = np.empty(cells, dtype=np.complex128)
    half[: spectrum.size] = spectrum
    if cells > 1:
        tail = spectrum[1 : (cells + 1) // 2]
        half[spectrum.size :] = np.conj(tail[::-1])
    q = np.arange(q_max + 1)
    return np.where(q % 2 == 0, 1.0, -1.0) * half[q % cells]


def _spectral_table(times: np.ndarray, weights: np.ndarray, q_max: int) -> CoefficientTable:
    """(1/2pi) * sum_i exp(-i*q*t_i) * w_i as a conjugate-symmetric table."""
    cells = _canonical_cells(times)
    if cells is not None:
        half = _half_band_fft(weights, cells, q_max)
    else:
        half = _half_band_direct(times, weights, q_max)
    half /= TWO_PI
    values = np.concatenate((np.conj(half[:0:-1]), half))
    return CoefficientTable(q_max, values)


def increment_coefficients(obs: ObservedIncrements, q_max: int) -> CoefficientTable:
    """Fourier coefficients of the increment measure.

    c(q) = (1/2pi) * sum_i exp(-i*q*t_i) * dX_i, with each increment placed
    at the left endpoint of its observation interval.

    Parameters
    ----------
    obs : ObservedIncrements
        Validated increments; times strictly increasing in [-pi, pi].
    q_max : int
        Band half-width; all |q| <= q_max are computed.
    """
    if q_max < 0:
        raise ValueError(f"q_max must be nonnegative, got {q_max}")
    return _spectral_table(obs.times, obs.increments, int(q_max))


def function_coefficients(times, values, q_max: int) -> CoefficientTable:
    """Left-Riemann Fourier coefficients of a sampled function.

    c(q) ~ (1/2pi) * integral of exp(-i*q*t) * phi(t) dt over [-pi, pi],
    realized as sum_i exp(-i*q*t_i) * phi(t_i) * w_i where w_i extends each
    sample to the next sample time (the final cell is closed at +pi).  The
    left-endpoint rule mirrors the estimator's own discretization, so this
    is the reference table for true-volatility samples.
    """
    if q_max < 0:
        raise ValueError(f"q_max must be nonnegative, got {q_max}")
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or values.ndim != 1 or times.size != values.size:
        raise ValueError("times and values must be 1-D arrays of equal length")
    if times.size == 0:
        raise ValueError("empty sample set")
    if not (np.diff(times) > 0).all():
        raise ValueError("sample times must be strictly increasing")
    if times[0] < -np.pi or times[-1] > np.pi:
        raise ValueError("sample times must lie within [-pi, pi]")
    if not np.isfinite(values).all():
        raise ValueError("sample values must be finite")
    widths = np.diff(np.append(times, np.pi))
    keep = widths > 0  # a trailing sample at exactly +pi carries no mass
    return _spectral_table(times[keep], values[keep] * widths[keep], int(q_max))


def jump_coefficients(jump_times, jump_sizes, q_max: int) -> CoefficientTable:
    """Fourier coefficients of the squared-jump function.

    c(q) = (1/2pi) * sum_z exp(-i*q*z) * dJ_z^2 over the jump times z.
    """
    if q_max < 0:
        raise ValueError(f"q_max must be nonnegative, got {q_max}")
    times = np.atleast_1d(np.asarray(jump_times, dtype=float))
    sizes = np.atleast_1d(np.asarray(jump_sizes, dtype=float))
    if times.size != sizes.size:
        raise ValueError("jump times and sizes must have equal length")
    if times.size == 0:
        return CoefficientTable(q_max, np.zeros(2 * q_max + 1, dtype=np.complex128))
    if times.min() < -np.pi or times.max() > np.pi:
        raise ValueError("jump times must lie within [-pi, pi]")
    return _spectral_table(times, sizes**2, int(q_max))


def bohr_partial(u: CoefficientTable, v: CoefficientTable, index: int, cutoff: int) -> complex:
    """Partial Bohr convolution (1/(2N+1)) * sum_{|l|<=N} u(l) * v(index-l).

    Both tables must cover every accessed entry: u needs band >= cutoff and
    v needs band >= cutoff + |index|.  Insufficient bands raise instead of
    zero-filling.
    """
    cutoff = int(cutoff)
    index = int(index)
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    if u.q_max < cutoff:
        raise IndexError(
            f"left table band {u.q_max} cannot cover |l| <= {cutoff}"
        )
    if v.q_max < cutoff + abs(index):
        raise IndexError(
            f"right table band {v.q_max} cannot cover |index - l| <= "
            f"{cutoff + abs(index)}"
        )
    left = u.values[u.q_max - cutoff : u.q_max + cutoff + 1]
    lo = v.q_max + index - cutoff
    right = v.values[lo : lo + 2 * cutoff + 1][::-1]
    return complex(left @ right) / (2 * cutoff + 1)


def fejer_polynomial(coeffs: CoefficientTable, degree: int, t) -> float | np.ndarray:
    """Evaluate the Fejer-weighted trigonometric polynomial.

    sum_{|l| <= degree} (1 - |l|/degree) * c(l) * exp(i*l*t), returned as its
    real part; the imaginary residue is asserted below 1e-9 * (1 + |result|),
    which never fires on conjugate-symmetric tables.

    `t` may be a scalar or an array of evaluation points.
    """
    degree = int(degree)
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    if degree > coeffs.q_max:
        raise ValueError(
            f"degree {degree} exceeds coefficient band {coeffs.q_max}"
        )
    scale = 1.0 + float(np.abs(coeffs.values).max(initial=0.0))
    if coeffs.conjugate_symmetry_defect() > 1e-9 * scale:
        raise ValueError(
            "coefficient table is not conjugate-symmetric: the source data "
            "was not real-valued"
        )
    harmonics = np.arange(-degree, degree + 1)
    weighted = (1.0 - np.abs(harmonics) / degree) * coeffs.band(degree)
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    phases = np.exp(1j * np.atleast_1d(t_arr)[:, None] * harmonics[None, :])
    result = phases @ weighted
    residue = np.abs(result.imag)
    limit = 1e-9 * (1.0 + np.abs(result.real))
    if (residue > limit).any():
        raise ValueError(
            f"imaginary residue {residue.max():.3e} exceeds tolerance; "
            "coefficient table is inconsistent"
        )
    real = result.real
    return float(real[0]) if scalar else real


def write_coefficients_csv(table: CoefficientTable, path) -> None:
    """CSV serialization with header q,re,im, rows ordered q = -Q..Q."""
    rows = (
        (str(q), fmt(c.real), fmt(c.imag))
        for q, c in zip(table.indices, table.values)
    )
    write_csv(path, ("q", "re", "im"), rows)


def read_coefficients_csv(path) -> CoefficientTable:
    qs: list[int] = []
    cs: list[complex] = []
    lines: list[int] = []
    for lineno, row in read_rows(path, 3, header=("q", "re", "im")):
        try:
            qs.append(int(row[0]))
            cs.append(complex(float(row[1]), float(row[2])))
        except ValueError as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from None
        lines.append(lineno)
    if not qs:
        raise ValueError(f"{path}: no coefficient rows")
    q_max = (len(qs) - 1) // 2
    expected = list(range(-q_max, q_max + 1))
    if qs != expected:
        bad = next(i for i, (got, want) in enumerate(zip(qs, expected)) if got != want)
        raise ValueError(
            f"{path}: line {lines[bad]}: rows must cover q = -Q..Q in order, "
            f"expected q={expected[bad]} but found q={qs[bad]}"
        )
    return CoefficientTable(q_max, np.array(cs, dtype=np.complex128))
