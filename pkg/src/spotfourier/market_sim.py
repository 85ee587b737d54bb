"""Ground-truth path simulation on [-pi, pi].

Diffusions are generated by Euler-Maruyama over a partition (no drift: a
drift adds nothing the estimator can see at the tested tolerances and the
modeled price is already detrended).  Jumps come from a compensated Poisson
process with bounded marks; exact jump times are kept off-grid in the
JumpRecord while the sampled jump path is grid-snapped.

Randomness uses the counter-based Philox generator.  Substreams derive from
``SeedSequence(entropy=seed, spawn_key=(role,))`` so the diffusion and jump
components of one path are independent, and replicate seeds can be formed
as ``(master_seed, replicate_index)`` tuples for reproducible parallel
Monte Carlo.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._csvio import fmt, read_rows, write_csv
from .fourier import ObservedIncrements

_DIFFUSION_ROLE = 0
_JUMP_ROLE = 1

# lattice used to reject state-dependent coefficients that break their
# declared growth/Lipschitz bounds
_CHECK_STATES = np.linspace(-8.0, 8.0, 33)
_CHECK_TIMES = np.linspace(-np.pi, np.pi, 33)

MARK_LAWS = ("unit", "rademacher", "uniform")


def _normalize_seed(seed):
    if isinstance(seed, (int, np.integer)):
        if seed < 0:
            raise ValueError(f"seed must be nonnegative, got {seed}")
        return int(seed)
    try:
        entropy = tuple(int(part) for part in seed)
    except TypeError:
        raise TypeError(f"seed must be an int or a tuple of ints, got {seed!r}") from None
    if any(part < 0 for part in entropy):
        raise ValueError(f"seed entries must be nonnegative, got {seed!r}")
    return entropy


def _stream(seed, role: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(entropy=_normalize_seed(seed), spawn_key=(role,))
    return np.random.Generator(np.random.Philox(sequence))


def substream_seed(master_seed: int, replicate: int) -> tuple:
    """Per-replicate seed (master, replicate) for parallel Monte Carlo."""
    return (int(master_seed), int(replicate))


@dataclass(frozen=True)
class PartitionSpec:
    """Observation grid covering [-pi, pi], endpoints included."""

    times: np.ndarray = field(repr=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("partition needs at least two grid times")
        if not (np.diff(times) > 0).all():
            raise ValueError("partition times must be strictly increasing")
        if abs(times[0] + np.pi) > 1e-9 or abs(times[-1] - np.pi) > 1e-9:
            raise ValueError("partition must cover [-pi, pi] with both endpoints")
        times = times.copy()
        # pin the endpoints exactly so coverage logic stays float-exact
        times[0] = -np.pi
        times[-1] = np.pi
        times.flags.writeable = False
        object.__setattr__(self, "times", times)

    @classmethod
    def regular(cls, cells: int) -> "PartitionSpec":
        if int(cells) != cells or cells < 1:
            raise ValueError(f"cell count must be a positive integer, got {cells!r}")
        return cls(np.linspace(-np.pi, np.pi, int(cells) + 1))

    @classmethod
    def explicit(cls, times) -> "PartitionSpec":
        return cls(np.asarray(times, dtype=float))

    @property
    def cells(self) -> int:
        return self.times.size - 1

    @property
    def norm(self) -> float:
        """The largest gap (partition norm)."""
        return float(np.max(np.diff(self.times)))


class VolatilityModel:
    """Diffusion coefficient sigma(t, x); subclasses fix the functional form."""

    state_dependent = False

    def sigma(self, t, x):
        raise NotImplementedError

    def variance(self, t, x):
        return np.asarray(self.sigma(t, x)) ** 2


@dataclass(frozen=True)
class ConstantVol(VolatilityModel):
    value: float

    def __post_init__(self):
        if not np.isfinite(self.value) or self.value < 0:
            raise ValueError(f"constant volatility must be >= 0, got {self.value}")

    def sigma(self, t, x):
        return np.full_like(np.asarray(t, dtype=float), self.value)


@dataclass(frozen=True)
class SinusoidalShiftVol(VolatilityModel):
    """sigma(t) = scale * (sin(t) + 2), so sigma stays in [scale, 3*scale]."""

    scale: float

    def __post_init__(self):
        if not np.isfinite(self.scale) or self.scale <= 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")

    def sigma(self, t, x):
        return self.scale * (np.sin(np.asarray(t, dtype=float)) + 2.0)


@dataclass(frozen=True)
class StateDependentVol(VolatilityModel):
    """sigma = fn(t, x) with declared Lipschitz and growth bounds.

    Construction rejects the model if, on a fixed test lattice
    (t in [-pi, pi], x in [-8, 8]), either |fn(t, x)|^2 > growth_bound^2 *
    (1 + x^2) or a lattice Lipschitz quotient exceeds lipschitz_const.
    """

    fn: Callable = field(repr=False)
    growth_bound: float
    lipschitz_const: float

    state_dependent = True

    def __post_init__(self):
        if self.growth_bound <= 0 or self.lipschitz_const <= 0:
            raise ValueError("growth_bound and lipschitz_const must be > 0")
        tt, xx = np.meshgrid(_CHECK_TIMES, _CHECK_STATES, indexing="ij")
        values = np.asarray(self.fn(tt, xx), dtype=float)
        if not np.isfinite(values).all():
            raise ValueError("sigma(t, x) must be finite on the test lattice")
        growth_cap = self.growth_bound**2 * (1.0 + xx**2)
        if (values**2 > growth_cap * (1.0 + 1e-9)).any():
            raise ValueError(
                "growth bound violated on the test lattice: "
                "|sigma(t,x)|^2 > K^2 (1 + x^2)"
            )
        quotients = np.abs(np.diff(values, axis=1)) / np.diff(_CHECK_STATES)
        if (quotients > self.lipschitz_const * (1.0 + 1e-9)).any():
            raise ValueError("Lipschitz bound violated on the test lattice")

    def sigma(self, t, x):
        return np.asarray(self.fn(t, x), dtype=float)


@dataclass(frozen=True)
class JumpModelCPP:
    """Compound Poisson jumps with bounded marks (|Y| <= 1).

    intensity is the jump rate per unit time; the compensator (when enabled)
    subtracts lambda*(t + pi) with lambda = intensity * E[Y], so the jump
    part starts at 0 at t = -pi.
    """

    intensity: float
    marks: str = "unit"
    compensate: bool = True

    def __post_init__(self):
        if not np.isfinite(self.intensity) or self.intensity <= 0:
            raise ValueError(f"intensity must be > 0, got {self.intensity}")
        if self.marks not in MARK_LAWS:
            raise ValueError(f"marks must be one of {MARK_LAWS}, got {self.marks!r}")

    @property
    def mean_mark(self) -> float:
        return 1.0 if self.marks == "unit" else 0.0

    def draw_marks(self, rng: np.random.Generator, count: int) -> np.ndarray:
        if self.marks == "unit":
            return np.ones(count)
        if self.marks == "rademacher":
            return rng.integers(0, 2, size=count) * 2.0 - 1.0
        return rng.uniform(-1.0, 1.0, size=count)


@dataclass(frozen=True)
class JumpRecord:
    """Exact jump times and sizes, kept off-grid."""

    times: np.ndarray = field(repr=False)
    sizes: np.ndarray = field(repr=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        sizes = np.asarray(self.sizes, dtype=float)
        if times.ndim != 1 or sizes.ndim != 1 or times.size != sizes.size:
            raise ValueError("times and sizes must be 1-D arrays of equal length")
        if times.size:
            if not (np.diff(times) > 0).all():
                raise ValueError("jump times must be strictly increasing")
            if times[0] < -np.pi or times[-1] > np.pi:
                raise ValueError("jump times must lie within [-pi, pi]")
            if (sizes == 0).any() or not np.isfinite(sizes).all():
                raise ValueError("jump sizes must be nonzero and finite")
        for name, array in (("times", times), ("sizes", sizes)):
            array = array.copy()
            array.flags.writeable = False
            object.__setattr__(self, name, array)

    @classmethod
    def empty(cls) -> "JumpRecord":
        return cls(np.empty(0), np.empty(0))

    @property
    def count(self) -> int:
        return self.times.size

    @property
    def quadratic_sum(self) -> float:
        """Total squared jump mass, sum of dJ^2."""
        return float(np.sum(self.sizes**2))


@dataclass(frozen=True)
class SamplePath:
    """Simulation ground truth: grid samples plus the exact jump record.

    price = diffusion + jump_part elementwise; volatility holds the true
    spot variance sigma^2 sampled at the grid times.
    """

    times: np.ndarray = field(repr=False)
    diffusion: np.ndarray = field(repr=False)
    jump_part: np.ndarray = field(repr=False)
    price: np.ndarray = field(repr=False)
    volatility: np.ndarray = field(repr=False)
    jump_record: JumpRecord

    def __post_init__(self):
        arrays = {}
        size = None
        for name in ("times", "diffusion", "jump_part", "price", "volatility"):
            array = np.asarray(getattr(self, name), dtype=float)
            if array.ndim != 1:
                raise ValueError(f"{name} must be a 1-D array")
            if size is None:
                size = array.size
            elif array.size != size:
                raise ValueError("all sample arrays must have equal length")
            arrays[name] = array
        if not np.array_equal(arrays["price"], arrays["diffusion"] + arrays["jump_part"]):
            raise ValueError("price must equal diffusion + jump_part elementwise")
        if (arrays["volatility"] < 0).any():
            raise ValueError("volatility samples must be nonnegative")
        for name, array in arrays.items():
            array = array.copy()
            array.flags.writeable = False
            object.__setattr__(self, name, array)


def simulate_diffusion(model: VolatilityModel, grid: PartitionSpec, seed):
    """Euler-Maruyama diffusion samples and true variance samples.

    H[0] = 0 at t = -pi; H[i+1] = H[i] + sigma(t_i, H_i) * sqrt(dt_i) * Z_i
    with Z_i i.i.d. standard normal from the seeded substream.  Returns
    (H, V) where V_i = sigma(t_i, H_i)^2 at every grid point.
    """
    if not isinstance(grid, PartitionSpec):
        raise TypeError(f"grid must be a PartitionSpec, got {type(grid).__name__}")
    times = grid.times
    steps = np.diff(times)
    rng = _stream(seed, _DIFFUSION_ROLE)
    normals = rng.standard_normal(steps.size)
    if model.state_dependent:
        samples = np.empty(times.size)
        variance = np.empty(times.size)
        samples[0] = 0.0
        root_steps = np.sqrt(steps)
        for i in range(steps.size):
            sig = float(model.sigma(times[i], samples[i]))
            variance[i] = sig * sig
            samples[i + 1] = samples[i] + sig * root_steps[i] * normals[i]
        sig = float(model.sigma(times[-1], samples[-1]))
        variance[-1] = sig * sig
        return samples, variance
    sig = np.asarray(model.sigma(times, 0.0), dtype=float)
    increments = sig[:-1] * np.sqrt(steps) * normals
    samples = np.concatenate(([0.0], np.cumsum(increments)))
    return samples, sig**2


def simulate_cpp(model: JumpModelCPP, grid: PartitionSpec, seed):
    """Compound-Poisson jump path sampled on the grid, plus the exact record.

    Jump times accumulate exponential inter-arrivals from -pi and stop past
    +pi; marks are drawn after the times from the same substream.  The
    sampled path is sum of marks with tau <= t, minus lambda*(t+pi) when the
    model compensates.
    """
    if not isinstance(grid, PartitionSpec):
        raise TypeError(f"grid must be a PartitionSpec, got {type(grid).__name__}")
    if model.intensity <= 0:
        raise ValueError("intensity must be > 0")
    rng = _stream(seed, _JUMP_ROLE)
    mean_gap = 1.0 / model.intensity

    chunks = []
    total = -np.pi
    while total <= np.pi:
        block = rng.exponential(mean_gap, size=64)
        chunks.append(block)
        total += float(block.sum())
    arrivals = -np.pi + np.cumsum(np.concatenate(chunks))
    jump_times = arrivals[arrivals <= np.pi]
    marks = model.draw_marks(rng, jump_times.size)

    keep = marks != 0  # a zero mark is no jump (measure-zero defensive filter)
    jump_times, marks = jump_times[keep], marks[keep]
    record = JumpRecord(jump_times, marks)

    counts = np.searchsorted(jump_times, grid.times, side="right")
    cumulative = np.concatenate(([0.0], np.cumsum(marks)))
    samples = cumulative[counts]
    if model.compensate:
        samples = samples - model.intensity * model.mean_mark * (grid.times + np.pi)
    return samples, record


def combine_price(diffusion, jump_part) -> np.ndarray:
    """Pointwise sum of the diffusion and jump components."""
    diffusion = np.asarray(diffusion, dtype=float)
    jump_part = np.asarray(jump_part, dtype=float)
    if diffusion.shape != jump_part.shape:
        raise ValueError(
            f"length mismatch: {diffusion.shape} vs {jump_part.shape}"
        )
    return diffusion + jump_part


def simulate_path(
    model: VolatilityModel,
    grid: PartitionSpec,
    seed,
    jump_model: Optional[JumpModelCPP] = None,
) -> SamplePath:
    """Full ground-truth path: diffusion plus optional compensated jumps.

    The diffusion and jump substreams are independent, so adding a jump
    model does not perturb the diffusion draws for the same seed.
    """
    diffusion, variance = simulate_diffusion(model, grid, seed)
    if jump_model is None:
        jump_part = np.zeros_like(diffusion)
        record = JumpRecord.empty()
    else:
        jump_part, record = simulate_cpp(jump_model, grid, seed)
    price = combine_price(diffusion, jump_part)
    return SamplePath(
        times=grid.times,
        diffusion=diffusion,
        jump_part=jump_part,
        price=price,
        volatility=variance,
        jump_record=record,
    )


def subsample(path: SamplePath, coarse: PartitionSpec) -> ObservedIncrements:
    """Observe the price over a coarser grid, snapping each point left.

    Each coarse time is replaced by the closest fine grid time from the
    left; increments are consecutive differences of the snapped prices,
    timestamped at the left endpoints.
    """
    fine = path.times
    targets = coarse.times if isinstance(coarse, PartitionSpec) else np.asarray(coarse, float)
    idx = np.searchsorted(fine, targets, side="right") - 1
    if (idx < 0).any():
        raise ValueError("coarse grid starts before the fine grid: not covered")
    if (np.diff(idx) <= 0).any():
        raise ValueError(
            "coarse grid is not covered by the fine grid: two coarse points "
            "snap to the same fine time"
        )
    prices = path.price[idx]
    return ObservedIncrements(fine[idx[:-1]], np.diff(prices))


def local_jump_mass(jumps: JumpRecord, t: float, delta: float) -> float:
    """Sum of dJ^2 over jump times z != t with |t - z| < delta."""
    if not 0 < delta < np.pi:
        raise ValueError(f"delta must lie in (0, pi), got {delta}")
    distance = np.abs(jumps.times - t)
    mask = (distance > 0) & (distance < delta)
    return float(np.sum(jumps.sizes[mask] ** 2))


def write_path_csv(path_obj: SamplePath, dest) -> None:
    """Path export with header t,H,J,P,V."""
    rows = (
        (fmt(t), fmt(h), fmt(j), fmt(p), fmt(v))
        for t, h, j, p, v in zip(
            path_obj.times,
            path_obj.diffusion,
            path_obj.jump_part,
            path_obj.price,
            path_obj.volatility,
        )
    )
    write_csv(dest, ("t", "H", "J", "P", "V"), rows)


def write_jump_record_csv(record: JumpRecord, dest) -> None:
    """Jump record export with header tau,delta_j."""
    rows = ((fmt(t), fmt(s)) for t, s in zip(record.times, record.sizes))
    write_csv(dest, ("tau", "delta_j"), rows)


def read_jump_record_csv(source) -> JumpRecord:
    times: list[float] = []
    sizes: list[float] = []
    for lineno, row in read_rows(source, 2, header=("tau", "delta_j")):
        try:
            times.append(float(row[0]))
            sizes.append(float(row[1]))
        except ValueError as exc:
            raise ValueError(f"{source}: line {lineno}: {exc}") from None
    return JumpRecord(np.array(times), np.array(sizes))
