"""Dirichlet and Fejer kernel evaluation and numerical bound checks.

The closed forms

    D_N(t) = sin(N t + t/2) / sin(t/2)            (2N+1 harmonics)
    F_N(t) = (1/N) * (sin(N t/2) / sin(t/2))**2

both degenerate at t = 0 (mod 2*pi).  Near those points the trigonometric
series is summed directly instead, which is exact there and avoids
catastrophic cancellation.  Arguments are reduced into (-pi, pi] by
2*pi-periodicity before evaluation.
"""

from __future__ import annotations

import numpy as np

# below this |sin(t/2)| the closed forms lose too many digits; switch to the
# series form
SIN_HALF_CUTOFF = 1e-8


def _require_order(order: int) -> int:
    n = int(order)
    if n != order or n < 1:
        raise ValueError(f"kernel order must be a positive integer, got {order!r}")
    return n


def _reduce_angle(t) -> np.ndarray:
    """Map angles into (-pi, pi] using 2*pi-periodicity."""
    t = np.asarray(t, dtype=float)
    out = np.remainder(t + np.pi, 2.0 * np.pi) - np.pi
    # remainder lands in [-pi, pi); fold the closed endpoint back to +pi
    return np.where(out == -np.pi, np.pi, out)


def _dispatch(t, compute) -> float | np.ndarray:
    """Evaluate `compute` on the reduced angle, scalar-in scalar-out."""
    x = _reduce_angle(t)
    scalar = x.ndim == 0
    out = compute(np.atleast_1d(x))
    return float(out[0]) if scalar else out


def dirichlet(order: int, t) -> float | np.ndarray:
    """Dirichlet kernel D(t) = sum_{|l| <= order} cos(l*t).

    Parameters
    ----------
    order : int
        Number of harmonics per side (2*order+1 terms in total), >= 1.
    t : float or ndarray
        Angle(s); any real value is accepted and reduced mod 2*pi.

    Returns
    -------
    float or ndarray
        Kernel value(s); 2*order+1 exactly at t = 0 (mod 2*pi).
    """
    n = _require_order(order)

    def compute(x):
        s = np.sin(0.5 * x)
        out = np.empty_like(x)
        safe = np.abs(s) >= SIN_HALF_CUTOFF
        out[safe] = np.sin((n + 0.5) * x[safe]) / s[safe]
        if not safe.all():
            xs = x[~safe]
            harmonics = np.arange(1, n + 1)
            out[~safe] = 1.0 + 2.0 * np.cos(np.outer(xs, harmonics)).sum(axis=1)
        return out

    return _dispatch(t, compute)


def dirichlet_rescaled(order: int, t) -> float | np.ndarray:
    """dirichlet(order, t) / (2*order + 1); exactly 1 at t = 0 (mod 2*pi)."""
    n = _require_order(order)
    return dirichlet(n, t) / (2 * n + 1)


def fejer(order: int, t) -> float | np.ndarray:
    """Fejer kernel (1/order) * (sin(order*t/2) / sin(t/2))**2.

    Nonnegative, 2*pi-periodic, peak value `order` at t = 0 (mod 2*pi).
    """
    n = _require_order(order)

    def compute(x):
        s = np.sin(0.5 * x)
        out = np.empty_like(x)
        safe = np.abs(s) >= SIN_HALF_CUTOFF
        out[safe] = (np.sin(0.5 * n * x[safe]) / s[safe]) ** 2 / n
        if not safe.all():
            xs = x[~safe]
            if n == 1:
                out[~safe] = 1.0
            else:
                harmonics = np.arange(1, n)
                weights = 1.0 - harmonics / n
                out[~safe] = 1.0 + 2.0 * np.cos(np.outer(xs, harmonics)) @ weights
        return out

    return _dispatch(t, compute)


def dirichlet_lr_mass(order: int, exponent: float, quadrature_points: int) -> float:
    """Composite-midpoint approximation of the L^r mass of the Dirichlet kernel.

    Computes integral over [-pi, pi] of |D(s)|**exponent ds.  Used to check
    that the mass grows like (2*order+1)**(exponent-1).

    Parameters
    ----------
    order : int
        Kernel order, >= 1.
    exponent : float
        The L^r exponent, must be > 1.
    quadrature_points : int
        Number of midpoint cells; must be >= 10*(2*order+1) so every kernel
        oscillation is resolved by at least 10 points.
    """
    n = _require_order(order)
    if exponent <= 1:
        raise ValueError(f"exponent must be > 1, got {exponent}")
    points = int(quadrature_points)
    if points < 10 * (2 * n + 1):
        raise ValueError(
            f"quadrature_points must be >= 10*(2*order+1) = {10 * (2 * n + 1)}, "
            f"got {quadrature_points}"
        )
    step = 2.0 * np.pi / points
    midpoints = -np.pi + (np.arange(points) + 0.5) * step
    values = np.abs(dirichlet(n, midpoints)) ** exponent
    return float(values.sum() * step)


def discretized_bound_constant(exponent: float) -> float:
    """The constant 5 + 2*pi**r / (r-1) in the discretized kernel bound."""
    if exponent <= 1:
        raise ValueError(f"exponent must be > 1, got {exponent}")
    return 5.0 + 2.0 * np.pi**exponent / (exponent - 1.0)


def discretized_kernel_bound_gap(order: int, exponent: float, partition, t: float) -> float:
    """Bound minus integral in the discretized Dirichlet kernel estimate.

    The integral is over s in [-pi, t] of |D~(floor(t) - floor(s))|**exponent,
    where floor(.) snaps to the closest partition point from the left.  The
    integrand is piecewise constant on partition cells, so the integral is a
    finite sum evaluated exactly (no quadrature error).  The bound is
    5*rho + (2*order+1)**(-1) * (5 + 2*pi**exponent/(exponent-1)) with rho
    the partition norm.  The returned gap must be >= 0 up to float rounding.

    `partition` is a PartitionSpec or any array-like of grid times covering
    [-pi, pi].
    """
    n = _require_order(order)
    if exponent <= 1:
        raise ValueError(f"exponent must be > 1, got {exponent}")
    if not -np.pi <= t <= np.pi:
        raise ValueError(f"t must lie in [-pi, pi], got {t}")
    grid = np.asarray(getattr(partition, "times", partition), dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("partition must provide at least two grid times")

    snapped_t = grid[np.searchsorted(grid, t, side="right") - 1]
    lefts = grid[:-1]
    widths = np.minimum(grid[1:], t) - lefts
    active = widths > 0
    integral = 0.0
    if active.any():
        values = np.abs(dirichlet_rescaled(n, snapped_t - lefts[active])) ** exponent
        integral = float(values @ widths[active])
    norm = float(np.max(np.diff(grid)))
    bound = 5.0 * norm + discretized_bound_constant(exponent) / (2 * n + 1)
    return bound - integral
