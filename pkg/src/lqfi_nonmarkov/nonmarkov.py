"""Non-Markovianity as the accumulated growth of LQFI or LQU along a trajectory.

For a measure X(t) the quantifier is the sum of X(end) - X(start) over every
interval where dX/dt > 0. Intervals are located on a uniform scan and their
endpoints refined by bisection on the numerical derivative.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import channels as ch
from .measures import lqfi_lqu
from .states import is_physical

DERIV_STEP = 1e-4
DELTA_FLOOR = 1e-12

DEFAULT_WINDOWS = {
    ch.DephasingParams: lambda p: (0.0, 30.0 / p.omega_c),
    ch.AmplitudeDampingParams: lambda p: (0.0, 25.0 / p.gamma0),
    ch.DepolarizingParams: lambda p: (0.0, 10.0),
}


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    q_values: np.ndarray
    u_values: np.ndarray


@dataclass(frozen=True)
class IncreaseInterval:
    t_start: float
    t_end: float
    delta: float


@dataclass(frozen=True)
class NonMarkovReport:
    intervals: list[IncreaseInterval]
    n_lqfi: float
    n_lqu: float
    intervals_lqu: list[IncreaseInterval] = field(default_factory=list)

    @property
    def ratio(self) -> float | None:
        return self.n_lqfi / self.n_lqu if self.n_lqu > 0 else None

    def as_dict(self) -> dict:
        def ivs(items):
            return [[iv.t_start, iv.t_end, iv.delta] for iv in items]

        return {
            "n_lqfi": self.n_lqfi,
            "n_lqu": self.n_lqu,
            "ratio": self.ratio,
            "intervals_lqfi": ivs(self.intervals),
            "intervals_lqu": ivs(self.intervals_lqu),
        }


def default_window(spec: ch.ChannelSpec) -> tuple[float, float]:
    return DEFAULT_WINDOWS[type(spec)](spec)


def derivative(f: Callable, t: float, h0: float = DERIV_STEP, lower: float = 0.0):
    """Richardson-extrapolated finite difference of ``f`` at ``t``.

    Central differences with steps h0 and h0/2; when ``t - h0`` would leave
    the domain the one-sided second-order stencil is used instead. ``f`` may
    return arrays, in which case the derivative is taken elementwise.
    """
    if t - h0 >= lower:
        def d(h):
            return (np.asarray(f(t + h)) - np.asarray(f(t - h))) / (2.0 * h)
    else:
        f0 = np.asarray(f(t))

        def d(h):
            return (-3.0 * f0 + 4.0 * np.asarray(f(t + h)) - np.asarray(f(t + 2.0 * h))) / (2.0 * h)

    coarse, fine = d(h0), d(h0 / 2.0)
    out = (4.0 * fine - coarse) / 3.0
    return float(out) if np.ndim(out) == 0 else out


def _bisect_sign(df: Callable[[float], float], lo: float, hi: float, rising: bool, tol: float) -> float | None:
    """Root of df in [lo, hi] where df goes - to + (rising) or + to - (falling)."""
    sgn = 1.0 if rising else -1.0
    flo, fhi = sgn * df(lo), sgn * df(hi)
    if not (flo <= 0.0 <= fhi):
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if sgn * df(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _golden(f: Callable[[float], float], lo: float, hi: float, tol: float, maximize: bool) -> float:
    sgn = -1.0 if maximize else 1.0
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = sgn * f(c), sgn * f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = sgn * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = sgn * f(d)
    return 0.5 * (a + b)


def increasing_intervals(
    f: Callable[[float], float],
    window: tuple[float, float],
    n_scan: int = 1000,
    values: Sequence[float] | None = None,
    h0: float = DERIV_STEP,
) -> list[IncreaseInterval]:
    """Intervals of ``window`` on which ``f`` increases.

    ``values`` may carry precomputed samples of ``f`` on the uniform scan grid.
    """
    if n_scan < 100:
        raise ValueError("n_scan must be at least 100")
    t0, t1 = window
    grid = np.linspace(t0, t1, n_scan)
    vals = np.asarray(values if values is not None else [f(t) for t in grid], dtype=float)
    if vals.shape != grid.shape:
        raise ValueError("values must match the scan grid")
    tol = 1e-8 * (t1 - t0)

    def df(t):
        return derivative(f, t, h0, lower=t0)

    up = np.diff(vals) > 0.0
    raw: list[list[float]] = []
    for is_up, grp in itertools.groupby(range(len(up)), key=lambda i: up[i]):
        if not is_up:
            continue
        idx = list(grp)
        a, b = idx[0], idx[-1] + 1  # f rises from grid[a] to grid[b]
        span = vals[max(a - 1, 0):b + 2]
        if span.max() - span.min() <= DELTA_FLOOR:
            continue  # round-off ripple; refinement cannot lift it above the floor
        if a == 0:
            start = t0
        else:
            lo, hi = grid[a - 1], grid[a + 1]
            start = _bisect_sign(df, lo, hi, rising=True, tol=tol)
            if start is None:
                start = _golden(f, lo, hi, tol, maximize=False)
        if b == n_scan - 1:
            end = t1
        else:
            lo, hi = grid[b - 1], grid[b + 1]
            end = _bisect_sign(df, lo, hi, rising=False, tol=tol)
            if end is None:
                end = _golden(f, lo, hi, tol, maximize=True)
        if end > start:
            raw.append([start, end])

    merged: list[list[float]] = []
    for iv in raw:
        if merged and iv[0] <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], iv[1])
        else:
            merged.append(iv)

    out = []
    for start, end in merged:
        delta = float(f(end) - f(start))
        if delta > DELTA_FLOOR:
            out.append(IncreaseInterval(float(start), float(end), delta))
    return out


def non_markovianity(
    f: Callable[[float], float],
    window: tuple[float, float],
    n_scan: int = 1000,
    values: Sequence[float] | None = None,
) -> tuple[list[IncreaseInterval], float]:
    """Detected increase intervals and their accumulated gain N."""
    intervals = increasing_intervals(f, window, n_scan, values)
    return intervals, float(sum(iv.delta for iv in intervals))


def positive_derivative_integral(
    f: Callable[[float], float], window: tuple[float, float], n_points: int = 4001
) -> float:
    """Trapezoidal integral of max(df/dt, 0) over ``window``.

    Derivatives are sampled on a uniform grid; cells where the derivative
    changes sign are split at the linearly interpolated zero so the kink of
    the positive part does not cost an O(h) error. Cross-check for the
    interval sum; it never looks at the detected intervals.
    """
    t0, t1 = window
    grid = np.linspace(t0, t1, n_points)
    d = np.array([derivative(f, t, lower=t0) for t in grid])
    total = 0.0
    for a, b, da, db in zip(grid[:-1], grid[1:], d[:-1], d[1:]):
        if da >= 0 and db >= 0:
            total += 0.5 * (b - a) * (da + db)
        elif da > 0 > db:
            z = a + (b - a) * da / (da - db)
            total += 0.5 * (z - a) * da
        elif db > 0 > da:
            z = a + (b - a) * (-da) / (db - da)
            total += 0.5 * (b - z) * db
    return total


class _MeasureCache:
    """Memoised (Q, U) along a channel trajectory."""

    def __init__(self, spec: ch.ChannelSpec):
        self.spec = spec
        self._memo: dict[float, tuple[float, float]] = {}

    def __call__(self, t: float) -> tuple[float, float]:
        t = float(t)
        hit = self._memo.get(t)
        if hit is None:
            hit = lqfi_lqu(ch.evolve(self.spec, t))
            self._memo[t] = hit
        return hit

    def q(self, t: float) -> float:
        return self(t)[0]

    def u(self, t: float) -> float:
        return self(t)[1]

    def both(self, t: float) -> np.ndarray:
        return np.array(self(t))


def sample_trajectory(spec: ch.ChannelSpec, t_grid: Iterable[float]) -> Trajectory:
    times = np.asarray(list(t_grid), dtype=float)
    if times.size > 1 and np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be strictly increasing")
    if times.size and times[0] < 0:
        raise ValueError("time grid must start at t >= 0")
    pairs = np.array([lqfi_lqu(ch.evolve(spec, t)) for t in times]).reshape(-1, 2)
    return Trajectory(times, pairs[:, 0], pairs[:, 1])


def measure_functions(spec: ch.ChannelSpec) -> _MeasureCache:
    return _MeasureCache(spec)


def channel_report(
    spec: ch.ChannelSpec,
    window: tuple[float, float] | None = None,
    n_scan: int = 1000,
) -> NonMarkovReport:
    """N for both LQFI and LQU on a shared scan grid."""
    window = window or default_window(spec)
    cache = _MeasureCache(spec)
    grid = np.linspace(window[0], window[1], n_scan)
    samples = np.array([cache(t) for t in grid])
    iv_q, n_q = non_markovianity(cache.q, window, n_scan, samples[:, 0])
    iv_u, n_u = non_markovianity(cache.u, window, n_scan, samples[:, 1])
    return NonMarkovReport(iv_q, n_q, n_u, iv_u)


def correlation_grid(step: float) -> list[tuple[float, float, float]]:
    """Physical correlation triples on a lattice of spacing ``step`` with |r1| >= |r2|."""
    if not (0.0 < step <= 0.5):
        raise ValueError("step must lie in (0, 0.5]")
    count = int(math.floor(1.0 / step + 1e-9))
    axis = sorted({round(k * step, 12) for k in range(-count, count + 1)})
    out = []
    for r in itertools.product(axis, repeat=3):
        if abs(r[0]) >= abs(r[1]) and is_physical(r):
            out.append(tuple(float(x) for x in r))
    return out


def maximize_over_initial(
    mu: complex,
    window: tuple[float, float] = (0.0, 10.0),
    r_grid_step: float = 0.5,
    n_scan: int = 1000,
    triples: Sequence[tuple[float, float, float]] | None = None,
) -> tuple[NonMarkovReport, tuple[float, float, float]]:
    """Largest N^LQFI over X-state initial conditions for the depolarizing channel.

    Ties (within 1e-12) go to the lexicographically smallest triple.
    """
    candidates = sorted(triples) if triples is not None else correlation_grid(r_grid_step)
    best: tuple[NonMarkovReport, tuple[float, float, float]] | None = None
    for r in candidates:
        rep = channel_report(ch.DepolarizingParams(mu=mu, r=r), window, n_scan)
        if best is None or rep.n_lqfi > best[0].n_lqfi + 1e-12:
            best = (rep, r)
    if best is None:
        raise ValueError("no physical correlation triple on the grid")
    return best
