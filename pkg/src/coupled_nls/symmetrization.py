"""Decreasing radial rearrangement and projection onto the monotone cone.

The rearrangement treats the nodal values as samples of the cubic spline
interpolant F.  The distribution function mu(t) = |{r : |F(r)| > t}| is
computed exactly in the radial measure sigma_n r^(n-1) dr by splitting
[0, r_max] into runs on which |F| is monotone, and f*(r_i) is the level t
with mu(t) = |B(r_i)|.  Working with the measure of the continuous
interpolant instead of the nodal point masses keeps every L^p norm to
quadrature accuracy when the weights are not uniform (n >= 2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .discretization import h1_seminorm_sq
from .model import RadialField, RadialGrid, check_same_grid

INEQUALITY_RTOL = 1e-6
_ROOT_ITERATIONS = 60
# relative magnitude below which |F| is treated as round-off
_NEGLIGIBLE = 1e-14


@dataclass(frozen=True)
class RearrangedField:
    field: RadialField
    is_monotone: bool


@dataclass(frozen=True)
class ComparisonReport:
    lhs: float
    rhs: float
    holds: bool
    tolerance: float
    extra: dict | None = None


def is_nonincreasing(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) <= 0))


def _sorted_unique(points: np.ndarray, lo: float, hi: float) -> np.ndarray:
    pts = np.sort(np.concatenate(([lo, hi], points[(points > lo) & (points < hi)])))
    keep = np.concatenate(([True], np.diff(pts) > 1e-14 * max(hi, 1.0)))
    return pts[keep]


class _Run:
    """A subinterval [a, b] on which sign(F) is constant and |F| is monotone."""

    def __init__(self, spline, nodes, a, b, measure):
        self.spline = spline
        inner = nodes[(nodes > a) & (nodes < b)]
        self.points = np.concatenate(([a], inner, [b]))
        vals = spline(self.points)
        mid = spline(0.5 * (a + b))
        self.sign = 1.0 if mid >= 0 else -1.0
        self.values = np.abs(vals)
        self.decreasing = self.values[0] >= self.values[-1]
        # enforce exact monotonicity of the breakpoint magnitudes
        if self.decreasing:
            self.values = np.minimum.accumulate(self.values)
        else:
            self.values = np.maximum.accumulate(self.values)
        self.a, self.b = a, b
        self.measure = measure
        self.low = float(self.values.min())
        self.high = float(self.values.max())

    def superlevel_measure(self, t: np.ndarray) -> np.ndarray:
        """Measure of {r in [a,b] : |F(r)| > t} for an array of levels."""
        out = np.zeros_like(t)
        full = t < self.low
        out[full] = self.measure(self.b) - self.measure(self.a)
        part = (~full) & (t < self.high)
        if not part.any():
            return out
        tp = t[part]
        if self.decreasing:
            asc_vals = self.values[::-1]
            asc_pts = self.points[::-1]
        else:
            asc_vals = self.values
            asc_pts = self.points
        k = np.searchsorted(asc_vals, tp, side="right")
        k = np.clip(k, 1, len(asc_vals) - 1)
        x0, x1 = asc_pts[k - 1], asc_pts[k]
        v0, v1 = asc_vals[k - 1], asc_vals[k]
        lo = np.minimum(x0, x1)
        hi = np.maximum(x0, x1)
        x = _solve_level(self.spline, self.sign, not self.decreasing, tp, lo, hi, x0, x1, v0, v1)
        if self.decreasing:
            out[part] = self.measure(x) - self.measure(self.a)
        else:
            out[part] = self.measure(self.b) - self.measure(x)
        return out


def _solve_level(spline, sign, increasing, t, lo, hi, x0, x1, v0, v1):
    """Bracketed Newton for sign*F(x) = t on cells [lo, hi] where |F| is monotone."""
    dv = v1 - v0
    frac = np.where(dv != 0, (t - v0) / np.where(dv != 0, dv, 1.0), 0.5)
    x = x0 + np.clip(frac, 0.0, 1.0) * (x1 - x0)
    lo, hi = lo.copy(), hi.copy()
    act = np.arange(len(x))
    for _ in range(_ROOT_ITERATIONS):
        xa = x[act]
        g = sign * spline(xa) - t[act]
        # g increases with x on increasing runs: g < 0 means the root lies right of x
        right = (g < 0) == increasing
        lo[act] = np.where(right, xa, lo[act])
        hi[act] = np.where(right, hi[act], xa)
        dg = sign * spline(xa, 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = xa - g / dg
        inside = np.isfinite(step) & (step >= lo[act]) & (step <= hi[act])
        new = np.where(g == 0, xa, np.where(inside, step, 0.5 * (lo[act] + hi[act])))
        x[act] = new
        moving = np.abs(new - xa) > 4e-16 * np.maximum(1.0, np.abs(xa))
        act = act[moving]
        if act.size == 0:
            break
    return x


class _NegligibleRun:
    """Stretch where |F| stays at round-off level; it carries no superlevel measure."""

    values = np.zeros(1)
    low = high = 0.0

    def superlevel_measure(self, t: np.ndarray) -> np.ndarray:
        return np.zeros_like(t)


def _runs(values: np.ndarray, grid: RadialGrid):
    nodes = np.asarray(grid.nodes)
    spline = CubicSpline(nodes, values, bc_type="not-a-knot")
    crit = spline.derivative().roots(extrapolate=False)
    zeros = spline.roots(extrapolate=False)
    pts = np.concatenate((np.real(crit), np.real(zeros)))
    pts = pts[np.isfinite(pts)]
    breaks = _sorted_unique(pts, 0.0, grid.r_max)
    n, sigma = grid.n, grid.sphere_factor

    def measure(r):
        return sigma * np.asarray(r) ** n / n

    # critical points in decayed tails are round-off wiggles; pool them
    floor = _NEGLIGIBLE * float(np.max(np.abs(values)))
    peak = np.abs(spline(breaks))
    idx = np.searchsorted(nodes, breaks)
    node_max = np.maximum.reduceat(np.abs(np.append(values, 0.0)), np.minimum(idx, len(nodes)))
    runs = []
    for j, (a, b) in enumerate(zip(breaks[:-1], breaks[1:])):
        tiny = max(peak[j], peak[j + 1]) <= floor and (idx[j] >= idx[j + 1] or node_max[j] <= floor)
        if tiny:
            if not (runs and isinstance(runs[-1], _NegligibleRun)):
                runs.append(_NegligibleRun())
        else:
            runs.append(_Run(spline, nodes, a, b, measure))
    return runs, measure


def _rearranged_values(values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    runs, measure = _runs(values, grid)
    targets = measure(np.asarray(grid.nodes))
    top = max(r.high for r in runs)
    if top <= 0:
        return np.zeros_like(values)

    def mu(t):
        total = np.zeros_like(t)
        for run in runs:
            total += run.superlevel_measure(t)
        return total

    # bracket each target between consecutive candidate levels, then Illinois
    cand = np.unique(np.concatenate([r.values for r in runs] + [[0.0, top]]))[::-1]
    mu_c = mu(cand)
    mu_c = np.maximum.accumulate(mu_c)
    out = np.empty_like(targets)
    out[0] = top
    rest = targets[1:]
    k = np.searchsorted(mu_c, rest, side="left")
    beyond = k >= len(cand)
    k = np.clip(k, 1, len(cand) - 1)
    t_hi, t_lo = cand[k - 1], cand[k]
    g_hi, g_lo = mu_c[k - 1] - rest, mu_c[k] - rest
    t = _illinois(mu, rest, t_lo, t_hi, g_lo, g_hi)
    t[beyond] = 0.0
    out[1:] = t
    out = np.clip(out, 0.0, top)
    return np.minimum.accumulate(out)


def _illinois(mu, target, a, b, fa, fb, iterations: int = 100):
    """Vectorized regula falsi (Illinois) for mu(t) = target with mu decreasing in t."""
    a, b, fa, fb = a.copy(), b.copy(), fa.copy(), fb.copy()
    x = 0.5 * (a + b)
    done = (fa == 0) | (fb == 0) | (a == b)
    x = np.where(fa == 0, a, np.where(fb == 0, b, x))
    side = np.zeros(a.shape, dtype=int)
    for _ in range(iterations):
        act = ~done
        if not act.any():
            break
        denom = fb[act] - fa[act]
        xa = np.where(denom != 0, (a[act] * fb[act] - b[act] * fa[act]) / np.where(denom != 0, denom, 1.0),
                      0.5 * (a[act] + b[act]))
        fx = mu(xa) - target[act]
        x[act] = xa
        idx = np.flatnonzero(act)
        same_as_a = np.sign(fx) == np.sign(fa[act])
        # replace the endpoint with matching sign, halving the stale one
        ia = idx[same_as_a]
        a[ia], fa[ia] = xa[same_as_a], fx[same_as_a]
        fb[ia] = np.where(side[ia] == -1, fb[ia] / 2, fb[ia])
        side[ia] = -1
        ib = idx[~same_as_a]
        b[ib], fb[ib] = xa[~same_as_a], fx[~same_as_a]
        fa[ib] = np.where(side[ib] == 1, fa[ib] / 2, fa[ib])
        side[ib] = 1
        width = np.abs(b[act] - a[act])
        conv = (fx == 0) | (width <= 4e-16 * np.maximum(np.abs(xa), 1e-300))
        done[idx[conv]] = True
    return x


def decreasing_rearrangement(f: RadialField) -> RearrangedField:
    """Equimeasurable nonincreasing rearrangement f* of |f|."""
    values = np.abs(np.asarray(f.values))
    if is_nonincreasing(values):
        return RearrangedField(RadialField(f.grid, values), True)
    out = _rearranged_values(np.asarray(f.values, dtype=float), f.grid)
    return RearrangedField(RadialField(f.grid, out), True)


def weighted_pava_decreasing(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Weighted least-squares nonincreasing fit (pool adjacent violators)."""
    n = len(y)
    means = np.empty(n)
    weights = np.empty(n)
    counts = np.empty(n, dtype=int)
    top = -1
    for i in range(n):
        top += 1
        means[top], weights[top], counts[top] = y[i], w[i], 1
        while top > 0 and means[top - 1] < means[top]:
            wt = weights[top - 1] + weights[top]
            means[top - 1] = (weights[top - 1] * means[top - 1] + weights[top] * means[top]) / wt
            weights[top - 1] = wt
            counts[top - 1] += counts[top]
            top -= 1
    return np.repeat(means[: top + 1], counts[: top + 1])


def monotone_projection_values(values: np.ndarray, w: np.ndarray) -> np.ndarray:
    a = np.abs(np.asarray(values, dtype=float))
    if is_nonincreasing(a):
        return a
    pos = w > 0
    out = a.copy()
    # zero-weight nodes only occur at the origin; any value above the next
    # node is optimal, the closest one to the input is kept
    first = int(np.argmax(pos))
    out[first:] = weighted_pava_decreasing(a[first:], w[first:])
    for i in range(first - 1, -1, -1):
        out[i] = max(a[i], out[i + 1])
    return out


def monotone_projection(f: RadialField) -> RearrangedField:
    """Weighted L^2 projection of |f| onto nonnegative nonincreasing fields."""
    out = monotone_projection_values(f.values, np.asarray(f.grid.quad_weights))
    return RearrangedField(RadialField(f.grid, out), True)


def check_polya_szego(f: RadialField, rtol: float = INEQUALITY_RTOL) -> ComparisonReport:
    star = decreasing_rearrangement(f).field
    lhs = float(np.sqrt(h1_seminorm_sq(star)))
    rhs = float(np.sqrt(h1_seminorm_sq(f)))
    tol = rtol * rhs
    return ComparisonReport(lhs, rhs, lhs <= rhs + tol, tol)


def check_hardy_littlewood(f: RadialField, g: RadialField, q: float = 2.0,
                           rtol: float = INEQUALITY_RTOL) -> ComparisonReport:
    """Compare int |fg| with int f* g*, and ||fg||_q with ||f* g*||_q."""
    grid = check_same_grid(f, g)
    w = np.asarray(grid.quad_weights)
    fs = decreasing_rearrangement(f).field.values
    gs = decreasing_rearrangement(g).field.values
    lhs = float(np.dot(w, np.abs(f.values * g.values)))
    rhs = float(np.dot(w, fs * gs))
    tol = rtol * max(rhs, abs(lhs))
    lq = float(np.dot(w, np.abs(f.values * g.values) ** q)) ** (1 / q)
    rq = float(np.dot(w, (fs * gs) ** q)) ** (1 / q)
    tol_q = rtol * max(rq, lq)
    holds_q = lq <= rq + tol_q
    return ComparisonReport(lhs, rhs, lhs <= rhs + tol and holds_q, tol,
                            {"q": q, "norm_q_lhs": lq, "norm_q_rhs": rq, "holds_q": holds_q})
