"""Curve representations on S2/S3 and in ambient space.

A CurveSpec wraps a jet callable `jet_fn(t, order)` returning the stacked
value and derivatives, shape (order+1, dim).  Closed-form curves supply
analytic jets; sampled curves interpolate them from grid data with
local polynomial stencils.  All transformations below propagate jets
exactly (Leibniz / chain rule), so derived curves keep analytic-quality
derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets
from .errors import ChartError, ImmersionError, OrderError, ZeroVectorError

SPACES = {"S2": 3, "S3": 4, "R3": 3, "R4": 4}
MAX_ORDER = jets.MAX_ORDER

_SPHERE_TOL = 1e-9
DEFAULT_CHECK_GRID = 512


@dataclass(frozen=True)
class CurveSpec:
    """A parametrized curve on [0, 1] with derivatives up to order 3."""

    space: str
    jet_fn: Callable[[float, int], np.ndarray] = field(repr=False)
    name: str = ""

    def __post_init__(self):
        if self.space not in SPACES:
            raise ValueError(f"unknown space {self.space!r}")

    @property
    def dim(self) -> int:
        return SPACES[self.space]

    @property
    def on_sphere(self) -> bool:
        return self.space in ("S2", "S3")

    def jet(self, t: float, order: int = MAX_ORDER) -> np.ndarray:
        if order > MAX_ORDER:
            raise OrderError(f"derivative order {order} > {MAX_ORDER}")
        g = self.jet_fn(float(t), order)
        return np.asarray(g, dtype=float)

    def point(self, t: float) -> np.ndarray:
        return self.jet(t, 0)[0]


@dataclass(frozen=True)
class SampledCurve:
    """Grid samples of a curve: parameters, points and optional derivatives.

    `derivs[i, k-1]` holds the order-k derivative at ts[i], k = 1..3.
    """

    ts: np.ndarray
    points: np.ndarray
    derivs: np.ndarray | None = None

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        pts = np.asarray(self.points, dtype=float)
        if np.any(np.diff(ts) <= 0):
            raise ValueError("parameter grid must be strictly increasing")
        if abs(ts[0]) > 1e-12 or abs(ts[-1] - 1.0) > 1e-12:
            raise ValueError("parameter grid must span [0, 1]")
        if len(pts) != len(ts):
            raise ValueError("points and ts length mismatch")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "points", pts)
        if self.derivs is not None:
            object.__setattr__(self, "derivs", np.asarray(self.derivs, dtype=float))


def sample(spec: CurveSpec, n: int) -> SampledCurve:
    """Uniform grid of n+1 samples (endpoints included) with derivatives."""
    if n < 4:
        raise ValueError("need at least n = 4 intervals")
    ts = np.linspace(0.0, 1.0, n + 1)
    pts = np.empty((n + 1, spec.dim))
    der = np.empty((n + 1, MAX_ORDER, spec.dim))
    for i, t in enumerate(ts):
        g = spec.jet(t, MAX_ORDER)
        pts[i] = g[0]
        der[i] = g[1:]
    return SampledCurve(ts, pts, der)


def derivatives(spec: CurveSpec, t: float, order: int) -> list[np.ndarray]:
    """Derivative vectors [curve', ..., curve^(order)] at t (order 1..3)."""
    if order > MAX_ORDER:
        raise OrderError(f"derivative order {order} > {MAX_ORDER}")
    if order < 1:
        raise ValueError("order must be at least 1")
    g = spec.jet(t, order)
    return [g[k] for k in range(1, order + 1)]


def from_samples(sc: SampledCurve, space: str, window: int = 7) -> CurveSpec:
    """Curve backed by grid data; jets via local polynomial stencils.

    Uses `window`-point windows (one-sided near the ends).  When sampled
    derivatives are stored they are interpolated directly; otherwise the
    positions are differentiated.
    """
    ts = sc.ts
    pts = sc.points
    der = sc.derivs
    n = len(ts)
    if n < window:
        raise ValueError(f"need at least {window} samples")

    def jet_fn(t: float, order: int) -> np.ndarray:
        center = int(np.clip(np.searchsorted(ts, t), 0, n - 1))
        idx = jets.window_indices(n, center, window)
        nodes = ts[idx]
        w0 = jets.fd_weights(nodes, t, 0)
        out = [w0 @ pts[idx]]
        for k in range(1, order + 1):
            if der is not None:
                out.append(w0 @ der[idx, k - 1])
            else:
                out.append(jets.fd_weights(nodes, t, k) @ pts[idx])
        return np.array(out)

    return CurveSpec(space, jet_fn, name="sampled")


def from_function(
    f: Callable[[float], np.ndarray], space: str, step: float = 1e-3
) -> CurveSpec:
    """Curve from a plain position callable; jets by finite differences."""

    def jet_fn(t: float, order: int) -> np.ndarray:
        nodes = t + step * (np.arange(7) - 3)
        vals = np.array([f(u) for u in nodes])
        out = [np.asarray(f(t), dtype=float)]
        for k in range(1, order + 1):
            out.append(jets.fd_weights(nodes, t, k) @ vals)
        return np.array(out)

    return CurveSpec(space, jet_fn, name="function")


def sphere_residual(spec: CurveSpec, n: int = DEFAULT_CHECK_GRID) -> float:
    """max over the grid of | ||curve(t)|| - 1 |."""
    ts = np.linspace(0.0, 1.0, n + 1)
    return max(abs(np.linalg.norm(spec.point(t)) - 1.0) for t in ts)


def normalize_to_sphere(spec: CurveSpec, n_check: int = DEFAULT_CHECK_GRID) -> CurveSpec:
    """Radial normalization curve(t)/||curve(t)|| with exact jet transport."""
    ts = np.linspace(0.0, 1.0, n_check + 1)
    for t in ts:
        if np.linalg.norm(spec.point(t)) < 1e-12:
            raise ZeroVectorError(f"curve norm vanishes near t = {t:.6f}")
    target = "S2" if spec.dim == 3 else "S3"

    def jet_fn(t: float, order: int) -> np.ndarray:
        g = spec.jet(t, order)
        r = jets.jsqrt(jets.jdot(g, g))
        return jets.jdiv(g, r)

    return CurveSpec(target, jet_fn, name=f"normalize({spec.name})")


def central_projection(spec: CurveSpec, n_check: int = DEFAULT_CHECK_GRID) -> CurveSpec:
    """Chart map (x1, x2, x3, x4) -> (1, x2/x1, x3/x1, x4/x1).

    Requires a positive first coordinate on the verification grid; raises
    ChartError reporting the first offending parameter.
    """
    if spec.dim != 4:
        raise ValueError("central projection expects a curve in R^4 / S^3")
    ts = np.linspace(0.0, 1.0, n_check + 1)
    for t in ts:
        if spec.point(t)[0] <= 1e-9:
            raise ChartError(f"first coordinate not positive at t = {t:.6f}")

    def jet_fn(t: float, order: int) -> np.ndarray:
        g = spec.jet(t, order)
        x1 = g[:, 0]
        out = jets.jdiv(g, x1)
        out[0, 0] = 1.0
        out[1:, 0] = 0.0
        return out

    return CurveSpec("R4", jet_fn, name=f"project({spec.name})")


def speed(spec: CurveSpec, t: float) -> float:
    return float(np.linalg.norm(spec.jet(t, 1)[1]))


def arc_length_table(spec: CurveSpec, n: int = DEFAULT_CHECK_GRID):
    """Cumulative arc length on a uniform grid via per-interval Gauss rules."""
    nodes, weights = np.polynomial.legendre.leggauss(5)
    ts = np.linspace(0.0, 1.0, n + 1)
    cum = np.zeros(n + 1)
    for i in range(n):
        a, b = ts[i], ts[i + 1]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        cum[i + 1] = cum[i] + half * sum(
            w * speed(spec, mid + half * x) for x, w in zip(nodes, weights)
        )
    return ts, cum


def reparametrize_constant_speed(
    spec: CurveSpec, n: int = DEFAULT_CHECK_GRID
) -> CurveSpec:
    """Arc-length-proportional reparametrization onto [0, 1].

    The inverse arc-length map is evaluated by Newton refinement against
    quadrature and its derivatives are propagated exactly, so the output
    jets are as accurate as the input's.
    """
    ts_grid = np.linspace(0.0, 1.0, n + 1)
    for t in ts_grid:
        if speed(spec, t) < 1e-12:
            raise ImmersionError(f"speed vanishes near t = {t:.6f}")
    grid, cum = arc_length_table(spec, n)
    total = cum[-1]
    nodes, weights = np.polynomial.legendre.leggauss(5)

    def cum_at(u: float) -> float:
        k = int(np.clip(np.searchsorted(grid, u) - 1, 0, n - 1))
        a = grid[k]
        mid, half = 0.5 * (a + u), 0.5 * (u - a)
        part = half * sum(w * speed(spec, mid + half * x) for x, w in zip(nodes, weights))
        return cum[k] + part

    def invert(t: float) -> float:
        target = t * total
        k = int(np.clip(np.searchsorted(cum, target) - 1, 0, n - 1))
        seg = cum[k + 1] - cum[k]
        u = grid[k] + (grid[k + 1] - grid[k]) * (target - cum[k]) / max(seg, 1e-300)
        for _ in range(4):
            u -= (cum_at(u) - target) / speed(spec, u)
            u = min(max(u, 0.0), 1.0)
        return u

    def jet_fn(t: float, order: int) -> np.ndarray:
        u = invert(t)
        g = spec.jet(u, MAX_ORDER)
        vel = np.array([g[1], g[2], g[3]])  # jet of curve' at u, order 2
        w = jets.jsqrt(jets.jdot(vel, vel))  # speed jet (value, w', w'') in u
        phi1 = total / w[0]
        a1 = w[1] * phi1
        phi2 = -total * a1 / w[0] ** 2
        a2 = w[2] * phi1**2 + w[1] * phi2
        phi3 = -total * a2 / w[0] ** 2 + 2.0 * total * a1**2 / w[0] ** 3
        phi = np.array([u, phi1, phi2, phi3])
        return jets.jcompose(g, phi)[: order + 1]

    return CurveSpec(spec.space, jet_fn, name=f"constspeed({spec.name})")
