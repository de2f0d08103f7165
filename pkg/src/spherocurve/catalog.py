"""Built-in curve families with closed forms and analytic derivatives.

Two families are provided, addressable from the CLI and curve JSON:

- ``sigma``: the circle of length c on S2 (0 < c <= 2*pi) whose frame at
  t = 0 is the identity; c = 2*pi gives the meridian great circle.
- ``gamma1``: a constant-profile locally convex family on S3 built from
  two harmonics; its log-derivative matrix is constant.

Both start at e1 with identity frame, which makes them the anchor
fixtures for every other module.
"""

from __future__ import annotations

import numpy as np

from .curves import CurveSpec
from .errors import RangeError

_HALF_SHIFT = np.pi / 2.0


def circle_sigma(c: float) -> CurveSpec:
    """Circle of length c on S2, unit frame at t = 0.

    The radius angle rho solves c = 2*pi*sin(rho); geodesic curvature is
    cot(rho), zero for the meridian c = 2*pi.
    """
    if not 0.0 < c <= 2.0 * np.pi:
        raise RangeError(f"circle length must lie in (0, 2*pi], got {c}")
    rho = float(np.arcsin(c / (2.0 * np.pi)))
    base = np.cos(rho) * np.array([np.cos(rho), 0.0, np.sin(rho)])
    amp = np.array([np.sin(rho), 1.0, -np.cos(rho)])  # scaled by sin(rho)
    two_pi = 2.0 * np.pi

    def jet_fn(t: float, order: int) -> np.ndarray:
        theta = two_pi * t
        out = np.empty((order + 1, 3))
        for k in range(order + 1):
            ph = theta + k * _HALF_SHIFT
            osc = np.array([amp[0] * np.cos(ph), np.sin(ph), amp[2] * np.cos(ph)])
            out[k] = np.sin(rho) * two_pi**k * osc
        out[0] += base
        return out

    return CurveSpec("S2", jet_fn, name=f"sigma(c={c:g})")


def iterate(spec: CurveSpec, m: float) -> CurveSpec:
    """The curve traversed m times: t -> spec(m*t).

    Requires a generator defined beyond [0, 1] (true for the catalog
    closed forms).  Speeds multiply by m; half-integer m is allowed for
    the meridian, closedness is only guaranteed for full loops.
    """
    if m <= 0:
        raise RangeError(f"iteration count must be positive, got {m}")
    if m == 1:
        return spec

    def jet_fn(t: float, order: int) -> np.ndarray:
        g = spec.jet_fn(m * t, order)
        scale = m ** np.arange(order + 1)
        return np.asarray(g) * scale[:, None]

    return CurveSpec(spec.space, jet_fn, name=f"{spec.name}^m{m:g}")


def gamma1(m: float) -> CurveSpec:
    """Constant-profile locally convex curve on S3 (m loops).

    Superposition of harmonics at 3*pi*m/2 and pi*m/2; constant speed
    m*pi*sqrt(3)/2, geodesic curvature 2/sqrt(3) and torsion 1.  For
    m = 1 mod 4 the lifted end frame is (-1, k); for m = 2 mod 4 it is
    (1, -1).
    """
    if m < 1:
        raise RangeError(f"m must be >= 1, got {m}")
    w1 = 1.5 * np.pi * m
    w2 = 0.5 * np.pi * m
    s3 = np.sqrt(3.0)
    c1 = np.array([[0.25, 0.0], [0.0, s3 / 4.0], [-s3 / 4.0, 0.0], [0.0, -0.25]])
    c2 = np.array([[0.75, 0.0], [0.0, s3 / 4.0], [s3 / 4.0, 0.0], [0.0, 0.75]])

    def jet_fn(t: float, order: int) -> np.ndarray:
        out = np.empty((order + 1, 4))
        for k in range(order + 1):
            p1 = w1 * t + k * _HALF_SHIFT
            p2 = w2 * t + k * _HALF_SHIFT
            u1 = np.array([np.cos(p1), np.sin(p1)])
            u2 = np.array([np.cos(p2), np.sin(p2)])
            out[k] = w1**k * (c1 @ u1) + w2**k * (c2 @ u2)
        return out

    return CurveSpec("S3", jet_fn, name=f"gamma1(m={m:g})")


def gamma1_log_derivative(m: float) -> np.ndarray:
    """The constant log-derivative matrix of gamma1(m)."""
    if m < 1:
        raise RangeError(f"m must be >= 1, got {m}")
    s3 = np.sqrt(3.0)
    lam = np.array(
        [
            [0.0, -m * s3, 0.0, 0.0],
            [m * s3, 0.0, -2.0 * m, 0.0],
            [0.0, 2.0 * m, 0.0, -m * s3],
            [0.0, 0.0, m * s3, 0.0],
        ]
    )
    return (np.pi / 2.0) * lam
