"""Frames from Gram-Schmidt, curvature/torsion, log-derivatives and the
integration of frame paths with tridiagonal log-derivative.

The frame of a curve is the special-orthogonal factor F(t) of the
factorization (curve, curve', ..., curve^(n)) = F(t) R(t) with R upper
triangular, positive diagonal.  When only the first n vectors are
independent, the last frame column is completed to a positive
orthonormal basis and the last diagonal entry of R may take any sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets
from .curves import CurveSpec, SampledCurve, from_samples
from .errors import DegeneracyError, DensityError, ImmersionError, JacobiError
from .quatspin import rotation_angle

_DEP_TOL = 1e-10
_CONVEXITY_TOL = 1e-10


@dataclass(frozen=True)
class FrameCurve:
    """Frames along a grid, with Gram-Schmidt remainders when available.

    `lambdas[i]`, when present, is the log-derivative matrix at ts[i];
    it lets downstream consumers differentiate the frame path exactly.
    """

    ts: np.ndarray
    frames: np.ndarray
    remainders: np.ndarray | None = None
    lambdas: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.frames.shape[1]


@dataclass(frozen=True)
class JacobiProfile:
    """Speed, curvature and (on S3) torsion sampled along a grid."""

    ts: np.ndarray
    speed: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray | None = None


def _gram_schmidt(cols: list[np.ndarray]) -> list[np.ndarray]:
    """Orthonormalize; raises DegeneracyError on a (near-)dependent pivot."""
    out: list[np.ndarray] = []
    for c in cols:
        v = c.astype(float)
        scale = np.linalg.norm(v)
        for u in out:
            v = v - (u @ v) * u
        r = np.linalg.norm(v)
        if r <= _DEP_TOL * max(scale, 1.0):
            raise DegeneracyError("derivative vectors are linearly dependent")
        out.append(v / r)
    return out


def _complete_basis(units: list[np.ndarray]) -> np.ndarray:
    """The unique unit vector completing `units` to a positive basis."""
    m = np.array(units)
    _, _, vh = np.linalg.svd(m)
    w = vh[-1]
    if np.linalg.det(np.column_stack(units + [w])) < 0:
        w = -w
    return w


def frenet_frame(curve: CurveSpec, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Frame and upper-triangular remainder of the derivative matrix at t.

    Full-rank input (positive determinant) goes through QR with positive
    diagonal.  Otherwise the first dim-1 derivative vectors are
    orthonormalized and the last column completed; the remainder is then
    F^T A and its last diagonal entry carries the orientation sign.
    """
    d = curve.dim
    g = curve.jet(t, d - 1)
    a = g.T  # columns curve, curve', ...
    det = np.linalg.det(a)
    scale = np.prod([max(np.linalg.norm(c), 1e-300) for c in g])
    if det > _DEP_TOL * scale:
        q, r = np.linalg.qr(a)
        signs = np.sign(np.diag(r))
        signs[signs == 0] = 1.0
        q = q * signs[None, :]
        r = signs[:, None] * r
        return q, r
    units = _gram_schmidt([g[k] for k in range(d - 1)])
    last = _complete_basis(units)
    f = np.column_stack(units + [last])
    return f, f.T @ a


def frame_curve(curve: CurveSpec, n: int) -> FrameCurve:
    """Frames on a uniform grid of n+1 samples, with log-derivatives.

    The log-derivative at each node is assembled from the sampled speed,
    curvature and torsion, giving an exact tridiagonal matrix for
    locally convex input.
    """
    ts = np.linspace(0.0, 1.0, n + 1)
    d = curve.dim
    frames = np.empty((n + 1, d, d))
    rems = np.empty((n + 1, d, d))
    lams = np.empty((n + 1, d, d))
    for i, t in enumerate(ts):
        f, r = frenet_frame(curve, t)
        frames[i], rems[i] = f, r
        if d == 4:
            kappa, tau = curvature_torsion_s3(curve, t)
            s = float(np.linalg.norm(curve.jet(t, 1)[1]))
            lams[i] = lambda_matrix([s, s * kappa, s * tau])
        else:
            kappa = curvature_s2(curve, t)
            s = float(np.linalg.norm(curve.jet(t, 1)[1]))
            lams[i] = lambda_matrix([s, s * kappa])
    return FrameCurve(ts, frames, rems, lams)


def curvature_s2(curve: CurveSpec, t: float) -> float:
    """Geodesic curvature of an immersed curve on S2."""
    g = curve.jet(t, 2)
    s = np.linalg.norm(g[1])
    if s < 1e-12:
        raise ImmersionError(f"speed vanishes at t = {t:.6f}")
    tangent = g[1] / s
    normal = np.cross(g[0], tangent)
    return float(g[2] @ normal) / s**2


def curvature_torsion_s3(curve: CurveSpec, t: float) -> tuple[float, float]:
    """Geodesic curvature and torsion of a generic curve on S3.

    The curvature comes out positive by construction (Gram-Schmidt
    pivot); the torsion is positive exactly for locally convex curves
    and is reported with its sign otherwise.
    """
    g = curve.jet(t, 3)
    s = np.linalg.norm(g[1])
    if s < 1e-12:
        raise ImmersionError(f"speed vanishes at t = {t:.6f}")
    units = _gram_schmidt([g[0], g[1], g[2]])
    binormal = _complete_basis(units)
    r33 = float(units[2] @ g[2])
    kappa = r33 / s**2
    tau = float(binormal @ g[3]) / (s * r33)
    return kappa, tau


def jacobi_profile(curve: CurveSpec, n: int) -> JacobiProfile:
    """Sampled speed/curvature(/torsion) profile on a uniform grid."""
    ts = np.linspace(0.0, 1.0, n + 1)
    sp = np.empty(n + 1)
    ka = np.empty(n + 1)
    ta = np.empty(n + 1) if curve.dim == 4 else None
    for i, t in enumerate(ts):
        sp[i] = np.linalg.norm(curve.jet(t, 1)[1])
        if curve.dim == 4:
            ka[i], ta[i] = curvature_torsion_s3(curve, t)
        else:
            ka[i] = curvature_s2(curve, t)
    return JacobiProfile(ts, sp, ka, ta)


def local_convexity_check(curve: CurveSpec, n: int = 512) -> tuple[bool, float]:
    """Sign check of det(curve, curve', ..., curve^(n)) over a grid.

    Returns (all positive beyond tolerance, minimum determinant).
    """
    ts = np.linspace(0.0, 1.0, n + 1)
    d = curve.dim
    dets = np.array([np.linalg.det(curve.jet(t, d - 1).T) for t in ts])
    min_det = float(dets.min())
    return bool(min_det > _CONVEXITY_TOL), min_det


def lambda_matrix(subdiag) -> np.ndarray:
    """Tridiagonal skew matrix with the given subdiagonal entries."""
    c = np.asarray(subdiag, dtype=float)
    d = len(c) + 1
    m = np.zeros((d, d))
    for i, v in enumerate(c):
        m[i + 1, i] = v
        m[i, i + 1] = -v
    return m


def log_derivative(fc: FrameCurve) -> np.ndarray:
    """Per-sample log-derivative F^T F' with F' from 5-point stencils.

    The result is skew-symmetrized; requires consecutive frames within
    rotation angle pi/4.
    """
    frames = fc.frames
    ts = fc.ts
    n = len(ts)
    for i in range(n - 1):
        if rotation_angle(frames[i].T @ frames[i + 1]) >= np.pi / 4:
            raise DensityError(f"frame grid too coarse between samples {i} and {i + 1}")
    out = np.empty_like(frames)
    for i in range(n):
        idx = jets.window_indices(n, i, min(5, n))
        w = jets.fd_weights(ts[idx], ts[i], 1)
        fdot = np.tensordot(w, frames[idx], axes=(0, 0))
        lam = frames[i].T @ fdot
        out[i] = 0.5 * (lam - lam.T)
    return out


def _orthonormalize_rows(m: np.ndarray) -> np.ndarray:
    out = m.copy()
    d = m.shape[0]
    for i in range(d):
        for j in range(i):
            out[i] -= (out[j] @ out[i]) * out[j]
        out[i] /= np.linalg.norm(out[i])
    return out


def integrate_jacobian(
    lam: Callable[[float], np.ndarray], steps: int, dim: int = 4
) -> tuple[FrameCurve, CurveSpec]:
    """Solve F' = F * lam(t), F(0) = I by RK4 with re-orthonormalization.

    Every log-derivative evaluation is checked for strictly positive
    subdiagonal entries (JacobiError otherwise).  Returns the frame path
    and the curve traced by the first frame column.
    """

    def lam_at(t: float) -> np.ndarray:
        m = np.asarray(lam(t), dtype=float)
        sub = np.diag(m, -1)
        if np.any(sub <= 0.0):
            raise JacobiError(f"non-positive subdiagonal at t = {t:.6f}: {sub}")
        return m

    h = 1.0 / steps
    ts = np.linspace(0.0, 1.0, steps + 1)
    frames = np.empty((steps + 1, dim, dim))
    lams = np.empty((steps + 1, dim, dim))
    f = np.eye(dim)
    frames[0] = f
    lams[0] = lam_at(0.0)
    for i in range(steps):
        t = ts[i]
        l1 = lam_at(t) if i else lams[0]
        lmid = lam_at(t + 0.5 * h)
        l2 = lam_at(t + h)
        k1 = f @ l1
        k2 = (f + 0.5 * h * k1) @ lmid
        k3 = (f + 0.5 * h * k2) @ lmid
        k4 = (f + h * k3) @ l2
        f = f + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        f = _orthonormalize_rows(f)
        frames[i + 1] = f
        lams[i + 1] = l2
    fc = FrameCurve(ts, frames, None, lams)
    space = "S3" if dim == 4 else "S2"
    curve = from_samples(SampledCurve(ts, frames[:, :, 0]), space)
    return fc, curve
