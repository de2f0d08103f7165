"""Splitting locally convex S3 curves into left/right S2 parts and
composing compatible pairs back.

The frame path of a locally convex curve on S3 lifts to a pair of unit
quaternion paths (zl, zr).  Writing the tridiagonal log-derivative as a
commutator-style action L x = wl x - x wr of two imaginary quaternions
fixes the factor velocities; the left and right curves are the first
columns of the 3x3 rotations of the factors.  A pair determines the
original curve through the inverse relations between (speed, kappa,
tau) and the pair's common speed and curvatures:

    speed = c (kl - kr) / 2,  kappa = 2 / (kl - kr),  tau = (kl + kr) / (kl - kr)

with the coupling condition: equal speeds and kl > |kr|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import CurveSpec, SampledCurve, from_samples
from .errors import ConditionLError, ConvexityError
from .frenet import (
    FrameCurve,
    curvature_s2,
    frame_curve,
    integrate_jacobian,
    lambda_matrix,
    local_convexity_check,
)
from .quatspin import ONE, left_matrix, lift_path_spin4, project_spin3, right_matrix

SPEED_MISMATCH_TOL = 1e-6
MARGIN_TOL = 1e-9


@dataclass(frozen=True)
class PairCurve:
    """A locally convex left curve and an immersed right curve on S2 with
    a shared parameter grid.

    When produced by `decompose`, `lift_end_left`/`lift_end_right` hold
    the final factor quaternions of the source curve's lifted frame.
    """

    left: CurveSpec
    right: CurveSpec
    ts: np.ndarray
    lift_end_left: np.ndarray | None = None
    lift_end_right: np.ndarray | None = None


@dataclass(frozen=True)
class ConditionLReport:
    """Grid margins for the pair coupling condition."""

    speed_mismatch: float
    curvature_margin: float

    @property
    def passed(self) -> bool:
        return (
            self.speed_mismatch <= SPEED_MISMATCH_TOL
            and self.curvature_margin > MARGIN_TOL
        )


def split_log_derivative(s: float, kappa: float, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """Imaginary quaternions (wl, wr) with L x = wl x - x wr for the
    tridiagonal log-derivative of subdiagonal (s, s*kappa, s*tau).

    Closed form: wl = (s(1+tau)/2) i + (s*kappa/2) k and
    wr = (s(tau-1)/2) i + (s*kappa/2) k.
    """
    if s <= 0:
        raise ValueError(f"speed must be positive, got {s}")
    wl = np.array([0.0, 0.5 * s * (1.0 + tau), 0.0, 0.5 * s * kappa])
    wr = np.array([0.0, 0.5 * s * (tau - 1.0), 0.0, 0.5 * s * kappa])
    return wl, wr


def split_action_matrix(wl: np.ndarray, wr: np.ndarray) -> np.ndarray:
    """The 4x4 matrix of x -> wl x - x wr (reconstruction check)."""
    return left_matrix(wl) - right_matrix(wr)


def decompose(gamma: CurveSpec, n: int = 512) -> PairCurve:
    """Split a locally convex S3 curve into its left/right S2 parts.

    Computes frames on the grid, lifts them to quaternion pairs starting
    at (1, 1), and reads the parts off the first columns of the factor
    rotations.  The output satisfies the coupling condition.
    """
    if gamma.dim != 4:
        raise ValueError("decompose expects a curve on S3")
    ok, min_det = local_convexity_check(gamma, n)
    if not ok:
        raise ConvexityError(f"curve is not locally convex (min det {min_det:.3e})")
    fc = frame_curve(gamma, n)
    zl, zr = lift_path_spin4(fc.frames, ONE, ONE)
    left_pts = np.array([project_spin3(z)[:, 0] for z in zl])
    right_pts = np.array([project_spin3(z)[:, 0] for z in zr])
    left = from_samples(SampledCurve(fc.ts, left_pts), "S2")
    right = from_samples(SampledCurve(fc.ts, right_pts), "S2")
    return PairCurve(left, right, fc.ts, zl[-1], zr[-1])


def _pair_profiles(pair: PairCurve, ts: np.ndarray):
    """Speeds and curvatures of both parts on the given parameter values."""
    cl = np.empty(len(ts))
    cr = np.empty(len(ts))
    kl = np.empty(len(ts))
    kr = np.empty(len(ts))
    for i, t in enumerate(ts):
        cl[i] = np.linalg.norm(pair.left.jet(t, 1)[1])
        cr[i] = np.linalg.norm(pair.right.jet(t, 1)[1])
        kl[i] = curvature_s2(pair.left, t)
        kr[i] = curvature_s2(pair.right, t)
    return cl, cr, kl, kr


def condition_L_report(pair: PairCurve, n: int = 512) -> ConditionLReport:
    """Grid minima for the coupling condition: max speed mismatch and
    min of (left curvature - |right curvature|)."""
    ts = np.linspace(0.0, 1.0, n + 1)
    cl, cr, kl, kr = _pair_profiles(pair, ts)
    return ConditionLReport(
        speed_mismatch=float(np.max(np.abs(cl - cr))),
        curvature_margin=float(np.min(kl - np.abs(kr))),
    )


def compose(pair: PairCurve, steps: int = 1024) -> tuple[CurveSpec, FrameCurve]:
    """Build the S3 curve whose left/right parts are the given pair.

    The pair's speeds and curvatures define the speed/curvature/torsion
    profile of the target curve; its frame path is integrated from the
    tridiagonal log-derivative.  Raises ConditionLError (reporting the
    first offending sample) if the coupling condition fails.
    """
    ts = np.linspace(0.0, 1.0, 2 * steps + 1)
    cl, cr, kl, kr = _pair_profiles(pair, ts)
    scale = max(1.0, float(np.max(cl)))
    mism = np.abs(cl - cr)
    bad = np.nonzero(mism > SPEED_MISMATCH_TOL * scale)[0]
    if len(bad):
        i = bad[0]
        raise ConditionLError(
            f"speed mismatch {mism[i]:.3e} at t = {ts[i]:.6f} exceeds tolerance"
        )
    margin = kl - np.abs(kr)
    bad = np.nonzero(margin <= MARGIN_TOL)[0]
    if len(bad):
        i = bad[0]
        raise ConditionLError(
            f"curvature margin {margin[i]:.3e} at t = {ts[i]:.6f} is not positive"
        )
    c = 0.5 * (cl + cr)
    diff = kl - kr
    s = c * diff / 2.0
    kappa = 2.0 / diff
    tau = (kl + kr) / diff
    sub = np.column_stack([s, s * kappa, s * tau])

    def lam(t: float) -> np.ndarray:
        i = int(round(t * 2 * steps))
        return lambda_matrix(sub[i])

    fc, curve = integrate_jacobian(lam, steps, dim=4)
    return curve, fc
