"""Quaternion algebra and the spin double covers of SO(3) and SO(4).

Conventions:
- scalar-first coefficients (a, b, c, d) for a + b*i + c*j + d*k
- Hamilton products: ij = k, jk = i, ki = j
- SO(3) acts on imaginary quaternions (basis i, j, k), identified with R^3
- SO(4) acts on all of H (basis 1, i, j, k), identified with R^4
- the covers: spin3_matrix(z) h = z h z~,  spin4_matrix(zl, zr) q = zl q zr~
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoverError, DensityError

ONE = np.array([1.0, 0.0, 0.0, 0.0])
QI = np.array([0.0, 1.0, 0.0, 0.0])
QJ = np.array([0.0, 0.0, 1.0, 0.0])
QK = np.array([0.0, 0.0, 0.0, 1.0])

_UNIT_TOL = 1e-12
_ROTATION_TOL = 1e-9


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product of two quaternions."""
    a0, av = a[0], a[1:]
    b0, bv = b[0], b[1:]
    s = a0 * b0 - av @ bv
    v = a0 * bv + b0 * av + np.cross(av, bv)
    return np.concatenate(([s], v))


def quat_conj(q: np.ndarray) -> np.ndarray:
    return np.concatenate(([q[0]], -q[1:]))


def quat_exp(w: np.ndarray) -> np.ndarray:
    """Exponential of an imaginary quaternion: cos|w| + sin|w| w/|w|."""
    if abs(w[0]) > _UNIT_TOL:
        raise ValueError("quat_exp expects a zero real part")
    theta = float(np.linalg.norm(w[1:]))
    if theta == 0.0:
        return ONE.copy()
    return np.concatenate(([np.cos(theta)], np.sin(theta) * w[1:] / theta))


def left_matrix(p: np.ndarray) -> np.ndarray:
    """4x4 matrix of x -> p * x on coefficients (1, i, j, k)."""
    basis = np.eye(4)
    return np.column_stack([quat_mul(p, e) for e in basis])


def right_matrix(p: np.ndarray) -> np.ndarray:
    """4x4 matrix of x -> x * p."""
    basis = np.eye(4)
    return np.column_stack([quat_mul(e, p) for e in basis])


@dataclass(frozen=True)
class UnitQuaternion:
    """A point of the 3-sphere of unit quaternions.

    Norm is checked at construction (tolerance 1e-12).
    """

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.shape != (4,):
            raise ValueError("quaternion must have 4 coefficients")
        if abs(np.linalg.norm(q) - 1.0) > _UNIT_TOL:
            raise ValueError("quaternion is not unit-norm within 1e-12")
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class SpinPair:
    """A pair of unit quaternions: a point of the double cover of SO(4)."""

    zl: UnitQuaternion
    zr: UnitQuaternion

    @classmethod
    def from_arrays(cls, zl: np.ndarray, zr: np.ndarray) -> "SpinPair":
        return cls(UnitQuaternion(zl), UnitQuaternion(zr))


def check_rotation(m: np.ndarray, tol: float = _ROTATION_TOL) -> np.ndarray:
    """Validate that `m` is special-orthogonal; raises CoverError if not."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if m.shape != (n, n) or n not in (3, 4):
        raise CoverError(f"expected a 3x3 or 4x4 matrix, got shape {m.shape}")
    if np.max(np.abs(m.T @ m - np.eye(n))) > tol:
        raise CoverError("matrix is not orthogonal within tolerance")
    if abs(np.linalg.det(m) - 1.0) > tol:
        raise CoverError("matrix determinant is not +1 within tolerance")
    return m


def project_spin3(z: np.ndarray) -> np.ndarray:
    """3x3 rotation of h -> z h z~ restricted to imaginary quaternions."""
    cols = []
    zc = quat_conj(z)
    for e in (QI, QJ, QK):
        cols.append(quat_mul(quat_mul(z, e), zc)[1:])
    return np.column_stack(cols)


def project_spin4(zl: np.ndarray, zr: np.ndarray) -> np.ndarray:
    """4x4 rotation of q -> zl q zr~ on the basis (1, i, j, k)."""
    zrc = quat_conj(zr)
    cols = [quat_mul(quat_mul(zl, e), zrc) for e in np.eye(4)]
    return np.column_stack(cols)


def quat_from_rotation3(r: np.ndarray) -> np.ndarray:
    """Unit quaternion with project_spin3(q) == r (sign chosen by the
    largest-magnitude component)."""
    t = np.trace(r)
    candidates = [t, r[0, 0], r[1, 1], r[2, 2]]
    case = int(np.argmax(candidates))
    if case == 0:
        s = np.sqrt(t + 1.0) * 2.0
        q = np.array(
            [0.25 * s, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s]
        )
    elif case == 1:
        s = np.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2.0
        q = np.array(
            [(r[2, 1] - r[1, 2]) / s, 0.25 * s, (r[0, 1] + r[1, 0]) / s, (r[0, 2] + r[2, 0]) / s]
        )
    elif case == 2:
        s = np.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2]) * 2.0
        q = np.array(
            [(r[0, 2] - r[2, 0]) / s, (r[0, 1] + r[1, 0]) / s, 0.25 * s, (r[1, 2] + r[2, 1]) / s]
        )
    else:
        s = np.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1]) * 2.0
        q = np.array(
            [(r[1, 0] - r[0, 1]) / s, (r[0, 2] + r[2, 0]) / s, (r[1, 2] + r[2, 1]) / s, 0.25 * s]
        )
    return q / np.linalg.norm(q)


def pair_from_rotation4(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor a special-orthogonal 4x4 matrix as q -> zl q zr~.

    Builds the homogeneous system R(e) zl - L(m e) zr = 0 over the four
    basis quaternions and takes its one-dimensional null space; the
    smallest singular vector gives the pair up to a common sign.  The
    stacked-system pivot (largest singular gap) keeps the extraction
    stable near +-identity.
    """
    rows = []
    for e in np.eye(4):
        block = np.zeros((4, 8))
        block[:, :4] = right_matrix(e)
        block[:, 4:] = -left_matrix(m @ e)
        rows.append(block)
    a = np.vstack(rows)
    _, _, vh = np.linalg.svd(a)
    v = vh[-1]
    zl, zr = v[:4], v[4:]
    nl, nr = np.linalg.norm(zl), np.linalg.norm(zr)
    if nl < 1e-8 or nr < 1e-8:
        raise CoverError("spin pair extraction failed: degenerate null vector")
    return zl / nl, zr / nr


def rotation_angle(r: np.ndarray) -> float:
    """Largest rotation angle of a special-orthogonal matrix (3x3 or 4x4)."""
    n = r.shape[0]
    if n == 3:
        c = (np.trace(r) - 1.0) / 2.0
        return float(np.arccos(np.clip(c, -1.0, 1.0)))
    ev = np.linalg.eigvals(r)
    return float(np.max(np.abs(np.angle(ev))))


def _check_density(frames: np.ndarray, max_angle: float) -> None:
    for i in range(len(frames) - 1):
        ang = rotation_angle(frames[i].T @ frames[i + 1])
        if ang >= max_angle:
            raise DensityError(
                f"consecutive frames {i},{i + 1} differ by angle {ang:.4f} >= {max_angle:.4f}"
            )


def lift_path_spin3(frames: np.ndarray, base: np.ndarray) -> np.ndarray:
    """Continuously lift a discrete SO(3) frame path to unit quaternions.

    Args:
        frames: array (N, 3, 3) of special-orthogonal matrices, consecutive
            rotation angle < pi/2.
        base: unit quaternion with project_spin3(base) equal to frames[0]
            within 1e-6.

    Returns:
        Array (N, 4) with z[0] = base, project_spin3(z[i]) = frames[i], and
        consecutive quaternion distance < 1.
    """
    frames = np.asarray(frames, dtype=float)
    for f in frames:
        check_rotation(f)
    _check_density(frames, np.pi / 2)
    base = np.asarray(base, dtype=float)
    if np.max(np.abs(project_spin3(base) - frames[0])) > 1e-6:
        raise CoverError("base quaternion does not project onto the first frame")
    out = np.empty((len(frames), 4))
    out[0] = base
    prev = base
    for i in range(1, len(frames)):
        q = quat_from_rotation3(frames[i])
        if prev @ q < 0:
            q = -q
        out[i] = q
        prev = q
    return out


def lift_path_spin4(
    frames: np.ndarray, base_l: np.ndarray, base_r: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Continuously lift a discrete SO(4) frame path to quaternion pairs.

    Same contract as lift_path_spin3, with per-frame pair extraction via
    pair_from_rotation4 and the sign of the whole pair chosen for
    continuity (the cover kernel is +-(1, 1)).
    """
    frames = np.asarray(frames, dtype=float)
    for f in frames:
        check_rotation(f)
    _check_density(frames, np.pi / 2)
    base_l = np.asarray(base_l, dtype=float)
    base_r = np.asarray(base_r, dtype=float)
    if np.max(np.abs(project_spin4(base_l, base_r) - frames[0])) > 1e-6:
        raise CoverError("base pair does not project onto the first frame")
    out_l = np.empty((len(frames), 4))
    out_r = np.empty((len(frames), 4))
    out_l[0], out_r[0] = base_l, base_r
    prev = np.concatenate([base_l, base_r])
    for i in range(1, len(frames)):
        zl, zr = pair_from_rotation4(frames[i])
        cur = np.concatenate([zl, zr])
        if prev @ cur < 0:
            cur = -cur
        out_l[i], out_r[i] = cur[:4], cur[4:]
        prev = cur
    return out_l, out_r
