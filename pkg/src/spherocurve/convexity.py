"""Global-convexity analysis: hyperplane intersection counting,
non-convexity witness search, signed-permutation cell identification and
the top-cell triangular monitor.

Hyperplanes are linear (through the origin), encoded by a unit normal.
A curve on S3 is convex when every hyperplane meets it in at most 3
interior points counted with multiplicity; a hyperplane with 4 or more
transversal interior hits is therefore a non-convexity witness.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .curves import CurveSpec, central_projection
from .errors import CellError, ChartError, ResolutionError
from .frenet import FrameCurve

# antidiagonal signed permutation labelling the top cell
A_TOP = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ]
)

_PIVOT_TOL = 1e-9
_BOUNDARY_TOL = 1e-8


@dataclass(frozen=True)
class Hyperplane:
    """A hyperplane through the origin, stored by its unit normal."""

    normal: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.normal, dtype=float)
        n = np.linalg.norm(v)
        if n < 1e-12:
            raise ValueError("hyperplane normal must be nonzero")
        object.__setattr__(self, "normal", v / n)


@dataclass(frozen=True)
class IntersectionReport:
    """Interior intersection parameters with multiplicities."""

    hits: tuple
    total: int

    @property
    def transversal(self) -> int:
        return sum(1 for _, k in self.hits if k == 1)


@dataclass(frozen=True)
class SignedPermutation:
    """A matrix with one +-1 entry per row and column, determinant +1."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError("signed permutation must be square")
        nz = np.abs(m) > 0.5
        if np.any(nz.sum(axis=0) != 1) or np.any(nz.sum(axis=1) != 1):
            raise ValueError("need exactly one nonzero entry per row/column")
        if abs(np.linalg.det(m) - 1.0) > 1e-9:
            raise ValueError("signed permutation must have determinant +1")
        object.__setattr__(self, "matrix", np.round(m).astype(int))


@dataclass(frozen=True)
class TopCellFactorization:
    """Unit lower-triangular and positive-upper factors at the top cell."""

    lower: np.ndarray
    upper: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return A_TOP @ self.lower @ self.upper


@dataclass(frozen=True)
class MonitorReport:
    """Per-sample top-cell membership and triangular sign-pattern data.

    `status[i]` is "in", "boundary" (within tolerance of a cell wall,
    not classified) or "out" (a leading minor is definitely negative).
    Sign-pattern and monotonicity checks run on the classified samples.
    """

    ts: np.ndarray
    status: tuple
    sign_pattern_ok: bool
    h_values: np.ndarray
    h_increasing: bool
    first_failure: float | None

    @property
    def in_top_cell(self) -> np.ndarray:
        return np.array([s == "in" for s in self.status])

    @property
    def passed(self) -> bool:
        return (
            not any(s == "out" for s in self.status)
            and self.sign_pattern_ok
            and self.h_increasing
        )


@dataclass(frozen=True)
class WitnessResult:
    """A verified non-convexity witness."""

    hyperplane: Hyperplane
    report: IntersectionReport


def _refine_sign_change(fval, fder, a: float, b: float, fa: float) -> float:
    """Root of f in [a, b] bracketing a sign change: bisection + Newton."""
    lo, hi, flo = a, b, fa
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = fval(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    t = 0.5 * (lo + hi)
    for _ in range(3):
        d = fder(t)
        if d != 0.0:
            t2 = t - fval(t) / d
            if a <= t2 <= b:
                t = t2
    return t


def count_intersections(
    curve: CurveSpec, h: Hyperplane, tol: float = 1e-8, n: int = 2048
) -> IntersectionReport:
    """Interior zeros of f(t) = normal . curve(t), with multiplicities.

    Sign changes are bisected and Newton-polished; interior minima of |f|
    below tolerance are refined through f' to catch even-order contacts.
    Multiplicity is the first derivative order whose speed-scaled value
    exceeds tolerance.  Raises ResolutionError when the curve lies in the
    hyperplane or two roots cannot be separated on the grid.
    """
    nv = h.normal

    def fval(t: float) -> float:
        return float(nv @ curve.point(t))

    def fder(t: float) -> float:
        return float(nv @ curve.jet(t, 1)[1])

    ts = np.linspace(0.0, 1.0, n + 1)
    fs = np.array([fval(t) for t in ts])
    speeds = np.array(
        [np.linalg.norm(curve.jet(t, 1)[1]) for t in ts[:: max(1, n // 64)]]
    )
    smax = float(np.max(speeds))
    band = tol * max(smax, 1.0)
    if np.max(np.abs(fs)) < 10.0 * band:
        raise ResolutionError("curve lies in the hyperplane within tolerance (degenerate)")

    roots: list[float] = []
    for i in range(n):
        if fs[i] * fs[i + 1] < 0.0:
            roots.append(_refine_sign_change(fval, fder, ts[i], ts[i + 1], fs[i]))
    # tangential contacts: local minima of |f| below the band
    absf = np.abs(fs)
    for i in range(1, n):
        if absf[i] < band and absf[i] <= absf[i - 1] and absf[i] <= absf[i + 1]:
            if any(abs(ts[i] - r) < 2.0 / n for r in roots):
                continue
            da, db = fder(ts[i - 1]), fder(ts[i + 1])
            if da * db < 0:
                t = _refine_sign_change(
                    fder,
                    lambda u: float(nv @ curve.jet(u, 2)[2]),
                    ts[i - 1],
                    ts[i + 1],
                    da,
                )
            else:
                t = ts[i]
            if abs(fval(t)) < band:
                roots.append(t)

    roots = sorted(r for r in roots if 1e-9 < r < 1.0 - 1e-9)
    merged: list[float] = []
    for r in roots:
        if merged and abs(r - merged[-1]) < 0.25 / n:
            raise ResolutionError(
                f"roots at t = {merged[-1]:.6f} and {r:.6f} are closer than the grid resolves"
            )
        merged.append(r)

    hits = []
    for r in merged:
        g = curve.jet(r, 3)
        s = max(float(np.linalg.norm(g[1])), 1e-300)
        mult = None
        for k in range(1, 4):
            if abs(float(nv @ g[k])) / s**k > max(100.0 * tol, 1e-6):
                mult = k
                break
        if mult is None:
            raise ResolutionError(f"cannot classify multiplicity at t = {r:.6f}")
        hits.append((r, mult))
    total = sum(k for _, k in hits)
    return IntersectionReport(tuple(hits), total)


def _tuple_candidates(points: np.ndarray, idx: np.ndarray):
    """Least-squares normals for point 4-tuples, with degeneracy data.

    Returns (residual sigma4/sigma1, gap sigma3/sigma1, last and
    second-to-last right singular vectors).
    """
    mats = points[idx]  # (m, 4, 4)
    _, svals, vh = np.linalg.svd(mats)
    s1 = np.maximum(svals[:, 0], 1e-300)
    res = svals[:, 3] / s1
    gap = svals[:, 2] / s1
    return res, gap, vh[:, 3, :], vh[:, 2, :]


def find_nonconvexity_witness(
    curve: CurveSpec,
    budget: int = 20000,
    seed: int = 0,
    n_grid: int = 2048,
    threads: int = 1,
) -> WitnessResult | None:
    """Budgeted coarse-to-fine search for a hyperplane with >= 4 interior
    transversal intersections.

    Candidate hyperplanes come from 4-tuples of grid points that are
    nearly coplanar with the origin (small last singular value).  Among
    those, well-spread tuples are tried first (largest minimum spacing of
    the parameters, endpoint margins included): they witness global
    structure rather than local near-tangencies and their hits are the
    best separated.  Tuples of rank <= 1 are skipped; rank-2 tuples admit
    a whole plane of normals, so a few fixed combinations are tried.
    Every candidate is verified by count_intersections before being
    returned, so a reported witness is sound; absence of a witness
    proves nothing.
    """
    rng = np.random.default_rng(seed)
    probe_ts = np.linspace(0.0, 1.0, 257)
    probe_pts = np.array([curve.point(t) for t in probe_ts])
    n_search = min(512, n_grid)

    def quick_screen(nv: np.ndarray) -> bool:
        inner = (probe_pts @ nv)[1:-1]
        return int(np.sum(inner[:-1] * inner[1:] < 0)) >= 4

    def verify(nv: np.ndarray, n: int) -> WitnessResult | None:
        try:
            rep = count_intersections(curve, Hyperplane(nv), n=n)
        except ResolutionError:
            return None
        if rep.transversal >= 4:
            return WitnessResult(Hyperplane(nv), rep)
        return None

    examined = 0
    for stage_n in (20, 40, 80):
        ts = np.arange(1, stage_n) / stage_n  # interior parameters only
        pts = np.array([curve.point(t) for t in ts])
        all_tuples = np.array(list(combinations(range(len(ts)), 4)))
        remaining = budget - examined
        if remaining <= 0:
            break
        if len(all_tuples) > remaining:
            pick = rng.choice(len(all_tuples), size=remaining, replace=False)
            all_tuples = all_tuples[np.sort(pick)]
        examined += len(all_tuples)
        res, gap, v4, v3 = _tuple_candidates(pts, all_tuples)
        tup_ts = ts[all_tuples]
        bounded = np.column_stack(
            [tup_ts[:, 0], np.diff(tup_ts, axis=1), 1.0 - tup_ts[:, -1]]
        )
        spread = bounded.min(axis=1)
        order = np.lexsort((res, -spread))
        candidates: list[np.ndarray] = []
        seen: set[tuple] = set()

        def push(nv: np.ndarray) -> None:
            key = tuple(np.round(nv * np.sign(nv[np.argmax(np.abs(nv))]), 4))
            if key not in seen:
                seen.add(key)
                candidates.append(nv)

        for j in order:
            if res[j] > 1e-3:
                continue
            if gap[j] < 1e-9:
                sig = np.linalg.svd(pts[all_tuples[j]], compute_uv=False)
                if sig[1] / max(sig[0], 1e-300) < 1e-9:
                    continue  # rank <= 1: no usable normal direction
                mix = 0.6 * v4[j] + 0.8 * v3[j]
                push(mix / np.linalg.norm(mix))
                push(v4[j])
                push(v3[j])
            else:
                push(v4[j])
            if len(candidates) >= 240:
                break
        screened = [nv for nv in candidates if quick_screen(nv)]
        if threads > 1 and len(screened) > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                results = ex.map(lambda nv: verify(nv, n_search), screened)
        else:
            results = (verify(nv, n_search) for nv in screened)
        for wr in results:
            if wr is None:
                continue
            final = verify(wr.hyperplane.normal, n_grid)
            return final if final is not None else wr
    return None


def probe_hyperplanes(curve: CurveSpec, count: int, seed: int = 0, n: int = 2048) -> int:
    """Max total multiplicity over `count` random hyperplanes."""
    rng = np.random.default_rng(seed)
    worst = 0
    for _ in range(count):
        nv = rng.normal(size=curve.dim)
        try:
            rep = count_intersections(curve, Hyperplane(nv), n=n)
        except ResolutionError:
            continue
        worst = max(worst, rep.total)
    return worst


def _interior_restriction(curve: CurveSpec, pad: float = 1e-3) -> CurveSpec:
    """Reparametrize onto [pad, 1-pad] (keeps chart curves off their poles)."""
    a, b = pad, 1.0 - pad
    scale = b - a

    def jet_fn(t: float, order: int) -> np.ndarray:
        g = curve.jet_fn(a + scale * t, order)
        mul = scale ** np.arange(order + 1)
        return np.asarray(g) * mul[:, None]

    return CurveSpec(curve.space, jet_fn, name=f"interior({curve.name})")


def moment_curve_convexity_proof(
    curve: CurveSpec,
    n: int = 512,
    probe_budget: int = 4000,
    seed: int = 0,
) -> bool:
    """Certify convexity through a positive coordinate chart.

    Finds a signed coordinate that is strictly positive on the open
    parameter range and rescales the curve to make it constant (a
    positive-factor change, which preserves convexity).  The chart curve
    must be locally convex on the grid and a budgeted hyperplane search
    must find no 4-hit witness.  Raises ChartError when no coordinate
    keeps a sign.
    """
    from . import jets as _jets

    ts = np.linspace(0.0, 1.0, n + 1)[1:-1]
    pts = np.array([curve.point(t) for t in ts])
    chart = None
    for j in range(curve.dim):
        col = pts[:, j]
        if np.all(col > 1e-9):
            chart = (j, 1.0)
            break
        if np.all(col < -1e-9):
            chart = (j, -1.0)
            break
    if chart is None:
        raise ChartError("no signed coordinate stays positive on the open range")
    j, sign = chart

    def jet_fn(t: float, order: int) -> np.ndarray:
        g = curve.jet(t, order)
        return _jets.jdiv(g, sign * g[:, j])

    space = "R4" if curve.dim == 4 else "R3"
    chart_curve = _interior_restriction(CurveSpec(space, jet_fn, name="chart"))

    d = curve.dim
    for t in np.linspace(0.0, 1.0, n + 1):
        det = np.linalg.det(chart_curve.jet(t, d - 1).T)
        if det <= 0:
            return False

    witness = find_nonconvexity_witness(chart_curve, budget=probe_budget, seed=seed)
    return witness is None


def bruhat_cell_of(q: np.ndarray) -> SignedPermutation:
    """Signed permutation labelling the double upper-triangular orbit of q.

    Pivots are chosen bottom-most per column (the rank function of the
    southwest corners); elimination adds pivot rows upward and pivot
    columns rightward, both legal moves of the two-sided action.  Works
    for any invertible matrix; on special-orthogonal input the result is
    the cell label.
    """
    m = np.array(q, dtype=float)
    d = m.shape[0]
    p = np.zeros((d, d))
    used = np.zeros(d, dtype=bool)
    for j in range(d):
        col = np.where(used, 0.0, np.abs(m[:, j]))
        if np.max(col) < _PIVOT_TOL:
            raise ValueError("matrix is singular; no cell label")
        i = int(np.max(np.nonzero(col > _PIVOT_TOL * np.max(col))[0]))
        piv = m[i, j]
        p[i, j] = 1.0 if piv > 0 else -1.0
        used[i] = True
        for r in range(i):
            m[r, :] -= (m[r, j] / piv) * m[i, :]
        for c in range(j + 1, d):
            m[:, c] -= (m[i, c] / piv) * m[:, j]
    return SignedPermutation(p)


def southwest_ranks(m: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """rank of the submatrix (rows >= i, cols <= j) for all (i, j)."""
    d = m.shape[0]
    out = np.zeros((d, d), dtype=int)
    for i in range(d):
        for j in range(d):
            s = np.linalg.svd(m[i:, : j + 1], compute_uv=False)
            out[i, j] = int(np.sum(s > tol * max(s[0], 1.0)))
    return out


def top_cell_factorize(q: np.ndarray, tol: float = _BOUNDARY_TOL) -> TopCellFactorization:
    """Unique factorization q = A_TOP @ L @ U with L unit lower triangular
    and U upper triangular with positive diagonal.

    Exists exactly when q lies in the top cell; raises CellError when a
    leading principal pivot drops below tolerance or goes negative.
    """
    b = A_TOP.T @ np.asarray(q, dtype=float)
    d = b.shape[0]
    lower = np.eye(d)
    work = b.copy()
    for k in range(d):
        piv = work[k, k]
        if piv <= tol:
            raise CellError(f"leading pivot {k + 1} is {piv:.3e}; not in the top cell")
        for i in range(k + 1, d):
            f = work[i, k] / piv
            lower[i, k] = f
            work[i, k:] -= f * work[k, k:]
    upper = np.triu(work)
    if np.max(np.abs(A_TOP @ lower @ upper - q)) > 1e-9 * max(1.0, float(np.max(np.abs(q)))):
        raise CellError("factorization residual too large")
    return TopCellFactorization(lower, upper)


def convexity_monitor(fc: FrameCurve) -> MonitorReport:
    """Track the top-cell factorization along a frame path.

    For each interior frame the unit-lower factor L(t) is computed; the
    strictly-lower part of L^{-1} L' must have positive subdiagonal and
    vanishing remaining entries, and h(t) = L21(t) + L43(t) must be
    strictly increasing.  L' comes from the frame's log-derivative when
    available (exact), else from 5-point differences on L.  Failures are
    recorded in the report rather than raised.
    """
    from . import jets as _jets

    ts = fc.ts[1:-1]
    frames = fc.frames[1:-1]
    n = len(ts)
    in_cell = np.zeros(n, dtype=bool)
    h_vals = np.full(n, np.nan)
    lowers: list[np.ndarray | None] = [None] * n
    uppers: list[np.ndarray | None] = [None] * n
    first_failure = None
    for i in range(n):
        try:
            fac = top_cell_factorize(frames[i])
        except CellError:
            if first_failure is None:
                first_failure = float(ts[i])
            continue
        in_cell[i] = True
        lowers[i] = fac.lower
        uppers[i] = fac.upper
        h_vals[i] = fac.lower[1, 0] + fac.lower[3, 2]

    sign_ok = bool(np.all(in_cell))
    if sign_ok:
        x_mats = np.empty((n, 4, 4))
        if fc.lambdas is not None:
            lams = fc.lambdas[1:-1]
            for i in range(n):
                fdot = frames[i] @ lams[i]
                m = np.linalg.solve(lowers[i], A_TOP.T @ fdot)
                x_mats[i] = np.tril(np.linalg.solve(uppers[i].T, m.T).T, -1)
        else:
            l_stack = np.array(lowers)
            for i in range(n):
                idx = _jets.window_indices(n, i, min(5, n))
                w = _jets.fd_weights(ts[idx], ts[i], 1)
                ldot = np.tensordot(w, l_stack[idx], axes=(0, 0))
                x_mats[i] = np.tril(np.linalg.solve(lowers[i], ldot), -1)
        for i in range(n):
            x = x_mats[i]
            sub = np.array([x[1, 0], x[2, 1], x[3, 2]])
            off = np.array([x[2, 0], x[3, 0], x[3, 1]])
            scale = max(1.0, float(np.max(np.abs(sub))))
            if np.any(sub <= 0.0) or np.any(np.abs(off) > 1e-6 * scale):
                sign_ok = False
                if first_failure is None:
                    first_failure = float(ts[i])
                break

    finite = h_vals[np.isfinite(h_vals)]
    h_increasing = bool(len(finite) == n and np.all(np.diff(finite) > 0.0))
    return MonitorReport(ts, in_cell, sign_ok, h_vals, h_increasing, first_failure)
