"""Numerical Birkhoff orthogonality.

``x`` is Birkhoff orthogonal to ``y`` when ``lambda = 0`` minimises the convex
map ``lambda -> ||x + lambda y||``.  The defect ``||x|| - min ||x + lambda y||``
measures how far a pair is from that, and vanishes exactly on orthogonal
pairs.  All heavy routines have a batched form working on ``(n, 2)`` stacks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .normed_plane import Norm, SpherePoint, sphere_point, sphere_points

__all__ = [
    "MinimizeResult",
    "OrthoPair",
    "CompanionArc",
    "DegenerateDirection",
    "NoCompanionFound",
    "minimize_lambda",
    "minimize_lambda_batch",
    "defect",
    "defect_batch",
    "is_orthogonal",
    "ortho_pair",
    "companion_arcs",
    "companion_arcs_batch",
    "companion_table",
    "SCAN_TOL",
    "ADMIT_TOL",
]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
LAMBDA_TOL = 1e-12
MAX_ITER = 200
SCAN_TOL = 1e-9
ADMIT_TOL = 1e-11
PSI_TOL = 1e-10
MAX_SCAN = 4096
_CHUNK = 1 << 16
_ZOOM_ROWS = 128


class DegenerateDirection(ValueError):
    pass


class NoCompanionFound(RuntimeError):
    pass


@dataclass(frozen=True)
class MinimizeResult:
    lambda_star: float
    value: float
    bracket_width: float


@dataclass(frozen=True)
class OrthoPair:
    x: SpherePoint
    y: SpherePoint
    defect: float


@dataclass(frozen=True)
class CompanionArc:
    """Closed interval of companion angles; ``psi_hi`` may exceed pi when the arc wraps."""

    psi_lo: float
    psi_hi: float
    boundary_tolerance: float

    @property
    def length(self) -> float:
        return self.psi_hi - self.psi_lo

    def contains(self, psi: float) -> bool:
        t = (psi - self.psi_lo) % math.pi
        return t <= self.length + self.boundary_tolerance or t >= math.pi - self.boundary_tolerance


def _golden(f, lo: np.ndarray, hi: np.ndarray, tol: float, max_iter: int = MAX_ITER):
    """Vectorised golden-section minimisation of a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(argmin, fmin, width)`` arrays.
    """
    a = lo.astype(float).copy()
    b = hi.astype(float).copy()
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = f(c)
    fd = f(d)
    for _ in range(max_iter):
        if np.all(b - a <= tol):
            break
        left = fc <= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        keep = np.where(left, c, d)
        fkeep = np.where(left, fc, fd)
        new = np.where(left, b - INV_PHI * (b - a), a + INV_PHI * (b - a))
        fnew = f(new)
        c = np.where(left, new, keep)
        fc = np.where(left, fnew, fkeep)
        d = np.where(left, keep, new)
        fd = np.where(left, fkeep, fnew)
    take_c = fc <= fd
    return np.where(take_c, c, d), np.where(take_c, fc, fd), b - a


def minimize_lambda_batch(norm: Norm, X, Y):
    """Minimise ``||x + lambda y||`` over lambda for each row pair.

    The minimiser lies in ``[-2||x||/||y||, 2||x||/||y||]``: outside it
    ``||x + lambda y|| >= |lambda| ||y|| - ||x|| > ||x||``.  Returns arrays
    ``(lambda_star, value, bracket_width)``.
    """
    X = np.asarray(X, dtype=float).reshape(-1, 2)
    Y = np.asarray(Y, dtype=float).reshape(-1, 2)
    nx = norm.evaluate(X)
    ny = norm.evaluate(Y)
    if np.any(ny <= 0):
        raise DegenerateDirection("direction y has zero norm")
    half = 2.0 * nx / ny
    lam, val, width = _golden(lambda t: norm.evaluate(X + t[:, None] * Y), -half, half, LAMBDA_TOL)
    # lambda = 0 is always feasible
    zero_better = nx <= val
    lam = np.where(zero_better, 0.0, lam)
    val = np.minimum(val, nx)
    return lam, val, width


def minimize_lambda(norm: Norm, x, y) -> MinimizeResult:
    lam, val, width = minimize_lambda_batch(norm, np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return MinimizeResult(float(lam[0]), float(val[0]), float(width[0]))


def defect_batch(norm: Norm, X, Y) -> np.ndarray:
    X = np.asarray(X, dtype=float).reshape(-1, 2)
    Y = np.asarray(Y, dtype=float).reshape(-1, 2)
    out = np.empty(len(X))
    for start in range(0, len(X), _CHUNK):
        sl = slice(start, start + _CHUNK)
        _, val, _ = minimize_lambda_batch(norm, X[sl], Y[sl])
        out[sl] = np.maximum(norm.evaluate(X[sl]) - val, 0.0)
    return out


def defect(norm: Norm, x, y) -> float:
    """``||x|| - min_lambda ||x + lambda y||``, zero exactly when x is orthogonal to y."""
    x = np.asarray(x, dtype=float)
    if norm.evaluate(x) <= 0:
        raise DegenerateDirection("x has zero norm")
    return float(defect_batch(norm, x, y)[0])


def is_orthogonal(norm: Norm, x, y, tol: float = SCAN_TOL) -> bool:
    if not tol > 0:
        raise ValueError("tol must be positive")
    return defect(norm, x, y) <= tol


def ortho_pair(norm: Norm, theta: float, psi: float) -> OrthoPair:
    x = sphere_point(norm, theta)
    y = sphere_point(norm, psi)
    return OrthoPair(x, y, defect(norm, x.coords, y.coords))


# -- companion arcs -----------------------------------------------------------


def _defect_at(norm: Norm, X: np.ndarray, psi: np.ndarray) -> np.ndarray:
    return defect_batch(norm, X, sphere_points(norm, psi))


def _zoom(f, lo: np.ndarray, hi: np.ndarray, tol: float, k: int):
    """Grid-zoom minimisation of a unimodal ``f``: ``k + 1`` samples per pass, keep the best cell pair.

    Same contract as ``_golden``; ``f`` receives a flattened ``(rows * (k+1),)`` array.
    """
    a = lo.astype(float).copy()
    b = hi.astype(float).copy()
    n = len(a)
    u = np.linspace(0.0, 1.0, k + 1)
    rows = np.arange(n)
    while True:
        pts = a[:, None] + (b - a)[:, None] * u
        vals = f(pts.ravel()).reshape(n, k + 1)
        i = np.argmin(vals, axis=1)
        best, fbest = pts[rows, i], vals[rows, i]
        if np.all(b - a <= tol):
            return best, fbest, b - a
        a, b = pts[rows, np.maximum(i - 1, 0)], pts[rows, np.minimum(i + 1, k)]


def _bisect_boundary(norm: Norm, X: np.ndarray, inside: np.ndarray, outside: np.ndarray, tol: float):
    """Shrink ``[inside, outside]`` until the width is below ``PSI_TOL``; ``inside`` stays admitted."""
    inside = inside.copy()
    outside = outside.copy()
    while np.any(np.abs(outside - inside) > PSI_TOL):
        mid = 0.5 * (inside + outside)
        ok, _ = _scan_classify(norm, X, sphere_points(norm, mid), tol)
        inside = np.where(ok, mid, inside)
        outside = np.where(ok, outside, mid)
    return inside, np.abs(outside - inside)


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal circular runs of True as ``(start, end)`` with ``end`` possibly >= len."""
    m = len(mask)
    if mask.all():
        return [(0, m - 1)]
    starts = np.flatnonzero(mask & ~np.roll(mask, 1))
    ends = np.flatnonzero(mask & ~np.roll(mask, -1))
    out = []
    for s in starts:
        later = ends[ends >= s]
        e = int(later[0]) if len(later) else int(ends[0]) + m
        out.append((int(s), e))
    return out


def _scan_classify(norm: Norm, X: np.ndarray, Y: np.ndarray, tol: float):
    """Decide ``defect <= tol`` for each row pair, stopping each search early.

    A search stops as soon as some ``lambda`` gives ``||x + lambda y|| <
    ||x|| - tol``; by convexity every minimiser then lies on the same side of
    zero as that ``lambda``, which is recorded in ``side``.  Returns
    ``(inside, side)`` with ``side`` in {-1, 0, +1} (0 for admitted pairs).
    """
    n = len(X)
    inside = np.zeros(n, dtype=bool)
    side = np.zeros(n, dtype=np.int8)
    nx = norm.evaluate(X)
    half = 2.0 * nx / norm.evaluate(Y)
    idx = np.arange(n)
    a, b = -half, half.copy()
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    f = lambda t: norm.evaluate(X + t[:, None] * Y)
    fc, fd = f(c), f(d)
    for it in range(MAX_ITER + 1):
        left = fc <= fd
        fbest = np.where(left, fc, fd)
        out = fbest < nx - tol
        done = out | (b - a <= LAMBDA_TOL) | (it == MAX_ITER)
        if done.any():
            side[idx[out]] = np.sign(np.where(left, c, d)[out]).astype(np.int8)
            inside[idx[done & ~out]] = True
            keep = ~done
            if not keep.any():
                break
            idx, X, Y, nx = idx[keep], X[keep], Y[keep], nx[keep]
            a, b, c, d, fc, fd, left = a[keep], b[keep], c[keep], d[keep], fc[keep], fd[keep], left[keep]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        keep_pt = np.where(left, c, d)
        fkeep = np.where(left, fc, fd)
        new = np.where(left, b - INV_PHI * (b - a), a + INV_PHI * (b - a))
        fnew = f(new)
        c = np.where(left, new, keep_pt)
        fc = np.where(left, fnew, fkeep)
        d = np.where(left, keep_pt, new)
        fd = np.where(left, fkeep, fnew)
    return inside, side


def _crossing(side: np.ndarray, theta: float, step: float) -> int:
    """Index i such that the companion lies in ``[psi_i, psi_i + step]``.

    Along a half-turn of ``y`` the sign of the minimiser flips twice: once at
    the companion and once where ``y`` passes through the direction of ``x``.
    The latter is the crossing closest to ``theta``.
    """
    m = len(side)
    nxt = np.roll(side, -1).copy()
    nxt[-1] = -nxt[-1]  # psi = pi is the direction -y(0)
    flips = np.flatnonzero(side != nxt)
    if len(flips) == 0:
        return int(np.argmin(np.abs(((np.arange(m) * step - theta - math.pi / 2) + math.pi / 2) % math.pi - math.pi / 2)))
    mid = (flips + 0.5) * step
    dist = np.abs((mid - theta + math.pi / 2) % math.pi - math.pi / 2)
    return int(flips[np.argmax(dist)])


def companion_arcs_batch(
    norm: Norm,
    thetas,
    scan_count: int = 512,
    scan_tol: float = SCAN_TOL,
    admit_tol: float = ADMIT_TOL,
) -> list[list[CompanionArc]]:
    """Companion arcs for every angle in ``thetas``.

    Directions ``psi`` in ``[0, pi)`` are scanned; samples with defect at most
    ``admit_tol`` form arcs whose ends are bisected to ``PSI_TOL``.  A row with
    no admitted sample (smooth norms put one companion between samples) is
    refined by golden-section search on the defect between the two samples
    that bracket the companion; the defect is quasi-convex in ``psi`` there.
    """
    if scan_count < 64:
        raise ValueError("scan_count must be at least 64")
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    n = len(thetas)
    m = int(scan_count)
    step = math.pi / m
    X = sphere_points(norm, thetas)
    Y = sphere_points(norm, np.arange(m) * step)
    core = np.empty((n, m), dtype=bool)
    side = np.empty((n, m), dtype=np.int8)
    rows_per_chunk = max(1, _CHUNK // m)
    for r0 in range(0, n, rows_per_chunk):
        r1 = min(n, r0 + rows_per_chunk)
        k = r1 - r0
        ins, sd = _scan_classify(norm, np.repeat(X[r0:r1], m, axis=0), np.tile(Y, (k, 1)), admit_tol)
        core[r0:r1] = ins.reshape(k, m)
        side[r0:r1] = sd.reshape(k, m)

    # boundary jobs: (row, inside_psi, outside_psi)
    lo_jobs: list[tuple[int, float, float]] = []
    hi_jobs: list[tuple[int, float, float]] = []
    refine_rows = []
    for r in range(n):
        if core[r].any():
            for s, e in _runs(core[r]):
                lo_jobs.append((r, s * step, (s - 1) * step))
                hi_jobs.append((r, e * step, (e + 1) * step))
        else:
            refine_rows.append(r)

    failed = []
    if refine_rows:
        rows = np.array(refine_rows)
        lo_b = np.array([_crossing(side[r], thetas[r], step) for r in rows]) * step
        Xr = X[rows]
        if len(rows) <= _ZOOM_ROWS:
            # few rows: wide passes amortise per-call overhead
            k = 64
            Xk = np.repeat(Xr, k + 1, axis=0)
            best, dmin, _ = _zoom(lambda t: _defect_at(norm, Xk, t), lo_b, lo_b + step, PSI_TOL, k)
        else:
            best, dmin, _ = _golden(lambda t: _defect_at(norm, Xr, t), lo_b, lo_b + step, PSI_TOL)
        for k, r in enumerate(rows):
            if dmin[k] <= admit_tol:
                lo_jobs.append((int(r), best[k], lo_b[k]))
                hi_jobs.append((int(r), best[k], lo_b[k] + step))
            elif dmin[k] <= scan_tol:
                # admitted at scan precision only: a degenerate arc at the refined point
                lo_jobs.append((int(r), best[k], best[k]))
                hi_jobs.append((int(r), best[k], best[k]))
            else:
                failed.append(int(r))
    if failed:
        raise NoCompanionFound(f"no companion found for theta={thetas[failed[0]]!r} at scan_count={m}")

    rows_arr = np.array([j[0] for j in lo_jobs], dtype=int)
    Xa = X[rows_arr]
    both_in = np.array([j[1] for j in lo_jobs] + [j[1] for j in hi_jobs])
    both_out = np.array([j[2] for j in lo_jobs] + [j[2] for j in hi_jobs])
    ends, widths = _bisect_boundary(norm, np.concatenate([Xa, Xa]), both_in, both_out, admit_tol)
    k = len(rows_arr)
    lo, hi = ends[:k], ends[k:]
    wlo, whi = widths[:k], widths[k:]

    result: list[list[CompanionArc]] = [[] for _ in range(n)]
    for j, r in enumerate(rows_arr):
        a, b = float(lo[j]), float(hi[j])
        shift = math.floor(a / math.pi) * math.pi
        result[r].append(CompanionArc(a - shift, b - shift, float(max(wlo[j], whi[j]))))
    for arcs in result:
        arcs.sort(key=lambda arc: arc.psi_lo)
    return result


def companion_arcs(norm: Norm, theta: float, scan_count: int = 512) -> list[CompanionArc]:
    """Companion arcs of the sphere point at ``theta``, retrying with finer scans."""
    count = scan_count
    while True:
        try:
            return companion_arcs_batch(norm, [theta], count)[0]
        except NoCompanionFound:
            if count * 2 > MAX_SCAN:
                raise
            count *= 2


def companion_table(
    norm: Norm, theta_count: int, scan_count: int, scan_tol: float = SCAN_TOL
) -> tuple[tuple[CompanionArc, ...], ...]:
    """Arcs for the equispaced angles ``k pi / theta_count``; cached per norm and grid."""
    return _companion_table(norm, int(theta_count), int(scan_count), float(scan_tol))


@lru_cache(maxsize=64)
def _companion_table(norm: Norm, theta_count: int, scan_count: int, scan_tol: float):
    thetas = np.arange(theta_count) * (math.pi / theta_count)
    count = scan_count
    while True:
        try:
            table = companion_arcs_batch(norm, thetas, count, scan_tol, min(ADMIT_TOL, scan_tol))
            return tuple(tuple(arcs) for arcs in table)
        except NoCompanionFound:
            if count * 2 > MAX_SCAN:
                raise
            count *= 2
