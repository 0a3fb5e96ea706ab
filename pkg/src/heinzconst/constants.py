"""Geometric constants as extrema over pairs of unit vectors.

Constrained constants (names ending in ``B``) range over Birkhoff-orthogonal
pairs ``x, y`` on the unit sphere; the others range over all unit pairs.
Every objective depends only on ``s = ||x + y||`` and ``d = ||x - y||``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .birkhoff import ADMIT_TOL, SCAN_TOL, CompanionArc, OrthoPair, companion_arcs_batch, companion_table, defect_batch
from .normed_plane import Norm, SpherePoint, sphere_points

__all__ = [
    "DomainError",
    "GridTooCoarse",
    "ConstantKind",
    "GridParams",
    "ConstantEstimate",
    "NonSquareClass",
    "heinz_mean",
    "pair_objective",
    "objective_values",
    "witness_value",
    "estimate_constant",
    "radon_defect",
    "classify_nonsquare",
    "KIND_NAMES",
    "kind_from_name",
]

TIE_EPS = 1e-12
STABILITY = 1e-2


class DomainError(ValueError):
    pass


class GridTooCoarse(RuntimeError):
    pass


_CONSTRAINED = {"HeinzB", "JamesB", "A2B", "DeltaB", "RhoB", "RectangularB"}
_INFIMUM = {"DeltaB", "Schaffer"}
# objectives that use ||x + y|| alone and so change under y -> -y
_SIGNED = {"DeltaB", "RhoB", "RectangularB"}


@dataclass(frozen=True)
class ConstantKind:
    tag: str
    nu: float | None = None

    def __post_init__(self):
        if self.tag not in _CONSTRAINED | {"James", "Schaffer", "A2"}:
            raise DomainError(f"unknown constant {self.tag!r}")
        if self.tag == "HeinzB":
            if self.nu is None or not 0.0 <= self.nu <= 1.0:
                raise DomainError(f"nu must lie in [0, 1], got {self.nu!r}")
            object.__setattr__(self, "nu", float(self.nu))
        elif self.nu is not None:
            raise DomainError(f"{self.tag} takes no nu parameter")

    @classmethod
    def heinz(cls, nu: float) -> "ConstantKind":
        return cls("HeinzB", nu)

    @property
    def direction(self) -> str:
        return "inf" if self.tag in _INFIMUM else "sup"

    @property
    def constrained(self) -> bool:
        return self.tag in _CONSTRAINED

    @property
    def signed(self) -> bool:
        return self.tag in _SIGNED

    @property
    def name(self) -> str:
        return KIND_NAMES_REV[self.tag]


KIND_NAMES = {
    "H": "HeinzB",
    "J_B": "JamesB",
    "A2_B": "A2B",
    "delta_B": "DeltaB",
    "rho_B": "RhoB",
    "mu_B": "RectangularB",
    "J": "James",
    "S": "Schaffer",
    "A2": "A2",
}
KIND_NAMES_REV = {v: k for k, v in KIND_NAMES.items()}


def kind_from_name(name: str, nu: float | None = None) -> ConstantKind:
    if name not in KIND_NAMES:
        raise DomainError(f"unknown constant name {name!r}; expected one of {', '.join(KIND_NAMES)}")
    tag = KIND_NAMES[name]
    return ConstantKind(tag, nu if tag == "HeinzB" else None)


@dataclass(frozen=True)
class GridParams:
    theta_count: int = 2048
    psi_scan: int = 512
    refine_levels: int = 3
    refine_samples: int = 32
    ortho_tol: float = SCAN_TOL
    value_tol: float = 1e-3

    def __post_init__(self):
        if self.theta_count < 256:
            raise ValueError("theta_count must be at least 256")
        if self.psi_scan < 64:
            raise ValueError("psi_scan must be at least 64")
        if self.refine_levels < 0 or self.refine_samples < 2:
            raise ValueError("invalid refinement parameters")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.theta_count, self.psi_scan, self.refine_levels)


@dataclass(frozen=True)
class ConstantEstimate:
    kind: ConstantKind
    value: float
    witness: OrthoPair
    grid: tuple[int, int, int]
    tolerance: float
    levels: tuple[float, ...] = field(default=(), compare=False)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.name,
            "nu": self.kind.nu,
            "value": self.value,
            "x_angle": self.witness.x.angle,
            "y_angle": self.witness.y.angle,
            "x": list(self.witness.x.coords),
            "y": list(self.witness.y.coords),
            "defect": self.witness.defect,
            "grid": list(self.grid),
            "tolerance": self.tolerance,
        }


def heinz_mean(a: float, b: float, nu: float) -> float:
    """``(a^nu b^(1-nu) + a^(1-nu) b^nu) / 2`` for positive ``a, b``."""
    if not (a > 0 and b > 0):
        raise DomainError("Heinz mean needs positive arguments")
    if not 0.0 <= nu <= 1.0:
        raise DomainError(f"nu must lie in [0, 1], got {nu}")
    return float(_heinz(np.float64(a), np.float64(b), nu))


def _heinz(a, b, nu):
    # sqrt(ab) cosh((nu - 1/2) log(a/b)): exact at a == b and never below the geometric mean;
    # the arithmetic and geometric endpoints are computed directly
    if nu in (0.0, 1.0):
        return (a + b) / 2.0
    if nu == 0.5:
        return np.sqrt(a * b)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sqrt(a * b) * np.cosh((nu - 0.5) * np.log(a / b))
    degenerate = (a <= 0) | (b <= 0)
    if np.any(degenerate):
        out = np.where(degenerate, (a**nu * b ** (1.0 - nu) + a ** (1.0 - nu) * b**nu) / 2.0, out)
    return out


def objective_values(kind: ConstantKind, s, d) -> np.ndarray:
    """Vectorised objective; no domain checks (zero sides are allowed for unconstrained kinds)."""
    s = np.asarray(s, dtype=float)
    d = np.asarray(d, dtype=float)
    tag = kind.tag
    if tag == "HeinzB":
        return _heinz(s, d, kind.nu)
    if tag in ("JamesB", "James"):
        return np.minimum(s, d)
    if tag == "Schaffer":
        return np.maximum(s, d)
    if tag in ("A2B", "A2"):
        return (s + d) / 2.0
    if tag in ("DeltaB", "RhoB"):
        return 1.0 - s / 2.0
    return 2.0 / s


def pair_objective(kind: ConstantKind, s: float, d: float) -> float:
    if not (s > 0 and d > 0):
        raise DomainError("pair objective needs positive side lengths")
    return float(objective_values(kind, s, d))


def witness_value(norm: Norm, kind: ConstantKind, theta: float, psi: float) -> tuple[float, np.ndarray, np.ndarray]:
    """Objective at the sphere points with angles ``theta`` and ``psi``.

    This is the single code path used to report values, so re-evaluating a
    reported witness reproduces the value bit for bit.
    """
    pts = sphere_points(norm, np.array([theta, psi]))
    x, y = pts[0], pts[1]
    sd = norm.evaluate(np.array([x + y, x - y]))
    return float(objective_values(kind, sd[0], sd[1])), x, y


# -- search -------------------------------------------------------------------


def _arc_samples(arc: CompanionArc, step: float, lo: float | None = None, hi: float | None = None, count=None):
    a, b = arc.psi_lo, arc.psi_hi
    if lo is not None:
        # shift the arc by a multiple of pi towards the window before clipping
        k = round(((lo + hi) / 2 - (a + b) / 2) / math.pi)
        a, b = a + k * math.pi, b + k * math.pi
        a, b = max(a, lo), min(b, hi)
        if a > b:
            return np.empty(0)
    if count is None:
        count = max(8, int(math.ceil((b - a) / step)))
    return np.linspace(a, b, count + 2)


def _score(kind: ConstantKind, values: np.ndarray) -> np.ndarray:
    return values if kind.direction == "sup" else -values


def _pick(kind: ConstantKind, th: np.ndarray, ps: np.ndarray, values: np.ndarray) -> int:
    """Index of the extremum; ties within TIE_EPS go to the smallest theta, then psi."""
    score = _score(kind, values)
    best = np.max(score)
    tied = np.flatnonzero(score >= best - TIE_EPS)
    order = np.lexsort((ps[tied], th[tied]))
    return int(tied[order[0]])


def _evaluate(norm: Norm, kind: ConstantKind, th: np.ndarray, ps: np.ndarray) -> np.ndarray:
    X = sphere_points(norm, th)
    Y = sphere_points(norm, ps)
    s = norm.evaluate(X + Y)
    d = norm.evaluate(X - Y)
    return objective_values(kind, s, d)


def _constrained_candidates(kind: ConstantKind, thetas, arcs_per_theta, step, window=None, count=None):
    """Sample points ``(theta, psi)`` on the companion arcs.

    Arcs live modulo pi; kinds that are not symmetric under ``y -> -y`` also
    get the antipodal copy.  With a ``window`` the arcs are clipped to it
    (shifted by a multiple of pi first) and a coarse sweep of every arc is
    kept so that a companion jumping out of the window is not lost.
    """
    th, ps = [], []
    for t, arcs in zip(thetas, arcs_per_theta):
        for arc in arcs:
            coarse = _arc_samples(arc, step) if window is None else _arc_samples(arc, step, count=8)
            if kind.signed:
                coarse = np.concatenate([coarse, coarse + math.pi])
            if window is not None:
                coarse = np.concatenate([_arc_samples(arc, step, window[0], window[1], count), coarse])
            th.append(np.full(len(coarse), t))
            ps.append(coarse)
    return np.concatenate(th), np.concatenate(ps)


def estimate_constant(norm: Norm, kind: ConstantKind, grid: GridParams | None = None) -> ConstantEstimate:
    """Grid search with nested local refinement for one constant.

    Suprema are reported as the value at an explicit witness pair, hence a
    certified lower bound (and infima an upper bound) on the true constant.
    """
    grid = grid or GridParams()
    T = grid.theta_count
    dtheta = math.pi / T
    dpsi = math.pi / grid.psi_scan
    thetas = np.arange(T) * dtheta

    if kind.constrained:
        table = companion_table(norm, T, grid.psi_scan, grid.ortho_tol)
        th, ps = _constrained_candidates(kind, thetas, table, dpsi)
    else:
        ps_axis = np.arange(grid.psi_scan) * dpsi
        th = np.repeat(thetas, len(ps_axis))
        ps = np.tile(ps_axis, T)
    vals = _evaluate(norm, kind, th, ps)
    i = _pick(kind, th, ps, vals)
    best_t, best_p, best_v = th[i], ps[i], vals[i]
    levels = [float(best_v)]

    ht, hp = 2.0 * dtheta, 2.0 * dpsi
    n = grid.refine_samples
    for _ in range(grid.refine_levels):
        local_t = np.concatenate([[best_t], np.linspace(best_t - ht, best_t + ht, n)])
        window = (best_p - hp, best_p + hp)
        if kind.constrained:
            arcs = companion_arcs_batch(norm, local_t, grid.psi_scan, grid.ortho_tol, min(ADMIT_TOL, grid.ortho_tol))
            th, ps = _constrained_candidates(kind, local_t, arcs, dpsi, window, n)
        else:
            local_p = np.concatenate([[best_p], np.linspace(window[0], window[1], n)])
            th = np.repeat(local_t, n + 1)
            ps = np.tile(local_p, n + 1)
        th = np.append(th, best_t)
        ps = np.append(ps, best_p)
        vals = _evaluate(norm, kind, th, ps)
        i = _pick(kind, th, ps, vals)
        if _score(kind, np.array([vals[i]]))[0] > _score(kind, np.array([best_v]))[0]:
            best_t, best_p, best_v = th[i], ps[i], vals[i]
        if abs(best_v - levels[-1]) > STABILITY:
            raise GridTooCoarse(
                f"{kind.name} moved by {abs(best_v - levels[-1]):.3g} during refinement; increase theta_count"
            )
        levels.append(float(best_v))
        ht /= 10.0
        hp /= 10.0

    theta = float(best_t) % (2 * math.pi)
    psi = float(best_p) % (2 * math.pi)
    value, x, y = witness_value(norm, kind, theta, psi)
    dfc = float(defect_batch(norm, x, y)[0])
    pair = OrthoPair(SpherePoint(theta, (float(x[0]), float(x[1]))), SpherePoint(psi, (float(y[0]), float(y[1]))), dfc)
    return ConstantEstimate(kind, value, pair, grid.as_tuple(), grid.value_tol, tuple(levels))


def _radon_pairs(norm: Norm, grid: GridParams):
    T = grid.theta_count
    thetas = np.arange(T) * (math.pi / T)
    table = companion_table(norm, T, grid.psi_scan, grid.ortho_tol)
    th, ps = [], []
    for t, arcs in zip(thetas, table):
        for arc in arcs:
            s = _arc_samples(arc, math.pi / grid.psi_scan)
            th.append(np.full(len(s), t))
            ps.append(s)
    return np.concatenate(th), np.concatenate(ps)


def radon_defect(norm: Norm, grid: GridParams | None = None) -> float:
    """Largest reverse defect ``defect(y, x)`` over sampled orthogonal pairs ``x, y``.

    Zero (up to sampling) exactly when Birkhoff orthogonality is symmetric.
    """
    grid = grid or GridParams()
    th, ps = _radon_pairs(norm, grid)
    X = sphere_points(norm, th)
    Y = sphere_points(norm, ps)
    return float(np.max(defect_batch(norm, Y, X)))


class NonSquareClass(str, enum.Enum):
    UNIFORMLY_NON_SQUARE = "UniformlyNonSquare"
    NOT_UNIFORMLY_NON_SQUARE = "NotUniformlyNonSquare"
    INCONCLUSIVE = "Inconclusive"


def classify_nonsquare(
    norm: Norm, nu: float, margin: float = 1e-2, grid: GridParams | None = None, estimate: ConstantEstimate | None = None
) -> NonSquareClass:
    """Uniform non-squareness read off the Heinz constant: it equals 2 exactly for non-uniformly-non-square planes."""
    if not margin > 0:
        raise ValueError("margin must be positive")
    grid = grid or GridParams()
    if estimate is None:
        estimate = estimate_constant(norm, ConstantKind.heinz(nu), grid)
    h = estimate.value
    if h <= 2.0 - margin:
        return NonSquareClass.UNIFORMLY_NON_SQUARE
    if h >= 2.0 - grid.value_tol:
        return NonSquareClass.NOT_UNIFORMLY_NON_SQUARE
    return NonSquareClass.INCONCLUSIVE

