"""Inequality catalogue for the Heinz constant, evaluated on one norm.

Each check compares two numbers and records a signed margin (positive means
the inequality holds with room to spare).  Failed checks are reported, never
raised.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import ConstantEstimate, ConstantKind, GridParams, estimate_constant, radon_defect
from .normed_plane import HEXAGON_VERTICES, Norm, polygon_norm, serialize_norm

__all__ = [
    "Check",
    "VerificationReport",
    "SingularMap",
    "CATALOG",
    "PAIR_SLACK",
    "ESTIMATE_SLACK",
    "RADON_TOL",
    "run_checks",
    "hexagon_image",
    "hexagon_family_check",
    "random_affine_maps",
    "random_symmetric_polygon",
]

PAIR_SLACK = 1e-6
ESTIMATE_SLACK = 5e-3
RADON_TOL = 1e-6
NONSQUARE_BAND = 5e-3

CATALOG = (
    "bounds_1_2",
    "chain",
    "j_sandwich",
    "delta_upper",
    "rho_lower",
    "rectangular",
    "nu_symmetry",
    "nu_min_half",
    "radon_upper",
    "nonsquare_consistency",
)


class SingularMap(ValueError):
    pass


@dataclass(frozen=True)
class Check:
    name: str
    nu: float
    statement: str
    lhs: float
    rhs: float
    relation: str  # "LE", "GE" or "EQ"
    margin: float
    passed: bool
    slack: float
    applicable: bool = True
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "nu": self.nu,
            "statement": self.statement,
            "relation": self.relation,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "slack": self.slack,
            "applicable": self.applicable,
            "passed": self.passed,
            "detail": dict(sorted(self.detail.items())),
        }


def _check(name, nu, statement, lhs, rhs, relation, slack, tol=0.0, applicable=True, **detail) -> Check:
    if relation == "LE":
        margin = rhs - lhs
    elif relation == "GE":
        margin = lhs - rhs
    else:
        margin = tol - abs(lhs - rhs)
    passed = (not applicable) or margin >= -slack
    return Check(name, float(nu), statement, float(lhs), float(rhs), relation, float(margin), bool(passed),
                 slack, applicable, {k: float(v) for k, v in detail.items()})


@dataclass
class VerificationReport:
    norm_label: str
    norm_spec: str
    nus: list[float]
    grid: tuple[int, int, int]
    checks: list[Check]
    constants: list[ConstantEstimate]
    radon_defect: float
    radon: bool

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            "norm": self.norm_label,
            "spec": self.norm_spec,
            "nus": list(self.nus),
            "grid": list(self.grid),
            "passed": self.passed,
            "radon": {"defect": self.radon_defect, "classified": self.radon, "tolerance": RADON_TOL},
            "constants": [c.as_dict() for c in self.constants],
            "checks": [c.as_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"


def run_checks(norm: Norm, nus, grid: GridParams | None = None, include: tuple[str, ...] = CATALOG) -> VerificationReport:
    """Estimate the needed constants once and evaluate the catalogue for every ``nu``."""
    grid = grid or GridParams()
    nus = [float(v) for v in nus]
    if not nus:
        raise ValueError("at least one nu is required")
    for v in nus:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"nu must lie in [0, 1], got {v}")

    cache: dict[ConstantKind, ConstantEstimate] = {}

    def est(kind: ConstantKind) -> ConstantEstimate:
        if kind not in cache:
            cache[kind] = estimate_constant(norm, kind, grid)
        return cache[kind]

    J = est(ConstantKind("JamesB")).value
    A2 = est(ConstantKind("A2B")).value
    delta = est(ConstantKind("DeltaB")).value
    rho = est(ConstantKind("RhoB")).value
    mu = est(ConstantKind("RectangularB")).value
    needs_radon = "radon_upper" in include
    rd = radon_defect(norm, grid) if needs_radon else math.nan
    is_radon = bool(rd <= RADON_TOL) if needs_radon else False

    checks: list[Check] = []
    for nu in nus:
        H = est(ConstantKind.heinz(nu)).value
        H_mirror = est(ConstantKind.heinz(1.0 - nu)).value
        H_half = est(ConstantKind.heinz(0.5)).value
        items = {
            # |H - 3/2| <= 1/2 is 1 <= H <= 2
            "bounds_1_2": lambda: _check("bounds_1_2", nu, "1 <= H_nu(X,B) <= 2", abs(H - 1.5), 0.5, "LE",
                                         PAIR_SLACK, H=H),
            "chain": lambda: _check("chain", nu, "J(X,B) <= H_nu(X,B) <= A2(X,B)", max(J - H, H - A2), 0.0, "LE",
                                    ESTIMATE_SLACK, J_B=J, H=H, A2_B=A2),
            "j_sandwich": lambda: _check(
                "j_sandwich", nu, "H_nu(X,B) <= 2^(nu-1) J(X,B)^(1-nu) + 2^(-nu) J(X,B)^nu",
                H, 2.0 ** (nu - 1) * J ** (1 - nu) + 2.0 ** (-nu) * J**nu, "LE", ESTIMATE_SLACK, J_B=J),
            "delta_upper": lambda: _check(
                "delta_upper", nu, "H_nu(X,B) <= (1 - delta_B)^nu + (1 - delta_B)^(1-nu)",
                H, (1 - delta) ** nu + (1 - delta) ** (1 - nu), "LE", ESTIMATE_SLACK, delta_B=delta),
            "rho_lower": lambda: _check(
                "rho_lower", nu, "H_nu(X,B) >= sqrt(2 (1 - rho_B))", H, math.sqrt(max(2 * (1 - rho), 0.0)), "GE",
                ESTIMATE_SLACK, rho_B=rho),
            "rectangular": lambda: _check(
                "rectangular", nu, "mu'(X,B) H_nu(X,B)^2 >= 2", mu * H * H, 2.0, "GE", ESTIMATE_SLACK, mu_B=mu),
            "nu_symmetry": lambda: _check(
                "nu_symmetry", nu, "H_nu(X,B) = H_(1-nu)(X,B)", H, H_mirror, "EQ", ESTIMATE_SLACK,
                tol=2 * grid.value_tol, mirror_nu=1.0 - nu),
            "nu_min_half": lambda: _check(
                "nu_min_half", nu, "H_(1/2)(X,B) <= H_nu(X,B)", H_half, H, "LE", ESTIMATE_SLACK),
            "radon_upper": lambda: _check(
                "radon_upper", nu, "Radon plane: H_nu(X,B) <= 3/2", H, 1.5, "LE", ESTIMATE_SLACK,
                applicable=is_radon, radon_defect=rd),
            "nonsquare_consistency": lambda: _nonsquare(nu, H, J),
        }
        for name in CATALOG:
            if name in include:
                checks.append(items[name]())

    constants = sorted(cache.values(), key=lambda e: (e.kind.tag, e.kind.nu if e.kind.nu is not None else -1.0))
    return VerificationReport(norm.label, serialize_norm(norm), nus, grid.as_tuple(), checks, constants, rd, is_radon)


def _nonsquare(nu: float, H: float, J: float) -> Check:
    # equality of the two classifications, each read from a band around 2
    h_square = float(H >= 2.0 - NONSQUARE_BAND)
    j_square = float(J >= 2.0 - NONSQUARE_BAND)
    return _check("nonsquare_consistency", nu, "H_nu(X,B) = 2 iff J(X,B) = 2", h_square, j_square, "EQ", 0.0,
                  tol=0.0, H=H, J_B=J, band=NONSQUARE_BAND)


# -- affine hexagons and random polygons -------------------------------------


def hexagon_image(matrix) -> Norm:
    """Polygon norm whose unit sphere is the image of the hexagon +-u, +-v, +-(u+v) under ``matrix``."""
    A = np.asarray(matrix, dtype=float).reshape(2, 2)
    if abs(np.linalg.det(A)) < 1e-12 or np.linalg.cond(A) > 1e12:
        raise SingularMap(f"matrix {A.tolist()} is not invertible")
    verts = np.array(HEXAGON_VERTICES) @ A.T
    return polygon_norm(verts, label="hexagon-image")


def random_affine_maps(count: int, seed: int, max_cond: float = 10.0) -> list[np.ndarray]:
    """Seeded invertible 2x2 maps ``R(a) diag(s1, s2) R(b)`` with ``s1 / s2 <= max_cond``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    maps = []
    while len(maps) < count:
        a, b = rng.uniform(0, 2 * math.pi, size=2)
        s1 = math.exp(rng.uniform(-1.0, 1.0))
        s2 = s1 / math.exp(rng.uniform(0.0, math.log(max_cond)))
        rot = lambda t: np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
        A = rot(a) @ np.diag([s1, s2]) @ rot(b)
        if rng.uniform() < 0.5:
            A = A @ np.diag([1.0, -1.0])
        if abs(np.linalg.det(A)) < 1e-9:
            continue
        maps.append(A)
    return maps


def hexagon_family_check(count: int, seed: int, grid: GridParams | None = None, maps=None):
    """H_(1/2) for affine images of the regular hexagon; returns ``[(map, estimate), ...]``."""
    grid = grid or GridParams()
    if maps is None:
        maps = random_affine_maps(count, seed)
    out = []
    for A in maps:
        norm = hexagon_image(A)
        out.append((np.asarray(A, dtype=float), estimate_constant(norm, ConstantKind.heinz(0.5), grid)))
    return out


def random_symmetric_polygon(rng: np.random.Generator, n_vertices: int) -> Norm:
    """Random centrally symmetric convex polygon with ``n_vertices`` (even) vertices.

    Built from ``n_vertices / 2`` edge vectors at strictly increasing angles in
    ``[0, pi)`` followed by their negatives, which closes the polygon and makes
    every corner strictly convex.
    """
    if n_vertices < 4 or n_vertices % 2:
        raise ValueError("n_vertices must be even and at least 4")
    k = n_vertices // 2
    while True:
        ang = np.sort(rng.uniform(0, math.pi, size=k))
        gaps = np.diff(np.concatenate([ang, [ang[0] + math.pi]]))
        if np.min(gaps) >= 0.05:
            break
    length = rng.uniform(0.3, 1.5, size=k)
    edges = np.stack([length * np.cos(ang), length * np.sin(ang)], axis=1)
    edges = np.vstack([edges, -edges])
    verts = np.cumsum(edges, axis=0)
    verts -= verts.mean(axis=0)
    return polygon_norm(verts, label=f"random-polygon[{n_vertices}]")
