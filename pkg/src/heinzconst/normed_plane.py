"""Planar norms as evaluable gauges.

A :class:`Norm` is an immutable description of a symmetric convex gauge on
R^2.  Evaluation is vectorised over the last axis, so ``norm.evaluate(v)``
accepts a single point ``(2,)`` or a stack ``(..., 2)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Norm",
    "SpherePoint",
    "NormError",
    "ParseError",
    "ValidationError",
    "NonSymmetricVertices",
    "NonConvexVertices",
    "OriginNotInterior",
    "evaluate",
    "sphere_point",
    "sphere_points",
    "pnorm",
    "euclidean",
    "polygon_norm",
    "max_functionals",
    "piecewise_quadrant",
    "parse_norm_spec",
    "serialize_norm",
    "builtin_norm",
    "resolve_norm",
    "BUILTIN_ALIASES",
    "ZOO",
]

SUB_KINDS = ("linf", "l1", "l2")
_GEOM_EPS = 1e-12


class NormError(ValueError):
    pass


class ValidationError(NormError):
    pass


class NonSymmetricVertices(ValidationError):
    pass


class NonConvexVertices(ValidationError):
    pass


class OriginNotInterior(ValidationError):
    pass


class ParseError(NormError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _pnorm_values(v: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(v)
    if p == 1.0:
        return a[..., 0] + a[..., 1]
    if math.isinf(p):
        return np.maximum(a[..., 0], a[..., 1])
    if p == 2.0:
        return np.hypot(a[..., 0], a[..., 1])
    m = np.maximum(a[..., 0], a[..., 1])
    safe = np.where(m > 0, m, 1.0)
    r = (a[..., 0] / safe) ** p + (a[..., 1] / safe) ** p
    return np.where(m > 0, m * r ** (1.0 / p), 0.0)


_SUB_P = {"linf": math.inf, "l1": 1.0, "l2": 2.0}


@dataclass(frozen=True)
class Norm:
    """Immutable planar norm.

    ``kind`` is one of ``pnorm``, ``euclid``, ``polygon``,
    ``max_functionals`` or ``piecewise_quadrant``.  Polygons are stored with
    their vertices for display and converted at construction into the
    functional rows used by :meth:`evaluate`.
    """

    kind: str
    p: float | None = None
    vertices: tuple[tuple[float, float], ...] = ()
    rows: tuple[tuple[float, float], ...] = ()
    pos: str | None = None
    neg: str | None = None
    label: str = ""
    _rows_arr: np.ndarray | None = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.rows:
            object.__setattr__(self, "_rows_arr", np.array(self.rows, dtype=float).T.copy())
        if not self.label:
            object.__setattr__(self, "label", _default_label(self))

    def evaluate(self, v) -> np.ndarray | float:
        v = np.asarray(v, dtype=float)
        if self.kind == "euclid":
            out = np.hypot(v[..., 0], v[..., 1])
        elif self.kind == "pnorm":
            out = _pnorm_values(v, self.p)
        elif self.kind == "polygon":
            out = _max_abs_functionals(v[..., 0], v[..., 1], self._rows_arr)
        elif self.kind == "max_functionals":
            out = _max_abs_functionals(np.abs(v[..., 0]), np.abs(v[..., 1]), np.abs(self._rows_arr))
        elif self.kind == "piecewise_quadrant":
            same = v[..., 0] * v[..., 1] >= 0
            out = np.where(same, _pnorm_values(v, _SUB_P[self.pos]), _pnorm_values(v, _SUB_P[self.neg]))
        else:  # pragma: no cover - constructors reject unknown kinds
            raise NormError(f"unknown norm kind {self.kind!r}")
        if out.ndim == 0:
            return float(out)
        return out

    def polygon_vertices(self) -> np.ndarray | None:
        """Vertices of the unit sphere in counter-clockwise order, if it is a polygon."""
        if self.kind == "polygon":
            return np.array(self.vertices, dtype=float)
        if self.kind == "max_functionals":
            rows = np.abs(np.array(self.rows, dtype=float))
            return _vertices_from_rows(np.vstack([rows, rows * [1.0, -1.0]]))
        if self.kind == "pnorm" and self.p in (1.0, math.inf):
            return _SUB_VERTICES["l1" if self.p == 1.0 else "linf"]
        if self.kind == "piecewise_quadrant" and "l2" not in (self.pos, self.neg):
            pts = []
            for k in range(8):
                a = k * math.pi / 4
                c = np.array([math.cos(a), math.sin(a)])
                pts.append(c / self.evaluate(c))
            pts = np.array(pts)
            return _drop_collinear(pts)
        return None


def _max_abs_functionals(x, y, R):
    # column loop; far faster than a reduction over a short trailing axis
    out = np.asarray(np.abs(x * R[0, 0] + y * R[1, 0]))
    for j in range(1, R.shape[1]):
        np.maximum(out, np.abs(x * R[0, j] + y * R[1, j]), out=out)
    return out


_SUB_VERTICES = {
    "l1": np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]),
    "linf": np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]),
}


def _drop_collinear(pts: np.ndarray) -> np.ndarray:
    keep = []
    n = len(pts)
    for i in range(n):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if abs(cross) > 1e-12:
            keep.append(b)
    return np.array(keep)


def _vertices_from_rows(rows: np.ndarray) -> np.ndarray:
    # Each row r gives the two supporting lines <r, v> = +-1; vertices are
    # pairwise intersections that lie on the unit sphere.
    full = np.vstack([rows, -rows])
    pts = []
    for i in range(len(full)):
        for j in range(i + 1, len(full)):
            m = np.vstack([full[i], full[j]])
            if abs(np.linalg.det(m)) < 1e-14:
                continue
            v = np.linalg.solve(m, np.ones(2))
            if np.max(np.abs(rows @ v)) <= 1 + 1e-9:
                pts.append(v)
    pts = np.array(pts)
    ang = np.arctan2(pts[:, 1], pts[:, 0])
    pts = pts[np.argsort(ang)]
    uniq = [pts[0]]
    for q in pts[1:]:
        if np.max(np.abs(q - uniq[-1])) > 1e-9:
            uniq.append(q)
    if len(uniq) > 1 and np.max(np.abs(uniq[0] - uniq[-1])) <= 1e-9:
        uniq.pop()
    return _drop_collinear(np.array(uniq))


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _fmt_pairs(pairs: Sequence[Sequence[float]]) -> str:
    return "[" + ",".join(f"({_fmt(a)},{_fmt(b)})" for a, b in pairs) + "]"


def _default_label(norm: Norm) -> str:
    if norm.kind == "euclid":
        return "euclid"
    if norm.kind == "pnorm":
        return {1.0: "l1", math.inf: "linf"}.get(norm.p, f"l{_fmt(norm.p)}")
    if norm.kind == "piecewise_quadrant":
        return f"{norm.pos}-{norm.neg}"
    if norm.kind == "polygon":
        return f"polygon[{len(norm.vertices)}]"
    return f"max_functionals[{len(norm.rows)}]"


@dataclass(frozen=True)
class SpherePoint:
    angle: float
    coords: tuple[float, float]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coords, dtype=dtype)


def evaluate(norm: Norm, v) -> float | np.ndarray:
    return norm.evaluate(v)


def sphere_points(norm: Norm, angles) -> np.ndarray:
    """Unit-sphere points along the Euclidean directions ``angles``; shape ``(n, 2)``."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    return dirs / norm.evaluate(dirs)[..., None]


def sphere_point(norm: Norm, angle: float) -> SpherePoint:
    angle = float(angle) % (2 * math.pi)
    x, y = sphere_points(norm, [angle])[0]
    return SpherePoint(angle, (float(x), float(y)))


# -- constructors -------------------------------------------------------------


def pnorm(p: float) -> Norm:
    p = float(p)
    if not (p >= 1.0):
        raise ValidationError(f"p must lie in [1, inf], got {p}")
    return Norm("pnorm", p=p)


def euclidean() -> Norm:
    return Norm("euclid")


def _as_pairs(points: Iterable[Sequence[float]], what: str) -> np.ndarray:
    arr = np.array([tuple(map(float, q)) for q in points], dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError(f"{what} must be planar points")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} must be finite")
    return arr


def polygon_norm(vertices: Iterable[Sequence[float]], label: str = "") -> Norm:
    """Minkowski functional of the centrally symmetric polygon with these vertices.

    Vertices may be given in any order.  Raises :class:`NonSymmetricVertices`,
    :class:`NonConvexVertices` or :class:`OriginNotInterior` when the
    corresponding precondition fails.
    """
    pts = _as_pairs(vertices, "vertices")
    if len(pts) < 4:
        raise ValidationError("a polygon norm needs at least 4 vertices")
    scale = float(np.max(np.abs(pts)))
    tol = 1e-9 * max(scale, 1.0)
    for q in pts:
        if not np.any(np.max(np.abs(pts + q), axis=1) <= tol):
            raise NonSymmetricVertices(f"vertex {tuple(q)} has no antipode {tuple(-q)}")
    if np.any(np.max(np.abs(pts), axis=1) <= tol):
        raise OriginNotInterior("the origin is listed as a vertex")

    ang = np.arctan2(pts[:, 1], pts[:, 0]) % (2 * math.pi)
    order = np.lexsort((np.hypot(pts[:, 0], pts[:, 1]), ang))
    pts = pts[order]
    ang = ang[order]
    if np.any(np.diff(ang) <= 1e-15):
        raise NonConvexVertices("two vertices lie on the same ray from the origin")
    n = len(pts)
    for i in range(n):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross < -_GEOM_EPS * scale * scale:
            raise NonConvexVertices(f"vertex {tuple(b)} is a reflex corner")
    turning = np.sum(np.diff(np.concatenate([ang, ang[:1] + 2 * math.pi])))
    if abs(turning - 2 * math.pi) > 1e-9:  # pragma: no cover - angular sort guarantees this
        raise NonConvexVertices("vertices do not wind once around the origin")

    rows = []
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        normal = np.array([b[1] - a[1], a[0] - b[0]])
        h = float(normal @ a)
        if h <= _GEOM_EPS * scale * scale:
            raise OriginNotInterior(f"edge {tuple(a)}-{tuple(b)} passes through the origin")
        r = normal / h
        # antipodal edges give the same functional up to sign
        if not any(np.max(np.abs(np.array(q) + r)) <= 1e-12 or np.max(np.abs(np.array(q) - r)) <= 1e-12 for q in rows):
            rows.append(tuple(float(c) for c in r))
    verts = tuple((float(x), float(y)) for x, y in pts)
    return Norm("polygon", vertices=verts, rows=tuple(rows), label=label)


def max_functionals(rows: Iterable[Sequence[float]], label: str = "") -> Norm:
    """The norm ``v -> max_k (|r_k1| |v_1| + |r_k2| |v_2|)``.

    Rows act on the coordinate-wise absolute value, so the resulting norm is
    symmetric under both coordinate reflections; three rows
    ``(1,0), (0,1), (c,c)`` give ``max{|v1|, |v2|, c(|v1| + |v2|)}``.
    """
    arr = _as_pairs(rows, "rows")
    if len(arr) == 0 or not (np.any(arr[:, 0] != 0) and np.any(arr[:, 1] != 0)):
        raise OriginNotInterior("some row must weight each coordinate for the gauge to be a norm")
    return Norm("max_functionals", rows=tuple((float(a), float(b)) for a, b in arr), label=label)


def piecewise_quadrant(pos: str, neg: str, label: str = "") -> Norm:
    """Glue ``pos`` on the quadrants with x1*x2 >= 0 and ``neg`` on the others."""
    for name in (pos, neg):
        if name not in SUB_KINDS:
            raise ValidationError(f"sub-norm must be one of {SUB_KINDS}, got {name!r}")
    return Norm("piecewise_quadrant", pos=pos, neg=neg, label=label)


# -- text format --------------------------------------------------------------

_KEYS = ("kind", "p", "vertices", "rows", "pos", "neg", "label")
_TOKEN = re.compile(r"([A-Za-z_]+)[ \t]*=[ \t]*(\[[^\]]*\]|[^\s\[]+)")
_PAIR = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


def _parse_float(text: str, line: int, col: int) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", line, col) from None


def _parse_pairs(text: str, line: int, col: int) -> list[tuple[float, float]]:
    body = text[1:-1] if text.startswith("[") else text
    out = []
    pos = 0
    while True:
        while pos < len(body) and body[pos] in " \t":
            pos += 1
        m = _PAIR.match(body, pos)
        if not m:
            raise ParseError("expected a parenthesised pair '(a,b)'", line, col + pos + (text != body))
        out.append((_parse_float(m.group(1), line, col), _parse_float(m.group(2), line, col)))
        pos = m.end()
        while pos < len(body) and body[pos] in " \t":
            pos += 1
        if pos == len(body):
            return out
        if body[pos] != ",":
            raise ParseError(f"unexpected {body[pos]!r} between pairs", line, col + pos + (text != body))
        pos += 1


def parse_norm_spec(text: str) -> Norm:
    """Parse the ``key=value`` norm format.

    Keys may be spread over several lines or share a line; ``#`` starts a
    comment.  Example::

        kind=max_functionals rows=[(1,0),(0,1),(0.7071067811865475,0.7071067811865475)]
    """
    fields: dict[str, tuple[str, int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        pos = 0
        while True:
            while pos < len(line) and line[pos].isspace():
                pos += 1
            if pos >= len(line):
                break
            m = _TOKEN.match(line, pos)
            if not m:
                raise ParseError(f"expected key=value, got {line[pos:].strip()!r}", lineno, pos + 1)
            key = m.group(1)
            if key not in _KEYS:
                raise ParseError(f"unknown key {key!r}", lineno, pos + 1)
            if key in fields:
                raise ParseError(f"duplicate key {key!r}", lineno, pos + 1)
            fields[key] = (m.group(2), lineno, m.start(2) + 1, pos + 1)
            pos = m.end()
    if "kind" not in fields:
        raise ParseError("missing 'kind='", 1, 1)

    kind, kl, kc, _ = fields["kind"]
    label = fields["label"][0] if "label" in fields else ""
    allowed = {
        "pnorm": {"p"},
        "euclid": set(),
        "polygon": {"vertices"},
        "max_functionals": {"rows"},
        "piecewise_quadrant": {"pos", "neg"},
    }
    if kind not in allowed:
        raise ParseError(f"unknown kind {kind!r}", kl, kc)
    extra = set(fields) - allowed[kind] - {"kind", "label"}
    if extra:
        key = sorted(extra, key=lambda k: fields[k][1:])[0]
        raise ParseError(f"key {key!r} does not apply to kind {kind!r}", fields[key][1], fields[key][3])
    missing = allowed[kind] - set(fields)
    if missing:
        raise ParseError(f"kind {kind!r} requires {', '.join(sorted(missing))}", kl, kc)

    if kind == "euclid":
        return Norm("euclid", label=label)
    if kind == "pnorm":
        val, line, col, _ = fields["p"]
        p = _parse_float(val, line, col)
        if not p >= 1.0:
            raise ParseError(f"p must lie in [1, inf], got {val}", line, col)
        return Norm("pnorm", p=p, label=label)
    if kind == "polygon":
        val, line, col, _ = fields["vertices"]
        return polygon_norm(_parse_pairs(val, line, col), label=label)
    if kind == "max_functionals":
        val, line, col, _ = fields["rows"]
        return max_functionals(_parse_pairs(val, line, col), label=label)
    for key in ("pos", "neg"):
        val, line, col, _ = fields[key]
        if val not in SUB_KINDS:
            raise ParseError(f"{key} must be one of {', '.join(SUB_KINDS)}", line, col)
    return piecewise_quadrant(fields["pos"][0], fields["neg"][0], label=label)


def serialize_norm(norm: Norm) -> str:
    """Canonical text form; ``parse_norm_spec(serialize_norm(n)) == n``."""
    lines = [f"kind={norm.kind}"]
    if norm.kind == "pnorm":
        lines.append(f"p={_fmt(norm.p)}")
    elif norm.kind == "polygon":
        lines.append(f"vertices={_fmt_pairs(norm.vertices)}")
    elif norm.kind == "max_functionals":
        lines.append(f"rows={_fmt_pairs(norm.rows)}")
    elif norm.kind == "piecewise_quadrant":
        lines.append(f"pos={norm.pos}")
        lines.append(f"neg={norm.neg}")
    if norm.label != _default_label(norm):
        lines.append(f"label={norm.label}")
    return "\n".join(lines) + "\n"


# -- built-in aliases ---------------------------------------------------------

HEXAGON_VERTICES = ((1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (-1.0, 0.0), (-1.0, -1.0), (0.0, -1.0))
SQRT2_ROWS = ((1.0, 0.0), (0.0, 1.0), (1 / math.sqrt(2), 1 / math.sqrt(2)))

BUILTIN_ALIASES = ("euclid", "l1", "linf", "lp:<p>", "l<p>", "linf-l1", "sqrt2max", "hexagon")
ZOO = ("euclid", "l1", "linf", "l4", "l10", "linf-l1", "sqrt2max", "hexagon")


def builtin_norm(name: str) -> Norm:
    """Norm for a built-in alias such as ``linf``, ``lp:4``, ``l10`` or ``hexagon``."""
    name = name.strip()
    if name in ("euclid", "l2"):
        return Norm("euclid", label=name)
    if name == "l1":
        return Norm("pnorm", p=1.0)
    if name == "linf":
        return Norm("pnorm", p=math.inf)
    if name == "linf-l1":
        return piecewise_quadrant("linf", "l1", label="linf-l1")
    if name == "sqrt2max":
        return max_functionals(SQRT2_ROWS, label="sqrt2max")
    if name == "hexagon":
        return polygon_norm(HEXAGON_VERTICES, label="hexagon")
    m = re.fullmatch(r"(?:lp:|l)([0-9.]+|inf)", name)
    if m:
        p = _parse_float(m.group(1), 1, 1)
        if p >= 1.0:
            return Norm("pnorm", p=p, label=name)
    raise KeyError(name)


def resolve_norm(text: str) -> Norm:
    """Interpret ``text`` as a built-in alias, an inline spec, or a spec file path."""
    try:
        return builtin_norm(text)
    except KeyError:
        pass
    if "kind=" in text:
        return parse_norm_spec(text)
    with open(text, encoding="utf-8") as fh:
        return parse_norm_spec(fh.read())
