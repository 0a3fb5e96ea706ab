import math

import numpy as np
import pytest

from heinzconst.normed_plane import (
    HEXAGON_VERTICES,
    ZOO,
    NonConvexVertices,
    NonSymmetricVertices,
    OriginNotInterior,
    ParseError,
    ValidationError,
    builtin_norm,
    evaluate,
    max_functionals,
    parse_norm_spec,
    piecewise_quadrant,
    pnorm,
    polygon_norm,
    resolve_norm,
    serialize_norm,
    sphere_point,
    sphere_points,
)

ALL = [builtin_norm(n) for n in ZOO] + [pnorm(1.5), piecewise_quadrant("l2", "linf"),
                                         polygon_norm([(2, 0), (1, 1), (-1, 1), (-2, 0), (-1, -1), (1, -1)])]


def test_evaluate_examples():
    assert evaluate(builtin_norm("linf"), (1, 1)) == 1.0
    assert evaluate(builtin_norm("euclid"), (3, 4)) == 5.0
    assert evaluate(builtin_norm("linf-l1"), (-0.5, 0.5)) == 1.0
    assert evaluate(builtin_norm("linf-l1"), (1, 1)) == 1.0
    assert evaluate(builtin_norm("l1"), (-2, 3)) == 5.0
    assert evaluate(builtin_norm("euclid"), (0, 0)) == 0.0


def test_pnorm_matches_closed_form():
    rng = np.random.default_rng(3)
    v = rng.normal(size=(500, 2))
    for p in (1.5, 3.0, 4.0, 10.0):
        ref = (np.abs(v[:, 0]) ** p + np.abs(v[:, 1]) ** p) ** (1 / p)
        assert np.allclose(pnorm(p).evaluate(v), ref, rtol=1e-13, atol=0)
    assert np.array_equal(pnorm(math.inf).evaluate(v), np.max(np.abs(v), axis=1))
    assert np.array_equal(pnorm(1.0).evaluate(v), np.sum(np.abs(v), axis=1))


def test_sqrt2max_formula():
    n = builtin_norm("sqrt2max")
    rng = np.random.default_rng(4)
    v = rng.normal(size=(1000, 2))
    a = np.abs(v)
    ref = np.maximum(np.maximum(a[:, 0], a[:, 1]), (a[:, 0] + a[:, 1]) / math.sqrt(2))
    assert np.max(np.abs(n.evaluate(v) - ref)) <= 1e-15


@pytest.mark.parametrize("norm", ALL, ids=lambda n: n.label)
def test_norm_axioms(norm):
    rng = np.random.default_rng(11)
    u = rng.normal(size=(1000, 2)) * rng.uniform(0.01, 10, size=(1000, 1))
    v = rng.normal(size=(1000, 2))
    nu, nv = norm.evaluate(u), norm.evaluate(v)
    assert np.all(norm.evaluate(u + v) <= nu + nv + 1e-12)
    assert np.max(np.abs(norm.evaluate(2 * u) - 2 * nu)) <= 1e-12 * np.max(nu)
    assert np.max(np.abs(norm.evaluate(-u) - nu)) == 0.0
    assert np.all(nu > 0)


@pytest.mark.parametrize("name", ZOO)
def test_sphere_points_are_unit(name):
    norm = builtin_norm(name)
    ang = np.arange(360) * (2 * math.pi / 360)
    pts = sphere_points(norm, ang)
    assert np.max(np.abs(norm.evaluate(pts) - 1.0)) <= 1e-12
    # positive multiple of (cos, sin)
    assert np.allclose(np.arctan2(pts[:, 1], pts[:, 0]) % (2 * math.pi), ang, atol=1e-12)


def test_sphere_point_examples():
    assert sphere_point(builtin_norm("euclid"), 0.0).coords == pytest.approx((1.0, 0.0), abs=1e-15)
    assert sphere_point(builtin_norm("linf"), math.pi / 4).coords == pytest.approx((1.0, 1.0), abs=1e-15)
    assert sphere_point(builtin_norm("l1"), math.pi / 2).coords == pytest.approx((0.0, 1.0), abs=1e-15)
    assert sphere_point(builtin_norm("l1"), -math.pi / 2).angle == pytest.approx(3 * math.pi / 2)


def test_polygon_square_and_diamond():
    rng = np.random.default_rng(5)
    v = rng.normal(size=(100, 2))
    square = polygon_norm([(1, 1), (-1, 1), (-1, -1), (1, -1)])
    diamond = polygon_norm([(1, 0), (0, 1), (-1, 0), (0, -1)])
    assert np.max(np.abs(square.evaluate(v) - np.max(np.abs(v), axis=1))) <= 1e-12
    assert np.max(np.abs(diamond.evaluate(v) - np.sum(np.abs(v), axis=1))) <= 1e-12


def test_hexagon_is_linf_l1():
    hexagon = polygon_norm(HEXAGON_VERTICES)
    radon = piecewise_quadrant("linf", "l1")
    v = np.random.default_rng(6).normal(size=(1000, 2))
    assert hexagon.evaluate((1, 1)) == 1.0
    assert np.max(np.abs(hexagon.evaluate(v) - radon.evaluate(v))) <= 1e-12


def test_polygon_vertex_order_irrelevant():
    shuffled = [HEXAGON_VERTICES[i] for i in (3, 0, 5, 1, 4, 2)]
    assert polygon_norm(shuffled) == polygon_norm(HEXAGON_VERTICES)


def test_polygon_validation_errors():
    with pytest.raises(NonSymmetricVertices):
        polygon_norm([(1, 0), (0, 1), (-1, 0), (0, -2)])
    with pytest.raises(NonConvexVertices):
        polygon_norm([(2, 0), (1, 1), (0.2, 0.2), (-1, 1), (-2, 0), (-1, -1), (-0.2, -0.2), (1, -1)])
    with pytest.raises(OriginNotInterior):
        polygon_norm([(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)])
    with pytest.raises(NonConvexVertices):
        polygon_norm([(1, 0), (-1, 0), (2, 0), (-2, 0)])
    with pytest.raises(ValidationError):
        polygon_norm([(1, 0), (-1, 0)])


def test_parse_examples():
    assert parse_norm_spec("kind=pnorm p=2").evaluate((3, 4)) == pytest.approx(5.0, abs=1e-15)
    sq = parse_norm_spec("kind=max_functionals rows=[(1,0),(0,1),(0.7071067811865475,0.7071067811865475)]")
    assert sq.evaluate((1, 1)) == pytest.approx(math.sqrt(2))
    assert sq.rows == builtin_norm("sqrt2max").rows
    radon = parse_norm_spec("kind=piecewise_quadrant pos=linf neg=l1")
    assert radon.evaluate((-0.5, 0.5)) == 1.0
    multi = parse_norm_spec("# comment\nkind=polygon\n  vertices=[(1,0), (1,1), (0,1),\t(-1,0),(-1,-1),(0,-1)]  # tail\n")
    assert multi == polygon_norm(HEXAGON_VERTICES)
    assert parse_norm_spec("kind=pnorm p=inf").p == math.inf


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("kind=pnorm p=abc", 1, 14),
        ("kind=pnorm\np=0.5", 2, 3),
        ("kind=cube", 1, 6),
        ("kind=polygon\nvertices=[(1,0),(0,1)", 2, 1),
        ("p=3", 1, 1),
        ("kind=pnorm p=3 vertices=[(1,0)]", 1, 16),
        ("kind=euclid colour=red", 1, 13),
        ("kind=piecewise_quadrant pos=linf neg=l7", 1, 38),
    ],
)
def test_parse_errors_carry_location(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_norm_spec(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_parse_polygon_delegates_validation():
    with pytest.raises(NonSymmetricVertices):
        parse_norm_spec("kind=polygon vertices=[(1,0),(0,1),(-1,0),(0,-3)]")


@pytest.mark.parametrize("norm", ALL, ids=lambda n: n.label)
def test_serialize_round_trip(norm):
    text = serialize_norm(norm)
    again = parse_norm_spec(text)
    assert again == norm
    assert serialize_norm(again) == text


def test_serialize_is_canonical():
    assert serialize_norm(builtin_norm("linf")) == "kind=pnorm\np=inf\n"
    assert serialize_norm(builtin_norm("hexagon")).startswith("kind=polygon\nvertices=[(1,0),(1,1),(0,1)")


def test_builtin_aliases():
    assert builtin_norm("lp:4") == builtin_norm("l4").__class__("pnorm", p=4.0, label="lp:4")
    assert builtin_norm("l10").p == 10.0
    with pytest.raises(KeyError):
        builtin_norm("l0.5")
    with pytest.raises(KeyError):
        builtin_norm("octagon")


def test_resolve_norm_inline_and_file(tmp_path):
    assert resolve_norm("kind=euclid").kind == "euclid"
    path = tmp_path / "n.txt"
    path.write_text("kind=polygon vertices=[(1,1),(-1,1),(-1,-1),(1,-1)]\n")
    assert resolve_norm(str(path)).evaluate((0.5, -2)) == 2.0
    with pytest.raises(OSError):
        resolve_norm(str(tmp_path / "missing.txt"))


def test_max_functionals_rejects_empty():
    with pytest.raises(ValidationError):
        max_functionals([])
