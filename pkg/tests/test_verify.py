import json
import math

import numpy as np
import pytest

from heinzconst.birkhoff import companion_arcs_batch, defect_batch
from heinzconst.constants import ConstantKind, GridParams, heinz_mean
from heinzconst.normed_plane import HEXAGON_VERTICES, ZOO, builtin_norm, sphere_points
from heinzconst.verify import (
    CATALOG,
    ESTIMATE_SLACK,
    PAIR_SLACK,
    SingularMap,
    _check,
    hexagon_family_check,
    hexagon_image,
    random_affine_maps,
    random_symmetric_polygon,
    run_checks,
)

SQRT2 = math.sqrt(2)
COARSE = GridParams(theta_count=256, psi_scan=256, refine_levels=2)


@pytest.fixture(scope="module")
def euclid_report():
    return run_checks(builtin_norm("euclid"), [0.25])


@pytest.fixture(scope="module")
def linf_report():
    return run_checks(builtin_norm("linf"), [0.5])


def test_check_margins():
    le = _check("a", 0.5, "", 1.0, 2.0, "LE", 0.0)
    assert le.margin == 1.0 and le.passed
    ge = _check("b", 0.5, "", 1.0, 2.0, "GE", 0.5)
    assert ge.margin == -1.0 and not ge.passed
    eq = _check("c", 0.5, "", 1.0, 1.0005, "EQ", 0.0, tol=1e-3)
    assert eq.margin == pytest.approx(5e-4) and eq.passed
    slack = _check("d", 0.5, "", 1.0 + 1e-7, 1.0, "LE", PAIR_SLACK)
    assert slack.margin < 0 and slack.passed
    skipped = _check("e", 0.5, "", 9.0, 1.0, "LE", 0.0, applicable=False)
    assert skipped.passed and not skipped.applicable


def test_catalog_is_complete(euclid_report):
    names = [c.name for c in euclid_report.checks]
    assert names == list(CATALOG)
    multi = run_checks(builtin_norm("hexagon"), [0.0, 0.5], COARSE)
    for nu in (0.0, 0.5):
        assert sorted(c.name for c in multi.checks if c.nu == nu) == sorted(CATALOG)


def test_euclid_report(euclid_report):
    assert euclid_report.passed
    table = {c.kind.name: c.value for c in euclid_report.constants}
    for key in ("H", "J_B", "A2_B"):
        assert abs(table[key] - SQRT2) <= 1e-3
    assert euclid_report.radon


def test_linf_report(linf_report):
    assert linf_report.passed
    chain = next(c for c in linf_report.checks if c.name == "chain")
    assert abs(chain.margin) <= 1e-5  # 2 = 2 = 2
    ns = next(c for c in linf_report.checks if c.name == "nonsquare_consistency")
    assert ns.lhs == ns.rhs == 1.0
    assert not linf_report.radon
    radon = next(c for c in linf_report.checks if c.name == "radon_upper")
    assert not radon.applicable and radon.passed


def test_hexagon_radon_upper_is_tight():
    report = run_checks(builtin_norm("hexagon"), [0.5])
    radon = next(c for c in report.checks if c.name == "radon_upper")
    assert radon.applicable and radon.passed
    assert abs(radon.margin) <= ESTIMATE_SLACK


def test_failed_check_is_reported_not_raised():
    report = run_checks(builtin_norm("euclid"), [0.5], COARSE, include=("bounds_1_2",))
    assert report.passed
    bad = _check("bounds_1_2", 0.5, "", abs(2.5 - 1.5), 0.5, "LE", PAIR_SLACK)
    report.checks.append(bad)
    assert not report.passed and report.failures() == [bad]


def test_report_json_is_deterministic():
    a = run_checks(builtin_norm("sqrt2max"), [0.25], COARSE).to_json()
    b = run_checks(builtin_norm("sqrt2max"), [0.25], COARSE).to_json()
    assert a == b
    data = json.loads(a)
    assert list(data) == ["norm", "spec", "nus", "grid", "passed", "radon", "constants", "checks"]
    assert data["spec"].startswith("kind=max_functionals")


def test_run_checks_rejects_bad_nu():
    with pytest.raises(ValueError):
        run_checks(builtin_norm("euclid"), [1.5])
    with pytest.raises(ValueError):
        run_checks(builtin_norm("euclid"), [])


@pytest.mark.parametrize("name", ZOO)
def test_pairwise_inequalities(name):
    norm = builtin_norm(name)
    rng = np.random.default_rng(17)
    thetas = rng.uniform(0, math.pi, size=200)
    table = companion_arcs_batch(norm, thetas)
    psi = np.array([arcs[0].psi_lo + rng.uniform() * arcs[0].length for arcs in table])
    X, Y = sphere_points(norm, thetas), sphere_points(norm, psi)
    assert np.max(defect_batch(norm, X, Y)) <= 1e-9
    s, d = norm.evaluate(X + Y), norm.evaluate(X - Y)
    for nu in (0.0, 0.25, 0.5):
        h = np.array([heinz_mean(a, b, nu) for a, b in zip(s, d)])
        assert np.all(np.minimum(s, d) <= h + 1e-9)
        assert np.all(h <= (s + d) / 2 + 1e-9)
        assert np.all((h >= 1 - 1e-9) & (h <= 2 + 1e-9))


def test_hexagon_image_and_family():
    identity = hexagon_image(np.eye(2))
    assert identity.evaluate((1, 1)) == 1.0
    out = hexagon_family_check(1, 0, maps=[np.eye(2), np.diag([2.0, 1.0])])
    for _, est in out:
        assert abs(est.value - 1.5) <= 1e-3
    with pytest.raises(SingularMap):
        hexagon_image([[1, 2], [2, 4]])


def test_random_affine_maps_are_seeded_and_conditioned():
    a = random_affine_maps(20, seed=4)
    b = random_affine_maps(20, seed=4)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert all(np.linalg.cond(m) <= 10 + 1e-9 for m in a)
    for m in a:
        verts = np.array(HEXAGON_VERTICES) @ m.T
        assert np.allclose(hexagon_image(m).evaluate(verts), 1.0, atol=1e-12)
    with pytest.raises(ValueError):
        random_affine_maps(0, seed=1)


def test_random_polygons_are_valid():
    rng = np.random.default_rng(0)
    for n in (4, 8, 12, 16):
        norm = random_symmetric_polygon(rng, n)
        assert len(norm.vertices) == n
        v = np.array(norm.vertices)
        assert np.allclose(norm.evaluate(v), 1.0, atol=1e-12)
    with pytest.raises(ValueError):
        random_symmetric_polygon(rng, 7)


def test_heinz_kind_cache_shares_mirror():
    report = run_checks(builtin_norm("l4"), [0.25, 0.75], COARSE, include=("nu_symmetry",))
    kinds = {c.kind for c in report.constants}
    assert ConstantKind.heinz(0.25) in kinds and ConstantKind.heinz(0.75) in kinds
    assert report.passed
