import math

import numpy as np
import pytest

from rigidity import corpus
from rigidity.constructions import (
    cardioid_profile,
    junction_report,
    nonconvex_deformation,
    revolve_export,
    step5_pair,
)
from rigidity.constructions.cardioid import cardioid_equation, circle_equation
from rigidity.constructions.deformation import bump
from rigidity.errors import ClipTooSmall, ConvexDomain
from rigidity.geometry import is_convex, is_smooth, junction_kinks, validate
from rigidity.isometry import check_intrinsic_isometry


@pytest.fixture(scope="module")
def step5():
    return step5_pair(1.0)


def test_step5_quarter_circle_length(step5):
    V = step5.V.components[0]
    quarter = V.pieces[2]
    assert quarter.length == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(quarter.end, [-2 / math.pi, 2 / math.pi], atol=1e-15)
    assert step5.info["P"] == pytest.approx([-0.6366198, 0.6366198], abs=1e-7)


def test_step5_domains_are_valid_and_smooth(step5):
    for d in (step5.U, step5.V):
        assert validate(d).ok
        assert is_smooth(d)
    assert not junction_kinks(step5.V)
    assert is_convex(step5.U)
    assert check_intrinsic_isometry(step5.U, step5.V, step5.f)


def test_step5_moved_branch_is_rigid_copy(step5):
    # the last piece of V is the image of U's left arc under T
    U_left, V_rest = step5.U.components[0].pieces[-1], step5.V.components[0].pieces[-1]
    c = 2 / math.pi
    s = np.linspace(0, U_left.length, 9)
    x = U_left.point(s)
    image = np.column_stack([x[:, 1] - c, -x[:, 0] - 1 + c])
    np.testing.assert_allclose(V_rest.point(s), image, atol=1e-13)


def test_step5_scales_with_l():
    pair = step5_pair(2.5)
    assert pair.V.components[0].pieces[2].length == pytest.approx(2.5)
    assert validate(pair.V).ok


def test_step5_clip_too_small():
    with pytest.raises(ClipTooSmall):
        step5_pair(1.0, half_width=1.5)
    with pytest.raises(ValueError):
        step5_pair(-1.0)


def test_bump_shape():
    t = np.linspace(0, 1, 101)
    b = bump(t, 0.2)
    assert b[0] == 0.0 and abs(b[-1]) < 1e-15
    # the lift parameter shifts the profile by a positive multiple of -c
    assert np.all(bump(t, 0.3) <= bump(t, 0.2) + 1e-15)


def test_deformation_zero_amplitude():
    U = corpus.smoothed_l()
    pair = nonconvex_deformation(U, 0.0)
    assert pair.V is U


def test_deformation_on_smoothed_l():
    U = corpus.smoothed_l()
    pair = nonconvex_deformation(U, 0.02 * U.diameter)
    V = pair.V
    assert validate(V).ok
    assert is_smooth(V)
    assert pair.info["length_error"] < 1e-12
    assert check_intrinsic_isometry(U, V, pair.f)
    assert pair.info["amplitude"] <= 0.02 * U.diameter
    # V differs from U near the contact point only
    diff = np.abs(V.components[0].points(np.linspace(0, 1, 5)) - U.components[0].points(np.linspace(0, 1, 5)))
    assert diff.max() < 1e-12


def test_deformation_rejects_convex():
    with pytest.raises(ConvexDomain):
        nonconvex_deformation(corpus.unit_disk(), 0.1)


def test_cardioid_equations_at_known_points():
    assert cardioid_equation(0.0, -2.0) == 0.0
    x, z = math.sqrt(5) / 9, 2 / 9
    assert x * x + z * z == pytest.approx(1 / 9, abs=1e-16)
    assert abs(cardioid_equation(x, z)) <= 1e-12
    assert abs(circle_equation(x, z)) <= 1e-12


def test_cardioid_profile_points_lie_on_curves():
    prof = cardioid_profile(1e-5)
    poly, arc = prof.pieces
    assert np.max(np.abs(cardioid_equation(poly.points[:, 0], poly.points[:, 1]))) < 1e-14
    pts = arc.point(np.linspace(0, arc.length, 11))
    assert np.max(np.abs(circle_equation(pts[:, 0], pts[:, 1]))) < 1e-14
    np.testing.assert_allclose(arc.end, [0.0, 1 - math.sqrt(2 / 3)], atol=1e-15)
    assert not prof.closed


def test_cardioid_junction_slopes():
    rep = junction_report()
    slope = math.sqrt(5) / 7
    assert rep.cardioid_slope == pytest.approx(slope, abs=1e-9)
    assert rep.circle_slope == pytest.approx(slope, abs=1e-9)
    assert rep.gap < 1e-15


def test_cardioid_implicit_slope_oracle():
    # dz/dx = -F_x / F_z for F = x² + z² - r + z
    x, z = math.sqrt(5) / 9, 2 / 9
    r = math.hypot(x, z)
    fx, fz = 2 * x - x / r, 2 * z - z / r + 1
    assert -fx / fz == pytest.approx(math.sqrt(5) / 7, abs=1e-14)


def test_cardioid_flattening_tolerance():
    coarse, fine = cardioid_profile(1e-3), cardioid_profile(1e-6)
    assert len(fine.pieces[0].points) > len(coarse.pieces[0].points)


def test_revolve_export(tmp_path):
    path = tmp_path / "s.stl"
    n = revolve_export(cardioid_profile(1e-3), path, segments=16)
    text = path.read_text().splitlines()
    assert text[0] == "solid profile" and text[-1] == "endsolid profile"
    assert sum(1 for line in text if line.strip().startswith("facet normal")) == n
    verts = np.array([[float(v) for v in line.split()[1:]] for line in text if line.strip().startswith("vertex")])
    # every vertex sits on the surface of revolution of the profile
    r = np.hypot(verts[:, 0], verts[:, 1])
    on_cardioid = np.abs(cardioid_equation(r, verts[:, 2])) < 1e-8
    with np.errstate(invalid="ignore"):
        on_circle = np.abs(circle_equation(r, verts[:, 2])) < 1e-8
    assert np.all(on_cardioid | on_circle)
