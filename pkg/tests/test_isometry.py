import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigidity import corpus
from rigidity.constructions import step5_pair
from rigidity.errors import InvalidDomain, SampleCountTooSmall, UnpairedComponent
from rigidity.geometry import BoundaryPoint
from rigidity.isometry import (
    BoundaryCorrespondence,
    ComponentMap,
    Verdict,
    boundary_samples,
    check_intrinsic_isometry,
    check_local_isometry,
    check_local_isometry_ladder,
    collinearity_probe,
    find_congruence,
    ladder_epsilons,
    tau_iso,
)


def test_identity_passes():
    d = corpus.smoothed_l()
    f = BoundaryCorrespondence.identity(d)
    assert check_intrinsic_isometry(d, d, f)
    rep = check_local_isometry(d, d, f, 0.5, n=64)
    assert rep.verdict is Verdict.PASS
    assert rep.max_deviation == 0.0
    assert rep.n_pairs > 0


def test_different_lengths_fail_intrinsic_check():
    U, V = corpus.unit_disk(), corpus.unit_disk(radius=1.1)
    assert not check_intrinsic_isometry(U, V, BoundaryCorrespondence.identity(U))


def test_unpaired_components():
    U = corpus.annulus()
    with pytest.raises(UnpairedComponent):
        check_intrinsic_isometry(U, U, BoundaryCorrespondence((ComponentMap(0, 0),)))


def test_rotated_copy_with_shifted_start_passes():
    U = corpus.smoothed_l()
    V = U.transformed(1.1, (3.0, -1.0))
    f = BoundaryCorrespondence.identity(U)
    ladder = check_local_isometry_ladder(U, V, f, n=64)
    assert ladder.passed
    assert ladder.max_deviation <= 1e-8 * U.diameter


def test_reflected_copy_needs_reversed_map():
    U = corpus.smoothed_l()
    V = U.transformed(0.3, (1.0, 2.0), reflect=True)
    L = U.components[0].length
    f = BoundaryCorrespondence((ComponentMap(0, 0, -1, L),))
    assert check_local_isometry_ladder(U, V, f, n=64).passed


def test_shifted_map_fails():
    U = corpus.smoothed_l()
    f = BoundaryCorrespondence((ComponentMap(0, 0, 1, 0.4),))
    rep = check_local_isometry(U, U, f, ladder_epsilons(U)[-1], n=64)
    assert rep.verdict is Verdict.FAIL
    assert rep.max_deviation > rep.tau_iso
    assert rep.worst_pair is not None


def test_report_json_shape():
    d = corpus.unit_square()
    rep = check_local_isometry(d, d, BoundaryCorrespondence.identity(d), 0.5, n=16)
    obj = rep.to_json()
    assert set(obj) == {"verdict", "epsilon", "max_deviation", "worst_pair", "n_pairs", "tau_iso"}
    assert set(obj["worst_pair"]) == {"s_u", "s_v"}


def test_ladder_needs_enough_samples():
    d = corpus.unit_square()
    with pytest.raises(SampleCountTooSmall):
        check_local_isometry_ladder(d, d, BoundaryCorrespondence.identity(d), n=32)


def test_samples_are_seeded():
    d = corpus.stadium()
    assert boundary_samples(d, 8, 3) == boundary_samples(d, 8, 3)
    assert boundary_samples(d, 8, 3) != boundary_samples(d, 8, 4)


def test_tau_iso_floor():
    d = corpus.unit_square()
    assert tau_iso(d, d) == pytest.approx(max(1e-7 * d.diameter, 6 * d.tau_flat))


def test_correspondence_json_round_trip():
    f = BoundaryCorrespondence((ComponentMap(0, 1, -1, 0.25), ComponentMap(1, 0, 1, 2.0)))
    assert BoundaryCorrespondence.from_json(f.to_json()) == f
    with pytest.raises(InvalidDomain):
        BoundaryCorrespondence.from_json({"maps": [{"target": 0}]})


@settings(max_examples=25, deadline=None)
@given(orient=st.sampled_from([1, -1]), offset=st.floats(0.0, 7.0), s=st.floats(0.0, 7.9))
def test_inverse_undoes_map(orient, offset, s):
    d = corpus.l_shape()
    L = d.components[0].length
    s = s % L
    f = BoundaryCorrespondence((ComponentMap(0, 0, orient, offset),))
    back = f.inverse(d).apply(d, f.apply(d, BoundaryPoint(0, s)))
    assert min(abs(back.s - s), L - abs(back.s - s)) <= 1e-12


@settings(max_examples=8, deadline=None)
@given(angle=st.floats(-math.pi, math.pi), tx=st.floats(-3, 3), ty=st.floats(-3, 3), reflect=st.booleans())
def test_congruence_recovers_motion(angle, tx, ty, reflect):
    U = corpus.smoothed_l()
    V = U.transformed(angle, (tx, ty), reflect)
    res = find_congruence(U, V, m=256)
    assert res.found
    assert res.motion.reflect == reflect
    pts = U.components[0].points(np.linspace(0, 5, 7))
    img = res.motion.apply(pts)
    # images lie on V's boundary
    for p in img:
        assert V.locate_point(p, 1e-6) is not None


def test_congruence_with_itself():
    U = corpus.stadium()
    res = find_congruence(U, U)
    assert res.found and res.residual <= 1e-9


def test_congruence_detects_different_shapes():
    res = find_congruence(corpus.stadium(), corpus.unit_disk(radius=(4 + 2 * math.pi) / (2 * math.pi)))
    assert not res.found
    assert res.residual > 0.01


def test_congruence_open_curves():
    pair = step5_pair()
    res = find_congruence(pair.U, pair.U.transformed(0.4, (1, 1)))
    assert res.found


def test_collinearity_probe_flags_corrupted_map():
    pair = step5_pair()
    w = BoundaryPoint(0, pair.U.components[0].offsets[1] + 0.5)
    good = collinearity_probe(pair.U, pair.V, pair.f, w, 0.8)
    assert good.n_pairs > 0 and good.ok
    L = pair.U.components[0].length
    bad_f = BoundaryCorrespondence((ComponentMap(0, 0, 1, 0.05 * L),))
    bad = collinearity_probe(pair.U, pair.V, bad_f, w, 0.8)
    assert not bad.ok
