"""Acceptance criteria, one test per criterion at the stated tolerance.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from oracles import GridOracle, random_rectilinear
from rigidity import corpus
from rigidity.constructions import (
    cardioid_profile,
    junction_report,
    nonconvex_deformation,
    step5_pair,
)
from rigidity.constructions.cardioid import cardioid_equation, circle_equation
from rigidity.constructions.lemma41 import (
    ONES,
    convexity_defect,
    jacobian,
    lemma41_map,
    lemma41_solve,
    random_problem,
    residual,
)
from rigidity.errors import ConvexDomain
from rigidity.geometry import BoundaryPoint, polygon_domain
from rigidity.isometry import (
    boundary_samples,
    check_intrinsic_isometry,
    check_local_isometry_ladder,
    find_congruence,
    tau_iso,
)
from rigidity.metric import flattening_bound, geodesic, metric_matrix, metric_sample


@pytest.fixture(scope="module")
def lemma_problems():
    rng = np.random.default_rng(2024)
    return [random_problem(rng) for _ in range(10)]


def test_c1_convex_domains_have_chordal_metric(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst, ok = 0.0, True
    domains = corpus.convex_corpus()
    assert len(domains) == 20
    for name, d in domains:
        pts = boundary_samples(d, 32, seed=int(rng.integers(1 << 30)))
        sample = metric_sample(d, pts)
        xy = np.array([d.point_at(p) for p in pts])
        i = rng.integers(0, len(pts), 64)
        j = (i + rng.integers(1, len(pts), 64)) % len(pts)
        err = np.abs(sample.D[i, j] - np.linalg.norm(xy[i] - xy[j], axis=1)).max()
        tol = max(1e-6 * d.diameter, flattening_bound(d))
        worst = max(worst, err / d.diameter)
        ok &= bool(err <= tol)
    runtime = time.perf_counter() - t0
    passed = ok and runtime < 10
    record("C1", passed, f"max |rho - chord| / diam = {worst:.2e} over 20 domains, {runtime:.1f} s")
    assert ok
    assert runtime < 10


def test_c2_geodesics_match_grid_oracle(record):
    t0 = time.perf_counter()
    lshape = geodesic(corpus.l_shape(), (2, 0), (0, 2)).length
    lshape_ok = abs(lshape - 2 * math.sqrt(2)) <= 1e-9
    rng = np.random.default_rng(7)
    worst_coarse, worst_fine = 0.0, 0.0
    for _ in range(10):
        v = random_rectilinear(rng, max_vertices=12)
        assert len(v) <= 12
        d = polygon_domain(v)
        comp = d.components[0]
        s = np.arange(0.0, comp.length, 0.25)
        picks = rng.choice(len(s), size=(5, 2), replace=True)
        coarse, fine = GridOracle(v, 0.25), GridOracle(v, 0.125)
        for i, j in picks:
            if i == j:
                continue
            p, q = comp.points(s[i])[0], comp.points(s[j])[0]
            exact = geodesic(d, p, q).length
            worst_coarse = max(worst_coarse, abs(coarse.distance(p, q) - exact) / exact)
            worst_fine = max(worst_fine, abs(fine.distance(p, q) - exact) / exact)
    runtime = time.perf_counter() - t0
    ok = lshape_ok and worst_fine <= 1e-3
    record("C2", ok and runtime < 60,
           f"L-shape {lshape:.15f}; grid rel. error {worst_coarse:.1e} (h=0.25) -> {worst_fine:.1e} (h=0.125),"
           f" {runtime:.1f} s")
    assert lshape_ok
    assert worst_fine <= 1e-3
    assert runtime < 60


def test_c3_identity_solves_the_system(lemma_problems, record):
    t0 = time.perf_counter()
    worst = max(float(np.linalg.norm(residual(p, ONES))) for p in lemma_problems)
    runtime = time.perf_counter() - t0
    record("C3", worst <= 1e-10 and runtime < 5, f"max residual at (1,1,1,1) = {worst:.1e}, {runtime:.1f} s")
    assert worst <= 1e-10
    assert runtime < 5


def test_c4_jacobian_rank_and_finite_differences(lemma_problems, record):
    ranks, worst = [], 0.0
    h = 1e-6
    for prob in lemma_problems:
        rep = jacobian(prob)
        ranks.append(int(np.sum(rep.singular_values > 1e-8 * rep.singular_values[0])))
        fd = np.column_stack([(residual(prob, ONES + h * e) - residual(prob, ONES - h * e)) / (2 * h)
                              for e in np.eye(4)])
        worst = max(worst, float(np.max(np.abs(fd - rep.N) / np.abs(rep.N))))
    ok = all(r == 3 for r in ranks) and worst <= 1e-5
    record("C4", ok, f"ranks {sorted(set(ranks))}, max entrywise FD rel. difference {worst:.1e}")
    assert all(r == 3 for r in ranks)
    assert worst <= 1e-5


def test_c5_continuation_solutions(lemma_problems, record):
    t0 = time.perf_counter()
    worst = {"residual": 0.0, "endpoints": 0.0, "straightness": 0.0, "lengths": 0.0, "sup norm": 0.0}
    failures = []
    for i, prob in enumerate(lemma_problems):
        sol = lemma41_solve(prob, 1e-2, eps=1e-3)
        a = prob.a_star
        end_err = max(abs(sol.f2(a) - prob.f1(a)), abs(sol.f2.d1(a) - prob.f1.d1(a)),
                      abs(sol.f2(0.0)), abs(sol.f2.d1(0.0)))
        rep = lemma41_map(prob.f1, sol.f2)
        values = {"residual": sol.residual_norm, "endpoints": end_err, "straightness": rep.max_straightness,
                  "lengths": rep.max_length_error, "sup norm": sol.sup_norm_diff}
        worst = {k: max(worst[k], v) for k, v in values.items()}
        ok = (not np.allclose(sol.k, ONES) and values["residual"] <= 1e-10 and convexity_defect(sol.f2) >= -1e-10
              and end_err <= 1e-10 and values["straightness"] <= 1e-8 and values["lengths"] <= 1e-8
              and values["sup norm"] <= 1e-3)
        if not ok:
            failures.append(i)
    runtime = time.perf_counter() - t0
    record("C5", not failures and runtime < 30,
           ", ".join(f"max {k} {v:.1e}" for k, v in worst.items()) + f"; failing problems {failures}, {runtime:.1f} s")
    assert not failures
    assert runtime < 30


def test_c6_step5_pair(record):
    t0 = time.perf_counter()
    pair = step5_pair(1.0)
    quarter = pair.V.components[0].pieces[2].length
    intrinsic = check_intrinsic_isometry(pair.U, pair.V, pair.f) and abs(quarter - 1.0) <= 1e-15
    ladder = check_local_isometry_ladder(pair.U, pair.V, pair.f)
    tol = tau_iso(pair.U, pair.V)
    cong = find_congruence(pair.U, pair.V, m=512)
    diam = max(pair.U.diameter, pair.V.diameter)
    runtime = time.perf_counter() - t0
    ok = intrinsic and ladder.passed and ladder.max_deviation <= tol and not cong.found \
        and cong.residual > 0.01 * diam and runtime < 120
    record("C6", ok, f"intrinsic {intrinsic}, ladder max deviation {ladder.max_deviation:.1e} <= {tol:.1e},"
                     f" congruence residual {cong.residual:.3f} > {0.01 * diam:.3f}, {runtime:.1f} s")
    assert intrinsic
    assert ladder.passed and ladder.max_deviation <= tol
    assert not cong.found and cong.residual > 0.01 * diam
    assert runtime < 120


def test_c7_nonconvex_deformation(record):
    t0 = time.perf_counter()
    U = corpus.smoothed_l()
    pair = nonconvex_deformation(U, 0.02 * U.diameter)
    intrinsic = check_intrinsic_isometry(pair.U, pair.V, pair.f)
    ladder = check_local_isometry_ladder(pair.U, pair.V, pair.f)
    cong = find_congruence(pair.U, pair.V, m=512)
    try:
        nonconvex_deformation(corpus.unit_disk(), 0.1)
        convex_rejected = False
    except ConvexDomain:
        convex_rejected = True
    runtime = time.perf_counter() - t0
    margin = 10 * 1e-6 * max(pair.U.diameter, pair.V.diameter)
    ok = intrinsic and ladder.passed and not cong.found and cong.residual > margin and convex_rejected \
        and runtime < 120
    record("C7", ok, f"amplitude {pair.info['amplitude']:.2e}, ladder max deviation {ladder.max_deviation:.1e},"
                     f" congruence residual {cong.residual:.1e} > {margin:.1e} (not found), convex input rejected"
                     f" {convex_rejected}, {runtime:.1f} s")
    assert intrinsic and ladder.passed
    assert not cong.found and cong.residual > margin
    assert convex_rejected
    assert runtime < 120


def test_c8_cardioid_junction(record):
    t0 = time.perf_counter()
    profile = cardioid_profile(2e-5)
    rep = junction_report(profile)
    x, z = math.sqrt(5) / 9, 2 / 9
    eq = max(abs(cardioid_equation(x, z)), abs(circle_equation(x, z)))
    on_profile = float(np.linalg.norm(profile.pieces[0].end - np.array([x, z])))
    slope = math.sqrt(5) / 7
    slope_err = max(abs(rep.cardioid_slope - slope), abs(rep.circle_slope - slope))
    runtime = time.perf_counter() - t0
    ok = eq <= 1e-12 and on_profile <= 1e-12 and slope_err <= 1e-9 and runtime < 1
    record("C8", ok, f"equation residual {eq:.1e}, slope error {slope_err:.1e}, {runtime:.2f} s")
    assert eq <= 1e-12 and on_profile <= 1e-12
    assert slope_err <= 1e-9
    assert runtime < 1


def _corpus_samples():
    rng = np.random.default_rng(3)
    out = [(name, corpus.named(name)) for name in corpus.NAMES]
    out += corpus.convex_corpus()
    pair = step5_pair()
    out += [("step5 U", pair.U), ("step5 V", pair.V)]
    deformed = nonconvex_deformation(corpus.smoothed_l(), 0.02 * corpus.smoothed_l().diameter)
    out += [("deformed L", deformed.V)]
    out += [(f"rectilinear{k}", polygon_domain(random_rectilinear(rng))) for k in range(5)]
    return out


def test_c9_metric_axioms(record):
    worst_tri, worst_low, bad = 0.0, 0.0, []
    for name, d in _corpus_samples():
        for n, offset in ((12, 0.0), (9, 0.37)):
            sample = metric_matrix(d, n, offset, strict=False)
            D = sample.D
            xy = np.array([d.point_at(p) for p in sample.points])
            chord = np.linalg.norm(xy[:, None] - xy[None], axis=-1)
            tri = float((D[:, None, :] - D[:, :, None] - D[None, :, :]).max()) / d.diameter
            low = float((chord - D).max()) / d.diameter
            worst_tri, worst_low = max(worst_tri, tri), max(worst_low, low)
            if not (np.array_equal(D, D.T) and np.all(np.diag(D) == 0) and tri <= 1e-8 and low <= 1e-12):
                bad.append(name)
    record("C9", not bad, f"symmetric, zero diagonal; worst triangle excess {worst_tri:.1e}·diam,"
                          f" worst chord excess {worst_low:.1e}·diam; failures {bad}")
    assert not bad
