"""Equal-length convex reshaping of a convex graph with straight pieces.

Given a convex increasing ``f1`` on ``[0, a*]`` whose graph contains straight
segments, find ``k = (k1, k2, k3, k4)`` such that the function ``f2`` built by
re-weighting ``f1`` on the four intervals cut by the knots ``x1 < x2 < x3``
has the same end value, end slope and arc length as ``f1``.  ``k = (1,1,1,1)``
always solves the three equations; the solver continues along the one-dimensional
solution curve to a nearby ``k != (1,1,1,1)``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import ArcLengthMismatch, ConvexityLost, NoConvergence, RankDeficient, RankUncertainWarning
from .quadrature import QUAD_TOL, quadrature

RES_TOL = 1e-10
RANK_TOL = 1e-8
TABLE_SIZE = 2048
ONES = np.ones(4)


def _arc_primitive(p):
    return 0.5 * (p * np.sqrt(1.0 + p * p) + np.arcsinh(p))


@dataclass(frozen=True, eq=False)
class PiecewiseQuadratic:
    """C^1 function on ``[0, a*]`` with f(0) = f'(0) = 0 and piecewise-constant second derivative."""

    breaks: np.ndarray
    curv: np.ndarray
    _d: np.ndarray = field(init=False, repr=False)
    _v: np.ndarray = field(init=False, repr=False)
    _s: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        b = np.asarray(self.breaks, dtype=float)
        c = np.asarray(self.curv, dtype=float)
        if len(b) != len(c) + 1 or b[0] != 0.0 or np.any(np.diff(b) <= 0):
            raise ValueError("breaks must start at 0, increase, and bracket every curvature value")
        h = np.diff(b)
        d = np.concatenate([[0.0], np.cumsum(c * h)])
        v = np.concatenate([[0.0], np.cumsum(d[:-1] * h + 0.5 * c * h * h)])
        s = np.concatenate([[0.0], np.cumsum(self._piece_arc(d[:-1], c, h))])
        for name, val in (("breaks", b), ("curv", c), ("_d", d), ("_v", v), ("_s", s)):
            object.__setattr__(self, name, val)

    @staticmethod
    def _piece_arc(d0, c, h):
        d0, c, h = np.broadcast_arrays(d0, c, h)
        flat = np.abs(c) < 1e-300
        safe_c = np.where(flat, 1.0, c)
        curved = (_arc_primitive(d0 + c * h) - _arc_primitive(d0)) / safe_c
        return np.where(flat, np.sqrt(1.0 + d0 * d0) * h, curved)

    @property
    def a_star(self) -> float:
        return float(self.breaks[-1])

    def _locate(self, x):
        x = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(self.breaks, x, side="right") - 1, 0, len(self.curv) - 1)
        return i, x - self.breaks[i]

    def __call__(self, x):
        i, t = self._locate(x)
        return self._v[i] + self._d[i] * t + 0.5 * self.curv[i] * t * t

    def d1(self, x):
        i, t = self._locate(x)
        return self._d[i] + self.curv[i] * t

    def d2(self, x):
        i, _ = self._locate(x)
        return self.curv[i]

    def arc_length(self, x):
        """Arc length of the graph over ``[0, x]`` (closed form)."""
        i, t = self._locate(x)
        return self._s[i] + self._piece_arc(self._d[i], self.curv[i], t)

    def inverse_arc_length(self, s):
        """Abscissa at which the graph has arc length ``s`` (monotone Newton from a bracketed guess)."""
        s = np.asarray(s, dtype=float)
        x = np.interp(s, self._s, self.breaks)
        for _ in range(30):
            g = self.arc_length(x) - s
            step = g / np.sqrt(1.0 + self.d1(x) ** 2)
            x = np.clip(x - step, 0.0, self.a_star)
            if np.max(np.abs(step), initial=0.0) < 1e-15 * max(1.0, self.a_star):
                break
        return x

    def segments(self) -> list[tuple[float, float]]:
        """Maximal straight pieces of the graph as abscissa intervals."""
        out = []
        for i, c in enumerate(self.curv):
            if c == 0.0:
                lo, hi = self.breaks[i], self.breaks[i + 1]
                if out and out[-1][1] == lo:
                    out[-1] = (out[-1][0], hi)
                else:
                    out.append((float(lo), float(hi)))
        return out

    def to_json(self) -> dict:
        return {"breaks": self.breaks.tolist(), "curv": self.curv.tolist()}


def fillet_model(pieces) -> PiecewiseQuadratic:
    """Build an f1 model from ``(length, curvature)`` pairs; curvature 0 marks a straight segment."""
    lengths = np.array([p[0] for p in pieces], dtype=float)
    return PiecewiseQuadratic(np.concatenate([[0.0], np.cumsum(lengths)]), np.array([p[1] for p in pieces]))


def condition_46(f1: PiecewiseQuadratic, x3: float) -> bool:
    return f1.a_star - x3 < f1(x3) / f1.d1(x3)


def condition_47(f1: PiecewiseQuadratic, x1: float, x2: float) -> bool:
    return x2 - x1 < f1(x1) / f1.d1(x1)


def select_knots(f1: PiecewiseQuadratic) -> tuple[float, float, float]:
    """Default knots: x3 the last usable segment start, x1 the first, x2 the next one after x1."""
    a = f1.a_star
    starts = [lo for lo, _ in f1.segments() if 0.0 < lo < a and f1.d1(lo) > 0]
    top = f1.d1(a)
    x3_cands = [x for x in starts if condition_46(f1, x) and f1.d1(x) < top]
    if not x3_cands:
        raise ValueError("no segment start satisfies the far-end condition")
    x3 = max(x3_cands)
    for i, x1 in enumerate(starts):
        if x1 >= x3:
            break
        for x2 in starts[i + 1:]:
            if x2 >= x3:
                break
            if condition_47(f1, x1, x2):
                return float(x1), float(x2), float(x3)
    raise ValueError("no pair of segment starts satisfies the near-pair condition")


@dataclass(frozen=True)
class Lemma41Problem:
    f1: PiecewiseQuadratic
    x1: float
    x2: float
    x3: float

    @classmethod
    def from_model(cls, f1: PiecewiseQuadratic) -> Lemma41Problem:
        return cls(f1, *select_knots(f1))

    @property
    def a_star(self) -> float:
        return self.f1.a_star

    @property
    def knots(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    @property
    def edges(self) -> np.ndarray:
        """``x0 = 0, x1, x2, x3, x4 = a*``."""
        return np.array([0.0, self.x1, self.x2, self.x3, self.a_star])

    def problems(self) -> list[str]:
        f1, out = self.f1, []
        if not 0.0 < self.x1 < self.x2 < self.x3 < self.a_star:
            out.append("knots must satisfy 0 < x1 < x2 < x3 < a*")
            return out
        starts = [lo for lo, _ in f1.segments()]
        for name, x in (("x1", self.x1), ("x2", self.x2), ("x3", self.x3)):
            if not any(abs(x - s) <= 1e-14 * self.a_star for s in starts):
                out.append(f"{name} is not the left endpoint of a straight segment")
        if np.any(f1.curv < 0) or not np.any(f1.curv > 0):
            out.append("f1 must be convex and not affine")
        if not 0.0 < f1.d1(self.x3) < f1.d1(self.a_star):
            out.append("need 0 < f1'(x3) < f1'(a*)")
        if not condition_46(f1, self.x3):
            out.append("far-end condition a* - x3 < f1(x3)/f1'(x3) fails")
        if not condition_47(f1, self.x1, self.x2):
            out.append("near-pair condition x2 - x1 < f1(x1)/f1'(x1) fails")
        return out

    def to_json(self) -> dict:
        return {"f1": self.f1.to_json(), "knots": [self.x1, self.x2, self.x3]}


def _piece_index(prob: Lemma41Problem, x):
    return np.clip(np.searchsorted(prob.knots, np.asarray(x, dtype=float), side="right"), 0, 3)


def f2_slope(prob: Lemma41Problem, k, x):
    """f2' from the four-case display."""
    k = np.asarray(k, dtype=float)
    f1, xs = prob.f1, prob.knots
    j = _piece_index(prob, x)
    jumps = (k[:3] - k[1:]) * f1.d1(xs)
    base = np.concatenate([[0.0], np.cumsum(jumps)])
    return base[j] + k[j] * f1.d1(x)


def f2_value(prob: Lemma41Problem, k, x):
    """f2 from the four-case display."""
    k = np.asarray(k, dtype=float)
    x = np.asarray(x, dtype=float)
    f1, xs = prob.f1, prob.knots
    j = _piece_index(prob, x)
    out = k[j] * f1(x)
    for s in range(3):
        tangent = f1(xs[s]) + f1.d1(xs[s]) * (x - xs[s])
        out = out + np.where(j > s, (k[s] - k[s + 1]) * tangent, 0.0)
    return out


def f2_model(prob: Lemma41Problem, k) -> PiecewiseQuadratic:
    """f2 as a piecewise quadratic: its second derivative is ``k_{j+1} f1''`` on the j-th knot interval."""
    k = np.asarray(k, dtype=float)
    f1 = prob.f1
    mids = 0.5 * (f1.breaks[:-1] + f1.breaks[1:])
    return PiecewiseQuadratic(f1.breaks, f1.curv * k[_piece_index(prob, mids)])


def _breakpoints(prob: Lemma41Problem):
    return np.union1d(prob.f1.breaks, prob.knots)


def residual(prob: Lemma41Problem, k, tol: float = QUAD_TOL) -> np.ndarray:
    """Left-hand sides of (end value, end slope, arc length) equations, in that order."""
    k = np.asarray(k, dtype=float)
    f1, a, xs = prob.f1, prob.a_star, prob.knots
    dk = k[:3] - k[1:]
    r_value = float(np.sum(dk * (f1(xs) + f1.d1(xs) * (a - xs))) + (k[3] - 1.0) * f1(a))
    r_slope = float(np.sum(dk * f1.d1(xs)) + (k[3] - 1.0) * f1.d1(a))

    def g(t):
        return math.sqrt(1.0 + float(f1.d1(t)) ** 2) - math.sqrt(1.0 + float(f2_slope(prob, k, t)) ** 2)

    r_length = quadrature(g, 0.0, a, tol, _breakpoints(prob))
    return np.array([r_value, r_slope, r_length])


@dataclass(frozen=True)
class JacobianReport:
    N: np.ndarray
    singular_values: np.ndarray
    rank: int
    kernel: np.ndarray
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    @property
    def cumulative(self) -> np.ndarray:
        """Column partial sums of N (same rank)."""
        return np.cumsum(self.N, axis=1)

    @property
    def delta1(self) -> float:
        """Minor of the value/slope rows of the cumulative matrix over columns 3, 4."""
        return float(np.linalg.det(self.cumulative[:2, 2:4]))

    @property
    def delta2(self) -> float:
        """Minor of the value/slope rows of the cumulative matrix over columns 1, 2."""
        return float(np.linalg.det(self.cumulative[:2, 0:2]))


def jacobian(prob: Lemma41Problem, k=None, tol: float = QUAD_TOL, rank_tol: float = RANK_TOL) -> JacobianReport:
    """Analytic Jacobian of :func:`residual` with respect to k (rows in residual order)."""
    k = ONES if k is None else np.asarray(k, dtype=float)
    f1, a, xs = prob.f1, prob.a_star, prob.knots
    g = f1(xs) + f1.d1(xs) * (a - xs)
    gp = f1.d1(xs)
    N = np.zeros((3, 4))
    N[0] = np.concatenate([[g[0]], np.diff(g), [f1(a) - g[2]]])
    N[1] = np.concatenate([[gp[0]], np.diff(gp), [f1.d1(a) - gp[2]]])
    e = prob.edges
    bps = _breakpoints(prob)

    def weight(t):
        p = float(f2_slope(prob, k, t))
        return p / math.sqrt(1.0 + p * p)

    for m in range(4):
        prev = gp[m - 1] if m >= 1 else 0.0
        # d f2'/d k_m is f1'(t) - f1'(x_{m-1}) on the m-th interval and constant afterwards
        near = quadrature(lambda t: weight(t) * (float(f1.d1(t)) - prev), e[m], e[m + 1], tol, bps)
        far = 0.0
        if m < 3:
            far = (gp[m] - prev) * quadrature(weight, e[m + 1], a, tol, bps)
        N[2, m] = -(near + far)

    w1 = lambda t: float(f1.d1(t)) ** 2 / math.sqrt(1.0 + float(f1.d1(t)) ** 2)
    w2 = lambda t: float(f1.d1(t)) / math.sqrt(1.0 + float(f1.d1(t)) ** 2)
    ends = np.append(xs, a)
    u = np.array([quadrature(w1, 0.0, x, tol, bps) for x in ends])
    v = np.array([quadrature(w2, x, a, tol, bps) for x in ends])
    _, sv, vt = np.linalg.svd(N)
    rank = int(np.sum(sv > rank_tol * sv[0]))
    kernel = vt[-1]
    kernel = kernel * np.sign(kernel[np.argmax(np.abs(kernel))])
    return JacobianReport(N, sv, rank, kernel, u, v)


@dataclass(frozen=True)
class Lemma41Solution:
    problem: Lemma41Problem
    k: np.ndarray
    f2: PiecewiseQuadratic
    residual: np.ndarray
    delta: float
    sup_norm_diff: float
    phi_x: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)

    @property
    def residual_norm(self) -> float:
        return float(np.linalg.norm(self.residual))

    def to_json(self, table_size: int = TABLE_SIZE) -> dict:
        x = np.linspace(0.0, self.problem.a_star, table_size)
        f1 = self.problem.f1
        phi = np.interp(x, self.phi_x, self.phi) if table_size != len(self.phi_x) else self.phi
        return {
            "problem": self.problem.to_json(),
            "k": self.k.tolist(),
            "delta": self.delta,
            "residual": self.residual.tolist(),
            "sup_norm_diff": self.sup_norm_diff,
            "table": {"x": x.tolist(), "f1": f1(x).tolist(), "f2": self.f2(x).tolist(), "phi": phi.tolist()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def sup_norm(f1: PiecewiseQuadratic, f2: PiecewiseQuadratic, n: int = 10_000) -> float:
    x = np.union1d(np.linspace(0.0, f1.a_star, n), f1.breaks)
    return float(np.max(np.abs(f2(x) - f1(x))))


def convexity_defect(f: PiecewiseQuadratic, n: int = 10_000) -> float:
    """Most negative second difference on a uniform grid (0 for convex functions)."""
    x = np.linspace(0.0, f.a_star, n)
    y = f(x)
    return float(min(0.0, np.min(y[2:] - 2 * y[1:-1] + y[:-2])))


def lemma41_phi(f1: PiecewiseQuadratic, f2: PiecewiseQuadratic, n: int = TABLE_SIZE,
                tol: float = RES_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Table of φ with arc length of f1 over [0, φ(x)] equal to arc length of f2 over [0, x]."""
    L1, L2 = float(f1.arc_length(f1.a_star)), float(f2.arc_length(f2.a_star))
    if abs(L1 - L2) > tol or abs(f1.a_star - f2.a_star) > tol:
        raise ArcLengthMismatch(f"arc lengths differ: {L1!r} vs {L2!r}")
    x = np.linspace(0.0, f2.a_star, n)
    phi = f1.inverse_arc_length(np.minimum(f2.arc_length(x), L1))
    phi[0], phi[-1] = 0.0, f1.a_star
    return x, phi


def _correct(prob: Lemma41Problem, k: np.ndarray, direction: np.ndarray, tol: float,
             max_iter: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Newton on the residual, moving only orthogonally to ``direction``."""
    basis = np.linalg.svd(direction[None, :])[2][1:].T  # 4x3, orthonormal complement
    r = residual(prob, k)
    for _ in range(max_iter):
        if np.linalg.norm(r) <= 0.01 * tol:
            break
        J = jacobian(prob, k).N
        y = np.linalg.lstsq(J @ basis, -r, rcond=None)[0]
        k = k + basis @ y
        r_new = residual(prob, k)
        if np.linalg.norm(basis @ y) < 1e-15:
            r = r_new
            break
        r = r_new
    if not np.linalg.norm(r) <= tol:
        raise NoConvergence(f"corrector stopped at residual {np.linalg.norm(r):.3e}")
    return k, r


def lemma41_solve(prob: Lemma41Problem, delta: float, eps: float | None = None, tol: float = RES_TOL,
                  max_halvings: int = 30) -> Lemma41Solution:
    """Step ``delta`` along the kernel of the Jacobian from (1,1,1,1) and correct back onto the solutions.

    The step is halved while f2 loses convexity or strays more than ``eps`` from f1.
    """
    if prob.problems():
        bad = [p for p in prob.problems() if "condition" in p]
        if bad and len(bad) == len(prob.problems()):
            warnings.warn("; ".join(bad) + " (rank 3 is not guaranteed)", RankUncertainWarning, stacklevel=2)
        elif not bad or len(bad) < len(prob.problems()):
            raise ValueError("; ".join(p for p in prob.problems() if "condition" not in p))
    rep = jacobian(prob)
    if rep.rank < 3:
        raise RankDeficient(f"Jacobian rank {rep.rank} < 3 (singular values {rep.singular_values})")
    f1 = prob.f1
    if delta == 0:
        x, phi = lemma41_phi(f1, f1)
        return Lemma41Solution(prob, ONES.copy(), f1, residual(prob, ONES), 0.0, 0.0, x, phi)
    step = float(delta)
    last: Exception | None = None
    for _ in range(max_halvings):
        try:
            k, r = _correct(prob, ONES + step * rep.kernel, rep.kernel, tol)
        except NoConvergence as exc:
            last = exc
            step /= 2
            continue
        f2 = f2_model(prob, k)
        diff = sup_norm(f1, f2)
        if np.all(k > 0) and convexity_defect(f2) >= -tol and (eps is None or diff <= eps):
            x, phi = lemma41_phi(f1, f2, tol=tol)
            return Lemma41Solution(prob, k, f2, r, step, diff, x, phi)
        last = ConvexityLost(f"step {step:.3e}: k = {k}, sup-norm difference {diff:.3e}")
        step /= 2
    if isinstance(last, NoConvergence):
        raise last
    raise ConvexityLost(f"step ladder exhausted: {last}")


@dataclass(frozen=True)
class SegmentImage:
    lo: float
    hi: float
    source_length: float
    image_length: float
    image_chord: float
    straightness: float


@dataclass(frozen=True)
class MapReport:
    segments: list[SegmentImage]

    @property
    def max_straightness(self) -> float:
        return max((s.straightness for s in self.segments), default=0.0)

    @property
    def max_length_error(self) -> float:
        return max((abs(s.image_length - s.source_length) for s in self.segments), default=0.0)


def lemma41_map(f1: PiecewiseQuadratic, f2: PiecewiseQuadratic, samples: int = 65) -> MapReport:
    """Images of the straight segments of the graph of f1 under the arc-length map onto the graph of f2."""
    out = []
    for lo, hi in f1.segments():
        x = np.linspace(lo, hi, samples)
        xi = f2.inverse_arc_length(f1.arc_length(x))
        pts = np.column_stack([xi, f2(xi)])
        chord = pts[-1] - pts[0]
        clen = float(np.linalg.norm(chord))
        normal = np.array([-chord[1], chord[0]]) / max(clen, 1e-300)
        dev = float(np.max(np.abs((pts - pts[0]) @ normal)))
        src = float(f1.arc_length(hi) - f1.arc_length(lo))
        img = float(f2.arc_length(xi[-1]) - f2.arc_length(xi[0]))
        out.append(SegmentImage(lo, hi, src, img, clen, dev))
    return MapReport(out)


def random_problem(rng: np.random.Generator, n_segments: int | None = None) -> Lemma41Problem:
    """Random valid problem: a long initial fillet, then short alternating segments and fillets."""
    n_segments = int(rng.integers(5, 9)) if n_segments is None else n_segments
    while True:
        pieces = [(rng.uniform(0.8, 1.2), rng.uniform(0.5, 1.5))]
        for _ in range(n_segments):
            pieces.append((rng.uniform(0.03, 0.15), 0.0))
            pieces.append((rng.uniform(0.03, 0.15), rng.uniform(0.3, 2.0)))
        f1 = fillet_model(pieces)
        try:
            prob = Lemma41Problem.from_model(f1)
        except ValueError:
            continue
        if not prob.problems():
            return prob
