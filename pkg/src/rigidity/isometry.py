"""Boundary correspondences, local-isometry verification and congruence search."""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import EpsilonTooLargeForClip, InvalidDomain, SampleCountTooSmall, UnpairedComponent
from .geometry import BoundaryPoint, Domain, build_region
from .metric import flattening_bound, metric_sample

log = logging.getLogger(__name__)

LEN_REL = 1e-9
ISO_REL = 1e-7
CONGR_REL = 1e-6
LADDER = (64, 32, 16, 8)


@dataclass(frozen=True)
class ComponentMap:
    """Arc-length map ``s -> orientation * s + offset`` from one component onto another."""

    source: int
    target: int
    orientation: int = 1
    offset: float = 0.0

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")


@dataclass(frozen=True)
class BoundaryCorrespondence:
    maps: tuple[ComponentMap, ...]

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))

    @classmethod
    def identity(cls, domain: Domain) -> BoundaryCorrespondence:
        return cls(tuple(ComponentMap(i, i) for i in range(len(domain.components))))

    def for_source(self, component: int) -> ComponentMap:
        for m in self.maps:
            if m.source == component:
                return m
        raise UnpairedComponent(f"component {component} has no partner")

    def apply(self, V: Domain, p: BoundaryPoint) -> BoundaryPoint:
        m = self.for_source(p.component)
        comp = V.component(m.target)
        s = m.orientation * p.s + m.offset
        if comp.closed:
            s = s % comp.length
            if s >= comp.length:
                s = 0.0
        else:
            s = min(max(s, 0.0), comp.length)
        return BoundaryPoint(m.target, float(s))

    def inverse(self, U: Domain) -> BoundaryCorrespondence:
        out = []
        for m in self.maps:
            L = U.component(m.source).length
            # s_u = orientation * (s_v - offset)
            off = -m.orientation * m.offset
            if U.components[m.source].closed:
                off %= L
            out.append(ComponentMap(m.target, m.source, m.orientation, off))
        return BoundaryCorrespondence(tuple(out))

    def to_json(self) -> dict:
        return {"maps": [{"source": m.source, "target": m.target, "orientation": m.orientation,
                          "offset": m.offset} for m in self.maps]}

    @classmethod
    def from_json(cls, obj: dict) -> BoundaryCorrespondence:
        try:
            maps = [ComponentMap(int(m["source"]), int(m["target"]), int(m.get("orientation", 1)),
                                 float(m.get("offset", 0.0))) for m in obj["maps"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidDomain(f"malformed correspondence JSON: {exc}") from exc
        return cls(tuple(maps))


def _check_pairing(U: Domain, V: Domain, f: BoundaryCorrespondence) -> None:
    sources = [m.source for m in f.maps]
    targets = [m.target for m in f.maps]
    if sorted(sources) != list(range(len(U.components))):
        raise UnpairedComponent("every component of U must be paired exactly once")
    if sorted(targets) != list(range(len(V.components))):
        raise UnpairedComponent("every component of V must be paired exactly once")


def check_intrinsic_isometry(U: Domain, V: Domain, f: BoundaryCorrespondence,
                             tau_len: float | None = None) -> bool:
    """Paired components have equal lengths (the arc-length form has unit scale by type)."""
    _check_pairing(U, V, f)
    tau_len = LEN_REL * max(U.diameter, V.diameter) if tau_len is None else tau_len
    for m in f.maps:
        cu, cv = U.components[m.source], V.components[m.target]
        if cu.closed != cv.closed or abs(cu.length - cv.length) > tau_len:
            return False
    return True


class Verdict(str, enum.Enum):
    PASS = "Pass"
    FAIL = "Fail"


@dataclass(frozen=True)
class IsometryReport:
    epsilon: float
    n_pairs: int
    max_deviation: float
    worst_pair: tuple[BoundaryPoint, BoundaryPoint] | None
    worst_image: tuple[BoundaryPoint, BoundaryPoint] | None
    tau_iso: float
    verdict: Verdict

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def to_json(self) -> dict:
        worst = None
        if self.worst_pair is not None:
            worst = {"s_u": [self.worst_pair[0].s, self.worst_pair[1].s],
                     "s_v": [self.worst_image[0].s, self.worst_image[1].s]}
        return {"verdict": self.verdict.value, "epsilon": self.epsilon, "max_deviation": self.max_deviation,
                "worst_pair": worst, "n_pairs": self.n_pairs, "tau_iso": self.tau_iso}


@dataclass(frozen=True)
class LadderReport:
    reports: list[IsometryReport]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def max_deviation(self) -> float:
        return max(r.max_deviation for r in self.reports)

    def to_json(self) -> dict:
        return {"verdict": "Pass" if self.passed else "Fail", "rungs": [r.to_json() for r in self.reports]}


def tau_iso(U: Domain, V: Domain, flat_tol: float | None = None) -> float:
    diam = max(U.diameter, V.diameter)
    return max(ISO_REL * diam, 3 * flattening_bound(U, flat_tol), 3 * flattening_bound(V, flat_tol))


def boundary_samples(domain: Domain, n: int, seed: int = 0) -> list[BoundaryPoint]:
    """``n`` equally spaced points per component behind a seeded random phase."""
    rng = np.random.default_rng(seed)
    out = []
    for ci, comp in enumerate(domain.components):
        phase = rng.uniform(0.0, 1.0)
        if comp.closed:
            s = (phase + np.arange(n)) * comp.length / n
        else:
            s = (phase + np.arange(n)) * comp.length / (n + 1)
        out += [BoundaryPoint(ci, float(v)) for v in s]
    return out


def _clip_safe(domain: Domain, pts: list[BoundaryPoint]) -> np.ndarray:
    if domain.bounded:
        return np.ones(len(pts), dtype=bool)
    xy = np.array([domain.point_at(p) for p in pts])
    return domain.clip_distance(xy) >= domain.clip_margin


@dataclass(frozen=True)
class _PairData:
    pts: list[BoundaryPoint]
    imgs: list[BoundaryPoint]
    DU: np.ndarray
    DV: np.ndarray
    sensitive: np.ndarray


def _pair_data(U: Domain, V: Domain, f: BoundaryCorrespondence, n: int, seed: int,
               flat_tol: float | None) -> _PairData:
    _check_pairing(U, V, f)
    pts = boundary_samples(U, n, seed)
    imgs = [f.apply(V, p) for p in pts]
    keep = _clip_safe(U, pts) & _clip_safe(V, imgs)
    pts = [p for p, k in zip(pts, keep) if k]
    imgs = [q for q, k in zip(imgs, keep) if k]
    if len(pts) < 2:
        raise EpsilonTooLargeForClip("no clip-safe sample pairs remain")
    SU = metric_sample(U, pts, flat_tol, strict=False)
    SV = metric_sample(V, imgs, flat_tol, strict=False)
    return _PairData(pts, imgs, SU.D, SV.D, SU.clip_sensitive | SV.clip_sensitive)


def _report(data: _PairData, eps: float, tol: float) -> IsometryReport:
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    pts, imgs = data.pts, data.imgs
    iu, ju = np.triu_indices(len(pts), 1)
    near = data.DU[iu, ju] < eps
    if np.any(near & data.sensitive[iu, ju]):
        raise EpsilonTooLargeForClip(f"epsilon {eps} reaches the clip margin")
    iu, ju = iu[near], ju[near]
    dev = np.abs(data.DU[iu, ju] - data.DV[iu, ju])
    if len(dev) == 0:
        return IsometryReport(float(eps), 0, 0.0, None, None, tol, Verdict.PASS)
    top = float(dev.max())
    cand = np.nonzero(dev == top)[0]
    key = min(cand, key=lambda c: (pts[iu[c]].component, pts[iu[c]].s, pts[ju[c]].component, pts[ju[c]].s))
    i, j = iu[key], ju[key]
    verdict = Verdict.PASS if top <= tol else Verdict.FAIL
    log.info("local isometry eps=%.4g pairs=%d max_dev=%.3g", eps, len(dev), top)
    return IsometryReport(float(eps), int(len(dev)), top, (pts[i], pts[j]), (imgs[i], imgs[j]), tol, verdict)


def check_local_isometry(U: Domain, V: Domain, f: BoundaryCorrespondence, eps: float, n: int = 128,
                         seed: int = 0, flat_tol: float | None = None,
                         tol: float | None = None) -> IsometryReport:
    """Compare ρ_U(a, b) with ρ_V(f(a), f(b)) on sampled pairs with ρ_U(a, b) < ``eps``."""
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    tol = tau_iso(U, V, flat_tol) if tol is None else tol
    return _report(_pair_data(U, V, f, n, seed, flat_tol), eps, tol)


def ladder_epsilons(U: Domain, rungs=LADDER) -> list[float]:
    L = min(c.length for c in U.components)
    return [L / r for r in rungs]


def check_local_isometry_ladder(U: Domain, V: Domain, f: BoundaryCorrespondence, n: int = 128,
                                epsilons=None, seed: int = 0, flat_tol: float | None = None,
                                tol: float | None = None) -> LadderReport:
    """One local-isometry report per epsilon rung, all from the same sampled pairs."""
    if n < 64:
        raise SampleCountTooSmall("the epsilon ladder needs at least 64 samples per component")
    epsilons = ladder_epsilons(U) if epsilons is None else epsilons
    tol = tau_iso(U, V, flat_tol) if tol is None else tol
    data = _pair_data(U, V, f, n, seed, flat_tol)
    return LadderReport([_report(data, e, tol) for e in epsilons])


@dataclass(frozen=True)
class ProbeReport:
    n_pairs: int
    violations: list[tuple[BoundaryPoint, BoundaryPoint]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def collinearity_probe(U: Domain, V: Domain, f: BoundaryCorrespondence, w: BoundaryPoint, eps: float,
                       n: int = 32, grid: int = 9, flat_tol: float | None = None) -> ProbeReport:
    """Check that chords of U near ``w`` whose interior lies in U map to chords whose interior lies in V."""
    comp = U.component(w.component)
    s = w.s + np.linspace(-eps, eps, n)
    s = comp.wrap(s) if comp.closed else s[(s >= 0) & (s <= comp.length)]
    pts = [BoundaryPoint(w.component, float(v)) for v in s]
    pts = [p for p, k in zip(pts, _clip_safe(U, pts)) if k]
    if len(pts) < 2:
        return ProbeReport(0)
    D = metric_sample(U, [w] + pts, flat_tol, strict=False).D[0, 1:]
    pts = [p for p, d in zip(pts, D) if d < eps]
    imgs = [f.apply(V, p) for p in pts]
    ru, rv = build_region(U, flat_tol=flat_tol), build_region(V, flat_tol=flat_tol)
    xu = np.array([U.point_at(p) for p in pts]).reshape(-1, 2)
    xv = np.array([V.point_at(q) for q in imgs]).reshape(-1, 2)
    t = np.linspace(0.0, 1.0, grid + 2)[1:-1]
    # interior points must clear the flattened boundary by more than the flattening error
    clearance = 2 * ru.flat_tol + ru.tau
    n_pairs, bad = 0, []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            gu = xu[i] + t[:, None] * (xu[j] - xu[i])
            if not np.all(ru.strictly_contains(gu, clearance)):
                continue
            n_pairs += 1
            gv = xv[i] + t[:, None] * (xv[j] - xv[i])
            if not np.all(rv.strictly_contains(gv, rv.tau)):
                bad.append((pts[i], pts[j]))
    return ProbeReport(n_pairs, bad)


@dataclass(frozen=True)
class Motion:
    rotation: float
    translation: tuple[float, float]
    reflect: bool

    def apply(self, pts: np.ndarray) -> np.ndarray:
        z = pts[:, 0] + 1j * pts[:, 1]
        if self.reflect:
            z = np.conj(z)
        z = np.exp(1j * self.rotation) * z + complex(*self.translation)
        return np.column_stack([z.real, z.imag])


@dataclass(frozen=True)
class CongruenceResult:
    found: bool
    motion: Motion
    residual: float
    orientation: int = 1
    offset: float = 0.0

    def to_json(self) -> dict:
        return {"found": self.found, "residual": self.residual,
                "motion": {"rotation": self.motion.rotation, "translation": list(self.motion.translation),
                           "reflect": self.motion.reflect},
                "orientation": self.orientation, "offset": self.offset}


def _procrustes(u: np.ndarray, v: np.ndarray, reflect: bool) -> tuple[float, Motion]:
    """RMS residual and motion of the best fit ``v ≈ g(u)`` for complex point arrays."""
    if reflect:
        u = np.conj(u)
    cu, cv = u.mean(), v.mean()
    a, b = u - cu, v - cv
    c = np.sum(b * np.conj(a))
    theta = float(np.angle(c)) if abs(c) > 0 else 0.0
    rot = np.exp(1j * theta)
    t = cv - rot * cu
    rms = float(np.sqrt(np.mean(np.abs(b - rot * a) ** 2)))
    return rms, Motion(theta, (float(t.real), float(t.imag)), reflect)


def _as_complex(pts: np.ndarray) -> np.ndarray:
    return pts[:, 0] + 1j * pts[:, 1]


def find_congruence(U: Domain, V: Domain, m: int = 512, tol: float | None = None) -> CongruenceResult:
    """Best rigid motion (reflections allowed) carrying U's boundary onto V's."""
    if m < 3:
        raise SampleCountTooSmall("congruence search needs at least 3 samples")
    if len(U.components) != 1 or len(V.components) != 1:
        raise InvalidDomain("congruence search supports single-component domains")
    tol = CONGR_REL * max(U.diameter, V.diameter) if tol is None else tol
    cu, cv = U.components[0], V.components[0]
    if cu.closed != cv.closed:
        return CongruenceResult(False, Motion(0.0, (0.0, 0.0), False), float("inf"))
    Lu, Lv = cu.length, cv.length
    scale = Lv / Lu

    def v_at(orient, off):
        s = np.mod(orient * su * scale + off, Lv)
        if not cv.closed and orient == -1:
            s = np.where(s == 0.0, Lv, s)
        return _as_complex(cv.points(s))

    candidates = []
    # cyclic offsets; an open curve is treated as periodic in its parameter
    su = np.arange(m) * Lu / m
    u = _as_complex(cu.points(su))
    ua = u - u.mean()
    for orient in (1, -1):
        base = v_at(orient, 0.0 if (cv.closed or orient == 1) else Lv)
        va = base - base.mean()
        for reflect in (False, True):
            a = np.conj(ua) if reflect else ua
            # c_j = sum_i va[i + j] * conj(a[i])
            corr = np.fft.ifft(np.fft.fft(va) * np.conj(np.fft.fft(a)))
            r2 = np.sum(np.abs(a) ** 2) + np.sum(np.abs(va) ** 2) - 2 * np.abs(corr)
            j = int(np.argmin(r2))
            off = (0.0 if (cv.closed or orient == 1) else Lv) + orient * j * Lv / m
            candidates.append((orient, reflect, off))

    best = None
    for orient, reflect, off in candidates:
        res, motion = _procrustes(u, v_at(orient, off), reflect)
        if cu.closed:
            step = Lv / m
            opt = minimize_scalar(lambda d: _procrustes(u, v_at(orient, d), reflect)[0],
                                  bounds=(off - step, off + step), method="bounded",
                                  options={"xatol": 1e-12 * Lv})
            if opt.fun < res:
                off = float(opt.x) % Lv
                res, motion = _procrustes(u, v_at(orient, off), reflect)
        if best is None or res < best[0]:
            best = (res, motion, orient, off)
    res, motion, orient, off = best
    found = res <= tol and abs(Lu - Lv) <= tol
    return CongruenceResult(bool(found), motion, res, orient, off)


def dump_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")
