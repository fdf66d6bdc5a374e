"""Numerical verification layer: convexity profiles, certificates, probes."""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass

import numpy as np

from scipy.spatial import QhullError

from .duality import ball_volume, santalo_point, volume_product
from .errors import GeometryError, NoConvergence, ParamOutOfRange, TooFewChords
from .geometry import (
    Polytope,
    canonicalize,
    centroid,
    clip_halfspace,
    diameter,
    ring2d,
    simplify2d,
    volume,
)
from .bodies import direction_set
from .symmetrization import (
    AffineShear,
    ShadowSystem,
    SteinerFamily,
    fit_affine_shear,
    midpoint_deviation,
    steiner_symmetral,
    vertex_shadow_snapshot,
)


@dataclass(frozen=True)
class Profile:
    """f(t) = (|K| |K_t^*|)^{-1} on a t-grid, with convexity statistics.

    ``max_midpoint_violation`` is the largest f(t_i) - (f(t_{i-1}) +
    f(t_{i+1}))/2 over interior grid points, clamped at zero;
    ``evenness_defect`` is max |f(t) - f(-t)|.  Both are absolute; divide
    by ``f_scale`` for relative comparisons.
    """

    t_grid: np.ndarray
    f_values: np.ndarray
    body_volumes: np.ndarray
    max_midpoint_violation: float
    evenness_defect: float

    @property
    def f_scale(self) -> float:
        return float(np.median(self.f_values))


class Verdict(enum.Enum):
    CONSISTENT_WITH_ELLIPSOID = "ConsistentWithEllipsoid"
    NOT_LOCAL_MAXIMIZER = "NotLocalMaximizer"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Certificate:
    profile: Profile
    f_convex: bool
    f_even: bool
    f_constant: bool
    shear_fit: AffineShear | None
    verdict: Verdict


@dataclass(frozen=True)
class ProbeReport:
    base_product: float
    best_perturbation: str
    best_product: float
    improvement: float


@dataclass(frozen=True)
class FlowRecord:
    step: int
    product: float
    ball_distance: float


@dataclass(frozen=True)
class EllipsoidTestResult:
    passed: bool
    worst_direction: np.ndarray
    worst_deviation: float
    deviations: np.ndarray


def _pmap(fn, items):
    """Map preserving order; SANTALO_LAB_THREADS caps thread parallelism."""
    items = list(items)
    n = int(os.environ.get("SANTALO_LAB_THREADS", "1") or "1")
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _check_grid(grid_size: int) -> np.ndarray:
    if grid_size < 5 or grid_size % 2 == 0:
        raise ParamOutOfRange("grid_size must be odd and >= 5")
    return np.linspace(-1.0, 1.0, grid_size)


def _profile_stats(ts, fs, vols) -> Profile:
    fs = np.asarray(fs)
    viol = 0.0
    for i in range(1, len(fs) - 1):
        viol = max(viol, fs[i] - 0.5 * (fs[i - 1] + fs[i + 1]))
    defect = float(np.max(np.abs(fs - fs[::-1])))
    return Profile(np.asarray(ts), fs, np.asarray(vols), max(viol, 0.0), defect)


def convexity_profile(P: Polytope, u, grid_size: int) -> Profile:
    """Evaluate f along the Steiner interpolation family of (P, u)."""
    ts = _check_grid(grid_size)
    fam = SteinerFamily(P, u)
    V = volume(P)

    def eval_one(t):
        K = fam.snapshot(float(t))
        try:
            res = santalo_point(K)
        except NoConvergence as exc:
            exc.context = {"t": float(t)}
            raise
        return 1.0 / (V * res.polar_volume), volume(K)

    pairs = _pmap(eval_one, ts)
    return _profile_stats(ts, [p[0] for p in pairs], [p[1] for p in pairs])


def generic_convexity_check(S: ShadowSystem, grid_size: int) -> Profile:
    """Same statistics for a vertex-speed shadow system.

    Body volumes are reported but not constrained; f is normalized by the
    snapshot volume at the left end of the parameter range.
    """
    if grid_size < 5 or grid_size % 2 == 0:
        raise ParamOutOfRange("grid_size must be odd and >= 5")
    ts = np.linspace(S.t_range.lo, S.t_range.hi, grid_size)
    Vref = volume(vertex_shadow_snapshot(S, float(ts[0])))

    def eval_one(t):
        K = vertex_shadow_snapshot(S, float(t))
        try:
            res = santalo_point(K)
        except NoConvergence as exc:
            exc.context = {"t": float(t)}
            raise
        return 1.0 / (Vref * res.polar_volume), volume(K)

    pairs = _pmap(eval_one, ts)
    return _profile_stats(ts, [p[0] for p in pairs], [p[1] for p in pairs])


def rigidity_certificate(P: Polytope, u, grid_size: int,
                         rel_tol: float = 1e-6) -> Certificate:
    """Replay of the constancy/rigidity argument along one direction.

    Verdicts: ConsistentWithEllipsoid when f is constant and every
    snapshot is the same exact shear image of K; NotLocalMaximizer when
    f(0) < f(-1) beyond tolerance; Inconclusive otherwise.
    """
    prof = convexity_profile(P, u, grid_size)
    scale = prof.f_scale
    f_convex = prof.max_midpoint_violation <= rel_tol * scale
    f_even = prof.evenness_defect <= rel_tol * scale
    f_constant = float(prof.f_values.max() - prof.f_values.min()) <= rel_tol * scale

    fam = SteinerFamily(P, u)
    base = fam.snapshot(-1.0)
    shear_fit = None
    verdict = Verdict.INCONCLUSIVE
    if f_constant:
        fits = []
        for t in (-0.5, 0.0, 0.5, 1.0):
            fit = fit_affine_shear(base, fam.snapshot(t), u, t + 1.0)
            if fit is None:
                fits = None
                break
            fits.append(fit)
        if fits is not None:
            params = np.array([np.append(f.v, f.c) for f in fits])
            spread = float(np.max(params.max(axis=0) - params.min(axis=0)))
            shear_fit = fits[1]
            if spread < 1e-6:
                verdict = Verdict.CONSISTENT_WITH_ELLIPSOID
    i0 = len(prof.t_grid) // 2
    if verdict is not Verdict.CONSISTENT_WITH_ELLIPSOID:
        if prof.f_values[i0] < prof.f_values[0] - rel_tol * scale:
            verdict = Verdict.NOT_LOCAL_MAXIMIZER
    return Certificate(prof, f_convex, f_even, f_constant, shear_fit, verdict)


def ellipsoid_test(P: Polytope, num_directions: int,
                   tol: float) -> EllipsoidTestResult:
    """Chord-midpoint hyperplane test over a deterministic direction set."""
    if num_directions < 2 * P.dim:
        raise TooFewChords("need at least 2n directions")
    dirs = direction_set(P.dim, num_directions)
    m = 128 if P.dim == 2 else 200
    devs = np.array(_pmap(lambda u: midpoint_deviation(P, u, m), dirs))
    worst = int(np.argmax(devs))
    return EllipsoidTestResult(bool(np.all(devs < tol)), dirs[worst],
                               float(devs[worst]), devs)


def symmetrization_flow(P: Polytope, num_steps: int, seed: int,
                        max_vertices: int = 1024) -> list[FlowRecord]:
    """Iterated random-direction Steiner symmetrization, volume-pinned.

    After each symmetral the body is rescaled about its centroid to ball
    volume; the trace records the volume product and the Hausdorff-type
    distance to the equal-volume centered ball.  On solver failure the
    trace up to the failure is returned.
    """
    if num_steps < 1:
        raise ParamOutOfRange("num_steps must be >= 1")
    rng = np.random.default_rng(seed)
    n = P.dim
    omega = ball_volume(n)
    K = _rescale_to(P, omega)
    trace = [FlowRecord(0, _safe_product(K), _ball_distance(K))]
    for step in range(1, num_steps + 1):
        u = rng.normal(size=n)
        u /= np.linalg.norm(u)
        try:
            K = steiner_symmetral(K, u)
            if K.dim == 2 and K.n_vertices > max_vertices:
                K = simplify2d(K, max_vertices)
            K = _rescale_to(K, omega)
            trace.append(FlowRecord(step, volume_product(K).product,
                                    _ball_distance(K)))
        except NoConvergence:
            break
    return trace


def _safe_product(K: Polytope) -> float:
    return volume_product(K).product


def _rescale_to(P: Polytope, target_volume: float) -> Polytope:
    c = centroid(P)
    s = (target_volume / volume(P)) ** (1.0 / P.dim)
    return canonicalize(c + s * (P.vertices - c))


def _ball_distance(P: Polytope) -> float:
    """Distance to the equal-volume ball centered at the centroid.

    Uses vertex excess and facet-slack deficit; cheap and exact enough as
    a flow diagnostic.
    """
    c = centroid(P)
    r = (volume(P) / ball_volume(P.dim)) ** (1.0 / P.dim)
    out = float(np.max(np.linalg.norm(P.vertices - c, axis=1))) - r
    slack = P.offsets - P.normals @ c
    inn = r - float(np.min(slack))
    return max(out, inn, 0.0)


# ---------------------------------------------------------------------------
# local-maximality probe


def _cut_vertex(P: Polytope, i: int, eps: float) -> Polytope:
    """Truncate vertex i at relative depth eps toward the centroid."""
    v = P.vertices[i]
    if P.dim == 2:
        ring = ring2d(P)
        j = int(np.argmin(np.linalg.norm(ring - v, axis=1)))
        prev_v = ring[j - 1]
        next_v = ring[(j + 1) % len(ring)]
        pts = [p for k, p in enumerate(ring) if k != j]
        pts.append(v + eps * (prev_v - v))
        pts.append(v + eps * (next_v - v))
        return canonicalize(np.array(pts))
    c = centroid(P)
    n = v - c
    n = n / np.linalg.norm(n)
    depth = eps * float(n @ (v - c))
    return clip_halfspace(P, n, float(n @ v) - depth)


def _move_vertex(P: Polytope, i: int, eps: float,
                 rng: np.random.Generator) -> Polytope:
    d = rng.normal(size=P.dim)
    d /= np.linalg.norm(d)
    pts = P.vertices.copy()
    pts[i] = pts[i] + eps * diameter(P) * d
    return canonicalize(pts)


_CUT_EPS = (0.5, 0.4, 0.3, 0.25, 0.18, 0.12, 0.07, 0.03)
_MOVE_EPS = (0.002, 0.005, 0.01, 0.02, 0.05)


def local_max_probe(P: Polytope, family: str, budget: int,
                    seed: int = 0) -> ProbeReport:
    """Search for a volume-product improvement near ``P``.

    ``family`` is "VertexCuts" (truncate one vertex at a grid of depths)
    or "VertexMoves" (perturb one vertex in a seeded random direction).
    Improvements are applied greedily and accumulated until the evaluation
    budget is exhausted or no single perturbation helps.
    """
    if budget < 1:
        raise ParamOutOfRange("budget must be >= 1")
    if family not in ("VertexCuts", "VertexMoves"):
        raise ParamOutOfRange(f"unknown probe family {family!r}")
    rng = np.random.default_rng(seed)
    base = volume_product(P).product
    cur, cur_pi = P, base
    evals = 0
    steps: list[str] = []
    eps_grid = _CUT_EPS if family == "VertexCuts" else _MOVE_EPS
    while evals < budget:
        best = None
        for i in range(cur.n_vertices):
            for eps in eps_grid:
                if evals >= budget:
                    break
                try:
                    if family == "VertexCuts":
                        Q = _cut_vertex(cur, i, eps)
                    else:
                        Q = _move_vertex(cur, i, eps, rng)
                    pi = volume_product(Q).product
                except (GeometryError, QhullError, ValueError):
                    evals += 1
                    continue
                evals += 1
                if best is None or pi > best[0]:
                    best = (pi, Q, i, eps)
        if best is None or best[0] <= cur_pi + 1e-12:
            break
        cur_pi, cur = best[0], best[1]
        verb = "cut" if family == "VertexCuts" else "move"
        steps.append(f"{verb} vertex {best[2]} eps={best[3]:g}")
    desc = "; ".join(steps) if steps else "none"
    return ProbeReport(base, desc, cur_pi, cur_pi - base)
