"""Polar bodies, Santalo points, and the volume product."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull as _QhullHull

from .errors import GeometryError, NoConvergence, NotInterior, UnsupportedDimension
from .geometry import TOL, Polytope, canonicalize, centroid, volume


@dataclass(frozen=True)
class SantaloResult:
    """Minimizer of z -> |K^z| plus solver diagnostics."""

    point: np.ndarray
    polar_volume: float
    iterations: int
    residual: float
    converged: bool


@dataclass(frozen=True)
class ProductReport:
    body_volume: float
    santalo: SantaloResult
    product: float
    ratio_to_ball: float


def ball_volume(n: int) -> float:
    """Volume of the Euclidean unit ball in dimension n (n in {2, 3})."""
    if n not in (2, 3):
        raise UnsupportedDimension(f"ball_volume supports n in {{2,3}}, got {n}")
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def _interior_slack(P: Polytope, z: np.ndarray) -> float:
    return float(np.min(P.offsets - P.normals @ z))


def _polar_vertices(P: Polytope, z: np.ndarray) -> np.ndarray:
    """Vertices of K^z: each facet (n, c) maps to z + n/(c - <n, z>)."""
    slack = P.offsets - P.normals @ z
    scale = 1.0 + float(np.max(np.abs(P.offsets)))
    if np.min(slack) <= TOL * scale:
        raise NotInterior("pole is not strictly interior; polar unbounded")
    return z + P.normals / slack[:, None]


def _hull_metrics(points: np.ndarray) -> tuple[float, np.ndarray]:
    """Volume and centroid of the hull of ``points`` (fast, no merging)."""
    dim = points.shape[1]
    if dim == 2:
        c = points.mean(axis=0)
        ang = np.arctan2(points[:, 1] - c[1], points[:, 0] - c[0])
        ring = points[np.argsort(ang)]
        a = ring - c
        b = np.roll(ring, -1, axis=0) - c
        cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        # points from a convex facet list may contain interior-of-edge
        # duplicates; zero-area fan triangles simply contribute nothing
        area2 = np.abs(cross)
        vol = 0.5 * float(area2.sum())
        tri_cent = (c + ring + np.roll(ring, -1, axis=0)) / 3.0
        cent = (tri_cent * area2[:, None]).sum(axis=0) / area2.sum()
        return vol, cent
    hull = _QhullHull(points)
    c = points[hull.vertices].mean(axis=0)
    tot = 0.0
    acc = np.zeros(dim)
    tri = points[hull.simplices]  # (m, 3, 3)
    mats = tri - c
    dets = np.abs(np.linalg.det(mats)) / 6.0
    tot = float(dets.sum())
    cents = (tri.sum(axis=1) + c) / 4.0
    acc = (cents * dets[:, None]).sum(axis=0)
    return tot, acc / tot


def polar_metrics(P: Polytope, z) -> tuple[float, np.ndarray]:
    """(|K^z|, centroid(K^z)) without building the full polar polytope."""
    z = np.asarray(z, dtype=float)
    return _hull_metrics(_polar_vertices(P, z))


def polar(P: Polytope, z) -> Polytope:
    """The polar body K^z = {y : <y-z, x-z> <= 1 for all x in K}.

    Vertices come from the facets of ``P``, facets from its vertices; the
    two constructions are cross-validated against each other.
    """
    z = np.asarray(z, dtype=float)
    pv = _polar_vertices(P, z)
    Q = canonicalize(pv)
    # facets derived from the vertices of P: <y - z, v - z> <= 1
    A = P.vertices - z
    rhs = 1.0 + A @ z
    viol = np.max(A @ Q.vertices.T - rhs[:, None])
    scale = 1.0 + float(np.max(np.abs(rhs)))
    if viol > 1e-6 * scale:
        raise GeometryError("polar cross-validation failed: facet/vertex "
                            f"lists disagree by {viol:.3e}")
    return Q


def santalo_point(P: Polytope, tol: float = 1e-8,
                  max_iter: int = 500) -> SantaloResult:
    """Find s(K), the interior minimizer of z -> |K^z|.

    Uses the optimality condition ``s = centroid(K^s)``: the gradient of
    log|K^z| is (n+1)(centroid(K^z) - z), which drives a damped Newton
    iteration with a finite-difference Hessian, started at the centroid
    of ``P``.  (The naive fixed-point iteration toward the polar centroid
    is a repeller -- it performs gradient *ascent* -- so Newton descent
    on the same residual is used instead.)  The residual is the norm of
    ``centroid(K^z) - z``; convexity makes the minimizer unique.
    """
    n = P.dim
    scale = max(1.0, float(np.max(np.abs(P.vertices))))
    z = centroid(P)
    best_z, best_r = z.copy(), np.inf
    evals = 0

    def metrics(zz):
        nonlocal evals
        evals += 1
        return polar_metrics(P, zz)

    vol, cen = metrics(z)
    for it in range(max_iter):
        r = float(np.linalg.norm(cen - z))
        if r < best_r:
            best_r, best_z = r, z.copy()
        if r < tol:
            return SantaloResult(z, vol, it + 1, r, True)
        grad = (n + 1) * (cen - z)
        step = _newton_step(P, z, grad, scale, metrics)
        # backtracking on |K^z| with an interior safeguard
        accepted = False
        lam = 1.0
        for _ in range(40):
            cand = z + lam * step
            if _interior_slack(P, cand) > 1e-9 * scale:
                try:
                    cvol, ccen = metrics(cand)
                except NotInterior:
                    lam *= 0.5
                    continue
                if cvol <= vol * (1 + 1e-14) or \
                        np.linalg.norm(ccen - cand) < r:
                    z, vol, cen = cand, cvol, ccen
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            break
    raise NoConvergence("Santalo solver did not reach tolerance",
                        best_point=best_z, residual=best_r)


def _newton_step(P: Polytope, z: np.ndarray, grad: np.ndarray, scale: float,
                 metrics) -> np.ndarray:
    """Newton direction for log|K^z|, gradient-descent fallback."""
    n = P.dim
    h = 1e-6 * scale
    H = np.zeros((n, n))
    try:
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            _, cp = metrics(z + e)
            _, cm = metrics(z - e)
            gp = (n + 1) * (cp - (z + e))
            gm = (n + 1) * (cm - (z - e))
            H[:, i] = (gp - gm) / (2 * h)
        H = 0.5 * (H + H.T)  # finite-difference Hessian of log|K^z|
        step = np.linalg.solve(H, -grad)
        if float(step @ grad) >= 0:  # not a descent direction of log-vol
            raise np.linalg.LinAlgError
        if np.linalg.norm(step) > 0.5 * scale:
            step *= 0.5 * scale / np.linalg.norm(step)
        return step
    except (np.linalg.LinAlgError, NotInterior):
        g = -grad
        nrm = np.linalg.norm(g)
        return g / nrm * min(0.05 * scale, nrm)


def volume_product(P: Polytope, tol: float = 1e-8,
                   max_iter: int = 500) -> ProductReport:
    """|K| * |K^{s(K)}| and its ratio to the ball value omega_n^2."""
    v = volume(P)
    res = santalo_point(P, tol=tol, max_iter=max_iter)
    prod = v * res.polar_volume
    return ProductReport(v, res, prod, prod / ball_volume(P.dim) ** 2)
