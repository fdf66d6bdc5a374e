"""Steiner symmetrization, shadow systems, shear fitting, chord midpoints."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import ParamOutOfRange, TooFewChords, ZeroDelta
from .geometry import (
    Interval,
    Polytope,
    Subdivision,
    basis_orthogonal,
    canonicalize,
    chord_structure,
    check_direction,
    diameter,
    overlay,
    project,
    _chord_from_basis,
)


def reflect(P: Polytope, u) -> Polytope:
    """Mirror image of ``P`` across the hyperplane u-perp."""
    u = check_direction(u)
    V = P.vertices - 2.0 * (P.vertices @ u)[:, None] * u
    return canonicalize(V)


class SteinerFamily:
    """The interpolation family K_t, t in [-1, 1], for a fixed (K, u).

    K_{-1} = K, K_1 = reflection of K across u-perp, K_0 = Steiner
    symmetral.  The chord functions a, b are carried on the common
    refinement of the lower/upper facet subdivisions, so every snapshot is
    an exact polytope.  Instances are immutable and shareable.
    """

    def __init__(self, P: Polytope, u):
        self.P = P
        self.u = check_direction(u)
        self.basis = basis_orthogonal(self.u)
        lower, upper = chord_structure(P, self.u)
        self.refined: Subdivision = overlay(lower, upper)

    def snapshot(self, t: float) -> Polytope:
        if abs(t) > 1.0 + 1e-12:
            raise ParamOutOfRange(f"t={t} outside [-1, 1]")
        wa_up, wb_up = -(1.0 + t) / 2.0, (1.0 - t) / 2.0
        pts = []
        for cell in self.refined.cells:
            Y = cell.poly.vertices  # (k, n-1)
            d = cell.poly.dim
            vals = Y @ cell.coeffs[:, :d].T + cell.coeffs[:, d]  # (k, 2)
            a, b = vals[:, 0], vals[:, 1]
            up = wa_up * a + wb_up * b
            lo = wb_up * a + wa_up * b
            X = Y @ self.basis.T
            pts.append(X + up[:, None] * self.u)
            pts.append(X + lo[:, None] * self.u)
        return canonicalize(np.vstack(pts))


def steiner_symmetral(P: Polytope, u) -> Polytope:
    """Steiner symmetral of ``P`` with respect to u-perp (exact polytope)."""
    return SteinerFamily(P, u).snapshot(0.0)


def steiner_snapshot(P: Polytope, u, t: float) -> Polytope:
    """Snapshot K_t of the Steiner interpolation family at parameter t."""
    return SteinerFamily(P, u).snapshot(t)


@dataclass(frozen=True)
class ShadowSystem:
    """A vertex-speed family K_t = conv{x + t alpha(x) u, x in A}."""

    u: np.ndarray
    base_points: np.ndarray
    speeds: np.ndarray
    t_range: Interval

    def __post_init__(self):
        check_direction(self.u)
        if len(self.base_points) != len(self.speeds):
            raise ParamOutOfRange("one speed per base point required")
        if not np.all(np.isfinite(self.speeds)):
            raise ParamOutOfRange("speeds must be finite")


def vertex_shadow_snapshot(S: ShadowSystem, t: float) -> Polytope:
    """Hull of the translated base points at parameter t."""
    if t < S.t_range.lo - 1e-12 or t > S.t_range.hi + 1e-12:
        raise ParamOutOfRange(f"t={t} outside [{S.t_range.lo}, {S.t_range.hi}]")
    pts = S.base_points + t * S.speeds[:, None] * S.u
    return canonicalize(pts)


@dataclass(frozen=True)
class AffineShear:
    """Parameters of the map x -> x + delta (<x, v> + c) u.

    The map fixes u-perp projections by construction; ``residual`` is the
    max vertex mismatch of the fitted correspondence.
    """

    u: np.ndarray
    delta: float
    v: np.ndarray
    c: float
    residual: float

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        s = self.delta * (x @ self.v + self.c)
        if x.ndim == 1:
            return x + s * self.u
        return x + np.multiply.outer(s, self.u)


def _fiber_groups(Y: np.ndarray, tol: float):
    """Group row indices of Y by coincident rows (within tol)."""
    order = np.lexsort(tuple(Y[:, i] for i in range(Y.shape[1] - 1, -1, -1)))
    groups = []
    for idx in order:
        if groups and np.max(np.abs(Y[idx] - Y[groups[-1][0]])) <= tol:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return groups


def fit_affine_shear(Pa: Polytope, Pt: Polytope, u, delta: float,
                     match_tol: float = 1e-7,
                     fit_tol: float = 1e-6) -> AffineShear | None:
    """Recover the shear mapping ``Pa`` onto ``Pt``, or None if no fit.

    Vertices are matched fiber-by-fiber via equality of u-perp projections
    (ties along u resolved by u-coordinate order), then (v, c) solves the
    overdetermined system <x, v> + c = <x' - x, u> / delta by least
    squares.  Returns None when the projections cannot be matched or the
    max vertex mismatch exceeds ``fit_tol``.
    """
    if delta == 0.0:
        raise ZeroDelta("shear fit needs delta != 0")
    u = check_direction(u)
    if Pa.dim != Pt.dim or Pa.n_vertices != Pt.n_vertices:
        return None
    B = basis_orthogonal(u)
    Ya = Pa.vertices @ B
    Yt = Pt.vertices @ B
    ga = _fiber_groups(Ya, match_tol)
    gt = _fiber_groups(Yt, match_tol)
    if len(ga) != len(gt):
        return None
    pairs_a, pairs_t = [], []
    for fa, ft in zip(ga, gt):
        if len(fa) != len(ft):
            return None
        if np.max(np.abs(Ya[fa[0]] - Yt[ft[0]])) > match_tol:
            return None
        sa = sorted(fa, key=lambda i: float(Pa.vertices[i] @ u))
        st = sorted(ft, key=lambda i: float(Pt.vertices[i] @ u))
        pairs_a.extend(sa)
        pairs_t.extend(st)
    X = Pa.vertices[pairs_a]
    Xp = Pt.vertices[pairs_t]
    design = np.hstack([X, np.ones((len(X), 1))])
    rhs = (Xp - X) @ u / delta
    sol, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    v, c = sol[:-1], float(sol[-1])
    shear = AffineShear(u, float(delta), v, c, 0.0)
    resid = float(np.max(np.linalg.norm(shear.apply(X) - Xp, axis=1)))
    shear = AffineShear(u, float(delta), v, c, resid)
    if resid > fit_tol:
        return None
    return shear


def _inradius(P: Polytope) -> float:
    """Chebyshev radius of a 1D or 2D polytope."""
    if P.dim == 1:
        return 0.5 * float(P.vertices[1, 0] - P.vertices[0, 0])
    # max r s.t. <n, x> + r <= c for all facets
    nf = P.n_facets
    A = np.hstack([P.normals, np.ones((nf, 1))])
    cvec = np.zeros(P.dim + 1)
    cvec[-1] = -1.0
    res = linprog(cvec, A_ub=A, b_ub=P.offsets, bounds=[(None, None)] * (P.dim + 1))
    return float(res.x[-1])


def _grid_in_polytope(Q: Polytope, m: int, margin: float) -> np.ndarray:
    """At least m regular-grid points in the interior of Q, margin inset."""
    if Q.dim == 1:
        lo = Q.vertices[0, 0] + margin
        hi = Q.vertices[1, 0] - margin
        return np.linspace(lo, hi, m)[:, None]
    lo = Q.vertices.min(axis=0)
    hi = Q.vertices.max(axis=0)
    step = float(np.sqrt(np.prod(hi - lo) / max(m, 1)))
    for _ in range(40):
        xs = np.arange(lo[0] + step / 2, hi[0], step)
        ys = np.arange(lo[1] + step / 2, hi[1], step)
        gx, gy = np.meshgrid(xs, ys)
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        slack = Q.offsets[None, :] - pts @ Q.normals.T
        keep = pts[np.min(slack, axis=1) >= margin]
        if keep.shape[0] >= m:
            return keep
        step *= 0.8
    raise TooFewChords("could not place the requested grid inside the body")


def midpoint_deviation(P: Polytope, u, m: int) -> float:
    """RMS distance of chord midpoints to their best-fit hyperplane.

    Samples ``m`` (or slightly more) chords on a regular grid in the
    interior of the projection, with a boundary margin of 1% of the
    projection's inradius, and normalizes by the diameter of ``P``.
    Exactly zero (up to float noise) iff the midpoints are coplanar, which
    characterizes ellipsoids when it holds for every direction.
    """
    if m < P.dim + 2:
        raise TooFewChords(f"need at least dim+2={P.dim + 2} chords")
    u = check_direction(u)
    B = basis_orthogonal(u)
    Q = project(P, u)
    margin = 0.01 * _inradius(Q)
    ys = _grid_in_polytope(Q, m, margin)
    mids = []
    for y in ys:
        iv = _chord_from_basis(P, y, u, B)
        s = 0.5 * (iv.lo + iv.hi)
        mids.append(B @ y + s * u)
    M = np.array(mids)
    centered = M - M.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    rms = float(sv[-1]) / np.sqrt(M.shape[0])
    return rms / diameter(P)
