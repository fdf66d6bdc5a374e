"""Polytope primitives: hulls, volumes, chords, projections, subdivisions.

Bodies are full-dimensional convex polytopes carried simultaneously in
vertex form and facet form.  All arithmetic is float64 with a global
incidence tolerance ``TOL``; an exact-rational 2D path lives in
:mod:`santalo_lab.exact2d`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull as _QhullHull

from .errors import (
    BaseMismatch,
    DegenerateInput,
    DimensionMismatch,
    OutsideProjection,
)

TOL = 1e-9


# ---------------------------------------------------------------------------
# vectors and directions


def unit_vector(v) -> np.ndarray:
    """Normalize ``v`` to unit Euclidean length."""
    v = np.asarray(v, dtype=float)
    nrm = float(np.linalg.norm(v))
    if nrm < TOL:
        raise DegenerateInput("cannot normalize a (near-)zero vector")
    return v / nrm


def check_direction(u) -> np.ndarray:
    """Validate that ``u`` is a unit vector (within 1e-12) and return it."""
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise DegenerateInput("direction must be a unit vector")
    return u


def basis_orthogonal(u) -> np.ndarray:
    """Deterministic orthonormal basis of u-perp as an (n, n-1) matrix.

    Gram-Schmidt against the standard basis, dropping the coordinate axis
    most parallel to u, keeping the remaining axes in index order.
    """
    u = check_direction(u)
    n = u.shape[0]
    drop = int(np.argmax(np.abs(u)))
    cols = []
    for i in range(n):
        if i == drop:
            continue
        w = np.zeros(n)
        w[i] = 1.0
        w = w - np.dot(w, u) * u
        for c in cols:
            w = w - np.dot(w, c) * c
        cols.append(w / np.linalg.norm(w))
    return np.column_stack(cols)


# ---------------------------------------------------------------------------
# the polytope type


@dataclass(frozen=True)
class Polytope:
    """Convex polytope in vertex + facet form.

    ``vertices`` are the extreme points in canonical (lexicographic) order.
    ``normals``/``offsets`` describe facets ``<normal, x> <= offset`` with
    outward unit normals.  ``facet_vertices`` lists, per facet, the indices
    of its vertices in cyclic order (3D) or endpoint order (1D/2D edges).
    """

    dim: int
    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    facet_vertices: tuple = field(repr=False)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_facets(self) -> int:
        return self.normals.shape[0]

    def contains(self, x, tol: float = TOL) -> bool:
        x = np.asarray(x, dtype=float)
        scale = 1.0 + float(np.max(np.abs(self.offsets)))
        return bool(np.all(self.normals @ x - self.offsets <= tol * scale))

    def translate(self, w) -> "Polytope":
        w = np.asarray(w, dtype=float)
        return canonicalize(self.vertices + w)


def _as_point_array(points) -> np.ndarray:
    try:
        pts = np.asarray(points, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DimensionMismatch("points have inconsistent lengths") from exc
    if pts.ndim != 2:
        raise DimensionMismatch("points have inconsistent lengths")
    return pts


def _affine_rank(pts: np.ndarray) -> int:
    centered = pts - pts.mean(axis=0)
    if centered.shape[0] == 0:
        return 0
    sv = np.linalg.svd(centered, compute_uv=False)
    scale = max(1.0, float(sv[0]) if sv.size else 1.0)
    return int(np.sum(sv > 1e-10 * scale))


def _lexsort_rows(pts: np.ndarray) -> np.ndarray:
    """Indices sorting rows lexicographically (first coordinate major)."""
    return np.lexsort(tuple(pts[:, i] for i in range(pts.shape[1] - 1, -1, -1)))


def _canonicalize_1d(pts: np.ndarray) -> Polytope:
    lo = float(pts[:, 0].min())
    hi = float(pts[:, 0].max())
    if hi - lo <= 1e-12 * max(1.0, abs(lo), abs(hi)):
        raise DegenerateInput("1D point set has zero length")
    verts = np.array([[lo], [hi]])
    normals = np.array([[-1.0], [1.0]])
    offsets = np.array([-lo, hi])
    return Polytope(1, verts, normals, offsets, ((0,), (1,)))


def _canonicalize_2d(pts: np.ndarray) -> Polytope:
    hull = _QhullHull(pts)
    ring = pts[hull.vertices]  # counter-clockwise
    order = _lexsort_rows(ring)
    verts = ring[order]
    pos = np.empty(len(order), dtype=int)
    pos[order] = np.arange(len(order))  # ring index -> canonical index
    m = len(ring)
    normals = []
    offsets = []
    fverts = []
    for i in range(m):
        j = (i + 1) % m
        d = ring[j] - ring[i]
        nrm = np.array([d[1], -d[0]])
        nrm /= np.linalg.norm(nrm)
        normals.append(nrm)
        offsets.append(float(nrm @ ring[i]))
        fverts.append((int(pos[i]), int(pos[j])))
    return Polytope(2, verts, np.array(normals), np.array(offsets), tuple(fverts))


class _UnionFind:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, i):
        while self.p[i] != i:
            self.p[i] = self.p[self.p[i]]
            i = self.p[i]
        return i

    def union(self, i, j):
        self.p[self.find(i)] = self.find(j)


def _canonicalize_3d(pts: np.ndarray) -> Polytope:
    hull = _QhullHull(pts)
    hverts = pts[hull.vertices]
    order = _lexsort_rows(hverts)
    verts = hverts[order]
    # map original point index -> canonical vertex index
    canon_of = {int(hull.vertices[i]): int(np.where(order == i)[0][0])
                for i in range(len(hull.vertices))}

    # merge coplanar adjacent simplices into facets
    eqs = hull.equations
    uf = _UnionFind(len(hull.simplices))
    for i, nbrs in enumerate(hull.neighbors):
        for j in nbrs:
            if j > i and np.max(np.abs(eqs[i] - eqs[j])) < 1e-7:
                uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(len(hull.simplices)):
        groups.setdefault(uf.find(i), []).append(i)

    normals = []
    offsets = []
    fverts = []
    for members in groups.values():
        nrm = eqs[members[0], :3].astype(float)
        nrm = nrm / np.linalg.norm(nrm)
        idx = sorted({int(v) for m in members for v in hull.simplices[m]})
        coords = pts[idx]
        c = coords.mean(axis=0)
        # cyclic order within the facet plane
        bx = coords[0] - c
        bx = bx - np.dot(bx, nrm) * nrm
        bx /= np.linalg.norm(bx)
        by = np.cross(nrm, bx)
        ang = np.arctan2((coords - c) @ by, (coords - c) @ bx)
        cyc = [idx[k] for k in np.argsort(ang)]
        normals.append(nrm)
        offsets.append(float(np.mean(coords @ nrm)))
        fverts.append(tuple(canon_of[v] for v in cyc))
    return Polytope(3, verts, np.array(normals), np.array(offsets), tuple(fverts))


def canonicalize(points) -> Polytope:
    """Convex hull of ``points`` with redundant points removed.

    Facets are enumerated with outward unit normals, vertices are sorted
    lexicographically.  Idempotent.  Raises :class:`DegenerateInput` when
    the affine hull is lower-dimensional, :class:`DimensionMismatch` on
    ragged coordinates.
    """
    pts = _as_point_array(points)
    dim = pts.shape[1]
    if dim not in (1, 2, 3):
        raise DimensionMismatch(f"unsupported ambient dimension {dim}")
    if pts.shape[0] < dim + 1:
        raise DegenerateInput("need at least dim+1 points")
    if dim == 1:
        return _canonicalize_1d(pts)
    if _affine_rank(pts) < dim:
        raise DegenerateInput("affine hull is not full-dimensional")
    if dim == 2:
        return _canonicalize_2d(pts)
    return _canonicalize_3d(pts)


def ring2d(P: Polytope) -> np.ndarray:
    """Vertices of a 2D polytope in counter-clockwise cyclic order."""
    if P.dim != 2:
        raise DimensionMismatch("ring2d needs a 2D polytope")
    c = P.vertices.mean(axis=0)
    ang = np.arctan2(P.vertices[:, 1] - c[1], P.vertices[:, 0] - c[0])
    return P.vertices[np.argsort(ang)]


def edges(P: Polytope):
    """Vertex-index pairs of the edges of ``P``."""
    seen = set()
    out = []
    for cyc in P.facet_vertices:
        if len(cyc) == 1:
            continue
        for i in range(len(cyc)):
            a, b = cyc[i], cyc[(i + 1) % len(cyc)]
            if P.dim == 2 and i == len(cyc) - 1 and len(cyc) == 2:
                break  # edge facet already emitted as (a, b)
            key = (min(a, b), max(a, b))
            if key not in seen:
                seen.add(key)
                out.append(key)
    return out


# ---------------------------------------------------------------------------
# volume / centroid via fan triangulation from the vertex centroid


def _simplex_fans(P: Polytope):
    """Yield simplices (apex + facet fan) covering ``P``."""
    c = P.vertices.mean(axis=0)
    V = P.vertices
    if P.dim == 1:
        yield (V[0], V[1])
        return
    for cyc in P.facet_vertices:
        if P.dim == 2:
            yield (c, V[cyc[0]], V[cyc[1]])
        else:
            for k in range(1, len(cyc) - 1):
                yield (c, V[cyc[0]], V[cyc[k]], V[cyc[k + 1]])


def _fan_2d(P: Polytope):
    """(areas, triangle centroids) of the 2D centroid fan, vectorized."""
    c = P.vertices.mean(axis=0)
    idx = np.array(P.facet_vertices)
    A = P.vertices[idx[:, 0]] - c
    B = P.vertices[idx[:, 1]] - c
    areas = 0.5 * np.abs(A[:, 0] * B[:, 1] - A[:, 1] * B[:, 0])
    cents = (c + P.vertices[idx[:, 0]] + P.vertices[idx[:, 1]]) / 3.0
    return areas, cents


def volume(P: Polytope) -> float:
    """Lebesgue measure of ``P``."""
    if P.dim == 1:
        return float(P.vertices[1, 0] - P.vertices[0, 0])
    if P.dim == 2:
        return float(_fan_2d(P)[0].sum())
    total = 0.0
    for simp in _simplex_fans(P):
        mat = np.array(simp[1:]) - simp[0]
        total += abs(np.linalg.det(mat)) / 6.0
    return total


def centroid(P: Polytope) -> np.ndarray:
    """Volume-weighted centroid of ``P``."""
    if P.dim == 1:
        return P.vertices.mean(axis=0)
    if P.dim == 2:
        areas, cents = _fan_2d(P)
        return (cents * areas[:, None]).sum(axis=0) / areas.sum()
    tot = 0.0
    acc = np.zeros(P.dim)
    for simp in _simplex_fans(P):
        mat = np.array(simp[1:]) - simp[0]
        v = abs(np.linalg.det(mat)) / 6.0
        tot += v
        acc += v * np.mean(simp, axis=0)
    return acc / tot


def diameter(P: Polytope) -> float:
    """Largest pairwise vertex distance."""
    V = P.vertices
    d2 = np.sum((V[:, None, :] - V[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(d2.max()))


# ---------------------------------------------------------------------------
# chords and projections


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise DegenerateInput("empty interval")

    @property
    def length(self) -> float:
        return self.hi - self.lo


def chord(P: Polytope, y, u) -> Interval:
    """Chord interval I(y) = {s : lift(y) + s u in P}.

    ``y`` is given in the deterministic coordinates of u-perp.  The two
    bounds solve the min/max linear programs over the facet inequalities
    (one-variable LPs, solved in closed form).
    """
    u = check_direction(u)
    B = basis_orthogonal(u)
    return _chord_from_basis(P, np.asarray(y, dtype=float), u, B)


def _chord_from_basis(P: Polytope, y: np.ndarray, u: np.ndarray,
                      B: np.ndarray) -> Interval:
    x0 = B @ y
    scale = 1.0 + float(np.max(np.abs(P.offsets)))
    lo, hi = -np.inf, np.inf
    d = P.normals @ u
    r = P.offsets - P.normals @ x0
    for di, ri in zip(d, r):
        if di > TOL:
            hi = min(hi, ri / di)
        elif di < -TOL:
            lo = max(lo, ri / di)
        elif ri < -TOL * scale:
            raise OutsideProjection("point outside the projected body")
    if lo > hi + TOL * scale:
        raise OutsideProjection("point outside the projected body")
    mid = 0.5 * (lo + hi)
    return Interval(min(lo, mid), max(hi, mid))


def project(P: Polytope, u) -> Polytope:
    """Orthogonal projection of ``P`` onto u-perp, in its fixed basis."""
    u = check_direction(u)
    B = basis_orthogonal(u)
    return canonicalize(P.vertices @ B)


# ---------------------------------------------------------------------------
# piecewise-affine chord-endpoint structure


@dataclass(frozen=True)
class Cell:
    """A subdivision cell with one or more affine functions on it.

    ``coeffs`` has shape (k, base_dim + 1): each row is (linear..., const).
    """

    poly: Polytope
    coeffs: np.ndarray

    def evaluate(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        d = self.poly.dim
        return self.coeffs[:, :d] @ y + self.coeffs[:, d]


@dataclass(frozen=True)
class Subdivision:
    """Polyhedral subdivision of a base polytope carrying affine data."""

    base_dim: int
    base: Polytope
    cells: tuple

    def locate(self, y) -> Cell:
        y = np.asarray(y, dtype=float)
        best, best_slack = None, -np.inf
        for cell in self.cells:
            slack = float(np.min(cell.poly.offsets - cell.poly.normals @ y))
            if slack > best_slack:
                best, best_slack = cell, slack
        if best is None or best_slack < -1e-7 * (1.0 + np.abs(y).max()):
            raise OutsideProjection("point outside the subdivided base")
        return best

    def evaluate(self, y, row: int = 0) -> float:
        return float(self.locate(y).evaluate(y)[row])


def chord_structure(P: Polytope, u) -> tuple[Subdivision, Subdivision]:
    """Lower/upper chord-endpoint functions a(y), b(y) as subdivisions.

    Lower cells come from facets whose outward normal has negative
    u-component, upper cells from positive ones; facets orthogonal to u
    (vertical walls) contribute to neither.
    """
    u = check_direction(u)
    B = basis_orthogonal(u)
    base = canonicalize(P.vertices @ B)
    lower_cells, upper_cells = [], []
    for fi, cyc in enumerate(P.facet_vertices):
        n = P.normals[fi]
        c = P.offsets[fi]
        du = float(n @ u)
        if abs(du) <= TOL:
            continue
        Y = P.vertices[list(cyc)] @ B
        cell_poly = canonicalize(Y)
        lin = -(B.T @ n) / du
        const = c / du
        cell = Cell(cell_poly, np.array([np.append(lin, const)]))
        (upper_cells if du > 0 else lower_cells).append(cell)
    lower = Subdivision(P.dim - 1, base, tuple(lower_cells))
    upper = Subdivision(P.dim - 1, base, tuple(upper_cells))
    return lower, upper


def _clip_ring(ring: np.ndarray, normals: np.ndarray,
               offsets: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex CCW ring by halfplanes."""
    pts = list(ring)
    for n, c in zip(normals, offsets):
        if not pts:
            break
        out = []
        vals = [float(n @ p) - c for p in pts]
        m = len(pts)
        for i in range(m):
            j = (i + 1) % m
            vi, vj = vals[i], vals[j]
            if vi <= 1e-12:
                out.append(pts[i])
            if (vi < -1e-12 < vj) or (vj < -1e-12 < vi):
                t = vi / (vi - vj)
                out.append(pts[i] + t * (pts[j] - pts[i]))
        pts = out
    return np.array(pts) if pts else np.empty((0, ring.shape[1]))


def overlay(S1: Subdivision, S2: Subdivision) -> Subdivision:
    """Common refinement of two subdivisions of the same base.

    Each output cell lies in exactly one cell of each input and carries
    the concatenation of both affine coefficient blocks.
    """
    if S1.base_dim != S2.base_dim:
        raise BaseMismatch("subdivisions have different base dimensions")
    scale = max(1.0, diameter(S1.base))
    if (abs(volume(S1.base) - volume(S2.base)) > 1e-7 * scale ** S1.base_dim
            or hausdorff_distance(S1.base, S2.base) > 1e-7 * scale):
        raise BaseMismatch("subdivisions cover different bases")

    cells = []
    if S1.base_dim == 1:
        brk = set()
        for S in (S1, S2):
            for cell in S.cells:
                brk.update(float(v) for v in cell.poly.vertices[:, 0])
        pts = sorted(brk)
        merged = [pts[0]]
        for p in pts[1:]:
            if p - merged[-1] > 1e-12 * max(1.0, abs(p)):
                merged.append(p)
        lookup1 = _interval_lookup(S1)
        lookup2 = _interval_lookup(S2)
        for lo, hi in zip(merged[:-1], merged[1:]):
            mid = 0.5 * (lo + hi)
            c1 = lookup1(mid)
            c2 = lookup2(mid)
            poly = canonicalize(np.array([[lo], [hi]]))
            cells.append(Cell(poly, np.vstack([c1.coeffs, c2.coeffs])))
    else:
        area_tol = 1e-12 * max(1.0, scale) ** 2
        for c1 in S1.cells:
            r1 = ring2d(c1.poly)
            for c2 in S2.cells:
                clipped = _clip_ring(r1, c2.poly.normals, c2.poly.offsets)
                if clipped.shape[0] < 3:
                    continue
                if _ring_area(clipped) < area_tol:
                    continue
                try:
                    poly = canonicalize(clipped)
                except DegenerateInput:
                    continue
                cells.append(Cell(poly, np.vstack([c1.coeffs, c2.coeffs])))
    return Subdivision(S1.base_dim, S1.base, tuple(cells))


def _interval_lookup(S: Subdivision):
    """O(log n) point-location in a 1D subdivision via sorted left ends."""
    order = sorted(range(len(S.cells)),
                   key=lambda i: float(S.cells[i].poly.vertices[0, 0]))
    los = np.array([float(S.cells[i].poly.vertices[0, 0]) for i in order])

    def lookup(q: float) -> Cell:
        idx = int(np.searchsorted(los, q, side="right")) - 1
        idx = max(idx, 0)
        cell = S.cells[order[idx]]
        if q <= float(cell.poly.vertices[1, 0]) + 1e-9:
            return cell
        return S.locate(np.array([q]))

    return lookup


def _ring_area(ring: np.ndarray) -> float:
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, 1)) - np.dot(y, np.roll(x, 1))))


# ---------------------------------------------------------------------------
# distances


def _point_segment_dist(x, a, b) -> float:
    d = b - a
    denom = float(d @ d)
    t = 0.0 if denom == 0 else float(np.clip((x - a) @ d / denom, 0.0, 1.0))
    return float(np.linalg.norm(x - (a + t * d)))


def distance_to(P: Polytope, x) -> float:
    """Euclidean distance from point ``x`` to the polytope ``P``."""
    x = np.asarray(x, dtype=float)
    if P.contains(x):
        return 0.0
    if P.dim == 1:
        lo, hi = P.vertices[0, 0], P.vertices[1, 0]
        return float(max(lo - x[0], x[0] - hi, 0.0))
    best = np.inf
    V = P.vertices
    if P.dim == 2:
        for (i, j) in P.facet_vertices:
            best = min(best, _point_segment_dist(x, V[i], V[j]))
        return best
    for fi, cyc in enumerate(P.facet_vertices):
        n = P.normals[fi]
        c = P.offsets[fi]
        # foot of x on the facet plane, tested against the facet polygon
        foot = x - (float(n @ x) - c) * n
        coords = V[list(cyc)]
        inside = True
        m = len(cyc)
        for i in range(m):
            a, b = coords[i], coords[(i + 1) % m]
            edge_out = np.cross(b - a, n)
            if float(edge_out @ (foot - a)) > 1e-12:
                inside = False
                break
        if inside:
            best = min(best, abs(float(n @ x) - c))
        else:
            for i in range(m):
                a, b = coords[i], coords[(i + 1) % m]
                best = min(best, _point_segment_dist(x, a, b))
    return best


def hausdorff_distance(P: Polytope, Q: Polytope) -> float:
    """Hausdorff distance between convex polytopes (exact via vertices)."""
    if P.dim != Q.dim:
        raise DimensionMismatch("bodies live in different dimensions")
    d1 = max(distance_to(Q, v) for v in P.vertices)
    d2 = max(distance_to(P, v) for v in Q.vertices)
    return max(d1, d2)


# ---------------------------------------------------------------------------
# mutation helpers used by the experiments layer


def clip_halfspace(P: Polytope, n, c: float) -> Polytope:
    """Intersection of ``P`` with the halfspace <n, x> <= c."""
    n = np.asarray(n, dtype=float)
    vals = P.vertices @ n - c
    pts = [v for v, t in zip(P.vertices, vals) if t <= 1e-12]
    for (i, j) in edges(P):
        vi, vj = vals[i], vals[j]
        if (vi < -1e-12 < vj) or (vj < -1e-12 < vi):
            t = vi / (vi - vj)
            pts.append(P.vertices[i] + t * (P.vertices[j] - P.vertices[i]))
    if len(pts) < P.dim + 1:
        raise DegenerateInput("halfspace clip left no full-dimensional body")
    return canonicalize(np.array(pts))


def simplify2d(P: Polytope, max_vertices: int,
               rel_area_floor: float = 1e-13) -> Polytope:
    """Prune low-impact vertices of a convex polygon.

    Removes vertices whose ear area is below ``rel_area_floor`` times the
    polygon area, then the smallest ears until at most ``max_vertices``
    remain.  The result is inscribed in ``P``; the area loss is the sum of
    the removed ear areas.
    """
    import heapq

    if P.dim != 2:
        raise DimensionMismatch("simplify2d needs a 2D polytope")
    ring = ring2d(P)
    n = len(ring)
    if n <= max(max_vertices, 3):
        return P
    area = volume(P)
    prv = np.roll(np.arange(n), 1)
    nxt = np.roll(np.arange(n), -1)
    alive = np.ones(n, dtype=bool)

    def ear(i):
        a, b, c = ring[prv[i]], ring[i], ring[nxt[i]]
        return 0.5 * abs((b[0] - a[0]) * (c[1] - a[1])
                         - (b[1] - a[1]) * (c[0] - a[0]))

    heap = [(ear(i), i) for i in range(n)]
    heapq.heapify(heap)
    remaining = n
    while remaining > 3 and heap:
        a, i = heapq.heappop(heap)
        if not alive[i] or abs(a - ear(i)) > 1e-15:
            if alive[i]:
                heapq.heappush(heap, (ear(i), i))
            continue
        if remaining <= max_vertices and a >= rel_area_floor * area:
            break
        alive[i] = False
        remaining -= 1
        p, q = prv[i], nxt[i]
        nxt[p], prv[q] = q, p
        heapq.heappush(heap, (ear(p), p))
        heapq.heappush(heap, (ear(q), q))
    return canonicalize(ring[alive])
