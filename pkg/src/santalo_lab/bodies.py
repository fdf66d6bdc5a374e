"""Test-body generators and the JSON body file format."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import BadSpec, DegenerateInput, ParseError
from .geometry import Polytope, canonicalize, check_direction


@dataclass(frozen=True)
class BodySpec:
    """Declarative description of a generated body.

    ``params`` is kind-specific: m for polygons, axes/rot for ellipses,
    npoints for random kinds, path for from-file.  The seed fully
    determines random kinds.
    """

    kind: str
    dim: int = 2
    params: dict = field(default_factory=dict)
    seed: int = 0


KINDS = ("polygon-regular", "polygon-random", "ellipse", "ellipsoid", "cube",
         "simplex", "crosspolytope", "ball-approx", "from-file")


def regular_polygon(m: int, circumradius: float = 1.0) -> Polytope:
    """Regular m-gon, circumradius 1, first vertex at angle 0."""
    if m < 3:
        raise BadSpec("regular polygon needs m >= 3")
    ang = 2 * np.pi * np.arange(m) / m
    return canonicalize(circumradius * np.column_stack([np.cos(ang), np.sin(ang)]))


def random_polygon(seed: int, npoints: int = 8) -> Polytope:
    """Hull of seeded points on a randomly perturbed ellipse boundary."""
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.6, 1.8)
    b = rng.uniform(0.6, 1.8)
    rot = rng.uniform(0, np.pi)
    ang = np.sort(rng.uniform(0, 2 * np.pi, npoints))
    r = 1.0 + rng.uniform(-0.15, 0.15, npoints)
    pts = np.column_stack([a * r * np.cos(ang), b * r * np.sin(ang)])
    R = np.array([[np.cos(rot), -np.sin(rot)], [np.sin(rot), np.cos(rot)]])
    pts = pts @ R.T + rng.uniform(-0.5, 0.5, 2)
    return canonicalize(pts)


def random_polytope_3d(seed: int, npoints: int = 14) -> Polytope:
    """Hull of seeded points on a randomly scaled noisy sphere."""
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(npoints, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    r = 1.0 + rng.uniform(-0.2, 0.2, npoints)
    axes = rng.uniform(0.6, 1.6, 3)
    pts = dirs * r[:, None] * axes
    return canonicalize(pts + rng.uniform(-0.3, 0.3, 3))


def ellipse_polygon(a: float, b: float, rot: float = 0.0,
                    m: int = 256) -> Polytope:
    """Inscribed m-gon of the ellipse with semi-axes a, b rotated by rot."""
    ang = 2 * np.pi * np.arange(m) / m
    pts = np.column_stack([a * np.cos(ang), b * np.sin(ang)])
    R = np.array([[np.cos(rot), -np.sin(rot)], [np.sin(rot), np.cos(rot)]])
    return canonicalize(pts @ R.T)


def ellipse_chord_aligned(a: float, b: float, rot: float, u,
                          m: int = 256) -> Polytope:
    """Inscribed m-gon of an ellipse sampled in chords parallel to ``u``.

    Vertices come in fiber pairs lying exactly on the ellipse, so the
    chord midpoints of the polygon are exactly collinear and the whole
    Steiner interpolation family along ``u`` consists of exact affine
    images of each other.
    """
    u = check_direction(u)
    R = np.array([[np.cos(rot), -np.sin(rot)], [np.sin(rot), np.cos(rot)]])
    M = R @ np.diag([a, b])
    Minv = np.linalg.inv(M)
    w = Minv @ u
    w = w / np.linalg.norm(w)
    p = np.array([-w[1], w[0]])
    n_fibers = max(m // 2, 4)
    phis = np.linspace(0.0, np.pi, n_fibers + 1)
    pts = []
    for phi in phis:
        y = np.cos(phi)
        s = np.sin(phi)
        if s < 1e-12:
            pts.append(y * p)
        else:
            pts.append(y * p + s * w)
            pts.append(y * p - s * w)
    return canonicalize(np.array(pts) @ M.T)


def _icosahedron() -> np.ndarray:
    phi = (1 + np.sqrt(5)) / 2
    v = []
    for s1 in (-1, 1):
        for s2 in (-1, 1):
            v.append([0, s1, s2 * phi])
            v.append([s1, s2 * phi, 0])
            v.append([s2 * phi, 0, s1])
    v = np.array(v, dtype=float)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sphere_polytope(subdivisions: int = 3) -> Polytope:
    """Subdivided-icosahedron approximation of the unit sphere.

    ``subdivisions`` doublings of the icosahedron edge graph; 2 gives 320
    facets, 3 gives 1280.
    """
    pts = _icosahedron()
    tris = canonicalize(pts)
    verts = {tuple(np.round(p, 12)) for p in pts}
    for _ in range(subdivisions):
        from scipy.spatial import ConvexHull
        hull = ConvexHull(np.array(sorted(verts)))
        base = np.array(sorted(verts))
        new = set(verts)
        for simp in hull.simplices:
            tri = base[simp]
            for i in range(3):
                mid = 0.5 * (tri[i] + tri[(i + 1) % 3])
                mid = mid / np.linalg.norm(mid)
                new.add(tuple(np.round(mid, 12)))
        verts = new
    del tris
    return canonicalize(np.array(sorted(verts)))


def ellipsoid_polytope(axes, rot_seed: int = 0, subdivisions: int = 3) -> Polytope:
    """Rotated triaxial ellipsoid approximation built on a geodesic sphere."""
    axes = np.asarray(axes, dtype=float)
    if axes.shape != (3,) or np.any(axes <= 0):
        raise BadSpec("ellipsoid needs three positive semi-axes")
    S = sphere_polytope(subdivisions)
    rng = np.random.default_rng(rot_seed)
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return canonicalize((S.vertices * axes) @ Q.T)


def _cube(dim: int) -> Polytope:
    corners = np.array(np.meshgrid(*([[-1.0, 1.0]] * dim))).T.reshape(-1, dim)
    return canonicalize(corners)


def _simplex(dim: int) -> Polytope:
    if dim == 2:
        return regular_polygon(3)
    pts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return canonicalize(pts / np.sqrt(3.0))


def _crosspolytope(dim: int) -> Polytope:
    pts = np.vstack([np.eye(dim), -np.eye(dim)])
    return canonicalize(pts)


def generate_body(spec: BodySpec) -> Polytope:
    """Deterministic body per (kind, params, seed)."""
    if spec.kind not in KINDS:
        raise BadSpec(f"unknown body kind {spec.kind!r}")
    p = spec.params
    try:
        if spec.kind == "polygon-regular":
            return regular_polygon(int(p.get("m", 6)), float(p.get("circumradius", 1.0)))
        if spec.kind == "polygon-random":
            return random_polygon(spec.seed, int(p.get("npoints", 8)))
        if spec.kind == "ellipse":
            return ellipse_polygon(float(p.get("a", 2.0)), float(p.get("b", 1.0)),
                                   float(p.get("rot", 0.0)), int(p.get("m", 256)))
        if spec.kind == "ellipsoid":
            axes = (float(p.get("a", 1.5)), float(p.get("b", 1.0)),
                    float(p.get("c", 0.8)))
            return ellipsoid_polytope(axes, spec.seed,
                                      int(p.get("subdivisions", 3)))
        if spec.kind == "cube":
            return _cube(spec.dim)
        if spec.kind == "simplex":
            return _simplex(spec.dim)
        if spec.kind == "crosspolytope":
            return _crosspolytope(spec.dim)
        if spec.kind == "ball-approx":
            if spec.dim == 2:
                return regular_polygon(int(p.get("m", 256)))
            return sphere_polytope(int(p.get("subdivisions", 3)))
        return read_body(p["path"])
    except (KeyError, ValueError, TypeError) as exc:
        raise BadSpec(f"invalid parameters for kind {spec.kind!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# file format: JSON object {"dim": n, "vertices": [[...], ...]}


def write_body(P: Polytope, path: str) -> None:
    """Serialize vertices to JSON; facets are recomputed on load."""
    payload = {"dim": P.dim, "vertices": [list(map(float, v)) for v in P.vertices]}
    _atomic_write(path, json.dumps(payload, indent=1))


def read_body(path: str) -> Polytope:
    """Load a body file written by :func:`write_body`."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict) or "dim" not in data or "vertices" not in data:
        raise ParseError(f"{path}: expected object with 'dim' and 'vertices'")
    dim = data["dim"]
    verts = data["vertices"]
    if not isinstance(verts, list) or not verts:
        raise ParseError(f"{path}: 'vertices' must be a non-empty list")
    for i, row in enumerate(verts):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"{path}: vertex {i} has {len(row) if isinstance(row, list) else '?'} "
                             f"coordinates, expected {dim}")
        if not all(isinstance(x, (int, float)) for x in row):
            raise ParseError(f"{path}: vertex {i} has non-numeric coordinates")
    try:
        return canonicalize(np.array(verts, dtype=float))
    except DegenerateInput:
        raise
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def direction_set(dim: int, num: int) -> np.ndarray:
    """Deterministic direction family: equal angles (2D), Fibonacci (3D)."""
    if dim == 2:
        ang = np.pi * np.arange(num) / num
        return np.column_stack([np.cos(ang), np.sin(ang)])
    golden = np.pi * (3.0 - np.sqrt(5.0))
    k = np.arange(num)
    z = (k + 0.5) / num  # upper hemisphere suffices for chord directions
    r = np.sqrt(1.0 - z ** 2)
    th = golden * k
    return np.column_stack([r * np.cos(th), r * np.sin(th), z])


def direction_from_angle(theta: float) -> np.ndarray:
    return np.array([np.cos(theta), np.sin(theta)])

