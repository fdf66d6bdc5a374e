"""Polytope primitives: hulls, measures, chords, projections, overlays."""

import numpy as np
import pytest

from santalo_lab import (
    DegenerateInput,
    DimensionMismatch,
    OutsideProjection,
    canonicalize,
    centroid,
    chord,
    chord_structure,
    diameter,
    hausdorff_distance,
    overlay,
    project,
    volume,
)
from santalo_lab.geometry import clip_halfspace, ring2d, simplify2d

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])
E3 = np.array([0.0, 0.0, 1.0])

SQUARE = np.array([[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]])
RIGHT_TRI = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


class TestCanonicalize:
    def test_interior_point_removed(self):
        pts = np.vstack([SQUARE, [[0.0, 0.0]]])
        P = canonicalize(pts)
        assert P.n_vertices == 4
        assert P.n_facets == 4
        np.testing.assert_allclose(P.vertices, np.array(sorted(map(tuple, SQUARE))))

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            P = canonicalize(rng.normal(size=(12, 2)))
            Q = canonicalize(P.vertices)
            np.testing.assert_array_equal(P.vertices, Q.vertices)
            np.testing.assert_allclose(Q.normals, P.normals, atol=1e-12)

    def test_circle_points_all_extreme(self):
        rng = np.random.default_rng(1)
        ang = rng.uniform(0, 2 * np.pi, 100)
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
        P = canonicalize(pts)
        assert P.n_vertices == 100
        np.testing.assert_allclose(P.vertices,
                                   np.array(sorted(map(tuple, pts))), atol=1e-15)

    def test_point_order_irrelevant(self):
        rng = np.random.default_rng(2)
        pts = rng.normal(size=(20, 3))
        P = canonicalize(pts)
        Q = canonicalize(pts[::-1])
        np.testing.assert_array_equal(P.vertices, Q.vertices)

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateInput):
            canonicalize(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))
        with pytest.raises(DegenerateInput):
            canonicalize(np.array([[0.0, 0.0, 0.0], [1.0, 0, 0],
                                   [0.0, 1, 0], [1.0, 1, 0]]))

    def test_ragged_rejected(self):
        with pytest.raises(DimensionMismatch):
            canonicalize([[0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0]])

    def test_facet_incidence(self):
        rng = np.random.default_rng(3)
        P = canonicalize(rng.normal(size=(30, 3)))
        slack = P.offsets[:, None] - P.normals @ P.vertices.T
        assert slack.min() > -1e-9
        for fv in P.facet_vertices:
            assert len(fv) >= 3


class TestMeasures:
    def test_square_volume(self):
        assert volume(canonicalize(SQUARE)) == pytest.approx(4.0)

    def test_simplex_volume(self):
        pts = np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 1, 0], [0.0, 0, 1]])
        assert volume(canonicalize(pts)) == pytest.approx(1 / 6)

    def test_polygon_closed_form(self):
        for m in (3, 5, 7, 12):
            ang = 2 * np.pi * np.arange(m) / m
            P = canonicalize(np.column_stack([np.cos(ang), np.sin(ang)]))
            assert volume(P) == pytest.approx(0.5 * m * np.sin(2 * np.pi / m))
        assert 0.5 * 5 * np.sin(2 * np.pi / 5) == pytest.approx(2.37764, abs=1e-5)

    def test_centroids(self):
        np.testing.assert_allclose(centroid(canonicalize(SQUARE)), [0, 0],
                                   atol=1e-15)
        np.testing.assert_allclose(centroid(canonicalize(RIGHT_TRI)),
                                   [1 / 3, 1 / 3])

    def test_translation_equivariance(self):
        w = np.array([2.0, -5.0])
        rng = np.random.default_rng(4)
        pts = rng.normal(size=(9, 2))
        c0 = centroid(canonicalize(pts))
        c1 = centroid(canonicalize(pts + w))
        np.testing.assert_allclose(c1, c0 + w, atol=1e-12)

    def test_measures_ignore_input_order(self):
        rng = np.random.default_rng(5)
        pts = rng.normal(size=(15, 3))
        perm = rng.permutation(15)
        assert volume(canonicalize(pts)) == pytest.approx(
            volume(canonicalize(pts[perm])), rel=1e-13)
        np.testing.assert_allclose(centroid(canonicalize(pts)),
                                   centroid(canonicalize(pts[perm])), atol=1e-13)

    def test_diameter(self):
        assert diameter(canonicalize(SQUARE)) == pytest.approx(2 * np.sqrt(2))


class TestChord:
    def test_square_vertical(self):
        iv = chord(canonicalize(SQUARE), [0.5], E2)
        assert (iv.lo, iv.hi) == pytest.approx((-1.0, 1.0))

    def test_triangle_hand_value(self):
        iv = chord(canonicalize(RIGHT_TRI), [0.25], E2)
        assert iv.lo == pytest.approx(0.0, abs=1e-12)
        assert iv.hi == pytest.approx(0.75)

    def test_outside_projection(self):
        with pytest.raises(OutsideProjection):
            chord(canonicalize(SQUARE), [1.5], E2)


class TestProject:
    def test_cube_to_square(self):
        cube = canonicalize(np.array(np.meshgrid(*[[-1.0, 1.0]] * 3)).T.reshape(-1, 3))
        Q = project(cube, E3)
        assert Q.dim == 2
        assert volume(Q) == pytest.approx(4.0)

    def test_square_to_segment(self):
        Q = project(canonicalize(SQUARE), E1)
        assert Q.dim == 1
        np.testing.assert_allclose(sorted(Q.vertices[:, 0]), [-1, 1])

    def test_tetrahedron_to_triangle(self):
        pts = np.array([[1.0, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])
        u = pts[0] / np.linalg.norm(pts[0])
        Q = project(canonicalize(pts), u)
        # regular tetrahedron seen along a vertex: equilateral triangle
        ring = ring2d(Q)
        sides = np.linalg.norm(np.roll(ring, -1, axis=0) - ring, axis=1)
        assert Q.n_vertices == 3
        np.testing.assert_allclose(sides, sides[0], rtol=1e-12)


class TestChordStructure:
    def test_square_single_cells(self):
        lower, upper = chord_structure(canonicalize(SQUARE), E2)
        assert len(lower.cells) == 1 and len(upper.cells) == 1
        assert lower.evaluate([0.3]) == pytest.approx(-1.0)
        assert upper.evaluate([0.3]) == pytest.approx(1.0)

    def test_triangle_hand_functions(self):
        lower, upper = chord_structure(canonicalize(RIGHT_TRI), E2)
        for x in (0.1, 0.5, 0.9):
            assert lower.evaluate([x]) == pytest.approx(0.0, abs=1e-12)
            assert upper.evaluate([x]) == pytest.approx(1.0 - x)

    def test_matches_chord_oracle(self):
        rng = np.random.default_rng(6)
        for dim in (2, 3):
            pts = rng.normal(size=(14, dim))
            P = canonicalize(pts)
            u = rng.normal(size=dim)
            u /= np.linalg.norm(u)
            lower, upper = chord_structure(P, u)
            Q = project(P, u)
            c = centroid(Q)
            for _ in range(50):
                y = c + 0.8 * rng.uniform(-1, 1, Q.dim) * (
                    Q.vertices.max(0) - Q.vertices.min(0)) / 2
                if not Q.contains(y, tol=-1e-9):
                    continue
                iv = chord(P, y, u)
                assert lower.evaluate(y) == pytest.approx(iv.lo, abs=1e-9)
                assert upper.evaluate(y) == pytest.approx(iv.hi, abs=1e-9)

    def test_lower_convex_upper_concave(self):
        rng = np.random.default_rng(7)
        for trial in range(10):
            pts = rng.normal(size=(10, 2))
            P = canonicalize(pts)
            u = rng.normal(size=2)
            u /= np.linalg.norm(u)
            lower, upper = chord_structure(P, u)
            Q = project(P, u)
            lo, hi = Q.vertices.min(), Q.vertices.max()
            for _ in range(20):
                y1, y2 = rng.uniform(lo, hi, 2)
                lam = rng.uniform()
                ym = lam * y1 + (1 - lam) * y2
                a = lower.evaluate
                b = upper.evaluate
                assert a([ym]) <= lam * a([y1]) + (1 - lam) * a([y2]) + 1e-9
                assert b([ym]) >= lam * b([y1]) + (1 - lam) * b([y2]) - 1e-9


def _integrate_affine(S, row):
    """Exact integral of an affine cell function: area x value at centroid."""
    total = 0.0
    for cell in S.cells:
        total += volume(cell.poly) * float(cell.evaluate(centroid(cell.poly))[row])
    return total


class TestOverlay:
    def test_self_overlay(self):
        lower, upper = chord_structure(canonicalize(RIGHT_TRI), E2)
        S = overlay(lower, lower)
        assert sum(volume(c.poly) for c in S.cells) == pytest.approx(1.0)

    def test_1d_breakpoint_merge(self):
        pts = np.array([[0.0, 0.0], [0.4, 1.0], [1.0, 0.0],
                        [0.0, -1.0], [0.7, -1.2], [1.0, -1.0]])
        P = canonicalize(pts)
        lower, upper = chord_structure(P, E2)
        S = overlay(lower, upper)
        breaks = sorted({round(float(v), 9) for c in S.cells
                         for v in c.poly.vertices[:, 0]})
        assert breaks == pytest.approx([0.0, 0.4, 0.7, 1.0])

    def test_area_conservation_2d(self):
        rng = np.random.default_rng(8)
        for trial in range(5):
            P = canonicalize(rng.normal(size=(12, 3)))
            u = rng.normal(size=3)
            u /= np.linalg.norm(u)
            lower, upper = chord_structure(P, u)
            S = overlay(lower, upper)
            assert sum(volume(c.poly) for c in S.cells) == pytest.approx(
                volume(project(P, u)), abs=1e-9)

    def test_fubini(self):
        rng = np.random.default_rng(9)
        for dim in (2, 3):
            for trial in range(5):
                P = canonicalize(rng.normal(size=(11, dim)))
                u = rng.normal(size=dim)
                u /= np.linalg.norm(u)
                lower, upper = chord_structure(P, u)
                S = overlay(lower, upper)
                integral = _integrate_affine(S, 1) - _integrate_affine(S, 0)
                assert integral == pytest.approx(volume(P), abs=1e-8)


class TestHausdorff:
    def test_zero_on_equal(self):
        P = canonicalize(SQUARE)
        assert hausdorff_distance(P, P) == 0.0

    def test_scaled_squares(self):
        P = canonicalize(SQUARE)
        Q = canonicalize(2 * SQUARE)
        assert hausdorff_distance(P, Q) == pytest.approx(np.sqrt(2))
        assert hausdorff_distance(Q, P) == pytest.approx(np.sqrt(2))

    def test_translation(self):
        P = canonicalize(SQUARE / 2 + 0.5)  # unit square
        Q = P.translate([3.0, 0.0])
        assert hausdorff_distance(P, Q) == pytest.approx(3.0)

    def test_dimension_mismatch(self):
        P = canonicalize(SQUARE)
        cube = canonicalize(np.array(np.meshgrid(*[[-1.0, 1.0]] * 3)).T.reshape(-1, 3))
        with pytest.raises(DimensionMismatch):
            hausdorff_distance(P, cube)


class TestEditing:
    def test_clip_halfspace(self):
        P = canonicalize(SQUARE)
        Q = clip_halfspace(P, np.array([1.0, 0.0]), 0.0)
        assert volume(Q) == pytest.approx(2.0)
        assert Q.vertices[:, 0].max() == pytest.approx(0.0, abs=1e-12)

    def test_simplify2d_budget_and_accuracy(self):
        ang = 2 * np.pi * np.arange(400) / 400
        P = canonicalize(np.column_stack([np.cos(ang), np.sin(ang)]))
        Q = simplify2d(P, 64)
        assert Q.n_vertices <= 64
        assert hausdorff_distance(P, Q) < 5e-3
        assert simplify2d(Q, 64) is Q
