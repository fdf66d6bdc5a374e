"""Symmetrals, interpolation snapshots, shadow systems, shear fits."""

import numpy as np
import pytest

from santalo_lab import (
    AffineShear,
    Interval,
    ParamOutOfRange,
    ShadowSystem,
    SteinerFamily,
    TooFewChords,
    ZeroDelta,
    canonicalize,
    fit_affine_shear,
    hausdorff_distance,
    midpoint_deviation,
    reflect,
    santalo_point,
    steiner_snapshot,
    steiner_symmetral,
    vertex_shadow_snapshot,
    volume,
)
from santalo_lab.bodies import (
    ellipse_chord_aligned,
    ellipse_polygon,
    random_polygon,
    random_polytope_3d,
)

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])
SQUARE = canonicalize(np.array([[-1.0, -1], [-1, 1], [1, -1], [1, 1]]))
RIGHT_TRI = canonicalize(np.array([[0.0, 0], [1, 0], [0, 1]]))


def _random_direction(rng, dim):
    u = rng.normal(size=dim)
    return u / np.linalg.norm(u)


class TestReflect:
    def test_symmetric_square(self):
        assert hausdorff_distance(reflect(SQUARE, E1), SQUARE) < 1e-12

    def test_coordinate_flip(self):
        Q = reflect(RIGHT_TRI, E1)
        expect = canonicalize(np.array([[0.0, 0], [-1, 0], [0, 1]]))
        assert hausdorff_distance(Q, expect) == 0.0

    def test_involution(self):
        P = random_polygon(0, 9)
        u = _random_direction(np.random.default_rng(0), 2)
        np.testing.assert_allclose(reflect(reflect(P, u), u).vertices,
                                   P.vertices, atol=1e-12)


class TestSteinerSymmetral:
    def test_square_fixed(self):
        assert hausdorff_distance(steiner_symmetral(SQUARE, E2), SQUARE) < 1e-12

    def test_triangle_hand_value(self):
        Q = steiner_symmetral(RIGHT_TRI, E2)
        expect = canonicalize(np.array([[0.0, -0.5], [0.0, 0.5], [1.0, 0.0]]))
        assert hausdorff_distance(Q, expect) < 1e-12

    def test_volume_preserved(self):
        rng = np.random.default_rng(20)
        for trial in range(20):
            P = random_polygon(trial, 9)
            u = _random_direction(rng, 2)
            assert volume(steiner_symmetral(P, u)) == pytest.approx(
                volume(P), abs=1e-9 * volume(P))
        for trial in range(5):
            P = random_polytope_3d(trial)
            u = _random_direction(rng, 3)
            assert volume(steiner_symmetral(P, u)) == pytest.approx(
                volume(P), abs=1e-8 * volume(P))

    def test_symmetral_is_symmetric(self):
        rng = np.random.default_rng(21)
        for dim in (2, 3):
            P = random_polygon(7, 10) if dim == 2 else random_polytope_3d(7)
            u = _random_direction(rng, dim)
            S = steiner_symmetral(P, u)
            assert hausdorff_distance(reflect(S, u), S) < 1e-9


class TestSteinerSnapshot:
    def test_endpoints(self):
        rng = np.random.default_rng(22)
        for dim in (2, 3):
            P = random_polygon(3, 9) if dim == 2 else random_polytope_3d(3)
            u = _random_direction(rng, dim)
            assert hausdorff_distance(steiner_snapshot(P, u, -1.0), P) < 1e-9
            assert hausdorff_distance(steiner_snapshot(P, u, 1.0),
                                      reflect(P, u)) < 1e-9
            assert hausdorff_distance(steiner_snapshot(P, u, 0.0),
                                      steiner_symmetral(P, u)) < 1e-9

    def test_volume_t_independent(self):
        rng = np.random.default_rng(23)
        P = random_polygon(11, 10)
        u = _random_direction(rng, 2)
        fam = SteinerFamily(P, u)
        V = volume(P)
        for t in np.linspace(-1, 1, 9):
            assert volume(fam.snapshot(t)) == pytest.approx(V, abs=1e-8 * V)

    def test_polar_volume_even_in_t(self):
        rng = np.random.default_rng(24)
        P = random_polygon(13, 9)
        u = _random_direction(rng, 2)
        fam = SteinerFamily(P, u)
        for t in (0.3, 0.7, 1.0):
            vp = santalo_point(fam.snapshot(t)).polar_volume
            vm = santalo_point(fam.snapshot(-t)).polar_volume
            assert vp == pytest.approx(vm, rel=1e-6)

    def test_param_out_of_range(self):
        with pytest.raises(ParamOutOfRange):
            steiner_snapshot(SQUARE, E2, 1.5)


class TestShadowSystem:
    def test_zero_speeds_fixed(self):
        S = ShadowSystem(E2, SQUARE.vertices, np.zeros(4), Interval(-1, 1))
        for t in (-1.0, 0.0, 0.5):
            assert hausdorff_distance(vertex_shadow_snapshot(S, t), SQUARE) == 0.0

    def test_uniform_speeds_translate(self):
        S = ShadowSystem(E2, SQUARE.vertices, np.ones(4), Interval(-1, 1))
        Q = vertex_shadow_snapshot(S, 0.7)
        assert hausdorff_distance(Q, SQUARE.translate([0.0, 0.7])) < 1e-12

    def test_range_enforced(self):
        S = ShadowSystem(E2, SQUARE.vertices, np.ones(4), Interval(-1, 1))
        with pytest.raises(ParamOutOfRange):
            vertex_shadow_snapshot(S, 2.0)

    def test_speed_count_validated(self):
        with pytest.raises(ParamOutOfRange):
            ShadowSystem(E2, SQUARE.vertices, np.ones(3), Interval(-1, 1))


class TestAffineShearFit:
    def test_identity(self):
        fit = fit_affine_shear(SQUARE, SQUARE, E2, 1.0)
        assert fit is not None
        np.testing.assert_allclose(fit.v, [0, 0], atol=1e-12)
        assert fit.c == pytest.approx(0.0, abs=1e-12)
        assert fit.residual < 1e-12

    def test_constructed_shear_recovered(self):
        P = canonicalize(np.array([[0.0, 0], [1, 0], [0, 1], [1, 1]]))
        sheared = canonicalize(P.vertices + 0.3 * P.vertices[:, :1] * E2)
        fit = fit_affine_shear(P, sheared, E2, 1.0)
        assert fit is not None
        np.testing.assert_allclose(fit.v, [0.3, 0.0], atol=1e-10)
        assert fit.c == pytest.approx(0.0, abs=1e-10)

    def test_rotation_rejected(self):
        th = np.deg2rad(10)
        R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        assert fit_affine_shear(SQUARE, canonicalize(SQUARE.vertices @ R.T),
                                E2, 1.0) is None

    def test_zero_delta(self):
        with pytest.raises(ZeroDelta):
            fit_affine_shear(SQUARE, SQUARE, E2, 0.0)

    def test_apply_batched(self):
        shear = AffineShear(E2, 1.0, np.array([0.5, 0.0]), 0.25, 0.0)
        X = np.array([[2.0, 0.0], [0.0, 1.0]])
        out = shear.apply(X)
        np.testing.assert_allclose(out, [[2.0, 1.25], [0.0, 1.25]])
        np.testing.assert_allclose(shear.apply(X[0]), out[0])


class TestMidpointDeviation:
    def test_symmetric_square_zero(self):
        assert midpoint_deviation(SQUARE, E2, 64) < 1e-9

    def test_unit_square_oblique(self):
        unit_sq = canonicalize(np.array([[0.0, 0], [1, 0], [0, 1], [1, 1]]))
        u = np.array([1.0, 2.0]) / np.sqrt(5.0)
        assert midpoint_deviation(unit_sq, u, 128) > 0.01

    def test_ellipse_small(self):
        E = ellipse_polygon(2.0, 1.0, 0.0, 256)
        for u in (E1, E2, np.array([0.6, 0.8])):
            assert midpoint_deviation(E, u, 128) < 2e-3

    def test_chord_aligned_ellipse_exact(self):
        u = np.array([0.6, 0.8])
        E = ellipse_chord_aligned(1.7, 0.9, 0.4, u, 128)
        assert midpoint_deviation(E, u, 128) < 1e-10

    def test_too_few_chords(self):
        with pytest.raises(TooFewChords):
            midpoint_deviation(SQUARE, E2, 3)
