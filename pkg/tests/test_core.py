import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracflow import (DimensionMismatchError, DomainError, Frame, Grid, ScalarField,
                      fourier_forward, fourier_inverse, frame_from_angles, project)
from fracflow.core import (SpectralField, VectorField, apply_multiplier, as_direction,
                           delta_field, gaussian_field)

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)


class TestFrames:
    def test_identity_rotation(self):
        np.testing.assert_allclose(frame_from_angles([0.0]).matrix, np.eye(2))

    def test_quarter_turn(self):
        np.testing.assert_allclose(frame_from_angles([np.pi / 2]).matrix, [[0, 1], [-1, 0]],
                                   atol=1e-15)

    @given(st.lists(angles, min_size=3, max_size=3))
    def test_three_d_gram(self, a):
        m = frame_from_angles(a).matrix
        assert np.abs(m @ m.T - np.eye(3)).max() < 1e-12

    @given(angles)
    def test_completeness(self, a):
        fr = frame_from_angles([a])
        s = sum(np.outer(th, th) for th in fr)
        assert np.abs(s - np.eye(2)).max() < 1e-12

    def test_rejects_non_orthonormal(self):
        with pytest.raises(DomainError):
            Frame(np.array([[1.0, 0.0], [1.0, 1.0]]) / np.sqrt(2))

    def test_wrong_angle_count(self):
        with pytest.raises(DimensionMismatchError):
            frame_from_angles([0.1, 0.2], dim=2)

    def test_direction_norm(self):
        assert np.allclose(as_direction([0.6, 0.8]), [0.6, 0.8])
        with pytest.raises(DomainError):
            as_direction([1.0, 1.0])

    def test_speeds(self):
        fr = frame_from_angles([0.3])
        u = np.array([1.0, 2.0])
        np.testing.assert_allclose(fr.speeds(u), [th @ u for th in fr])


class TestProject:
    def test_canonical(self):
        np.testing.assert_allclose(project([3.0, 4.0], Frame.canonical(2)), [3, 4])

    def test_rotated(self):
        np.testing.assert_allclose(project([1.0, 0.0], frame_from_angles([np.pi / 2])), [0, -1],
                                   atol=1e-15)

    @given(angles, st.floats(-50, 50), st.floats(-50, 50))
    def test_norm_preserved(self, a, x, y):
        p = project([x, y], frame_from_angles([a]))
        assert abs(p @ p - (x * x + y * y)) <= 1e-12 * max(1.0, x * x + y * y)


class TestGrid:
    def test_spacing_and_wavenumbers(self):
        g = Grid(16, 8.0)
        assert g.dx == (0.5,)
        k = np.sort(g.wavenumbers()[0])
        np.testing.assert_allclose(k, 2 * np.pi * np.arange(-8, 8) / 8.0)

    @pytest.mark.parametrize("N", [4, 12, 100])
    def test_bad_sizes(self, N):
        with pytest.raises(DomainError):
            Grid(N, 1.0)

    def test_origin_default_centres_box(self):
        g = Grid((8, 16), (4.0, 8.0))
        assert g.origin == (-2.0, -4.0)
        assert g.axes()[1][0] == -4.0

    def test_dict_round_trip(self):
        g = Grid((8, 32), (1.5, 7.0), (0.25, -3.0))
        assert Grid.from_dict(g.to_dict()) == g

    def test_value_count(self):
        with pytest.raises(DimensionMismatchError):
            ScalarField(Grid(8, 1.0), np.zeros(9))


class TestFourier:
    def test_constant_is_dc(self):
        g = Grid((16, 8), (3.0, 5.0))
        F = fourier_forward(ScalarField(g, np.ones(g.shape))).values
        assert abs(F[0, 0] - 15.0) < 1e-12
        F[0, 0] = 0
        assert np.abs(F).max() < 1e-12

    def test_single_harmonic(self):
        g = Grid(32, 4.0, origin=0.0)
        x = g.axes()[0]
        F = fourier_forward(ScalarField(g, np.cos(2 * np.pi * x / 4.0))).values
        big = np.nonzero(np.abs(F) > 1e-10)[0]
        assert sorted(big.tolist()) == [1, 31]
        assert abs(F[1] - F[31]) < 1e-12

    def test_round_trip(self, rng):
        g = Grid((32, 16, 8), (2.0, 3.0, 4.0))
        f = ScalarField(g, rng.standard_normal(g.shape))
        back = fourier_inverse(fourier_forward(f))
        assert np.linalg.norm(back.values - f.values) / np.linalg.norm(f.values) < 1e-10

    def test_sign_convention(self):
        # F(k) = sum f exp(+ikx) dx: a delta at x0 has F = exp(i k x0)
        g = Grid(64, 8.0)
        f = np.zeros(64)
        j = 40
        f[j] = 1 / g.dx[0]
        F = fourier_forward(ScalarField(g, f)).values
        x0 = g.axes()[0][j]
        np.testing.assert_allclose(F, np.exp(1j * g.wavenumbers()[0] * x0), atol=1e-12)

    def test_parseval(self, rng):
        g = Grid(64, 10.0)
        f = ScalarField(g, rng.standard_normal(64))
        F = fourier_forward(f).values
        lhs = np.sum(f.values ** 2) * g.dx[0]
        rhs = np.sum(np.abs(F) ** 2) * (2 * np.pi / g.L[0]) / (2 * np.pi)
        assert abs(lhs - rhs) < 1e-10 * lhs

    def test_linearity(self, rng):
        g = Grid(32, 2.0)
        a, b = rng.standard_normal(32), rng.standard_normal(32)
        Fa = fourier_forward(ScalarField(g, a)).values
        Fb = fourier_forward(ScalarField(g, b)).values
        Fab = fourier_forward(ScalarField(g, 2 * a - 3 * b)).values
        assert np.abs(Fab - (2 * Fa - 3 * Fb)).max() < 1e-12


class TestFields:
    def test_delta_mass(self):
        g = Grid((16, 16), (4.0, 4.0))
        assert abs(delta_field(g).mass() - 1) < 1e-12

    def test_gaussian_density(self):
        g = Grid((64, 64), (16.0, 16.0))
        f = gaussian_field(g, [0.5, -1.0], 1.2)
        assert f.density_issues() == []
        assert f.boundary_mass_fraction() < 1e-6

    def test_density_issues_flagged(self):
        g = Grid(8, 1.0)
        bad = ScalarField(g, -np.ones(8))
        assert len(bad.density_issues()) == 2

    def test_boundary_mass(self):
        g = Grid(8, 8.0)
        v = np.zeros(8)
        v[0] = 1.0
        v[4] = 3.0
        assert ScalarField(g, v).boundary_mass_fraction() == 0.25

    def test_multiplier_identity(self, rng):
        g = Grid(32, 3.0)
        f = ScalarField(g, rng.standard_normal(32))
        assert np.abs(apply_multiplier(f, np.ones(32)).values - f.values).max() < 1e-12

    def test_vector_field_shape(self):
        g = Grid((8, 8), (1.0, 1.0))
        vf = VectorField.constant_times([1.0, 2.0], ScalarField(g, np.ones((8, 8))))
        assert vf.components.shape == (2, 8, 8)
        assert np.all(vf[1].values == 2.0)
        with pytest.raises(DimensionMismatchError):
            VectorField(g, np.zeros((3, 8, 8)))

    def test_spectral_field_size(self):
        with pytest.raises(DimensionMismatchError):
            SpectralField(Grid(8, 1.0), np.zeros(4))

    def test_mismatched_grids(self):
        a = ScalarField(Grid(8, 1.0), np.zeros(8))
        b = ScalarField(Grid(8, 2.0), np.zeros(8))
        with pytest.raises(DimensionMismatchError):
            a + b
