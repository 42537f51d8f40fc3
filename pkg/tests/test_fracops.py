import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate
from scipy.special import gamma

from fracflow import (Frame, Grid, OrderError, QuadratureError, ScalarField,
                      UnsupportedDirectionError, frame_from_angles)
from fracflow.core import VectorField, field_from_function, gaussian_field
from fracflow.fracops import (apply_directional_fractional, directional_derivative_gl,
                              directional_derivative_marchaud, directional_operator,
                              fractional_divergence, fractional_gradient,
                              fractional_power_directional_second, fractional_shift, gl_weights,
                              hypersingular_constant, hypersingular_directional,
                              riesz_derivative_1d, spectral_symbol, symbol_from_projection)
from fracflow.solvers import SolveSpec, solve_advection

betas = st.floats(0.05, 1.95)


def periodic_ecos(N):
    g = Grid(N, 2 * np.pi, origin=0.0)
    return g, field_from_function(g, lambda x: np.exp(np.cos(x)))


class TestSymbol:
    def test_half_order_at_one(self):
        assert abs(spectral_symbol(0.5, [1.0], 1.0) - np.exp(-0.25j * np.pi)) < 1e-15

    @given(st.floats(-100, 100))
    def test_first_order_exact(self, z):
        assert spectral_symbol(1.0, [1.0], z) == -1j * z

    def test_negative_projection(self):
        assert abs(spectral_symbol(0.5, [1.0], -2.0) - np.sqrt(2) * np.exp(0.25j * np.pi)) < 1e-15

    def test_projection_through_direction(self):
        th = np.array([0.6, 0.8])
        k = np.array([[1.0, 2.0], [-3.0, 0.5]])
        np.testing.assert_allclose(spectral_symbol(0.7, th, k), symbol_from_projection(0.7, k @ th))

    @given(betas, betas, st.floats(-20, 20))
    def test_exponent_law_on_harmonics(self, b1, b2, z):
        lhs = symbol_from_projection(b1, z) * symbol_from_projection(b2, z)
        rhs = symbol_from_projection(b1 + b2, z)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))

    @given(betas, st.floats(0.01, 20))
    def test_hermitian(self, b, z):
        assert abs(symbol_from_projection(b, -z) - np.conj(symbol_from_projection(b, z))) < 1e-12 * (1 + z ** 2)

    @given(st.floats(0, 2 * np.pi), betas, st.floats(-5, 5), st.floats(-5, 5))
    def test_rotation_invariance(self, phi, b, k1, k2):
        R = frame_from_angles([phi]).matrix.T
        th = np.array([0.6, 0.8])
        k = np.array([k1, k2])
        assert abs(spectral_symbol(b, R @ th, R @ k) - spectral_symbol(b, th, k)) < 1e-10


class TestSpectral:
    def test_first_derivative(self):
        g = Grid(128, 20.0)
        f = gaussian_field(g, [0.3], 1.0)
        x = g.axes()[0]
        d = apply_directional_fractional(f, [1.0], 1.0).values
        assert np.abs(d - (-(x - 0.3) * f.values)).max() < 1e-12

    @pytest.mark.parametrize("beta", [0.3, 0.5, 1.4])
    def test_harmonic_diagonal(self, beta):
        g = Grid((32, 32), (2 * np.pi, 2 * np.pi), origin=(0.0, 0.0))
        th = frame_from_angles([0.4])[0]
        k0 = np.array([3.0, -2.0])
        x, y = g.mesh()
        wave = np.exp(-1j * (k0[0] * x + k0[1] * y))
        sym = spectral_symbol(beta, th, k0)
        re = apply_directional_fractional(ScalarField(g, wave.real), th, beta).values
        im = apply_directional_fractional(ScalarField(g, wave.imag), th, beta).values
        assert np.abs(re + 1j * im - sym * wave).max() < 1e-12

    def test_exponent_law_twice(self):
        g = Grid(64, 2 * np.pi, origin=0.0)
        f = field_from_function(g, lambda x: np.cos(3 * x) + 0.5 * np.sin(5 * x))
        once = apply_directional_fractional(f, [1.0], 0.9).values
        twice = apply_directional_fractional(apply_directional_fractional(f, [1.0], 0.4), [1.0], 0.5).values
        assert np.abs(once - twice).max() < 1e-12

    def test_matches_gl_on_gaussian(self):
        g = Grid(2048, 20.0)
        f = gaussian_field(g, [0.0], 1.0)
        sp = apply_directional_fractional(f, [1.0], 0.5).values
        gl = directional_derivative_gl(f, 0, 0.5).values
        assert np.abs(sp - gl).max() < 1e-3

    def test_order_range(self):
        f = gaussian_field(Grid(32, 10.0))
        with pytest.raises(OrderError):
            apply_directional_fractional(f, [1.0], 2.5)
        with pytest.raises(OrderError):
            fractional_gradient(f, Frame.canonical(1), 1.5)


class TestGL:
    def test_weights(self):
        np.testing.assert_allclose(gl_weights(0.5, 4), [1.0, -0.5, -0.125, -0.0625], rtol=1e-15)

    @given(st.floats(0.05, 1.95))
    def test_weights_binomial(self, b):
        w = gl_weights(b, 8)
        ref = [(-1) ** j * float(mp.binomial(b, j)) for j in range(8)]
        np.testing.assert_allclose(w, ref, rtol=1e-12, atol=1e-15)

    def test_first_order_is_backward_difference(self):
        g, f = periodic_ecos(64)
        v = f.values
        want = (v - np.roll(v, 1)) / g.dx[0]
        assert np.abs(directional_derivative_gl(f, 0, 1.0).values - want).max() < 1e-12

    @pytest.mark.parametrize("beta", [0.3, 0.5, 0.8, 1.5])
    def test_first_order_convergence(self, beta):
        errs = []
        for N in (128, 256, 512):
            g, f = periodic_ecos(N)
            sp = apply_directional_fractional(f, [1.0], beta).values
            errs.append(np.abs(directional_derivative_gl(f, 0, beta).values - sp).max())
        slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(np.abs(slopes - 1.0) < 0.1)

    def test_axis_directions_only(self):
        g = Grid((16, 16), (1.0, 1.0))
        f = ScalarField(g, np.zeros(g.shape))
        with pytest.raises(UnsupportedDirectionError):
            directional_derivative_gl(f, 0, 0.5, theta=[0.6, 0.8])
        with pytest.raises(UnsupportedDirectionError):
            directional_derivative_gl(f, 0, 0.5, theta=[-1.0, 0.0])
        out = directional_derivative_gl(f, 0, 0.5, theta=[0.0, 1.0])
        assert out.values.shape == g.shape


class TestMarchaud:
    @pytest.mark.parametrize("beta", [0.2, 0.5, 0.9])
    def test_constant(self, beta):
        assert abs(directional_derivative_marchaud(lambda x: np.full(np.shape(x), 3.0), [0.4], [1.0], beta)) < 1e-12

    @pytest.mark.parametrize("beta,c", [(0.3, 1.0), (0.5, 2.0), (0.8, 0.5)])
    def test_exponential_eigenfunction(self, beta, c):
        th = np.array([0.6, 0.8])
        x = np.array([0.2, -0.1])
        f = lambda p: np.exp(c * (p @ th))
        got = directional_derivative_marchaud(f, x, th, beta)
        assert abs(got - c ** beta * np.exp(c * (x @ th))) < 1e-6

    def test_sine_phase(self):
        got = directional_derivative_marchaud(np.sin, [0.0], [1.0], 0.5, period=2 * np.pi)
        assert abs(got - np.sin(np.pi / 4)) < 1e-10
        assert abs(got - 0.70711) < 1e-5

    def test_against_fourier_integral(self):
        # (theta.grad)^beta exp(-x^2) = (1/pi) Re int_0^inf (-ik)^beta sqrt(pi) e^(-k^2/4) e^(-ikx) dk
        mp.mp.dps = 30
        beta, x0 = 0.4, 0.7
        g = lambda k: mp.re((-1j * k) ** beta * mp.exp(-1j * k * x0)) * mp.sqrt(mp.pi) * mp.exp(-k * k / 4)
        ref = float(mp.quad(g, [0, 2, 5, 10, 20, mp.inf]) / mp.pi)
        got = directional_derivative_marchaud(lambda x: np.exp(-x * x), [x0], [1.0], beta)
        assert abs(got - ref) < 1e-12

    @pytest.mark.parametrize("beta", [0.3, 0.5, 0.8])
    def test_matches_spectral_periodic(self, beta):
        g, f = periodic_ecos(256)
        sp = apply_directional_fractional(f, [1.0], beta).values
        xs = g.axes()[0]
        for i in (0, 37, 100, 201):
            m = directional_derivative_marchaud(lambda x: np.exp(np.cos(x)), [xs[i]], [1.0], beta,
                                                period=2 * np.pi)
            assert abs(m - sp[i]) < 1e-4

    def test_growth_rejected(self):
        with pytest.raises(QuadratureError):
            directional_derivative_marchaud(lambda x: x ** 4, [0.0], [1.0], 0.5)


def gaussian_fraclap(alpha, x):
    """-(-d^2)^alpha exp(-x^2/2) by the cosine integral of its transform."""
    val, _ = integrate.quad(lambda k: k ** (2 * alpha) * np.exp(-k * k / 2), 0, np.inf,
                            weight="cos", wvar=abs(x)) if x else integrate.quad(
        lambda k: k ** (2 * alpha) * np.exp(-k * k / 2), 0, np.inf)
    return -2 / np.sqrt(2 * np.pi) * val


class TestHypersingular:
    def test_constant_half(self):
        assert hypersingular_constant(0.5) == 1 / np.pi
        assert abs(hypersingular_constant(0.5) - 0.31831) < 1e-5

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_gaussian_at_zero(self, alpha):
        want = -2 ** alpha * gamma(alpha + 0.5) / np.sqrt(np.pi)
        got = hypersingular_directional(lambda x: np.exp(-x * x / 2), [0.0], [1.0], alpha)
        assert abs(got - want) < 1e-7

    @pytest.mark.parametrize("alpha,x", [(0.3, 0.8), (0.6, -1.5), (0.9, 2.5)])
    def test_gaussian_off_centre(self, alpha, x):
        got = hypersingular_directional(lambda y: np.exp(-y * y / 2), [x], [1.0], alpha)
        assert abs(got - gaussian_fraclap(alpha, x)) < 1e-7

    def test_direction_in_plane(self):
        th = frame_from_angles([0.7])[1]
        f2 = lambda p: np.exp(-0.5 * ((p @ th) ** 2)) * np.exp(-0.1 * (p @ frame_from_angles([0.7])[0]) ** 2)
        x = 1.2 * th
        got = hypersingular_directional(f2, x, th, 0.4)
        assert abs(got - gaussian_fraclap(0.4, 1.2)) < 1e-7

    def test_compact_reach(self):
        bump = lambda x: np.where(np.abs(x) < 1, np.exp(-1 / np.maximum(1 - x * x, 1e-300)), 0.0)
        a = hypersingular_directional(bump, [0.3], [1.0], 0.5, reach=1.3 + 1)
        b = hypersingular_directional(bump, [0.3], [1.0], 0.5)
        assert abs(a - b) < 1e-7

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_matches_spectral(self, alpha):
        g = Grid(1024, 80.0)
        f = gaussian_field(g, [0.0], 1.0)
        sp = fractional_power_directional_second(f, [1.0], alpha).values * np.sqrt(2 * np.pi)
        xs = g.axes()[0]
        for i in (512, 540, 600):
            q = hypersingular_directional(lambda x: np.exp(-x * x / 2), [xs[i]], [1.0], alpha)
            assert abs(q - sp[i]) < 5e-3


class TestGradientDivergence:
    def setup_method(self):
        self.g = Grid((128, 128), (24.0, 24.0))
        self.f = gaussian_field(self.g, [0.3, -0.2], 1.0)

    def test_beta_one_is_gradient(self):
        x, y = self.g.mesh()
        v = self.f.values
        grad = fractional_gradient(self.f, frame_from_angles([1.1]), 1.0).components
        assert np.abs(grad[0] + (x - 0.3) * v).max() < 1e-10
        assert np.abs(grad[1] + (y + 0.2) * v).max() < 1e-10

    def test_canonical_components_are_axis_derivatives(self):
        grad = fractional_gradient(self.f, Frame.canonical(2), 0.6)
        for i, e in enumerate(np.eye(2)):
            ref = apply_directional_fractional(self.f, e, 0.6).values
            assert np.abs(grad.components[i] - ref).max() < 1e-14

    @pytest.mark.parametrize("quarter_turns", [1, 2])
    def test_rotation_equivariance(self, quarter_turns):
        # rotations by multiples of pi/2 map the periodic grid onto itself
        g = Grid((64, 64), (16.0, 16.0))
        phi = quarter_turns * np.pi / 2
        R = frame_from_angles([phi]).matrix.T
        base = frame_from_angles([0.35])
        f = field_from_function(g, lambda x, y: np.exp(-(x - 0.5) ** 2 - 0.3 * (y + 1) ** 2))
        rot = np.rot90(f.values, quarter_turns)
        grot = fractional_gradient(ScalarField(g, rot), Frame(base.matrix @ R.T), 0.7).components
        g0 = fractional_gradient(f, base, 0.7).components
        g0r = np.stack([np.rot90(c, quarter_turns) for c in g0])
        want = np.einsum("ij,j...->i...", R, g0r)
        # np.rot90 about the array centre is a rotation about the node -L/2 + L/2 = 0 only up to
        # a one-cell shift, which is the same for both sides
        assert np.abs(grot - want).max() < 1e-8

    def test_divergence_of_gradient_is_laplacian(self):
        x, y = self.g.mesh()
        r2 = (x - 0.3) ** 2 + (y + 0.2) ** 2
        grad = fractional_gradient(self.f, Frame.canonical(2), 1.0)
        lap = fractional_divergence(grad, Frame.canonical(2), 1.0).values
        assert np.abs(lap - (r2 - 2) * self.f.values).max() < 1e-10

    def test_zero(self):
        z = VectorField(self.g, np.zeros((2,) + self.g.shape))
        assert np.all(fractional_divergence(z, frame_from_angles([0.3]), 0.5).values == 0)

    def test_advection_generator(self):
        fr = frame_from_angles([0.4])
        u = np.array([1.0, 0.7])
        h = 1e-6
        spec = SolveSpec("advection", self.g, 0.6, h, frame=fr, u=u, initial=self.f)
        dt = (solve_advection(spec).values - self.f.values) / h
        div = fractional_divergence(VectorField.constant_times(u, self.f), fr, 0.6).values
        assert np.abs(dt + div).max() < 1e-4 * np.abs(div).max()


class TestSecondOrder:
    def test_directional_operator_laplacian(self):
        g = Grid((128, 128), (24.0, 24.0))
        f = gaussian_field(g, [0.0, 0.0], 1.0)
        x, y = g.mesh()
        lap = directional_operator(f, frame_from_angles([0.9]), 2.0).values
        assert np.abs(lap - (x * x + y * y - 2) * f.values).max() < 1e-10

    @pytest.mark.parametrize("beta", [1.3, 1.7])
    def test_directional_operator_vs_axis_gl(self, beta):
        g = Grid((2048, 2048), (20.0, 20.0))
        f = gaussian_field(g, [0.0, 0.0], 1.0)
        sp = directional_operator(f, Frame.canonical(2), beta).values
        gl = directional_derivative_gl(f, 0, beta).values + directional_derivative_gl(f, 1, beta).values
        assert np.abs(sp - gl).max() < 2e-3

    def test_directional_operator_harmonic(self):
        g = Grid((32, 32), (2 * np.pi, 2 * np.pi), origin=(0.0, 0.0))
        fr = frame_from_angles([0.25])
        x, y = g.mesh()
        f = ScalarField(g, np.cos(2 * x - 3 * y))
        sym = sum(spectral_symbol(1.5, th, [2.0, -3.0]) for th in fr)
        want = (sym * np.exp(-1j * (2 * x - 3 * y))).real
        assert np.abs(directional_operator(f, fr, 1.5).values - want).max() < 1e-12

    def test_riesz_second_derivative(self):
        g = Grid(256, 30.0)
        f = gaussian_field(g, [0.0], 1.5)
        x = g.axes()[0]
        d2 = (x ** 2 / 1.5 ** 4 - 1 / 1.5 ** 2) * f.values
        assert np.abs(riesz_derivative_1d(f, 2.0).values - d2).max() < 1e-10

    @pytest.mark.parametrize("order", [0.4, 1.0, 1.6])
    def test_riesz_cosine(self, order):
        g = Grid(64, 2 * np.pi, origin=0.0)
        x = g.axes()[0]
        out = riesz_derivative_1d(ScalarField(g, np.cos(4 * x)), order).values
        assert np.abs(out + 4 ** order * np.cos(4 * x)).max() < 1e-12

    def test_riesz_equals_directional_second(self, rng):
        g = Grid(64, 7.0)
        f = ScalarField(g, rng.standard_normal(64))
        a = riesz_derivative_1d(f, 1.2).values
        b = fractional_power_directional_second(f, [1.0], 0.6).values
        assert np.array_equal(a, b)

    def test_integer_limit_on_harmonic(self):
        g = Grid((32, 32), (2 * np.pi, 2 * np.pi), origin=(0.0, 0.0))
        th = np.array([0.6, 0.8])
        x, y = g.mesh()
        f = ScalarField(g, np.sin(3 * x + y))
        out = fractional_power_directional_second(f, th, 1.0).values
        assert np.abs(out + (3 * 0.6 + 0.8) ** 2 * f.values).max() < 1e-12

    def test_dimensional_reduction(self):
        g2 = Grid((128, 16), (30.0, 5.0))
        g1 = Grid(128, 30.0)
        f1 = gaussian_field(g1, [0.0], 1.0)
        f2 = ScalarField(g2, np.broadcast_to(f1.values[:, None], g2.shape))
        out2 = fractional_power_directional_second(f2, [1.0, 0.0], 0.35).values
        out1 = riesz_derivative_1d(f1, 0.7).values
        assert np.abs(out2 - out1[:, None]).max() < 1e-12

    @pytest.mark.parametrize("op", ["grad", "dirop", "shift"])
    def test_real_output(self, op, rng):
        g = Grid((32, 32), (3.0, 3.0)) if op != "shift" else Grid(64, 3.0)
        f = ScalarField(g, rng.standard_normal(g.shape))
        if op == "grad":
            out = fractional_gradient(f, frame_from_angles([0.2]), 0.5).components
        elif op == "dirop":
            out = directional_operator(f, frame_from_angles([0.2]), 1.5).values
        else:
            out = fractional_shift(f, 0.7, 0.5).values
        assert out.dtype == float and np.all(np.isfinite(out))


class TestShift:
    @pytest.mark.parametrize("alpha", [0.3, 0.7, 0.97])
    def test_constant(self, alpha):
        out = fractional_shift(lambda x: np.ones_like(x), 1.3, alpha)(np.array([0.0, 2.0]))
        assert np.abs(out - 1).max() < 1e-9

    def test_near_classical_shift(self):
        step = lambda x: 0.5 * (1 + np.tanh(x))
        x = np.linspace(-3, 5, 9)
        out = fractional_shift(step, 1.5, 0.999)(x)
        assert np.abs(out - step(x - 1.5)).max() < 5e-3

    def test_exact_shift_at_one(self):
        out = fractional_shift(np.sin, 0.8, 1.0)(np.array([0.1, 1.0]))
        np.testing.assert_allclose(out, np.sin(np.array([0.1, 1.0]) - 0.8), rtol=0, atol=0)

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9, 0.99, 0.999])
    @pytest.mark.parametrize("k,s", [(1.3, 0.6), (5.0, 2.0)])
    def test_fourier_eigenfunction_periodic(self, alpha, k, s):
        x = np.array([-1.0, 0.0, 0.7])
        p = 2 * np.pi / k
        re = fractional_shift(lambda y: np.cos(k * y), s, alpha, period=p)(x)
        im = fractional_shift(lambda y: np.sin(k * y), s, alpha, period=p)(x)
        want = np.exp(1j * k * x) * np.exp(-s * (1j * k) ** alpha)
        assert np.abs(re + 1j * im - want).max() < 1e-12

    @pytest.mark.parametrize("method", ["density", "kanter"])
    @pytest.mark.parametrize("alpha", [0.5, 0.9, 0.999])
    def test_fourier_eigenfunction_heavy_tail_limit(self, method, alpha):
        # without the period the tail of H caps accuracy near 1e-3
        k, s = 1.3, 0.6
        x = np.array([-1.0, 0.0, 0.7])
        re = fractional_shift(lambda y: np.cos(k * y), s, alpha, method=method)(x)
        im = fractional_shift(lambda y: np.sin(k * y), s, alpha, method=method)(x)
        want = np.exp(1j * k * x) * np.exp(-s * (1j * k) ** alpha)
        assert np.abs(re + 1j * im - want).max() < 3e-3

    @pytest.mark.parametrize("alpha", [0.3, 0.6, 0.95])
    def test_field_matches_callable(self, alpha):
        g = Grid(128, 2 * np.pi, origin=0.0)
        fn = lambda x: np.exp(np.cos(x))
        out = fractional_shift(field_from_function(g, fn), 0.9, alpha).values
        xs = g.axes()[0][::16]
        np.testing.assert_allclose(out[::16], fractional_shift(fn, 0.9, alpha, period=2 * np.pi)(xs), atol=1e-12)

    def test_mass_preserved_on_field(self):
        g = Grid(512, 60.0)
        f = gaussian_field(g, [-10.0], 1.0)
        assert abs(fractional_shift(f, 1.0, 0.7).mass() - 1) < 1e-12

    def test_bad_shift(self):
        with pytest.raises(OrderError):
            fractional_shift(np.sin, -1.0, 0.5)
