"""Spectral calculus: single-mode oracles, structural identities, bump behavior."""

import numpy as np
import pytest

from ajclab import pointlin as pl
from ajclab import torusfield as tf

G8 = tf.GridSpec(8)
G16 = tf.GridSpec(16)


def random_bandlimited_scalar(rng, grid, kmax):
    noise = tf.ScalarField(grid, rng.standard_normal(grid.shape))
    f = tf.spectral_truncate(noise, kmax)
    return tf.ScalarField(grid, f.values / max(1.0, f.max_abs()))


def random_bandlimited(rng, grid, kmax, cls):
    if cls is tf.ScalarField:
        return random_bandlimited_scalar(rng, grid, kmax)
    comps = [random_bandlimited_scalar(rng, grid, kmax).values for _ in range(cls.NCOMP[0])]
    return cls(grid, np.stack(comps, axis=-1))


class TestGridSpec:
    def test_rejects_odd_or_small(self):
        with pytest.raises(ValueError):
            tf.GridSpec(7)
        with pytest.raises(ValueError):
            tf.GridSpec(2)

    def test_shape(self):
        assert G8.shape == (8, 8, 8, 8)
        assert G8.node_count == 4096


class TestFieldsBasics:
    def test_shape_validation(self):
        with pytest.raises(ValueError, match="shape"):
            tf.ScalarField(G8, np.zeros((8, 8, 8)))
        with pytest.raises(ValueError, match="non-finite"):
            vals = np.zeros(G8.shape)
            vals[0, 0, 0, 0] = np.nan
            tf.ScalarField(G8, vals)

    def test_immutability(self):
        f = tf.ScalarField.constant(G8, 1.0)
        with pytest.raises(ValueError):
            f.values[0, 0, 0, 0] = 2.0

    def test_arithmetic(self):
        f = tf.ScalarField.constant(G8, 2.0)
        w = tf.TwoFormField.constant(G8, pl.OMEGA2)
        out = f * w + 0.5 * w
        np.testing.assert_allclose(out.values[0, 0, 0, 0], 2.5 * pl.OMEGA2)
        with pytest.raises(ValueError, match="grid"):
            w + tf.TwoFormField.constant(G16, pl.OMEGA2)


class TestDifferentials:
    def test_single_mode_gradient(self):
        x1 = G16.coords()[0] + np.zeros(G16.shape)
        f = tf.ScalarField(G16, np.sin(2 * np.pi * x1))
        df = tf.d_scalar(f)
        np.testing.assert_allclose(
            df.values[..., 0], 2 * np.pi * np.cos(2 * np.pi * x1), atol=1e-12
        )
        np.testing.assert_allclose(df.values[..., 1:], 0.0, atol=1e-12)

    def test_constant_gradient_vanishes(self):
        df = tf.d_scalar(tf.ScalarField.constant(G8, 3.0))
        assert df.max_abs() <= 1e-14

    def test_product_of_modes(self):
        xs = G16.coords()
        vals = np.sin(2 * np.pi * 2 * xs[0]) * np.cos(2 * np.pi * 3 * xs[2]) + np.zeros(G16.shape)
        f = tf.ScalarField(G16, vals)
        df = tf.d_scalar(f)
        expect0 = 4 * np.pi * np.cos(4 * np.pi * xs[0]) * np.cos(6 * np.pi * xs[2])
        expect2 = -6 * np.pi * np.sin(4 * np.pi * xs[0]) * np.sin(6 * np.pi * xs[2])
        np.testing.assert_allclose(df.values[..., 0], expect0 + np.zeros(G16.shape), atol=1e-10)
        np.testing.assert_allclose(df.values[..., 2], expect2 + np.zeros(G16.shape), atol=1e-10)

    def test_single_mode_curl(self):
        xs = G16.coords()
        theta_vals = np.zeros(G16.shape + (4,))
        theta_vals[..., 0] = np.sin(2 * np.pi * xs[1])  # sin(2 pi x2) dx1
        theta = tf.OneFormField(G16, theta_vals)
        dtheta = tf.d_oneform(theta)
        # (d theta)_12 = d1 theta_2 - d2 theta_1 = -2 pi cos(2 pi x2)
        np.testing.assert_allclose(
            dtheta.values[..., 0],
            -2 * np.pi * np.cos(2 * np.pi * xs[1]) + np.zeros(G16.shape),
            atol=1e-12,
        )
        np.testing.assert_allclose(dtheta.values[..., 1:], 0.0, atol=1e-12)

    def test_d_squared_zero(self):
        rng = np.random.default_rng(0)
        f = random_bandlimited(rng, G16, 5, tf.ScalarField)
        assert tf.d_oneform(tf.d_scalar(f)).max_abs() <= 1e-12
        theta = random_bandlimited(rng, G16, 5, tf.OneFormField)
        assert tf.d_twoform(tf.d_oneform(theta)).max_abs() <= 1e-12

    def test_constant_twoform_closed(self):
        w = tf.TwoFormField.constant(G8, pl.OMEGA3)
        assert tf.d_twoform(w).max_abs() == 0.0


class TestCodifferential:
    def test_constant_vanishes(self):
        w = tf.TwoFormField.constant(G8, np.arange(6.0))
        assert tf.codiff_twoform(w).max_abs() <= 1e-14

    def test_divergence_formula_oracle(self):
        # (delta phi)_j = -sum_i di phi_ij, the flat-space coordinate formula
        rng = np.random.default_rng(1)
        phi = random_bandlimited(rng, G8, 3, tf.TwoFormField)
        parts = tf._partials(phi.values, G8)
        A = pl.form_to_matrix(phi.values)
        Aparts = tf._partials(A, G8)  # [..., i, j, axis]
        expect = -np.einsum("...iji->...j", Aparts)
        got = tf.codiff_twoform(phi)
        np.testing.assert_allclose(got.values, expect, atol=1e-11)
        del parts

    def test_single_mode_value(self):
        xs = G16.coords()
        theta_vals = np.zeros(G16.shape + (4,))
        theta_vals[..., 0] = np.cos(2 * np.pi * xs[1])
        theta = tf.OneFormField(G16, theta_vals)
        phi = tf.d_oneform(theta)
        delta = tf.codiff_twoform(phi)
        # delta d theta = laplacian theta for a divergence-free single mode
        np.testing.assert_allclose(
            delta.values[..., 0],
            (2 * np.pi) ** 2 * np.cos(2 * np.pi * xs[1]) + np.zeros(G16.shape),
            atol=1e-10,
        )

    def test_adjointness(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            theta = random_bandlimited(rng, G16, 6, tf.OneFormField)
            phi = random_bandlimited(rng, G16, 6, tf.TwoFormField)
            lhs = tf.l2_inner(tf.d_oneform(theta), phi)
            rhs = tf.l2_inner(theta, tf.codiff_twoform(phi))
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


class TestIntegrals:
    def test_constant(self):
        assert tf.integrate(tf.ScalarField.constant(G8, 3.0)) == pytest.approx(3.0)

    def test_single_mode_integrates_to_zero(self):
        xs = G16.coords()
        f = tf.ScalarField(G16, np.cos(2 * np.pi * 3 * xs[3]) + np.zeros(G16.shape))
        assert abs(tf.integrate(f)) <= 1e-14

    def test_l2_inner_constant_omega1(self):
        w = tf.TwoFormField.constant(G8, pl.OMEGA1)
        assert tf.l2_inner(w, w) == pytest.approx(2.0)

    def test_integrate_exact_for_bandlimited(self):
        rng = np.random.default_rng(3)
        f = random_bandlimited(rng, G16, 7, tf.ScalarField)
        mean_mode = float(np.mean(f.values))
        g = tf.ScalarField(G16, f.values - mean_mode + 0.25)
        assert tf.integrate(g) == pytest.approx(0.25, abs=1e-14)

    def test_wedge_integral_values_and_symmetry(self):
        w1 = tf.TwoFormField.constant(G8, pl.OMEGA1)
        w2 = tf.TwoFormField.constant(G8, pl.OMEGA2)
        assert tf.wedge_integral(w1, w1) == pytest.approx(2.0)
        assert tf.wedge_integral(w1, w2) == pytest.approx(0.0)
        rng = np.random.default_rng(4)
        a = random_bandlimited(rng, G8, 3, tf.TwoFormField)
        b = random_bandlimited(rng, G8, 3, tf.TwoFormField)
        assert tf.wedge_integral(a, b) == pytest.approx(tf.wedge_integral(b, a), abs=1e-14)

    def test_self_dual_wedge_equals_l2(self):
        rng = np.random.default_rng(5)
        raw = random_bandlimited(rng, G8, 3, tf.TwoFormField)
        sd = tf.TwoFormField(G8, pl.split_sd(raw.values).plus)
        assert tf.wedge_integral(sd, sd) == pytest.approx(tf.l2_inner(sd, sd), abs=1e-12)


class TestBump:
    CENTER = (0.5, 0.5, 0.5, 0.5)

    def test_center_value(self):
        b = tf.bump_cutoff(G16, self.CENTER, 0.2, 0.7)
        assert b.values[8, 8, 8, 8] == pytest.approx(0.7)

    def test_support(self):
        b = tf.bump_cutoff(G16, self.CENTER, 0.2, 0.7)
        offs = tf.torus_offsets(G16, self.CENTER)
        dist2 = sum(w**2 for w in offs)
        assert np.all(b.values[dist2 >= 0.2**2] == 0.0)
        assert np.all(b.values >= 0.0)
        assert np.all(b.values <= 0.7)

    def test_integral_bounds(self):
        b = tf.bump_cutoff(G16, self.CENTER, 0.2, 0.7)
        total = tf.integrate(b)
        assert 0.0 < total < 0.7 * tf.ball_volume(0.2)

    def test_wrap_around(self):
        b = tf.bump_cutoff(G16, (0.0, 0.0, 0.0, 0.0), 0.2, 1.0)
        # nodes on either side of the seam see the same profile
        assert b.values[1, 0, 0, 0] == pytest.approx(b.values[15, 0, 0, 0])

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            tf.bump_cutoff(G16, self.CENTER, 0.6, 0.5)
        with pytest.raises(ValueError):
            tf.bump_cutoff(G16, self.CENTER, 0.2, 0.0)

    def test_spectral_derivative_superalgebraic_decay(self):
        # rms residual against the analytic gradient; the measurement bump is
        # wide enough that the asymptotic decay regime starts by n = 16
        radius, height = 0.45, 1.0
        errors = {}
        for n in (16, 32, 64):
            grid = tf.GridSpec(n)
            b = tf.bump_cutoff(grid, self.CENTER, radius, height)
            db = tf.d_scalar(b)
            offs = tf.torus_offsets(grid, self.CENTER)
            s2 = sum(w**2 for w in offs) / radius**2
            core = s2 < 1.0
            grad = np.zeros(grid.shape + (4,))
            profile = np.zeros(grid.shape)
            profile[core] = height * np.exp(1.0 - 1.0 / (1.0 - s2[core]))
            for a, w in enumerate(offs):
                grad[core, a] = (
                    -2.0 * profile[core] * (w + np.zeros(grid.shape))[core]
                    / (radius**2 * (1.0 - s2[core]) ** 2)
                )
            errors[n] = float(np.sqrt(np.mean((db.values - grad) ** 2)))
        assert errors[32] < 0.2 * errors[16]
        assert errors[64] < 0.2 * errors[32]


class TestSpectralTruncate:
    def test_removes_high_modes(self):
        xs = G16.coords()
        f = tf.ScalarField(
            G16,
            np.cos(2 * np.pi * xs[0]) + np.cos(2 * np.pi * 6 * xs[1]) + np.zeros(G16.shape),
        )
        g = tf.spectral_truncate(f, 3)
        np.testing.assert_allclose(
            g.values, np.cos(2 * np.pi * xs[0]) + np.zeros(G16.shape), atol=1e-12
        )
