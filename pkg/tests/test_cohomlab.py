"""Gram method, volume estimates, the elliptic oracle, and subspace relations."""

import json

import numpy as np
import pytest

from ajclab import cohomlab, hermitian as hm, pointlin as pl, torusfield as tf

G6 = tf.GridSpec(6)
G8 = tf.GridSpec(8)

BUMP1 = hm.BumpSpec((0.5, 0.5, 0.5, 0.5), 0.3, 0.5)
BUMP2 = hm.BumpSpec((1 / 3, 1 / 3, 1 / 3, 1 / 3), 0.25, 0.5)


def constant_triple(grid, coords):
    """Triple with constant fundamental form sum_k coords_k omega_k."""
    F = tf.TwoFormField.constant(grid, np.asarray(coords, float) @ pl.OMEGA_SD)
    return hm.triple_from_form_field(F)


class TestHarmonicBasis:
    def test_cup_orthonormal_and_closed(self):
        basis = cohomlab.harmonic_basis(G8)
        for i, wi in enumerate(basis.forms):
            for j, wj in enumerate(basis.forms):
                expect = 2.0 if i == j else 0.0
                assert tf.wedge_integral(wi, wj) == pytest.approx(expect, abs=1e-14)
            assert tf.d_twoform(wi).max_abs() == 0.0


class TestFOmega:
    def test_standard_values(self):
        triple = hm.standard_acs(G8)
        w1, w2, _ = cohomlab.harmonic_basis(G8).forms
        np.testing.assert_allclose(cohomlab.f_omega(triple, w1).values, 2.0)
        np.testing.assert_allclose(cohomlab.f_omega(triple, w2).values, 0.0)

    def test_deformed_constant(self):
        triple = constant_triple(G8, [0.6, 0.8, 0.0])
        w2 = cohomlab.harmonic_basis(G8).forms[1]
        np.testing.assert_allclose(cohomlab.f_omega(triple, w2).values, 1.6, atol=1e-12)

    def test_rejects_non_self_dual(self):
        triple = hm.standard_acs(G8)
        bad = tf.TwoFormField.constant(G8, np.array([1.0, 0, 0, 0, 0, 0]))
        with pytest.raises(ValueError, match="self-dual"):
            cohomlab.f_omega(triple, bad)


class TestGram:
    def test_standard_structure(self):
        report = cohomlab.gram_matrix(hm.standard_acs(G8))
        np.testing.assert_allclose(report.matrix, np.diag([4.0, 0.0, 0.0]), atol=1e-12)
        assert report.h_minus == 2
        assert cohomlab.h_plus(report) == 4
        # kernel spans the (omega2, omega3) coordinate plane
        span = report.null_coords
        assert np.allclose(np.abs(span), np.array([[0, 0, 1], [0, 1, 0]]), atol=1e-12)

    def test_rank_one_constant_form(self):
        report = cohomlab.gram_matrix(constant_triple(G8, [0.6, 0.8, 0.0]))
        assert report.h_minus == 2
        # kernel is the orthogonal complement of the (0.6, 0.8, 0) direction
        for v in report.null_coords:
            assert abs(v @ np.array([0.6, 0.8, 0.0])) <= 1e-12

    def test_generic_structure_trivial_kernel(self):
        triple = hm.random_compatible_acs(tf.GridSpec(16), seed=1, amplitude=0.3, bandlimit=2)
        report = cohomlab.gram_matrix(triple)
        assert report.h_minus == 0
        assert report.lambda_min() > 10.0 * report.threshold

    def test_psd_and_symmetric(self):
        triple = hm.random_compatible_acs(G8, seed=9, amplitude=0.5, bandlimit=2)
        report = cohomlab.gram_matrix(triple)
        np.testing.assert_allclose(report.matrix, report.matrix.T, atol=1e-14)
        assert report.eigenvalues[0] >= -1e-12

    def test_h_plus_table(self):
        report = cohomlab.gram_matrix(hm.standard_acs(G8))
        assert cohomlab.h_plus(report) == 6 - report.h_minus
        assert cohomlab.check_pure_and_full(report)

    def test_save_report(self, tmp_path):
        report = cohomlab.gram_matrix(hm.standard_acs(tf.GridSpec(4)))
        path = report.save(tmp_path / "gram.json")
        payload = json.loads(path.read_text())
        assert payload["h_minus"] == 2
        assert len(payload["null_form_files"]) == 2
        from ajclab.fieldio import deserialize_field

        field = deserialize_field(tmp_path / payload["null_form_files"][0])
        assert field.grid.n == 4


class TestSelectNullForm:
    def test_wedge_normalized(self):
        report = cohomlab.gram_matrix(hm.standard_acs(G8))
        alpha = cohomlab.select_null_form(report)
        assert tf.wedge_integral(alpha, alpha) == pytest.approx(1.0, abs=1e-12)

    def test_empty_kernel_rejected(self):
        triple = hm.random_compatible_acs(tf.GridSpec(16), seed=1, amplitude=0.3, bandlimit=2)
        with pytest.raises(ValueError, match="empty"):
            cohomlab.select_null_form(cohomlab.gram_matrix(triple))


class TestVMeasure:
    def test_never_vanishing(self):
        triple = hm.standard_acs(G8)
        w1 = cohomlab.harmonic_basis(G8).forms[0]
        assert cohomlab.v_measure(triple, w1, 1e-6) == 1.0

    def test_identically_zero(self):
        triple = hm.standard_acs(G8)
        w2 = cohomlab.harmonic_basis(G8).forms[1]
        assert cohomlab.v_measure(triple, w2, 1e-6) == 0.0

    def test_bump_localized_and_monotone(self):
        base = hm.standard_acs(tf.GridSpec(16))
        stage1, _ = hm.one_bump_deform(base, hm.BumpSpec((0.5,) * 4, 0.15, 0.5))
        report = cohomlab.gram_matrix(stage1)
        killed = report.eigenvectors[:, np.argsort(report.eigenvalues)[1]]
        omega = tf.TwoFormField.constant(tf.GridSpec(16), killed @ pl.OMEGA_SD)
        vals = [cohomlab.v_measure(stage1, omega, e) for e in (1e-8, 1e-4, 1e-1)]
        assert 0.0 < vals[0] <= 1.0
        assert vals[0] >= vals[1] >= vals[2]

    def test_eps_validation(self):
        with pytest.raises(ValueError, match="eps"):
            cohomlab.v_measure(hm.standard_acs(G8), cohomlab.harmonic_basis(G8).forms[0], 0.0)


class TestDeltaEstimate:
    def test_standard_is_one(self):
        assert cohomlab.delta_j_estimate(hm.standard_acs(G8), 16, 1e-6) == 1.0

    def test_constant_form_is_one(self):
        triple = constant_triple(G8, [0.6, 0.0, 0.8])
        assert cohomlab.delta_j_estimate(triple, 16, 1e-6) == 1.0

    def test_range_and_positivity(self):
        triple = hm.random_compatible_acs(G8, seed=11, amplitude=0.3, bandlimit=2)
        d = cohomlab.delta_j_estimate(triple, 32, 1e-6)
        assert 0.0 < d <= 1.0

    def test_empty_sphere_rejected(self):
        # a structure with full anti-invariant space cannot be built here,
        # so check the validation path directly via samples
        with pytest.raises(ValueError, match="samples"):
            cohomlab.delta_j_estimate(hm.standard_acs(G8), 0, 1e-6)


class TestEllipticOracle:
    def test_baseline_kernel_two(self):
        report = cohomlab.elliptic_kernel_dim(hm.standard_acs(G6), G6)
        assert report.kernel_dim == 2
        assert report.matrix_dim == 2 * 5**4
        assert report.smallest_singular_values[2] > 1e3 * report.smallest_singular_values[1]

    def test_one_bump_matches_gram(self):
        base = hm.standard_acs(G6)
        stage1, _ = hm.one_bump_deform(base, BUMP1)
        report = cohomlab.elliptic_kernel_dim(stage1, G6)
        assert report.kernel_dim == cohomlab.gram_h_minus(stage1)
        assert report.kernel_dim <= 1

    def test_random_matches_gram(self):
        triple = hm.random_compatible_acs(G6, seed=2, amplitude=0.3, bandlimit=2)
        report = cohomlab.elliptic_kernel_dim(triple, G6)
        assert report.kernel_dim == cohomlab.gram_h_minus(triple) == 0

    def test_grid_mismatch_rejected(self):
        with pytest.raises(ValueError, match="oracle"):
            cohomlab.elliptic_kernel_dim(hm.standard_acs(G8), G6)

    def test_memory_bound(self):
        with pytest.raises(ValueError, match="bound"):
            cohomlab.elliptic_kernel_dim(hm.standard_acs(G8), G8, max_dim=100)


class TestIntersection:
    def test_same_structure(self):
        base = hm.standard_acs(G8)
        assert cohomlab.intersection_dim(base, base) == 2

    def test_one_bump_bound(self):
        base = hm.standard_acs(G8)
        stage1, _ = hm.one_bump_deform(base, BUMP1)
        assert cohomlab.intersection_dim(base, stage1) <= 1

    def test_transverse_constant_forms(self):
        base = hm.standard_acs(G8)
        other = constant_triple(G8, [0.0, 1.0, 0.0])
        # kernels span (omega2, omega3) and (omega1, omega3): intersection omega3
        assert cohomlab.intersection_dim(base, other) == 1

    def test_containment_angle(self):
        base_report = cohomlab.gram_matrix(hm.standard_acs(G8))
        stage1, _ = hm.one_bump_deform(hm.standard_acs(G8), BUMP1)
        inner = cohomlab.gram_matrix(stage1)
        assert cohomlab.null_containment_angle(inner, base_report) < 1e-3
