"""Bulk identity batteries: vectorized random-case sweeps over the pointwise
algebra and the spectral calculus, reused by the test suite and the CLI."""

from __future__ import annotations

import numpy as np

from . import pointlin as pl
from . import torusfield as tf
from .reporting import Check

#: absolute residual bound for algebraic identities on unit-scale inputs
ALG_TOL = 1e-10
#: bound for the exact-normalization identity of deformed fundamental forms
NORM_TOL = 1e-12
#: bounds for the spectral calculus identities
DDZERO_TOL = 1e-12
ADJOINT_TOL = 1e-10


def _random_structures(rng: np.random.Generator, cases: int) -> np.ndarray:
    """Compatible structures obtained by deforming the standard one with a
    random constant anti-invariant form of wedge norm below 0.9."""
    ab = rng.uniform(-1.0, 1.0, size=(cases, 2))
    ab /= np.maximum(np.linalg.norm(ab, axis=-1, keepdims=True), 1e-12)
    ab *= rng.uniform(0.0, 0.9, size=(cases, 1))
    alpha0 = ab[:, :1] * pl.OMEGA2 + ab[:, 1:] * pl.OMEGA3
    return pl.deform_acs(np.broadcast_to(pl.J0, (cases, 4, 4)), alpha0)


def _random_anti_invariant(rng: np.random.Generator, J: np.ndarray, max_norm: float = 0.9) -> np.ndarray:
    phi = rng.uniform(-1.0, 1.0, size=J.shape[:-2] + (6,))
    alpha = pl.split_j(J, phi).minus
    nsq = pl.wedge_norm_sq(alpha)
    target = rng.uniform(0.0, max_norm**2, size=nsq.shape)
    return alpha * np.sqrt(target / np.maximum(nsq, 1e-30))[..., None]


def run_deformation_battery(cases: int = 10_000, seed: int = 1) -> list[Check]:
    """Random-case battery for the rational deformation formulas."""
    rng = np.random.default_rng(seed)
    J = _random_structures(rng, cases)
    alpha = _random_anti_invariant(rng, J)
    nsq = pl.wedge_norm_sq(alpha)
    K = pl.k_endo(alpha)
    a = ((1.0 - nsq) / (1.0 + nsq))[..., None, None]
    b = (2.0 / (1.0 + nsq))[..., None, None]
    closed = a * J - b * K
    T = np.eye(4) + J @ K
    conjugated = np.linalg.solve(T, J @ T)
    F_new = a[..., 0] * pl.fundamental_form(J) + b[..., 0] * alpha

    eye = np.eye(4)
    checks = [
        Check(
            "conjugation and closed-form deformations agree",
            (m := float(np.max(np.abs(closed - conjugated)))) <= ALG_TOL,
            ALG_TOL, m,
        ),
        Check(
            "deformed structure squares to -Id",
            (m := float(np.max(np.abs(closed @ closed + eye)))) <= ALG_TOL,
            ALG_TOL, m,
        ),
        Check(
            "deformed structure is orthogonal",
            (m := float(np.max(np.abs(np.swapaxes(closed, -1, -2) @ closed - eye)))) <= ALG_TOL,
            ALG_TOL, m,
        ),
        Check(
            "deformed fundamental form has wedge norm 1",
            (m := float(np.max(np.abs(pl.wedge_norm_sq(F_new) - 1.0)))) <= NORM_TOL,
            NORM_TOL, m,
        ),
        Check(
            "closed-form F matches the deformed structure",
            (m := float(np.max(np.abs(F_new - pl.fundamental_form(closed))))) <= ALG_TOL,
            ALG_TOL, m,
        ),
        Check(
            "K is skew-adjoint",
            (m := float(np.max(np.abs(K + np.swapaxes(K, -1, -2))))) <= ALG_TOL,
            ALG_TOL, m,
        ),
        Check(
            "det(Id + J K) dominates (1 - |alpha|^2)^2",
            bool(np.all((m_arr := np.linalg.det(T) - (1.0 - nsq) ** 2) >= -ALG_TOL)),
            ALG_TOL, float(np.min(m_arr)),
        ),
    ]
    return checks


def run_splitting_battery(cases: int = 10_000, seed: int = 2) -> list[Check]:
    """Random-case battery for the splitting relations between the star and
    involution decompositions."""
    rng = np.random.default_rng(seed)
    J = _random_structures(rng, cases)
    F = pl.fundamental_form(J)
    phi = rng.uniform(-1.0, 1.0, size=(cases, 6))
    sj = pl.split_j(J, phi)
    sd = pl.split_sd(phi)
    alpha = _random_anti_invariant(rng, J)

    # invariant part = span(F) + anti-self-dual plane: the self-dual part of
    # the invariant component is a pointwise multiple of F
    plus_sd = pl.split_sd(sj.plus).plus
    proj = (pl.form_inner(plus_sd, F) / 2.0)[..., None] * F

    checks = [
        Check(
            "star splitting reconstructs the input",
            (m := float(np.max(np.abs(sd.plus + sd.minus - phi)))) <= ALG_TOL,
            ALG_TOL, m,
        ),
        Check(
            "involution splitting reconstructs the input",
            (m := float(np.max(np.abs(sj.plus + sj.minus - phi)))) <= ALG_TOL,
            ALG_TOL, m,
        ),
        Check(
            "pull-back fixes the invariant part",
            (m := float(np.max(np.abs(pl.pull_back(J, sj.plus) - sj.plus)))) <= ALG_TOL,
            ALG_TOL, m,
        ),
        Check(
            "pull-back negates the anti-invariant part",
            (m := float(np.max(np.abs(pl.pull_back(J, sj.minus) + sj.minus)))) <= ALG_TOL,
            ALG_TOL, m,
        ),
        Check(
            "self-dual part of the invariant component is a multiple of F",
            (m := float(np.max(np.abs(plus_sd - proj)))) <= ALG_TOL,
            ALG_TOL, m,
        ),
        Check(
            "anti-invariant parts are self-dual",
            (m := float(np.max(np.abs(sj.minus - pl.hodge_star(sj.minus))))) <= ALG_TOL,
            ALG_TOL, m,
        ),
        Check(
            "anti-invariant parts are orthogonal to F",
            (m := float(np.max(np.abs(pl.form_inner(sj.minus, F))))) <= ALG_TOL,
            ALG_TOL, m,
        ),
        Check(
            "anti-invariant forms have no anti-self-dual part",
            (m := float(np.max(np.abs(pl.split_sd(alpha).minus)))) <= ALG_TOL,
            ALG_TOL, m,
        ),
    ]
    return checks


def run_calculus_battery(grid_n: int = 16, count: int = 100, seed: int = 3,
                         bandlimit: int | None = None) -> list[Check]:
    """Spectral calculus identities on random bandlimited fields."""
    grid = tf.GridSpec(grid_n)
    if bandlimit is None:
        bandlimit = grid.n // 2 - 2
    rng = np.random.default_rng(seed)

    def bandlimited(ncomp: int | None):
        shape = grid.shape if ncomp is None else grid.shape + (ncomp,)
        noise = rng.standard_normal(shape)
        spec = np.fft.fftn(noise, axes=tf.GRID_AXES)
        keep1d = np.abs(grid.freq_int()) <= bandlimit
        for ax in tf.GRID_AXES:
            s = [1] * noise.ndim
            s[ax] = grid.n
            spec = spec * keep1d.reshape(s)
        vals = np.fft.ifftn(spec, axes=tf.GRID_AXES).real
        return vals / max(1.0, float(np.max(np.abs(vals))))

    dd_scalar = dd_oneform = 0.0
    adjoint_rel = 0.0
    integral_err = 0.0
    wedge_asym = 0.0
    for _ in range(count):
        f = tf.ScalarField(grid, bandlimited(None))
        theta = tf.OneFormField(grid, bandlimited(4))
        phi = tf.TwoFormField(grid, bandlimited(6))
        psi = tf.TwoFormField(grid, bandlimited(6))
        dd_scalar = max(dd_scalar, tf.d_oneform(tf.d_scalar(f)).max_abs())
        dd_oneform = max(dd_oneform, tf.d_twoform(tf.d_oneform(theta)).max_abs())
        lhs = tf.l2_inner(tf.d_oneform(theta), phi)
        rhs = tf.l2_inner(theta, tf.codiff_twoform(phi))
        adjoint_rel = max(adjoint_rel, abs(lhs - rhs) / max(1e-30, abs(lhs), abs(rhs)))
        shifted = tf.ScalarField(grid, f.values - np.mean(f.values) + 0.5)
        integral_err = max(integral_err, abs(tf.integrate(shifted) - 0.5))
        wedge_asym = max(
            wedge_asym, abs(tf.wedge_integral(phi, psi) - tf.wedge_integral(psi, phi))
        )

    return [
        Check("d(d scalar) vanishes", dd_scalar <= DDZERO_TOL, DDZERO_TOL, dd_scalar),
        Check("d(d one-form) vanishes", dd_oneform <= DDZERO_TOL, DDZERO_TOL, dd_oneform),
        Check(
            "d and delta are adjoint under the L2 pairing",
            adjoint_rel <= ADJOINT_TOL, ADJOINT_TOL, adjoint_rel,
        ),
        Check(
            "node-mean quadrature is exact on bandlimited fields",
            integral_err <= 1e-14, 1e-14, integral_err,
        ),
        Check("wedge pairing is symmetric", wedge_asym <= 1e-14, 1e-14, wedge_asym),
    ]
