"""Exact linear algebra of 2-forms and almost complex structures on a single
oriented Euclidean 4-dimensional tangent space.

Conventions, fixed once and inherited by every other module:

* metric: the identity bilinear form on R^4; orientation: dx1^dx2^dx3^dx4;
* 2-form components in the ordered basis (e12, e13, e14, e23, e24, e34)
  with e_ij = dx^i ^ dx^j;
* self-dual frame ``OMEGA1 = e12+e34``, ``OMEGA2 = e13-e24``,
  ``OMEGA3 = e14+e23`` and its anti-self-dual mirror (e12-e34, e13+e24,
  e14-e23).

Every function broadcasts over leading axes: 2-forms are arrays of shape
``(..., 6)``, tangent-space endomorphisms ``(..., 4, 4)``, so the same code
serves a single point and a whole grid of points.

Two norm conventions coexist.  ``form_inner`` is the Riemannian inner
product of the orthonormal ``e_ij`` basis (so ``<F, F> = 2`` for a
fundamental form).  ``wedge_norm_sq`` is the wedge-square normalization
``alpha ^ alpha = 2 |alpha|^2 dmu``, under which a fundamental form has
norm exactly 1; all deformation formulas below use the latter.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

#: index pairs (i, j), i < j, of the 2-form component order
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

#: index triples of the 3-form component order (e123, e124, e134, e234)
TRIPLES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))

# wedge pairing in the fixed component order: e_I ^ e_{partner(I)} is the
# volume form up to the sign below; the same table realizes the Hodge star.
_WEDGE_PARTNER = np.array([5, 4, 3, 2, 1, 0])
_WEDGE_SIGN = np.array([1.0, -1.0, 1.0, 1.0, -1.0, 1.0])

OMEGA1 = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 1.0])
OMEGA2 = np.array([0.0, 1.0, 0.0, 0.0, -1.0, 0.0])
OMEGA3 = np.array([0.0, 0.0, 1.0, 1.0, 0.0, 0.0])
#: rows are the self-dual frame (OMEGA1, OMEGA2, OMEGA3)
OMEGA_SD = np.stack([OMEGA1, OMEGA2, OMEGA3])
#: rows are the anti-self-dual mirror frame
OMEGA_ASD = np.array(
    [
        [1.0, 0.0, 0.0, 0.0, 0.0, -1.0],
        [0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0, -1.0, 0.0, 0.0],
    ]
)

#: the standard compatible structure: e1 -> e2, e2 -> -e1, e3 -> e4, e4 -> -e3
J0 = np.array(
    [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)

#: tolerance for the cross-assertion between independent formulas
AGREEMENT_TOL = 1e-10
#: tolerance for the structure-field invariants J^2 = -Id, J^T J = Id
ACS_TOL = 1e-9


class ConsistencyError(RuntimeError):
    """Two formulas that must agree produced different results."""


class FormSplit(NamedTuple):
    """The two halves of a splitting; ``plus + minus`` is the input."""

    plus: np.ndarray
    minus: np.ndarray


def _amax(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def wedge_to_volume(phi, psi):
    """Coefficient c of phi ^ psi = c dx1^dx2^dx3^dx4; symmetric in arguments."""
    phi = np.asarray(phi, float)
    psi = np.asarray(psi, float)
    return np.sum(_WEDGE_SIGN * phi * psi[..., _WEDGE_PARTNER], axis=-1)


def form_inner(phi, psi):
    """Riemannian inner product of 2-forms (the e_ij basis is orthonormal)."""
    return np.sum(np.asarray(phi, float) * np.asarray(psi, float), axis=-1)


def hodge_star(phi):
    """Hodge star on 2-forms; involutive, fixes OMEGA1..3, negates the mirror frame."""
    phi = np.asarray(phi, float)
    return _WEDGE_SIGN * phi[..., _WEDGE_PARTNER]


def split_sd(phi) -> FormSplit:
    """Split into the star-fixed (plus) and star-negated (minus) parts."""
    phi = np.asarray(phi, float)
    star = hodge_star(phi)
    return FormSplit((phi + star) / 2.0, (phi - star) / 2.0)


def form_to_matrix(phi):
    """Antisymmetric 4x4 matrix A with A[i, j] = phi(e_i, e_j)."""
    phi = np.asarray(phi, float)
    out = np.zeros(phi.shape[:-1] + (4, 4))
    for c, (i, j) in enumerate(PAIRS):
        out[..., i, j] = phi[..., c]
        out[..., j, i] = -phi[..., c]
    return out


def matrix_to_form(mat, tol: float | None = 1e-8):
    """Inverse of :func:`form_to_matrix`; rejects non-antisymmetric input."""
    mat = np.asarray(mat, float)
    if tol is not None:
        defect = _amax(mat + np.swapaxes(mat, -1, -2))
        if defect > tol * max(1.0, _amax(mat)):
            raise ValueError(f"matrix is not antisymmetric (defect {defect:.3e})")
    comps = [mat[..., i, j] for (i, j) in PAIRS]
    return np.stack(comps, axis=-1)


def pull_back(J, phi):
    """The 2-form psi(X, Y) = phi(JX, JY), i.e. J^T A_phi J in matrix form."""
    J = np.asarray(J, float)
    A = form_to_matrix(phi)
    return matrix_to_form(np.swapaxes(J, -1, -2) @ A @ J, tol=None)


def acs_defect(J) -> tuple[float, float]:
    """Max-norm residuals of J^2 + Id and J^T J - Id."""
    J = np.asarray(J, float)
    eye = np.eye(4)
    return _amax(J @ J + eye), _amax(np.swapaxes(J, -1, -2) @ J - eye)


def require_acs(J, tol: float = ACS_TOL, what: str = "J") -> None:
    """Reject endomorphisms that are not metric-compatible square roots of -Id."""
    sq, orth = acs_defect(J)
    if sq > tol:
        raise ValueError(f"{what}^2 differs from -Id by {sq:.3e} (tol {tol:.1e})")
    if orth > tol:
        raise ValueError(f"{what} is not orthogonal (defect {orth:.3e}, tol {tol:.1e})")


def split_j(J, phi, tol: float = ACS_TOL) -> FormSplit:
    """Split into the invariant (plus) and anti-invariant (minus) parts of
    the involution phi -> phi(J., J.).  Requires J^2 = -Id within ``tol``."""
    J = np.asarray(J, float)
    sq = _amax(J @ J + np.eye(4))
    if sq > tol:
        raise ValueError(f"J^2 differs from -Id by {sq:.3e} (tol {tol:.1e})")
    pb = pull_back(J, phi)
    phi = np.asarray(phi, float)
    return FormSplit((phi + pb) / 2.0, (phi - pb) / 2.0)


def fundamental_form(J, tol: float = ACS_TOL):
    """F(X, Y) = g(JX, Y) for a compatible structure; F is self-dual with
    wedge square 2."""
    J = np.asarray(J, float)
    require_acs(J, tol=tol)
    return matrix_to_form(np.swapaxes(J, -1, -2), tol=None)


def acs_from_sd_form(F, tol: float = 1e-8):
    """The unique compatible structure whose fundamental form is ``F``.

    ``F`` must be self-dual with wedge square 2 (wedge norm 1) within
    ``tol``; this inverts :func:`fundamental_form`.
    """
    F = np.asarray(F, float)
    scale = max(1.0, _amax(F))
    sd_defect = _amax(F - hodge_star(F))
    if sd_defect > tol * scale:
        raise ValueError(f"form is not self-dual (defect {sd_defect:.3e})")
    norm_defect = _amax(wedge_to_volume(F, F) / 2.0 - 1.0)
    if norm_defect > tol:
        raise ValueError(
            f"form is not wedge-normalized: |alpha|^2 deviates from 1 by {norm_defect:.3e}"
        )
    J = np.swapaxes(form_to_matrix(F), -1, -2)
    require_acs(J, tol=max(ACS_TOL, 10.0 * tol))
    return J


def k_endo(alpha):
    """The endomorphism K with g(X, K Y) = alpha(X, Y); skew-adjoint."""
    return form_to_matrix(alpha)


def wedge_norm_sq(alpha, tol: float = 1e-8, check_self_dual: bool = True):
    """Pointwise wedge-square norm: alpha ^ alpha = 2 |alpha|^2 dmu.

    Defined (and nonnegative) for self-dual forms, where it equals half the
    Riemannian norm; rejects non-self-dual input, for which the wedge square
    can be negative.
    """
    alpha = np.asarray(alpha, float)
    if check_self_dual:
        defect = _amax(alpha - hodge_star(alpha))
        if defect > tol * max(1.0, _amax(alpha)):
            raise ValueError(f"form is not self-dual (defect {defect:.3e})")
    return wedge_to_volume(alpha, alpha) / 2.0


def _require_anti_invariant(J, alpha, tol: float) -> None:
    plus = split_j(J, alpha).plus
    defect = _amax(plus)
    if defect > tol * max(1.0, _amax(alpha)):
        raise ValueError(
            f"form is not anti-invariant (invariant part {defect:.3e}, tol {tol:.1e})"
        )


def deform_pair(J, alpha, tol: float = 1e-8):
    """Deform a compatible structure and return (J_alpha, F_alpha) together.

    Computes J_alpha twice, by conjugating J with Id + J K_alpha and by the
    closed form ((1-n)/(1+n)) J - (2/(1+n)) K_alpha with n = |alpha|^2, and
    cross-asserts the two to AGREEMENT_TOL; likewise F_alpha against
    fundamental_form(J_alpha).
    """
    J = np.asarray(J, float)
    alpha = np.asarray(alpha, float)
    require_acs(J, tol=ACS_TOL)
    _require_anti_invariant(J, alpha, tol)
    nsq = wedge_norm_sq(alpha, tol=tol)
    worst = float(np.max(nsq))
    if worst >= 1.0:
        raise ValueError(
            f"deformation form has wedge norm^2 {worst:.6f} >= 1 somewhere"
        )
    K = form_to_matrix(alpha)
    a = ((1.0 - nsq) / (1.0 + nsq))[..., None, None]
    b = (2.0 / (1.0 + nsq))[..., None, None]
    closed = a * J - b * K
    T = np.eye(4) + J @ K
    conjugated = np.linalg.solve(T, J @ T)
    dev = _amax(closed - conjugated)
    if dev > AGREEMENT_TOL:
        raise ConsistencyError(
            f"conjugation and closed-form deformations disagree by {dev:.3e}"
        )
    F_new = a[..., 0] * fundamental_form(J) + b[..., 0] * alpha
    dev_f = _amax(F_new - fundamental_form(closed))
    if dev_f > AGREEMENT_TOL:
        raise ConsistencyError(
            f"closed-form fundamental form deviates from the deformed structure by {dev_f:.3e}"
        )
    return closed, F_new


def deform_acs(J, alpha, tol: float = 1e-8):
    """Deform a compatible structure by an anti-invariant 2-form alpha.

    Requires ``|alpha|^2 < 1`` pointwise (wedge norm); the result is again
    compatible and is internally cross-checked against two formulas.
    """
    return deform_pair(J, alpha, tol)[0]


def f_deformed(J, alpha, tol: float = 1e-8):
    """Fundamental form of the deformed structure, by the closed form
    ((1-n)/(1+n)) F + (2/(1+n)) alpha; self-dual with wedge square 2."""
    return deform_pair(J, alpha, tol)[1]


def j_act_anti(J, alpha, tol: float = 1e-8):
    """The action (J alpha)(., .) = -alpha(J., .) on anti-invariant forms.

    The output is again anti-invariant and applying the action twice gives
    ``-alpha``: the anti-invariant plane carries a complex structure.
    """
    J = np.asarray(J, float)
    _require_anti_invariant(J, alpha, tol)
    M = -np.swapaxes(J, -1, -2) @ form_to_matrix(alpha)
    defect = _amax(M + np.swapaxes(M, -1, -2))
    if defect > tol * max(1.0, _amax(alpha)):
        raise ValueError(f"action did not produce a 2-form (defect {defect:.3e})")
    return matrix_to_form(M, tol=None)
