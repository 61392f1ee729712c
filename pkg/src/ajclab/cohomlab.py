"""Dimension computations for the harmonic anti-invariant plane.

Two independent routes are implemented.

The Gram route is exact on the flat torus and is the primary computation.
Derivation: a closed anti-invariant 2-form is pointwise self-dual (the
anti-invariant plane sits inside the self-dual one), hence coclosed
(delta = -star d star kills closed self-dual forms), hence harmonic, hence
has constant coefficients on the flat torus (the Hodge Laplacian acts
diagonally on Fourier modes of each component).  Conversely a constant
self-dual form beta = sum_k beta_k omega_k is anti-invariant for J exactly
when <beta, F(x)> = 0 at every point.  Writing f_k = <omega_k, F>, that
condition reads sum_k beta_k f_k == 0, i.e. beta^T G beta = 0 for the
Gram matrix G_kl = integral(f_k f_l); since G is positive semidefinite the
anti-invariant constants are exactly its kernel.

The second route discretizes the self-adjoint strongly elliptic operator
psi -> P^-(d delta psi) on sections of the anti-invariant plane and counts
near-zero singular values; its kernel consists of the harmonic
anti-invariant forms, so it must agree with the Gram rank on every
structure.  It is kept at coarse resolution as an independent oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from . import pointlin as pl
from .hermitian import HermitianTriple, anti_invariant_frame
from .torusfield import (
    GridSpec,
    ScalarField,
    TwoFormField,
    codiff_twoform,
    d_oneform,
    integrate,
)

#: self-dual Betti number and total second Betti number of the 4-torus
B_PLUS = 3
B2 = 6

#: principal-angle threshold for subspace comparisons (radians)
ANGLE_TOL = 1e-3


@dataclass(frozen=True)
class HarmonicBasis:
    """The three constant self-dual form fields on a grid; cup-orthogonal
    with wedge square 2, and closed since they are constant."""

    grid: GridSpec
    forms: tuple[TwoFormField, TwoFormField, TwoFormField]


def harmonic_basis(grid: GridSpec) -> HarmonicBasis:
    return HarmonicBasis(
        grid, tuple(TwoFormField.constant(grid, w) for w in pl.OMEGA_SD)
    )


@dataclass(frozen=True)
class GramReport:
    """Gram matrix of the <omega_k, F> functions and the inferred kernel."""

    grid_n: int
    matrix: np.ndarray          # (3, 3) symmetric PSD
    eigenvalues: np.ndarray     # ascending
    eigenvectors: np.ndarray    # columns match eigenvalues
    h_minus: int
    null_coords: np.ndarray     # (h_minus, 3) canonical kernel basis rows
    null_forms: tuple[TwoFormField, ...]
    threshold: float            # absolute null threshold actually used
    tol_null: float             # relative threshold parameter

    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    def to_dict(self) -> dict:
        return {
            "grid_n": self.grid_n,
            "matrix": self.matrix.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": self.eigenvectors.tolist(),
            "h_minus": self.h_minus,
            "null_coords": self.null_coords.tolist(),
            "threshold": self.threshold,
            "tol_null": self.tol_null,
        }

    def save(self, path) -> Path:
        """Write the report as JSON; kernel basis fields are serialized next
        to it and referenced by relative path."""
        from .fieldio import serialize_field

        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = self.to_dict()
        refs = []
        for i, form in enumerate(self.null_forms):
            name = f"{path.stem}.null{i}.field"
            serialize_field(form, path.parent / name)
            refs.append(name)
        payload["null_form_files"] = refs
        path.write_text(json.dumps(payload, indent=2))
        return path


def f_omega(triple: HermitianTriple, omega: TwoFormField, tol: float = 1e-8) -> ScalarField:
    """The function <omega, F> on the torus; requires omega self-dual nodewise."""
    if omega.grid != triple.grid:
        raise ValueError("grid mismatch")
    defect = float(np.max(np.abs(omega.values - pl.hodge_star(omega.values))))
    if defect > tol * max(1.0, omega.max_abs()):
        raise ValueError(f"form is not self-dual (defect {defect:.3e})")
    return ScalarField(triple.grid, pl.form_inner(omega.values, triple.F.values))


def _canonical_vector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, float)
    for x in v:
        if abs(x) > 1e-12:
            return v if x > 0 else -v
    return v


def gram_matrix(triple: HermitianTriple, tol_null: float = 1e-7) -> GramReport:
    """Assemble G_kl = integral(<omega_k, F> <omega_l, F>) and read off the
    harmonic anti-invariant dimension as its numerical kernel.

    The kernel basis rows are ordered deterministically: ascending
    eigenvalue, ties broken by lexicographic order of the sign-canonicalized
    coefficients.
    """
    fvals = triple.F.values.reshape(-1, 6)
    fs = fvals @ pl.OMEGA_SD.T  # (N, 3) nodal values of the three functions
    G = fs.T @ fs / fs.shape[0]
    G = (G + G.T) / 2.0
    eigenvalues, eigenvectors = np.linalg.eigh(G)
    threshold = tol_null * max(1.0, float(eigenvalues[-1]))
    null_idx = [i for i in range(3) if eigenvalues[i] <= threshold]
    pairs = sorted(
        ((float(eigenvalues[i]), _canonical_vector(eigenvectors[:, i])) for i in null_idx),
        key=lambda p: (p[0], tuple(np.round(p[1], 9))),
    )
    null_coords = np.array([v for _, v in pairs]).reshape(len(pairs), 3)
    null_forms = tuple(
        TwoFormField.constant(triple.grid, v @ pl.OMEGA_SD) for v in null_coords
    )
    return GramReport(
        grid_n=triple.grid.n,
        matrix=G,
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        h_minus=len(null_idx),
        null_coords=null_coords,
        null_forms=null_forms,
        threshold=threshold,
        tol_null=tol_null,
    )


def h_plus(report: GramReport) -> int:
    """Invariant cohomology dimension via h_plus + h_minus = b2 (= 6 here)."""
    return B2 - report.h_minus


def select_null_form(report: GramReport) -> TwoFormField:
    """First kernel direction of the Gram report as a constant form field,
    normalized so its wedge integral over the unit-volume torus equals 1."""
    if report.h_minus == 0:
        raise ValueError("the Gram kernel is empty")
    coords = report.null_coords[0] / np.sqrt(2.0)
    grid = report.null_forms[0].grid
    return TwoFormField.constant(grid, coords @ pl.OMEGA_SD)


def v_measure(triple: HermitianTriple, omega: TwoFormField, eps: float) -> float:
    """Volume fraction where <omega, F> is resolvably nonzero: the fraction
    of nodes with |f| above eps * max(1, sup|f|)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    f = f_omega(triple, omega)
    cut = eps * max(1.0, f.max_abs())
    return float(np.mean(np.abs(f.values) > cut))


def _sphere_samples(dim: int, samples: int) -> np.ndarray:
    """Deterministic low-discrepancy point sets on S^{dim-1}."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        theta = 2.0 * np.pi * np.arange(samples) / samples
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    i = np.arange(samples)
    z = 1.0 - (2.0 * i + 1.0) / samples
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    r = np.sqrt(np.maximum(0.0, 1.0 - z**2))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def _span_basis(eigenvectors: np.ndarray, null_count: int) -> np.ndarray:
    """Coordinate-aligned orthonormal basis of the non-null span.

    Projects the coordinate axes into the span in index order and
    orthonormalizes, so axis-aligned directions are sampled exactly when
    they lie in the span; deterministic.
    """
    V = eigenvectors[:, null_count:]
    P = V @ V.T
    basis: list[np.ndarray] = []
    for k in range(3):
        w = P[:, k].copy()
        for q in basis:
            w -= (q @ w) * q
        norm = np.linalg.norm(w)
        if norm > 1e-9:
            basis.append(w / norm)
        if len(basis) == V.shape[1]:
            break
    return np.array(basis)


def delta_j_estimate(
    triple: HermitianTriple, samples: int, eps: float, tol_null: float = 1e-7
) -> float:
    """Estimated infimum of :func:`v_measure` over the cup-normalized sphere
    in the span of the non-null Gram directions (deterministic sampling)."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    report = gram_matrix(triple, tol_null=tol_null)
    l = 3 - report.h_minus
    if l == 0:
        raise ValueError("every harmonic self-dual direction is anti-invariant; the sphere is empty")
    basis = _span_basis(report.eigenvectors, report.h_minus)
    best = 1.0
    for c in _sphere_samples(l, samples):
        coords = (c @ basis) / np.sqrt(2.0)  # wedge integral 1
        omega = TwoFormField.constant(triple.grid, coords @ pl.OMEGA_SD)
        best = min(best, v_measure(triple, omega, eps))
    return best


@dataclass(frozen=True)
class EllipticReport:
    """Spectrum summary of the discretized anti-invariant elliptic operator."""

    grid_n: int
    retained_modes: int        # scalar Fourier modes kept per coefficient
    matrix_dim: int
    smallest_singular_values: np.ndarray  # ascending, up to 8
    largest_singular_value: float
    kernel_dim: int
    tau: float
    symmetry_defect: float

    def to_dict(self) -> dict:
        return {
            "grid_n": self.grid_n,
            "retained_modes": self.retained_modes,
            "matrix_dim": self.matrix_dim,
            "smallest_singular_values": self.smallest_singular_values.tolist(),
            "largest_singular_value": self.largest_singular_value,
            "kernel_dim": self.kernel_dim,
            "tau": self.tau,
            "symmetry_defect": self.symmetry_defect,
        }

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2))
        return path


def _real_fourier_basis(grid: GridSpec, kmax: int) -> np.ndarray:
    """Rows are nodal values of an orthonormal real trigonometric basis
    (orthonormal under the node-mean inner product) spanning all modes with
    every axis frequency at most kmax in magnitude."""
    n = grid.n
    coords = np.stack([c + np.zeros(grid.shape) for c in grid.coords()], axis=-1)
    X = coords.reshape(-1, 4).T  # (4, N)
    ks = np.arange(-kmax, kmax + 1)
    modes = np.stack(np.meshgrid(ks, ks, ks, ks, indexing="ij"), axis=-1).reshape(-1, 4)
    rows = [np.ones(X.shape[1])]
    for k in modes:
        nz = k[k != 0]
        if len(nz) == 0 or nz[0] < 0:
            continue  # keep one representative of each +-k pair, plus skip 0
        phase = 2.0 * np.pi * (k @ X)
        rows.append(np.sqrt(2.0) * np.cos(phase))
        rows.append(np.sqrt(2.0) * np.sin(phase))
    return np.array(rows)


def elliptic_kernel_dim(
    triple: HermitianTriple,
    oracle_grid: GridSpec,
    tau: float = 1e-6,
    max_dim: int = 5000,
) -> EllipticReport:
    """Kernel dimension of the discretized operator psi -> P^-(d delta psi).

    Sections of the anti-invariant plane are written in the nodewise pivoted
    frame of :func:`anti_invariant_frame` with coefficients restricted to
    the trigonometric modes below the Nyquist band (Nyquist modes are
    invisible to the antisymmetric spectral derivative and would fake kernel
    vectors).  The dense symmetric matrix has dimension
    ``2 * (n - 1)^4``, which must stay at or below ``max_dim``: memory grows
    as its square (n = 6 gives 1250, n = 8 gives 4802).

    ``kernel_dim`` counts singular values at or below ``tau`` times the
    largest one.
    """
    if triple.grid != oracle_grid:
        raise ValueError(
            "structure must be built on the oracle grid "
            f"(got n={triple.grid.n}, oracle n={oracle_grid.n})"
        )
    grid = oracle_grid
    kmax = grid.n // 2 - 1
    B = _real_fourier_basis(grid, kmax)
    R = B.shape[0]
    dim = 2 * R
    if dim > max_dim:
        raise ValueError(
            f"operator dimension {dim} exceeds the documented bound {max_dim}; "
            "use a smaller oracle grid"
        )
    u1, u2 = anti_invariant_frame(triple)
    frames = np.stack([u1.values, u2.values])  # (2, grid shape, 6)
    J = triple.J.values
    N = grid.node_count
    M = np.empty((dim, dim))
    for i in range(2):
        for m in range(R):
            scalar = B[m].reshape(grid.shape)
            psi = TwoFormField(grid, scalar[..., None] * frames[i])
            out = d_oneform(codiff_twoform(psi))
            minus = pl.split_j(J, out.values, tol=1e-8).minus
            col = np.empty(dim)
            for j in range(2):
                q = np.sum(minus * frames[j], axis=-1).reshape(-1) / 2.0
                col[j * R : (j + 1) * R] = B @ q / N
            M[:, i * R + m] = col
    sym_defect = float(np.max(np.abs(M - M.T)))
    if sym_defect > 1e-8 * max(1.0, float(np.max(np.abs(M)))):
        raise pl.ConsistencyError(
            f"discretized operator is not symmetric (defect {sym_defect:.3e}); "
            "the operator must be self-adjoint up to discretization error"
        )
    M = (M + M.T) / 2.0
    singular = np.sort(np.abs(np.linalg.eigvalsh(M)))
    s_max = float(singular[-1])
    kernel_dim = int(np.sum(singular <= tau * s_max))
    return EllipticReport(
        grid_n=grid.n,
        retained_modes=R,
        matrix_dim=dim,
        smallest_singular_values=singular[:8],
        largest_singular_value=s_max,
        kernel_dim=kernel_dim,
        tau=tau,
        symmetry_defect=sym_defect,
    )


def _null_matrix(report: GramReport) -> np.ndarray:
    return report.null_coords.T  # (3, h)


def intersection_dim(
    J1: HermitianTriple, J2: HermitianTriple, tol_null: float = 1e-7
) -> int:
    """Dimension of the intersection of the two harmonic anti-invariant
    spaces, counted as principal angles below ANGLE_TOL."""
    if J1.grid != J2.grid:
        raise ValueError("grid mismatch")
    r1 = gram_matrix(J1, tol_null=tol_null)
    r2 = gram_matrix(J2, tol_null=tol_null)
    if r1.h_minus == 0 or r2.h_minus == 0:
        return 0
    angles = scipy.linalg.subspace_angles(_null_matrix(r1), _null_matrix(r2))
    return int(np.sum(angles < ANGLE_TOL))


def null_containment_angle(inner: GramReport, outer: GramReport) -> float:
    """Largest principal angle from the inner kernel into the outer kernel;
    0 when the inner kernel is trivial, pi/2 when containment is impossible."""
    if inner.h_minus == 0:
        return 0.0
    if inner.h_minus > outer.h_minus:
        return float(np.pi / 2.0)
    angles = scipy.linalg.subspace_angles(_null_matrix(inner), _null_matrix(outer))
    return float(np.max(angles))


def null_forms_closed_residual(report: GramReport) -> float:
    """Max nodal residual of d applied to the kernel basis fields."""
    from .torusfield import d_twoform

    worst = 0.0
    for form in report.null_forms:
        worst = max(worst, d_twoform(form).max_abs())
    return worst


def gram_h_minus(triple: HermitianTriple, tol_null: float = 1e-7) -> int:
    """Convenience wrapper: the Gram kernel dimension."""
    return gram_matrix(triple, tol_null=tol_null).h_minus


def check_pure_and_full(report: GramReport) -> bool:
    """The dimension bookkeeping h_plus + h_minus = b2 holds by construction;
    exposed for report symmetry."""
    return h_plus(report) + report.h_minus == B2


def integrate_f_product(triple: HermitianTriple, omega1: TwoFormField, omega2: TwoFormField) -> float:
    """integral(<omega1, F> <omega2, F>), one Gram entry for general inputs."""
    f1 = f_omega(triple, omega1)
    f2 = f_omega(triple, omega2)
    return integrate(ScalarField(triple.grid, f1.values * f2.values))
