"""Compatible almost-complex-structure fields on the torus and their
deformations.

A structure field pairs a nodewise endomorphism J (J^2 = -Id, orthogonal)
with its cached fundamental 2-form field F.  Deformations stay inside the
compatible family: given a nodewise anti-invariant 2-form field alpha with
wedge norm < 1 everywhere, the deformed structure and its fundamental form
are computed pointwise by the rational closed forms of :mod:`.pointlin`.

The two-stage cut-off pipeline lives here as well: stage 1 deforms along a
bump-truncated harmonic anti-invariant direction; stage 2 renormalizes
``f1 * F + c2 * alpha`` back to wedge square 2 with
``f1 = sqrt(1 - c2^2 |alpha|^2)`` and rebuilds the structure from the form.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import pointlin as pl
from .torusfield import EndoField, GridSpec, ScalarField, TwoFormField, bump_cutoff

#: nodewise invariant tolerance for structure fields
FIELD_TOL = 1e-9
#: deformation forms are rescaled so their sup wedge norm stays below this
SUP_NORM_CAP = 0.95

_CHUNK = 1 << 16


def _node_chunks(total: int):
    for start in range(0, total, _CHUNK):
        yield slice(start, min(start + _CHUNK, total))


def _worst_node(grid: GridSpec, nodewise: np.ndarray) -> tuple[int, ...]:
    return tuple(int(i) for i in np.unravel_index(int(np.argmax(nodewise)), grid.shape))


class AcsField(EndoField):
    """Endomorphism field that is a compatible almost complex structure at
    every node, within FIELD_TOL."""

    def __init__(self, grid: GridSpec, values):
        super().__init__(grid, values)
        flat = self.values.reshape(-1, 4, 4)
        for sl in _node_chunks(flat.shape[0]):
            sq, orth = pl.acs_defect(flat[sl])
            if sq > FIELD_TOL or orth > FIELD_TOL:
                raise ValueError(
                    f"structure field violates J^2=-Id / orthogonality "
                    f"(defects {sq:.3e}, {orth:.3e}, tol {FIELD_TOL:.1e})"
                )


@dataclass(frozen=True)
class HermitianTriple:
    """A structure field and its cached fundamental form (metric is flat)."""

    J: AcsField
    F: TwoFormField

    def __post_init__(self):
        if self.J.grid != self.F.grid:
            raise ValueError("grid mismatch between J and F")
        jflat = self.J.values.reshape(-1, 4, 4)
        fflat = self.F.values.reshape(-1, 6)
        for sl in _node_chunks(jflat.shape[0]):
            dev = float(np.max(np.abs(fflat[sl] - pl.fundamental_form(jflat[sl], tol=FIELD_TOL))))
            if dev > FIELD_TOL:
                raise ValueError(f"cached form deviates from g(J., .) by {dev:.3e}")
        sd = float(np.max(np.abs(fflat - pl.hodge_star(fflat))))
        wedge = float(np.max(np.abs(pl.wedge_to_volume(fflat, fflat) - 2.0)))
        if sd > FIELD_TOL or wedge > FIELD_TOL:
            raise ValueError(
                f"fundamental form invariants violated (self-dual defect {sd:.3e}, "
                f"wedge defect {wedge:.3e})"
            )

    @property
    def grid(self) -> GridSpec:
        return self.J.grid


@dataclass
class DeformLog:
    """Append-only record of construction stages (JSON-ready dicts)."""

    stages: list[dict] = field(default_factory=list)

    def append(self, record: dict) -> None:
        self.stages.append(record)

    def to_list(self) -> list[dict]:
        return list(self.stages)


@dataclass(frozen=True)
class BumpSpec:
    """Parameters of one cut-off bump."""

    center: tuple[float, float, float, float]
    radius: float
    height: float

    def build(self, grid: GridSpec) -> ScalarField:
        return bump_cutoff(grid, self.center, self.radius, self.height)

    def to_dict(self) -> dict:
        return {"center": list(self.center), "radius": self.radius, "height": self.height}

    @staticmethod
    def from_dict(d: dict) -> "BumpSpec":
        return BumpSpec(tuple(float(c) for c in d["center"]), float(d["radius"]), float(d["height"]))


def standard_acs(grid: GridSpec) -> HermitianTriple:
    """The constant standard structure; its fundamental form is OMEGA1
    everywhere and its harmonic anti-invariant plane is span(OMEGA2, OMEGA3)."""
    J = AcsField(grid, np.broadcast_to(pl.J0, grid.shape + (4, 4)))
    F = TwoFormField.constant(grid, pl.OMEGA1)
    return HermitianTriple(J, F)


def is_standard(triple: HermitianTriple, tol: float = FIELD_TOL) -> bool:
    return float(np.max(np.abs(triple.F.values - pl.OMEGA1))) <= tol


def anti_invariant_frame(triple: HermitianTriple) -> tuple[TwoFormField, TwoFormField]:
    """Nodewise wedge-unit frame (u1, u2) of the anti-invariant plane.

    The plane is the orthogonal complement of F inside the self-dual
    coordinates; the complement is built by crossing the F-coordinate vector
    with the coordinate axis of its smallest component (the pivot), so the
    frame is well conditioned at every node but need not vary continuously.
    """
    F = triple.F.values.reshape(-1, 6)
    y = F @ pl.OMEGA_SD.T / 2.0  # coordinates of F in the self-dual frame, |y| = 1
    pivot = np.argmin(np.abs(y), axis=-1)
    e_p = np.eye(3)[pivot]
    v1 = np.cross(y, e_p)
    v1 /= np.linalg.norm(v1, axis=-1, keepdims=True)
    v2 = np.cross(y, v1)
    grid = triple.grid
    u1 = (v1 @ pl.OMEGA_SD).reshape(grid.shape + (6,))
    u2 = (v2 @ pl.OMEGA_SD).reshape(grid.shape + (6,))
    return TwoFormField(grid, u1), TwoFormField(grid, u2)


def anti_invariant_field(
    triple: HermitianTriple,
    a: ScalarField,
    b: ScalarField,
    frame: tuple[TwoFormField, TwoFormField] | None = None,
) -> TwoFormField:
    """The anti-invariant field a*u1 + b*u2.

    For the standard structure the global frame (OMEGA2, OMEGA3) is used, so
    the pointwise wedge norm^2 is a^2 + b^2.  For any other structure a
    nodewise frame must be supplied (see :func:`anti_invariant_frame`).
    """
    grid = triple.grid
    if a.grid != grid or b.grid != grid:
        raise ValueError("grid mismatch")
    if frame is None:
        if not is_standard(triple):
            raise ValueError(
                "no global frame available for a deformed structure; pass frame="
            )
        u1 = TwoFormField.constant(grid, pl.OMEGA2)
        u2 = TwoFormField.constant(grid, pl.OMEGA3)
    else:
        u1, u2 = frame
    return a * u1 + b * u2


def project_anti_invariant(triple: HermitianTriple, phi: TwoFormField) -> TwoFormField:
    """Nodewise anti-invariant part of an ambient 2-form field."""
    if phi.grid != triple.grid:
        raise ValueError("grid mismatch")
    minus = pl.split_j(triple.J.values, phi.values, tol=FIELD_TOL).minus
    return TwoFormField(triple.grid, minus)


def deform_field(triple: HermitianTriple, alpha: TwoFormField, tol: float = 1e-8) -> HermitianTriple:
    """Deform a structure field by a nodewise anti-invariant 2-form field.

    Precondition failures report the worst offending node.  Off the support
    of alpha the output equals the input exactly.
    """
    grid = triple.grid
    if alpha.grid != grid:
        raise ValueError("grid mismatch")
    plus = pl.split_j(triple.J.values, alpha.values, tol=FIELD_TOL).plus
    plus_max = np.max(np.abs(plus), axis=-1)
    scale = max(1.0, alpha.max_abs())
    if float(plus_max.max()) > tol * scale:
        node = _worst_node(grid, plus_max)
        raise ValueError(
            f"deformation form is not anti-invariant at node {node} "
            f"(invariant part {float(plus_max.max()):.3e})"
        )
    nsq = pl.wedge_norm_sq(alpha.values, tol=tol)
    if float(nsq.max()) >= 1.0:
        node = _worst_node(grid, nsq)
        raise ValueError(
            f"deformation form has wedge norm^2 {float(nsq.max()):.6f} >= 1 at node {node}"
        )
    jflat = triple.J.values.reshape(-1, 4, 4)
    aflat = alpha.values.reshape(-1, 6)
    out_j = np.empty_like(jflat)
    out_f = np.empty_like(aflat)
    for sl in _node_chunks(jflat.shape[0]):
        out_j[sl], out_f[sl] = pl.deform_pair(jflat[sl], aflat[sl], tol=tol)
    return HermitianTriple(
        AcsField(grid, out_j.reshape(grid.shape + (4, 4))),
        TwoFormField(grid, out_f.reshape(grid.shape + (6,))),
    )


def triple_from_form_field(F: TwoFormField, tol: float = 1e-8) -> HermitianTriple:
    """Rebuild the compatible structure from a self-dual wedge-normalized
    fundamental-form field (nodewise inverse of the form cache)."""
    grid = F.grid
    fflat = F.values.reshape(-1, 6)
    out = np.empty(fflat.shape[:1] + (4, 4))
    for sl in _node_chunks(fflat.shape[0]):
        out[sl] = pl.acs_from_sd_form(fflat[sl], tol=tol)
    return HermitianTriple(AcsField(grid, out.reshape(grid.shape + (4, 4))), F)


def _bandlimited_noise(rng: np.random.Generator, grid: GridSpec, bandlimit: int) -> np.ndarray:
    noise = rng.standard_normal(grid.shape)
    spec = np.fft.fftn(noise)
    keep1d = np.abs(grid.freq_int()) <= bandlimit
    for ax in range(4):
        shape = [1, 1, 1, 1]
        shape[ax] = grid.n
        spec = spec * keep1d.reshape(shape)
    return np.fft.ifftn(spec).real


def random_compatible_acs(
    grid: GridSpec, seed: int, amplitude: float, bandlimit: int
) -> HermitianTriple:
    """A reproducible random deformation of the standard structure.

    The deformation form is a(x) OMEGA2 + b(x) OMEGA3 with a, b independent
    random trigonometric polynomials of modes up to ``bandlimit``, rescaled
    so the sup of the pointwise wedge norm equals ``amplitude`` (capped at
    SUP_NORM_CAP).  Deterministic per seed.
    """
    if not 0.0 < amplitude < 1.0:
        raise ValueError(f"amplitude must lie in (0, 1), got {amplitude}")
    if not 1 <= bandlimit < grid.n // 2:
        raise ValueError(f"bandlimit must lie in [1, n/2), got {bandlimit}")
    rng = np.random.default_rng(seed)
    a = _bandlimited_noise(rng, grid, bandlimit)
    b = _bandlimited_noise(rng, grid, bandlimit)
    sup = float(np.sqrt(np.max(a**2 + b**2)))
    scale = min(amplitude, SUP_NORM_CAP) / max(sup, 1e-300)
    base = standard_acs(grid)
    alpha = anti_invariant_field(
        base, ScalarField(grid, a * scale), ScalarField(grid, b * scale)
    )
    return deform_field(base, alpha)


def _capped(form: TwoFormField) -> tuple[TwoFormField, float]:
    """Rescale a deformation form so its sup wedge norm is at most SUP_NORM_CAP."""
    sup = float(np.sqrt(np.max(pl.wedge_norm_sq(form.values))))
    if sup > SUP_NORM_CAP:
        factor = SUP_NORM_CAP / sup
        return factor * form, factor
    return form, 1.0


def one_bump_deform(
    triple: HermitianTriple,
    bump: BumpSpec,
    tol_null: float = 1e-7,
    eps: float = 1e-6,
    delta_samples: int = 64,
    log: DeformLog | None = None,
) -> tuple[HermitianTriple, DeformLog]:
    """Stage 1 of the cut-off construction.

    Picks the most null harmonic anti-invariant direction of the input,
    truncates it by the bump, and deforms.  When the anti-invariant space is
    a proper subspace of the self-dual one, the bump support volume must
    stay below the nodal-volume estimate delta of the input structure.
    """
    from . import cohomlab

    if log is None:
        log = DeformLog()
    t0 = time.perf_counter()
    report = cohomlab.gram_matrix(triple, tol_null=tol_null)
    if report.h_minus < 1:
        raise ValueError("stage 1 needs at least one harmonic anti-invariant direction")
    alpha1 = cohomlab.select_null_form(report)
    c1 = bump.build(triple.grid)
    form, factor = _capped(c1 * alpha1)
    support_volume = float(np.mean(c1.values > 0.0))
    delta = None
    if report.h_minus < 3:
        delta = cohomlab.delta_j_estimate(triple, delta_samples, eps, tol_null=tol_null)
        if not support_volume < delta:
            raise ValueError(
                f"bump support volume {support_volume:.6f} is not below the "
                f"delta estimate {delta:.6f}"
            )
    deformed = deform_field(triple, form)
    report_after = cohomlab.gram_matrix(deformed, tol_null=tol_null)
    log.append(
        {
            "stage": "cutoff-1",
            "bump": bump.to_dict(),
            "delta_estimate": delta,
            "support_volume": support_volume,
            "sup_norm": float(np.sqrt(np.max(pl.wedge_norm_sq(form.values)))),
            "rescale_factor": factor,
            "null_direction": [float(v) for v in report.null_coords[0]],
            "h_before": report.h_minus,
            "h_after": report_after.h_minus,
            "runtime_ms": 1000.0 * (time.perf_counter() - t0),
        }
    )
    return deformed, log


def two_stage_deform(
    triple: HermitianTriple,
    bump1: BumpSpec,
    bump2: BumpSpec,
    tol_null: float = 1e-7,
    eps: float = 1e-6,
    delta_samples: int = 64,
) -> tuple[HermitianTriple, HermitianTriple, DeformLog]:
    """Both stages of the cut-off construction; returns (stage1, stage2, log).

    Stage 2 takes the surviving null direction alpha of the stage-1
    structure, checks the bump support volume against the stage-1 delta
    estimate, and renormalizes f1 F + c2 alpha with
    f1 = sqrt(1 - c2^2 |alpha|^2), which keeps the wedge square exactly 2
    because alpha is pointwise wedge-orthogonal to F.  The structure rebuilt
    from that form is cross-checked against the rational deformation route
    with beta = c2 alpha / (1 + f1).
    """
    from . import cohomlab

    stage1, log = one_bump_deform(
        triple, bump1, tol_null=tol_null, eps=eps, delta_samples=delta_samples
    )
    t0 = time.perf_counter()
    report1 = cohomlab.gram_matrix(stage1, tol_null=tol_null)
    if report1.h_minus == 0:
        log.append({"stage": "cutoff-2", "skipped": "stage 1 already exhausted the kernel"})
        return stage1, stage1, log
    alpha = cohomlab.select_null_form(report1)
    grid = triple.grid
    c2 = bump2.build(grid)
    delta1 = cohomlab.delta_j_estimate(stage1, delta_samples, eps, tol_null=tol_null)
    support_volume = float(np.mean(c2.values > 0.0))
    if not support_volume < delta1:
        raise ValueError(
            f"stage-2 bump support volume {support_volume:.6f} is not below "
            f"the delta estimate {delta1:.6f}"
        )
    nsq_alpha = pl.wedge_norm_sq(alpha.values)
    prod_sq = c2.values**2 * nsq_alpha
    if float(prod_sq.max()) >= 1.0:
        node = _worst_node(grid, prod_sq)
        raise ValueError(
            f"stage-2 normalization fails: |c2 alpha| >= 1 at node {node}"
        )
    f1 = np.sqrt(1.0 - prod_sq)
    F2 = TwoFormField(grid, f1[..., None] * stage1.F.values + c2.values[..., None] * alpha.values)
    stage2 = triple_from_form_field(F2)
    # independent route: the same structure as a rational deformation of stage 1
    beta = TwoFormField(grid, (c2.values / (1.0 + f1))[..., None] * alpha.values)
    alt = deform_field(stage1, beta)
    route_dev = float(np.max(np.abs(alt.J.values - stage2.J.values)))
    if route_dev > 1e-9:
        raise pl.ConsistencyError(
            f"normalization and rational deformation routes disagree by {route_dev:.3e}"
        )
    wedge_resid = float(np.max(np.abs(pl.wedge_to_volume(F2.values, F2.values) - 2.0)))
    report2 = cohomlab.gram_matrix(stage2, tol_null=tol_null)
    log.append(
        {
            "stage": "cutoff-2",
            "bump": bump2.to_dict(),
            "delta_estimate": delta1,
            "support_volume": support_volume,
            "sup_norm": float(np.sqrt(np.max(prod_sq))),
            "null_direction": [float(v) for v in report1.null_coords[0]],
            "wedge_square_residual": wedge_resid,
            "route_disagreement": route_dev,
            "h_before": report1.h_minus,
            "h_after": report2.h_minus,
            "runtime_ms": 1000.0 * (time.perf_counter() - t0),
        }
    )
    return stage1, stage2, log


def save_triple(triple: HermitianTriple, directory, stem: str, params: dict | None = None,
                log: DeformLog | None = None) -> Path:
    """Write J (endo kind) and F (twoform kind) field files plus a JSON
    sidecar with construction parameters and the deformation log."""
    import json

    from .fieldio import serialize_field

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    j_name = f"{stem}.J.field"
    f_name = f"{stem}.F.field"
    serialize_field(triple.J, directory / j_name)
    serialize_field(triple.F, directory / f_name)
    sidecar = {
        "format": 1,
        "grid_n": triple.grid.n,
        "files": {"J": j_name, "F": f_name},
        "params": params or {},
        "deform_log": log.to_list() if log is not None else [],
    }
    path = directory / f"{stem}.json"
    path.write_text(json.dumps(sidecar, indent=2))
    return path


def load_triple(sidecar_path) -> HermitianTriple:
    import json

    from .fieldio import deserialize_field

    sidecar_path = Path(sidecar_path)
    meta = json.loads(sidecar_path.read_text())
    grid = GridSpec(int(meta["grid_n"]))
    j_field = deserialize_field(sidecar_path.parent / meta["files"]["J"], expect_grid=grid)
    f_field = deserialize_field(sidecar_path.parent / meta["files"]["F"], expect_grid=grid)
    return HermitianTriple(AcsField(grid, j_field.values), f_field)
