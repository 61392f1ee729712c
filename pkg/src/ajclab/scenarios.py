"""Experiment scenarios reproducing the expected phenomenology end to end.

Each scenario is a pure function of a :class:`~ajclab.config.LabConfig`,
deterministic given the config, and returns a
:class:`~ajclab.reporting.ScenarioReport` whose checks carry the asserted
tolerance and the measured value.  Wall-clock timings are recorded in the
reports but never gate a check here.
"""

from __future__ import annotations

import time

import numpy as np

from . import battery, cohomlab
from . import hermitian as hm
from . import pointlin as pl
from . import torusfield as tf
from .config import LabConfig
from .reporting import ScenarioReport

#: sphere sample count used by every nodal-volume estimate
DELTA_SAMPLES = 64
#: grids of the resolution study
RESOLUTION_GRID_SIZES = (8, 16, 24, 32)


def scenario_baseline(cfg: LabConfig) -> ScenarioReport:
    """The undeformed structure: exact kernel of dimension 2."""
    report = ScenarioReport("baseline", cfg.to_dict())
    grid = tf.GridSpec(cfg.grid_n)
    with report.timed("build"):
        triple = hm.standard_acs(grid)
    with report.timed("gram"):
        gram = cohomlab.gram_matrix(triple, tol_null=cfg.tol_null)
    report.h_values["standard"] = gram.h_minus
    report.summaries["gram"] = gram.to_dict()
    report.check("h_minus equals 2", gram.h_minus == 2, measured=float(gram.h_minus))
    report.check(
        "h_plus equals 4", cohomlab.h_plus(gram) == 4, measured=float(cohomlab.h_plus(gram))
    )
    dev = float(np.max(np.abs(gram.matrix - np.diag([4.0, 0.0, 0.0]))))
    report.check("Gram matrix is diag(4, 0, 0)", dev <= 1e-10, 1e-10, dev)
    closed = cohomlab.null_forms_closed_residual(gram)
    report.check("kernel forms are closed", closed <= 1e-12, 1e-12, closed)
    anti = max(
        float(np.max(np.abs(pl.split_j(triple.J.values, form.values).plus)))
        for form in gram.null_forms
    )
    report.check("kernel forms are anti-invariant", anti <= 1e-10, 1e-10, anti)
    rot = float(np.max(np.abs(pl.j_act_anti(pl.J0, pl.OMEGA2) - pl.OMEGA3)))
    report.check("structure action rotates omega2 to omega3", rot <= 1e-12, 1e-12, rot)
    rot2 = float(np.max(np.abs(pl.j_act_anti(pl.J0, pl.j_act_anti(pl.J0, pl.OMEGA2)) + pl.OMEGA2)))
    report.check("structure action squares to -Id on the kernel", rot2 <= 1e-12, 1e-12, rot2)
    return report


def _bump_stage1(cfg: LabConfig, report: ScenarioReport):
    grid = tf.GridSpec(cfg.grid_n)
    with report.timed("build"):
        base = hm.standard_acs(grid)
        base_gram = cohomlab.gram_matrix(base, tol_null=cfg.tol_null)
    with report.timed("stage1"):
        stage1, log = hm.one_bump_deform(
            base, cfg.bump1, tol_null=cfg.tol_null, eps=cfg.eps_nodal,
            delta_samples=DELTA_SAMPLES,
        )
        stage1_gram = cohomlab.gram_matrix(stage1, tol_null=cfg.tol_null)
    report.h_values["standard"] = base_gram.h_minus
    report.h_values["stage1"] = stage1_gram.h_minus
    report.summaries["deform_log"] = log.to_list()
    report.check(
        "stage-1 kernel dimension at most 1",
        stage1_gram.h_minus <= 1, measured=float(stage1_gram.h_minus),
    )
    angle = cohomlab.null_containment_angle(stage1_gram, base_gram)
    report.check(
        "stage-1 kernel contained in the standard kernel",
        angle < cohomlab.ANGLE_TOL, cohomlab.ANGLE_TOL, angle,
    )
    inter = cohomlab.intersection_dim(base, stage1, tol_null=cfg.tol_null)
    report.check(
        "kernel intersection dimension at most 1", inter <= 1, measured=float(inter)
    )
    return base, base_gram, stage1, stage1_gram, log


def scenario_one_bump(cfg: LabConfig) -> ScenarioReport:
    """Stage 1 of the cut-off construction from the standard structure."""
    report = ScenarioReport("one-bump", cfg.to_dict())
    _, _, stage1, stage1_gram, log = _bump_stage1(cfg, report)
    report.summaries["stage1_gram"] = stage1_gram.to_dict()
    report.artifacts["triples"] = {"stage1": (stage1, log)}
    return report


def scenario_two_stage(cfg: LabConfig) -> ScenarioReport:
    """Both cut-off stages; the kernel must be exhausted at the end."""
    report = ScenarioReport("two-stage", cfg.to_dict())
    grid = tf.GridSpec(cfg.grid_n)
    with report.timed("build"):
        base = hm.standard_acs(grid)
        base_gram = cohomlab.gram_matrix(base, tol_null=cfg.tol_null)
    with report.timed("pipeline"):
        stage1, stage2, log = hm.two_stage_deform(
            base, cfg.bump1, cfg.bump2, tol_null=cfg.tol_null,
            eps=cfg.eps_nodal, delta_samples=DELTA_SAMPLES,
        )
    with report.timed("gram"):
        stage1_gram = cohomlab.gram_matrix(stage1, tol_null=cfg.tol_null)
        stage2_gram = cohomlab.gram_matrix(stage2, tol_null=cfg.tol_null)
    report.h_values = {
        "standard": base_gram.h_minus,
        "stage1": stage1_gram.h_minus,
        "stage2": stage2_gram.h_minus,
    }
    report.summaries["deform_log"] = log.to_list()
    report.summaries["stage2_gram"] = stage2_gram.to_dict()
    report.check(
        "stage-1 kernel dimension at most 1",
        stage1_gram.h_minus <= 1, measured=float(stage1_gram.h_minus),
    )
    angle = cohomlab.null_containment_angle(stage1_gram, base_gram)
    report.check(
        "stage-1 kernel contained in the standard kernel",
        angle < cohomlab.ANGLE_TOL, cohomlab.ANGLE_TOL, angle,
    )
    inter = cohomlab.intersection_dim(base, stage1, tol_null=cfg.tol_null)
    report.check("kernel intersection dimension at most 1", inter <= 1, measured=float(inter))
    report.check(
        "stage-2 kernel is trivial", stage2_gram.h_minus == 0,
        measured=float(stage2_gram.h_minus),
    )
    lam = stage2_gram.lambda_min()
    report.check(
        "smallest Gram eigenvalue clears 10x the null tolerance",
        lam > 10.0 * cfg.tol_null, 10.0 * cfg.tol_null, lam,
    )
    wedge_resid = float(
        np.max(np.abs(pl.wedge_to_volume(stage2.F.values, stage2.F.values) - 2.0))
    )
    report.check(
        "renormalized form has wedge square 2 at every node",
        wedge_resid <= 1e-9, 1e-9, wedge_resid,
    )
    stage2_records = [r for r in log.to_list() if r["stage"] == "cutoff-2"]
    route_dev = max((r.get("route_disagreement", 0.0) for r in stage2_records), default=0.0)
    report.check(
        "normalization route matches the rational deformation route",
        route_dev <= 1e-9, 1e-9, route_dev,
    )
    report.artifacts["triples"] = {"stage1": (stage1, log), "stage2": (stage2, log)}
    return report


def scenario_random_sweep(cfg: LabConfig) -> ScenarioReport:
    """Random compatible structures: the kernel is expected to vanish for
    every seed; any seed with a surviving kernel fails the assertion but is
    recorded, not crashed on."""
    report = ScenarioReport("random-sweep", cfg.to_dict())
    if cfg.sweep_count < 1:
        raise ValueError("sweep_count must be >= 1")
    grid = tf.GridSpec(cfg.grid_n)
    rows = []
    with report.timed("sweep"):
        for seed in range(1, cfg.sweep_count + 1):
            t0 = time.perf_counter()
            triple = hm.random_compatible_acs(grid, seed, cfg.amplitude, cfg.bandlimit)
            gram = cohomlab.gram_matrix(triple, tol_null=cfg.tol_null)
            rows.append(
                {
                    "seed": seed,
                    "amplitude": cfg.amplitude,
                    "bandlimit": cfg.bandlimit,
                    "h_minus": gram.h_minus,
                    "lambda_min": gram.lambda_min(),
                    "runtime_ms": 1000.0 * (time.perf_counter() - t0),
                }
            )
    zero_fraction = float(np.mean([row["h_minus"] == 0 for row in rows]))
    nonzero = [row["seed"] for row in rows if row["h_minus"] != 0]
    report.h_values = {f"seed_{row['seed']}": row["h_minus"] for row in rows}
    report.summaries["zero_fraction"] = zero_fraction
    report.summaries["nonzero_seeds"] = nonzero
    report.summaries["lambda_min_range"] = [
        min(r["lambda_min"] for r in rows), max(r["lambda_min"] for r in rows)
    ]
    report.check(
        "every seed has a trivial kernel", zero_fraction == 1.0, 1.0, zero_fraction,
        detail=f"seeds with surviving kernel: {nonzero}" if nonzero else "",
    )
    report.artifacts["rows"] = rows
    return report


def scenario_path(cfg: LabConfig) -> ScenarioReport:
    """Scaling one fixed bump deformation: the kernel dimension never
    exceeds its value at the start of the path."""
    report = ScenarioReport("path", cfg.to_dict())
    if cfg.path_steps < 2:
        raise ValueError("path_steps must be >= 2")
    grid = tf.GridSpec(cfg.grid_n)
    with report.timed("path"):
        base = hm.standard_acs(grid)
        base_gram = cohomlab.gram_matrix(base, tol_null=cfg.tol_null)
        alpha1 = cohomlab.select_null_form(base_gram)
        form = cfg.bump1.build(grid) * alpha1
        sup = float(np.sqrt(np.max(pl.wedge_norm_sq(form.values))))
        if sup > hm.SUP_NORM_CAP:
            form = (hm.SUP_NORM_CAP / sup) * form
        ts = np.linspace(0.0, 0.95, cfg.path_steps)
        hs = []
        for t in ts:
            triple = hm.deform_field(base, float(t) * form)
            hs.append(cohomlab.gram_h_minus(triple, tol_null=cfg.tol_null))
    report.h_values = {f"t_{t:.2f}": h for t, h in zip(ts, hs)}
    report.summaries["t_grid"] = [float(t) for t in ts]
    report.summaries["h_path"] = hs
    report.check("kernel dimension starts at 2", hs[0] == 2, measured=float(hs[0]))
    worst = max(hs)
    report.check(
        "kernel dimension never exceeds its start value",
        worst <= hs[0], measured=float(worst),
    )
    return report


def scenario_resolution(cfg: LabConfig) -> ScenarioReport:
    """Gram entries of the two-stage structure across grid refinements."""
    report = ScenarioReport("resolution", cfg.to_dict())
    matrices = {}
    for n in RESOLUTION_GRID_SIZES:
        with report.timed(f"n{n}"):
            base = hm.standard_acs(tf.GridSpec(n))
            _, stage2, _ = hm.two_stage_deform(
                base, cfg.bump1, cfg.bump2, tol_null=cfg.tol_null,
                eps=cfg.eps_nodal, delta_samples=DELTA_SAMPLES,
            )
            matrices[n] = cohomlab.gram_matrix(stage2, tol_null=cfg.tol_null).matrix
    diffs = []
    sizes = list(RESOLUTION_GRID_SIZES)
    for prev, cur in zip(sizes, sizes[1:]):
        num = float(np.linalg.norm(matrices[cur] - matrices[prev]))
        den = float(np.linalg.norm(matrices[cur]))
        diffs.append(num / den)
    report.summaries["grid_sizes"] = sizes
    report.summaries["gram_matrices"] = {str(n): m.tolist() for n, m in matrices.items()}
    report.summaries["successive_relative_differences"] = diffs
    report.check(
        "final successive relative difference below 1e-3",
        diffs[-1] < 1e-3, 1e-3, diffs[-1],
    )
    return report


def identity_battery(cfg: LabConfig) -> ScenarioReport:
    """Random-case identity batteries for the pointwise algebra and the
    spectral calculus; zero failures expected."""
    report = ScenarioReport("battery", cfg.to_dict())
    with report.timed("deformation"):
        checks = battery.run_deformation_battery(10_000, seed=cfg.seed)
    with report.timed("splitting"):
        checks += battery.run_splitting_battery(10_000, seed=cfg.seed + 1)
    with report.timed("calculus"):
        checks += battery.run_calculus_battery(16, 100, seed=cfg.seed + 2)
    report.checks.extend(checks)
    report.summaries["total_checks"] = len(checks)
    return report


SCENARIOS = {
    "baseline": scenario_baseline,
    "one-bump": scenario_one_bump,
    "two-stage": scenario_two_stage,
    "random-sweep": scenario_random_sweep,
    "path": scenario_path,
    "resolution": scenario_resolution,
    "battery": identity_battery,
}
