"""Verification experiments, JSON reports and CSV plot data.

A report is a plain JSON document.  Every number in it is a function of the
configuration alone (root seed included); wall-clock times and the worker
count live under ``"execution"`` and are the only parts allowed to differ
between reproductions, see :func:`reproducible_view`.
"""
import csv
import json
import math
import os
import time
from datetime import datetime, timezone

import numpy as np

from .calabi import calabi
from .cauchy_kernel import (
    cauchy_calabi_identity,
    cauchy_pompeiu,
    hamiltonian_at,
    lemma1_bound_check,
    singular_mass,
)
from .errors import IntegrationDivergedError, NearCollisionError, SamplingDegeneracyError
from .flow import DEFAULT_TIMES, StepPolicy, flow_diagnostics, integrate_many
from .geometry import sample_disc_uniform, substream
from .linking import (
    MC_STREAM,
    PAIR_MASS,
    average_rotation_mc,
    average_rotation_radial,
    symmetry_reduction_check,
)

REPORT_FORMAT = "calabi-rotation-report/1"
DIAGNOSTIC_STREAM = 1
NUMERIC_ERRORS = (IntegrationDivergedError, NearCollisionError, SamplingDegeneracyError)

CONVENTIONS = {
    "symplectic_form": "omega = (i/2) dz ^ dzbar = dx ^ dy",
    "hamiltonian_field": "i_X omega = -dH, so xi = dz(X) = 2i dH/dzbar = -H_y + i H_x",
    "arnold_form": "alpha = d(z1 - z2) / (2 pi (z1 - z2)); winding = Im of its pair-curve integral",
    "winding_sign": "counterclockwise turns of z1(t) - z2(t) count positive",
    "measure": "Lebesgue measure dm on the unit disc (area pi); pair space mass pi^2",
    "calabi": "Cal = int_0^1 int_D H_t dm dt",
    "expected_relation": "Phi = -2 Cal",
}


def _num(x):
    """JSON-safe float: non-finite values become null."""
    x = float(x)
    return x if math.isfinite(x) else None


def _cplx(z, err=None):
    out = {"re": _num(z.real), "im": _num(z.imag)}
    if err is not None:
        out["stderr_re"] = _num(err.real)
        out["stderr_im"] = _num(err.imag)
    return out


class _Assertions:
    def __init__(self):
        self.items = []

    def add(self, name, value, threshold, passed=None):
        if passed is None:
            passed = value is not None and value <= threshold
        self.items.append({"name": name, "passed": bool(passed),
                           "value": _num(value) if value is not None else None,
                           "threshold": _num(threshold)})


def _policy(cfg):
    est = cfg.estimator
    return StepPolicy(tolerance=est["tolerance"], max_step=est["max_step"])


def theorem_check(cfg, checks, artifacts):
    """Calabi invariant, Monte Carlo rotation number and their residual."""
    H, est, lim = cfg.hamiltonian, cfg.estimator, cfg.assertions
    k = lim["sigma_multiplier"]
    cal = calabi(H, tuple(est["calabi_orders"]))
    mc = average_rotation_mc(H, est["samples"], est["seed"], est["workers"], _policy(cfg),
                             est["chunk_size"], keep_samples=True)
    artifacts["windings"] = mc.samples.imag
    artifacts["log_moduli"] = mc.samples.real

    residual = abs(mc.phi + 2 * cal.value)
    if cal.value != 0:
        relative = residual / abs(cal.value)
    else:
        relative = 0.0 if residual == 0 else math.inf
    sigma = math.hypot(mc.standard_error, 2 * cal.error)
    rel_se = mc.standard_error / abs(mc.phi) if mc.phi != 0 else (0.0 if mc.standard_error == 0 else math.inf)
    lam = mc.phi_complex

    checks.add("theorem_residual_within_sigma", residual, k * sigma)
    checks.add("lambda_real_part_within_sigma", abs(lam.real), k * mc.phi_complex_error.real)
    checks.add("lambda_imag_equals_phi", abs(lam.imag - mc.phi), 0.0)
    if lim["max_relative_residual"] is not None:
        checks.add("relative_residual", relative, lim["max_relative_residual"])
    if lim["max_relative_stderr"] is not None:
        checks.add("relative_stderr", rel_se, lim["max_relative_stderr"])

    results = {
        "calabi": {"value": _num(cal.value), "error": _num(cal.error), "orders": list(cal.orders)},
        "phi": {"value": _num(mc.phi), "stderr": _num(mc.standard_error),
                "relative_stderr": _num(rel_se), "samples": mc.sample_count,
                "redraws": mc.redraws, "estimator": mc.estimator},
        "lambda": _cplx(lam, mc.phi_complex_error),
        "residual": {"absolute": _num(residual), "relative": _num(relative),
                     "combined_sigma": _num(sigma)},
        "radial_oracle": None,
    }
    if H.is_radial_autonomous:
        exact = average_rotation_radial(H, est["radial_order"]).phi
        results["radial_oracle"] = {"phi": _num(exact), "calabi": _num(-exact / 2)}
        checks.add("phi_matches_radial_oracle", abs(mc.phi - exact), k * mc.standard_error)
        checks.add("calabi_matches_radial_oracle", abs(cal.value + exact / 2),
                   lim["calabi_tolerance"])

    traces = []
    for pair in cfg.output["trace_pairs"]:
        z = np.array([complex(*p) for p in pair])
        pts, _ = integrate_many(H, z, DEFAULT_TIMES, _policy(cfg))
        traces.append(pts)
    artifacts["traces"] = np.array(traces).reshape(-1, 2, DEFAULT_TIMES.size)
    artifacts["trace_times"] = np.asarray(DEFAULT_TIMES)
    return results


def diagnostics(cfg, checks):
    """Area preservation, the integrability bound, Cauchy reconstruction, symmetry."""
    H, dcfg, lim = cfg.hamiltonian, cfg.diagnostics, cfg.assertions
    k = lim["sigma_multiplier"]
    seed = cfg.estimator["seed"]
    policy = _policy(cfg)
    times = [float(t) for t in dcfg["times"]]

    flow = flow_diagnostics(H, dcfg["jacobian_points"], substream(seed, DIAGNOSTIC_STREAM, 0),
                            policy)
    checks.add("jacobian_max_deviation", flow.max_jacobian_deviation, lim["jacobian_tolerance"])

    mass0 = float(singular_mass(0j))
    checks.add("singular_mass_at_origin", abs(mass0 - 2 * np.pi), 1e-8)

    lemma = []
    for j, t in enumerate(times):
        res = lemma1_bound_check(H, t, dcfg["lemma1_samples"],
                                 substream(seed, DIAGNOSTIC_STREAM, 1, j))
        margin = res.majorant + k * res.standard_error - res.estimate
        checks.add(f"lemma1_bound_t={t:g}", res.estimate, res.majorant + k * res.standard_error)
        lemma.append({"t": t, "estimate": _num(res.estimate), "stderr": _num(res.standard_error),
                      "intermediate": _num(res.intermediate), "majorant": _num(res.majorant),
                      "margin": _num(margin)})

    cauchy = []
    for j, t in enumerate(times):
        f = hamiltonian_at(H, t)
        w = 0.9 * sample_disc_uniform(substream(seed, DIAGNOSTIC_STREAM, 2, j),
                                      dcfg["cauchy_points"])
        errs, bnd = [], []
        for wj in w:
            cp = cauchy_pompeiu(f, wj)
            errs.append(abs(cp.reconstructed - f.value(wj)))
            bnd.append(abs(cp.boundary_term))
        lhs, rhs = cauchy_calabi_identity(H, t)
        ident = abs(lhs - rhs) / abs(rhs) if rhs != 0 else abs(lhs)
        checks.add(f"cauchy_pompeiu_t={t:g}", max(errs), lim["cauchy_tolerance"])
        checks.add(f"cauchy_calabi_identity_t={t:g}", ident, lim["cauchy_tolerance"])
        cauchy.append({"t": t, "max_reconstruction_error": _num(max(errs)),
                       "max_boundary_term": _num(max(bnd)), "identity_lhs": _cplx(lhs),
                       "identity_rhs": _num(rhs), "identity_relative_residual": _num(ident)})

    symmetry = []
    for j, t in enumerate(times):
        res = symmetry_reduction_check(H, t, dcfg["symmetry_samples"],
                                       substream(seed, DIAGNOSTIC_STREAM, 3, j))
        checks.add(f"symmetry_reduction_t={t:g}", abs(res.lhs - res.rhs), k * res.sigma)
        symmetry.append({"t": t, "lhs": _cplx(res.lhs), "rhs": _cplx(res.rhs),
                         "sigma": _num(res.sigma), "z_score": _num(res.z_score)})

    return {
        "jacobian_max_deviation": _num(flow.max_jacobian_deviation),
        "max_radius_excess": _num(flow.max_radius_excess),
        "flow_steps": flow.step_count,
        "singular_mass_at_origin": _num(mass0),
        "lemma1": lemma,
        "cauchy": cauchy,
        "symmetry": symmetry,
    }


def samples_path(report_path):
    root, _ = os.path.splitext(report_path)
    return root + ".samples.npz"


def execute(cfg):
    """Run the configured experiments.

    Returns
    -------
    report : dict
    artifacts : dict of arrays (windings, traces) for :func:`emit_plot_data`
    """
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    clock = {}
    checks = _Assertions()
    artifacts = {}
    est = cfg.estimator
    report = {
        "format": REPORT_FORMAT,
        "config": cfg.document,
        "conventions": CONVENTIONS,
        "provenance": {
            "root_seed": est["seed"],
            "bit_generator": "Philox",
            "monte_carlo_streams": f"SeedSequence(root_seed, spawn_key=({MC_STREAM}, chunk))",
            "chunk_size": est["chunk_size"],
            "diagnostic_streams": f"SeedSequence(root_seed, spawn_key=({DIAGNOSTIC_STREAM}, ...))",
            "integrator": _policy(cfg).as_dict(),
            "output_times": int(DEFAULT_TIMES.size),
        },
        "results": None,
        "diagnostics": None,
        "assertions": checks.items,
        "status": None,
        "error": None,
        "execution": {"workers": est["workers"], "started_utc": started, "wall_clock_s": clock},
    }
    t_all = time.perf_counter()
    try:
        if "theorem-check" in cfg.experiments:
            t0 = time.perf_counter()
            report["results"] = theorem_check(cfg, checks, artifacts)
            clock["theorem-check"] = time.perf_counter() - t0
        if "diagnostics" in cfg.experiments:
            t0 = time.perf_counter()
            report["diagnostics"] = diagnostics(cfg, checks)
            clock["diagnostics"] = time.perf_counter() - t0
    except NUMERIC_ERRORS as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        report["status"] = "error"
    else:
        report["status"] = "pass" if all(c["passed"] for c in checks.items) else "fail"
    clock["total"] = time.perf_counter() - t_all
    return report, artifacts


def exit_code(report):
    return {"pass": 0, "fail": 1, "error": 3}[report["status"]]


def write_report(report, artifacts, path):
    """Write the JSON report and, when present, the per-sample arrays beside it."""
    if artifacts:
        npz = samples_path(path)
        np.savez(npz, **artifacts)
        report["artifacts"] = {"samples": os.path.basename(npz)}
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, allow_nan=False)
        fh.write("\n")
    return path


def reproducible_view(report):
    """The report without wall-clock and worker-count fields."""
    out = {k: v for k, v in report.items() if k != "execution"}
    config = json.loads(json.dumps(out["config"]))
    config["estimator"].pop("workers", None)
    out["config"] = config
    return out


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def running_mean_checkpoints(n, count=100):
    marks = np.unique(np.geomspace(min(10, n), n, count).astype(np.int64))
    if marks[-1] != n:
        marks = np.append(marks, n)
    return marks


def emit_plot_data(report_path, outdir, bins=101):
    """Write the CSV plot data of a completed report into ``outdir``.

    Files
    -----
    winding_histogram.csv : bin_left, bin_right, count, density (turns)
    phi_running_mean.csv : n, phi_running_mean, stderr; the last row uses all samples
    trajectory_traces.csv : pair, t, z1_re, z1_im, z2_re, z2_im, r1, r2

    Returns the list of written paths.
    """
    with open(report_path) as fh:
        report = json.load(fh)
    if report.get("status") not in ("pass", "fail") or not report.get("artifacts"):
        raise ValueError("report has no completed theorem-check samples")
    npz = os.path.join(os.path.dirname(os.path.abspath(report_path)), report["artifacts"]["samples"])
    data = np.load(npz)
    w = data["windings"]
    os.makedirs(outdir, exist_ok=True)
    written = []

    counts, edges = np.histogram(w, bins=bins)
    density = counts / (counts.sum() * np.diff(edges))
    written.append(_write_csv(os.path.join(outdir, "winding_histogram.csv"),
                              ["bin_left", "bin_right", "count", "density"],
                              zip(edges[:-1].tolist(), edges[1:].tolist(), counts.tolist(),
                                  density.tolist())))

    rows = []
    for n in running_mean_checkpoints(w.size):
        head = w[:n]
        se = PAIR_MASS * head.std(ddof=1) / np.sqrt(n) if n > 1 else math.nan
        rows.append((int(n), float(PAIR_MASS * head.mean()), float(se)))
    written.append(_write_csv(os.path.join(outdir, "phi_running_mean.csv"),
                              ["n", "phi_running_mean", "stderr"], rows))

    traces, times = data["traces"], data["trace_times"]
    rows = []
    for p, (z1, z2) in enumerate(traces):
        for t, a, b in zip(times.tolist(), z1.tolist(), z2.tolist()):
            rows.append((p, t, a.real, a.imag, b.real, b.imag, abs(a), abs(b)))
    written.append(_write_csv(os.path.join(outdir, "trajectory_traces.csv"),
                              ["pair", "t", "z1_re", "z1_im", "z2_re", "z2_im", "r1", "r2"], rows))
    return written
