"""Reproduction experiments built from the library pieces."""

from __future__ import annotations

import json
import math
from importlib import resources
from typing import Optional, Sequence

import numpy as np

from . import engine
from .overlap import OverlapEstimate, classical_expected_iterations, estimate_lambda_grid, estimate_lambda_mc
from .problems import TestFunction, builtin_suite, to_search_problem
from .schedule import lower_bound_queries, required_queries
from .spectral import (ModeGrid, SpectralProblem, equal_superposition, gaussian_packet, post_search_distribution,
                       simulate_oracle_pipeline, spectral_lambda, verify_gate_decomposition, window_mass)

DEFAULT_DELTA = 0.1
GRID_RESOLUTION = 256
GRID_REFINE = 6


def table1_reference() -> dict:
    """Reference rows of the benchmark table, keyed by function name."""
    text = resources.files("fpsearch").joinpath("data/table1_reference.json").read_text()
    return json.loads(text)


def estimate_lambda(fn: TestFunction, method: str = "grid", samples: int = 4_000_000, seed: int = 0,
                    resolution: int = GRID_RESOLUTION, refine: int = GRID_REFINE,
                    workers: int = 1) -> OverlapEstimate:
    problem = to_search_problem(fn)
    if method in ("grid",):
        return estimate_lambda_grid(problem, resolution, refine)
    if method in ("mc", "monte_carlo"):
        return estimate_lambda_mc(problem, samples, seed, workers=workers)
    raise ValueError(f"unknown method {method!r}")


def search_summary(lam: float, delta: float = DEFAULT_DELTA, q_cap: int = 100_000) -> dict:
    """Query counts for one overlap value; ``found`` is False when the target region is empty."""
    if lam <= 0.0:
        return {"found": False, "message": "no target region found", "minimal_q": None,
                "predicted_q": None, "lower_bound": None, "classical": math.inf}
    q = engine.minimal_queries(lam, delta, q_cap)
    return {
        "found": True,
        "minimal_q": q,
        "cap_exceeded": q is None,
        "predicted_q": required_queries(lam, delta),
        "lower_bound": lower_bound_queries(1.0 - delta, lam),
        "classical": classical_expected_iterations(lam),
    }


def table1_rows(delta: float = DEFAULT_DELTA, resolution: int = GRID_RESOLUTION,
                refine: int = GRID_REFINE, functions: Optional[Sequence[TestFunction]] = None) -> list[dict]:
    ref = table1_reference()
    rows = []
    for fn in functions or builtin_suite():
        est = estimate_lambda(fn, "grid", resolution=resolution, refine=refine)
        summary = search_summary(est.lam, delta)
        row = {"function": fn.name, "lambda": est.lam, "quantum_q": summary["minimal_q"],
               "predicted_q": summary["predicted_q"], "lower_bound": summary["lower_bound"],
               "classical": summary["classical"]}
        reference = ref.get(fn.name)
        if reference:
            row["paper_quantum"] = reference["quantum"]
            row["paper_classical"] = reference["classical"]
            row["quantum_dev"] = _rel_dev(row["quantum_q"], reference["quantum"])
            row["classical_dev"] = _rel_dev(row["classical"], reference["classical"])
        rows.append(row)
    return rows


def _rel_dev(value, reference):
    if value is None or not math.isfinite(value):
        return None
    return (value - reference) / reference


def format_table(rows: list[dict]) -> str:
    cols = [("function", "{}"), ("lambda", "{:.4e}"), ("quantum_q", "{}"), ("paper_quantum", "{}"),
            ("quantum_dev", "{:+.1%}"), ("classical", "{:.4e}"), ("paper_classical", "{:.4e}"),
            ("classical_dev", "{:+.1%}")]

    def cell(v, fmt):
        if v is None or (isinstance(v, float) and not math.isfinite(v)):
            return "n/a"
        return fmt.format(v)

    table = [[name for name, _ in cols]] + [[cell(r.get(name), fmt) for name, fmt in cols] for r in rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(cols))]
    out = []
    for line in table:
        out.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(line, widths))))
    return "\n".join(out) + "\n"


def sweep_table(lam: float, delta: float, q_min: int, q_max: int) -> list[tuple]:
    """Rows ``(q, p_fixed, p_naive)``; each ``q`` uses its own fixed-point schedule."""
    qs = range(q_min, q_max + 1)
    naive = engine.run_naive_grover(lam, q_max).p
    fixed = engine.fixed_point_sweep(lam, delta, qs)
    return [(q, float(pf), float(naive[q - 1])) for q, pf in zip(qs, fixed)]


def noise_table(lam: float, delta: float, depols: Sequence[float], q_max: int) -> list[tuple]:
    """Long-format rows ``(depol, q, p)`` with a per-``q`` schedule."""
    rows = []
    qs = range(1, q_max + 1)
    for d in depols:
        ps = engine.noisy_sweep(lam, delta, d, qs)
        rows.extend((float(d), q, float(p)) for q, p in zip(qs, ps))
    return rows


def loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def spectral_record(terms, window, grid: ModeGrid, input_spec: str = "equal:4", delta: float = DEFAULT_DELTA,
                    flag_levels: int = 4, decomposition: Optional[tuple] = None, excerpt: int = 12) -> dict:
    problem = build_spectral_problem(terms, window, grid, input_spec)
    lam = spectral_lambda(problem)
    summary = search_summary(lam, delta)
    record = {
        "spectrum": [float(v) for v in problem.eigenvalues[:excerpt]],
        "retained_states": int(len(problem.eigenvalues)),
        "lambda": lam,
        "minimal_q": summary["minimal_q"],
        "predicted_q": summary["predicted_q"],
    }
    q = summary["minimal_q"]
    if summary["found"] and q is not None:
        final = engine.run_fixed_point(lam, q, delta).final if q > 0 else engine.initial_state(lam)
        record["post_search_window_mass"] = window_mass(problem, post_search_distribution(problem, final))
    else:
        record["post_search_window_mass"] = None
    report = simulate_oracle_pipeline(problem, flag_levels)
    rec = report.to_record()
    rec.pop("states")
    record["oracle_pipeline"] = rec
    if decomposition is not None:
        res = verify_gate_decomposition(*decomposition)
        record["decomposition"] = {"theta1": decomposition[0], "theta2": decomposition[1],
                                   "max_infidelity": res.max_infidelity, "reliable": res.reliable}
    return record


def build_spectral_problem(terms, window, grid: ModeGrid, input_spec: str) -> SpectralProblem:
    """``input_spec`` is ``equal:K`` (lowest K eigenstates) or ``gaussian:center,width``."""
    kind, _, arg = input_spec.partition(":")
    if kind == "equal":
        return SpectralProblem(terms, grid, window, input_amplitudes=equal_superposition(int(arg)))
    if kind == "gaussian":
        center, width = (float(v) for v in arg.split(","))
        return SpectralProblem(terms, grid, window, input_wavefunction=gaussian_packet(grid, center, width))
    raise ValueError(f"unknown input spec {input_spec!r}")
