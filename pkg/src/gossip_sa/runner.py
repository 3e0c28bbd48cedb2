"""Experiment orchestration: replica execution, trace files, summaries.

Traces are CSV with one row per recorded iteration and the column layout
``n,gamma,disagreement,residual,objective,avg_1..avg_d``.  Floats are
written with 17 significant digits so the files round-trip bit-exactly,
and nothing time- or host-dependent is emitted: rerunning a config with
the same seed reproduces the files byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ConfigError, ExperimentSpec, build_run_config
from .core import RunResult, run_ensemble, run_replicas, validate_assumptions
from .diagnostics import (
    CltEstimate,
    clt_check,
    fit_decay_exponent,
    replica_mean_squared_disagreement,
)

#: Minimum number of replicas a fluctuation study may be configured with.
MIN_CLT_REPLICAS = 100


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def trace_path(directory: Path, replica: int) -> Path:
    return directory / f"trace_r{replica:03d}.csv"


def write_trace(path: Path, records, dim: int) -> None:
    """Write one replica's records as CSV (17 significant digits)."""
    header = "n,gamma,disagreement,residual,objective," + ",".join(
        f"avg_{k + 1}" for k in range(dim)
    )
    lines = [header]
    for rec in records:
        if rec.average.size != dim:
            raise ValueError("record dimension does not match the trace layout")
        fields = [
            str(rec.n),
            _fmt(rec.gamma),
            _fmt(rec.disagreement),
            _fmt(rec.residual),
            _fmt(rec.objective),
            *(_fmt(v) for v in rec.average),
        ]
        lines.append(",".join(fields))
    path.write_text("\n".join(lines) + "\n")


def read_trace(path: Path) -> tuple[list[str], np.ndarray]:
    """Read a trace CSV back as (header fields, value matrix)."""
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    values = np.array(
        [[float(f) for f in line.split(",")] for line in lines[1:]], dtype=float
    )
    return header, values


def write_summary(path: Path, entries: dict) -> None:
    """Flat ``key = value`` summary, diff-friendly and deterministic."""
    lines = []
    for key, value in entries.items():
        if isinstance(value, float):
            lines.append(f"{key} = {_fmt(value)}")
        else:
            lines.append(f"{key} = {value}")
    path.write_text("\n".join(lines) + "\n")


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    spec: ExperimentSpec
    results: tuple[RunResult, ...]
    trace_paths: tuple[Path, ...]
    summary_path: Path
    summary: dict


def _common_summary(spec: ExperimentSpec) -> dict:
    return {
        "problem": spec.problem.kind,
        "n_agents": spec.graph.n_agents,
        "dim": spec.problem.dim,
        "n_iter": spec.run.n_iter,
        "replicas": spec.run.replicas,
        "seed": spec.run.seed,
        "gamma0": float(spec.schedule.gamma0),
        "xi": float(spec.schedule.xi),
        "laziness_c": float(spec.laziness.c),
        "laziness_eta": float(spec.laziness.eta),
    }


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Execute every replica of the spec, writing traces and a summary.

    The summary aggregates across replicas with medians and fits the decay
    exponent of the replica-averaged squared disagreement; both the fit and
    the final residual are recomputable from the emitted traces alone.
    """
    config = build_run_config(spec)
    out = Path(spec.output.directory)
    out.mkdir(parents=True, exist_ok=True)

    results = run_replicas(config)
    paths = []
    for res in results:
        path = trace_path(out, res.replica)
        write_trace(path, res.records, spec.problem.dim)
        paths.append(path)

    finals = [res.records[-1] for res in results]
    ns, mean_sq = replica_mean_squared_disagreement([res.records for res in results])
    try:
        beta_hat = fit_decay_exponent(ns, mean_sq)
    except ValueError:
        beta_hat = float("nan")

    summary = _common_summary(spec)
    summary.update(
        {
            "initial_disagreement_median": float(
                np.median([res.initial_disagreement for res in results])
            ),
            "final_disagreement_median": float(np.median([r.disagreement for r in finals])),
            "final_residual_median": float(np.median([r.residual for r in finals])),
            "final_objective_median": float(np.median([r.objective for r in finals])),
            "beta_hat": float(beta_hat),
        }
    )
    summary_path = out / "summary.txt"
    write_summary(summary_path, summary)
    return ExperimentResult(
        spec=spec,
        results=tuple(results),
        trace_paths=tuple(paths),
        summary_path=summary_path,
        summary=summary,
    )


@dataclass(frozen=True, eq=False)
class CltStudyResult:
    spec: ExperimentSpec
    estimate: CltEstimate
    summary_path: Path
    summary: dict


def run_clt_study(spec: ExperimentSpec, radius: float = 0.5) -> CltStudyResult:
    """Estimate the fluctuation covariance across many replicas.

    Replicas are advanced together by the vectorized ensemble runner; the
    final network averages, filtered to those near the limit point, are
    compared with the Lyapunov-equation covariance.
    """
    if spec.run.replicas < MIN_CLT_REPLICAS:
        raise ConfigError(
            f"a fluctuation study needs at least {MIN_CLT_REPLICAS} replicas, "
            f"got {spec.run.replicas}"
        )
    config = build_run_config(spec)
    if config.problem.clt_spec is None:
        raise ConfigError(
            f"problem kind {spec.problem.kind!r} provides no fluctuation "
            "specification (limit point, drift, noise covariance)"
        )
    finals = run_ensemble(config)
    estimate = clt_check(
        finals, config.problem.clt_spec, config.schedule, spec.run.n_iter, radius=radius
    )

    out = Path(spec.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    summary = _common_summary(spec)
    summary.update(
        {
            "zeta": estimate.zeta,
            "gamma_tail": float(config.schedule.gamma(spec.run.n_iter)),
            "n_replicas_used": estimate.n_replicas_used,
            "relative_error": estimate.relative_error,
            "scaled_disagreement": estimate.scaled_disagreement,
            "degenerate": estimate.degenerate,
        }
    )
    dim = estimate.theoretical_cov.shape[0]
    for a in range(dim):
        for b in range(dim):
            summary[f"empirical_cov_{a + 1}_{b + 1}"] = float(estimate.empirical_cov[a, b])
    for a in range(dim):
        for b in range(dim):
            summary[f"theoretical_cov_{a + 1}_{b + 1}"] = float(
                estimate.theoretical_cov[a, b]
            )
    summary_path = out / "clt_summary.txt"
    write_summary(summary_path, summary)
    return CltStudyResult(
        spec=spec, estimate=estimate, summary_path=summary_path, summary=summary
    )


def validation_report(spec: ExperimentSpec):
    """Assumption report for a spec without running it."""
    return validate_assumptions(build_run_config(spec))
