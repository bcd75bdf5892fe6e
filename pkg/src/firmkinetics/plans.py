"""Experiment plans: JSON configuration, orchestration, and serialization.

A plan file names a base economy, an optional sweep axis, and the artifacts
to write.  Execution produces one CSV per requested curve or histogram, one
JSON per fit, and a manifest echoing the resolved configuration; rerunning
the same plan with the same build overwrites every file byte-identically.
Sweep cells draw their seeds from the plan seed through numpy's SeedSequence
spawn mechanism, so results do not depend on worker scheduling.

Numbers are serialized with Python's shortest round-trip float representation
(17 significant digits where needed), and JSON objects use sorted keys.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import metadata
from pathlib import Path

import numpy as np

from .analytics import (
    conditional_dispersion,
    estimate_c,
    growth_series,
    histogram,
    variance_prediction,
)
from .dynamics import (
    EconomyConfig,
    GlvShocks,
    ShockSpec,
    TurnoverProfile,
    run,
)
from .seeding import spawn_rng
from .simplex import epsilon_marginal_cdf, sample_simplex_block
from .statfit import (
    fit_c_scaling,
    fit_exponential,
    fit_powerlaw_tail,
    ks_statistic,
)

__all__ = [
    "ExperimentPlan",
    "SweepAxis",
    "PlanError",
    "load_plan",
    "execute",
    "validate",
    "ExecutionResult",
    "ValidationReport",
]

SCHEMA_VERSION = 1

#: Environment variable overriding the plan's output directory.
OUTPUT_DIR_ENV = "FIRMKINETICS_OUTPUT_DIR"

ARTIFACTS = ("histogram", "growth", "dispersion", "c_curve", "fits")

#: Sweepable configuration fields.
SWEEPABLE = (
    "firm_count",
    "arity",
    "steps",
    "burn_in",
    "record_stride",
    "seed",
    "turnover.lambda",
)

_OPTION_DEFAULTS = {
    "histogram_bins": 100,
    "histogram_scale": "linear",
    "dispersion_bins": 50,
    "dispersion_measure": "ratio",
    "dispersion_statistic": "pooled",
    "tail_quantile": 0.9,
}


class PlanError(ValueError):
    """Malformed or invalid plan file; message names the offending field."""


def _package_version() -> str:
    try:
        return metadata.version("firmkinetics")
    except metadata.PackageNotFoundError:
        return "0.0.0+uninstalled"


@dataclass(frozen=True)
class SweepAxis:
    """One sweep axis: per cell, each parameter gets the matching value."""

    parameters: tuple[str, ...]
    values: tuple[tuple, ...]

    @property
    def cells(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ExperimentPlan:
    name: str
    economy_raw: dict
    base: EconomyConfig
    outputs: tuple[str, ...]
    output_dir: Path
    sweep: SweepAxis | None = None
    options: dict = field(default_factory=dict)
    workers: int = 1
    full_overrides: dict | None = None


@dataclass(frozen=True)
class ExecutionResult:
    status: str
    files: tuple[Path, ...]
    manifest: Path
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


# --------------------------------------------------------------------------
# plan parsing
# --------------------------------------------------------------------------

def _require(mapping: dict, key: str, kind, context: str):
    if key not in mapping:
        raise PlanError(f"{context}: missing required field {key!r}")
    value = mapping[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise PlanError(f"{context}: field {key!r} must be {kind.__name__}")
    return value


def _turnover_from_dict(raw: dict) -> TurnoverProfile:
    kind = _require(raw, "kind", str, "turnover")
    lam = raw.get("lambda")
    lambdas = raw.get("lambdas")
    c_override = raw.get("c_override")
    try:
        return TurnoverProfile(
            kind=kind,
            lam=float(lam) if lam is not None else None,
            lambdas=np.asarray(lambdas, dtype=float) if lambdas is not None else None,
            c_override=float(c_override) if c_override is not None else None,
        )
    except ValueError as exc:
        raise PlanError(f"turnover: {exc}") from exc


def _shock_from_dict(raw: dict, context: str) -> ShockSpec:
    kind = _require(raw, "kind", str, context)
    try:
        return ShockSpec(
            kind=kind,
            value=raw.get("value"),
            low=raw.get("low"),
            high=raw.get("high"),
            mean=raw.get("mean"),
        )
    except ValueError as exc:
        raise PlanError(f"{context}: {exc}") from exc


def _config_from_dict(raw: dict) -> EconomyConfig:
    firm_count = _require(raw, "firm_count", int, "economy")
    steps = _require(raw, "steps", int, "economy")
    seed = _require(raw, "seed", int, "economy")
    turnover = _turnover_from_dict(_require(raw, "turnover", dict, "economy"))
    glv_raw = raw.get("glv")
    glv = None
    if glv_raw is not None:
        glv = GlvShocks(
            lambda_dist=_shock_from_dict(
                _require(glv_raw, "lambda_dist", dict, "economy.glv"), "economy.glv.lambda_dist"
            ),
            a_dist=_shock_from_dict(
                _require(glv_raw, "a_dist", dict, "economy.glv"), "economy.glv.a_dist"
            ),
        )
    initial = raw.get("initial_sizes")
    try:
        return EconomyConfig(
            firm_count=firm_count,
            turnover=turnover,
            steps=steps,
            seed=seed,
            arity=raw.get("arity"),
            burn_in=raw.get("burn_in", 0),
            record_stride=raw.get("record_stride", 1),
            mode=raw.get("mode", "coupled"),
            initial_sizes=np.asarray(initial, dtype=float) if initial is not None else None,
            glv=glv,
            renorm_interval=raw.get("renorm_interval", 1_000_000),
        )
    except ValueError as exc:
        raise PlanError(f"economy: {exc}") from exc


def _sweep_from_dict(raw: dict, economy_raw: dict) -> SweepAxis:
    params = raw.get("parameter", raw.get("parameters"))
    if params is None:
        raise PlanError("sweep: missing field 'parameter'")
    if isinstance(params, str):
        params = [params]
    if not isinstance(params, list) or not all(isinstance(p, str) for p in params):
        raise PlanError("sweep: 'parameter' must be a string or list of strings")
    for p in params:
        if p not in SWEEPABLE:
            raise PlanError(f"sweep: {p!r} is not a sweepable field {SWEEPABLE}")
    values = raw.get("values")
    if not isinstance(values, list) or not values:
        raise PlanError("sweep: 'values' must be a non-empty list")
    cells = []
    for v in values:
        cell = v if isinstance(v, list) else [v]
        if len(cell) != len(params):
            raise PlanError(
                f"sweep: value {v!r} does not match parameters {params!r}"
            )
        cells.append(tuple(cell))
    # check every cell produces a valid configuration
    for cell in cells:
        _config_from_dict(_apply_assignments(economy_raw, tuple(params), cell))
    return SweepAxis(parameters=tuple(params), values=tuple(cells))


def _apply_assignments(economy_raw: dict, params: tuple[str, ...], values: tuple) -> dict:
    raw = json.loads(json.dumps(economy_raw))  # deep copy of plain JSON data
    for p, v in zip(params, values):
        if p == "turnover.lambda":
            raw.setdefault("turnover", {})["lambda"] = v
        else:
            raw[p] = v
    return raw


def load_plan(path: str | Path) -> ExperimentPlan:
    """Parse and validate a plan file; returns the fully resolved plan.

    Raises :class:`PlanError` with a field-level diagnostic on any problem,
    including JSON syntax errors (with line and column).
    """
    path = Path(path)
    if not path.exists():
        raise PlanError(f"plan file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise PlanError(
            f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise PlanError(f"{path}: top level must be a JSON object")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise PlanError(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    name = _require(raw, "name", str, "plan")
    economy_raw = _require(raw, "economy", dict, "plan")
    base = _config_from_dict(economy_raw)
    outputs_raw = raw.get("outputs", [])
    if not isinstance(outputs_raw, list):
        raise PlanError("outputs: must be a list")
    for art in outputs_raw:
        if art not in ARTIFACTS:
            raise PlanError(f"outputs: unknown artifact {art!r}, expected one of {ARTIFACTS}")
    if ("growth" in outputs_raw or "dispersion" in outputs_raw) and base.record_stride != 1:
        raise PlanError(
            "outputs: growth and dispersion artifacts need economy.record_stride = 1"
        )
    if "c_curve" in outputs_raw and not base.turnover.is_distributed:
        raise PlanError("outputs: c_curve needs a distributed turnover profile")
    options = dict(_OPTION_DEFAULTS)
    for key, value in raw.get("options", {}).items():
        if key not in _OPTION_DEFAULTS:
            raise PlanError(f"options: unknown option {key!r}")
        options[key] = value
    sweep = None
    if raw.get("sweep") is not None:
        sweep = _sweep_from_dict(raw["sweep"], economy_raw)
    workers = raw.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise PlanError("workers: must be a positive integer")
    full_overrides = raw.get("full_overrides")
    if full_overrides is not None:
        if not isinstance(full_overrides, dict) or not set(full_overrides) <= {
            "economy",
            "sweep",
        }:
            raise PlanError(
                "full_overrides: must be an object with 'economy' and/or 'sweep' keys"
            )
        merged = {**economy_raw, **full_overrides.get("economy", {})}
        _config_from_dict(merged)  # full-scale economy must itself be valid
        if "sweep" in full_overrides:
            _sweep_from_dict(full_overrides["sweep"], merged)
    return ExperimentPlan(
        name=name,
        economy_raw=economy_raw,
        base=base,
        outputs=tuple(outputs_raw),
        output_dir=Path(raw.get("output_dir", "out")) / name,
        sweep=sweep,
        options=options,
        workers=workers,
        full_overrides=full_overrides,
    )


# --------------------------------------------------------------------------
# serialization helpers
# --------------------------------------------------------------------------

def _fmt(value) -> str:
    """Shortest round-trip decimal for floats; plain str for ints/strings."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    """UTF-8, comma-delimited, LF endings, shortest round-trip numbers."""
    rows = len(columns[0]) if columns else 0
    lines = [",".join(header)]
    for i in range(rows):
        lines.append(",".join(_fmt(col[i]) for col in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path: Path, payload: dict) -> None:
    text = json.dumps(_json_ready(payload), sort_keys=True, indent=2)
    path.write_text(text + "\n", encoding="utf-8", newline="\n")


def _fit_payload(fit) -> dict:
    return {
        "family": fit.family,
        "parameters": fit.parameters,
        "sample_count": fit.sample_count,
        "ks_statistic": fit.ks_statistic,
        "xmin": fit.xmin,
    }


# --------------------------------------------------------------------------
# execution
# --------------------------------------------------------------------------

def _cell_seed(master_seed: int, cell_index: int) -> int:
    """Deterministic per-cell seed derived from the plan seed."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(cell_index,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _cell_label(params: tuple[str, ...], values: tuple) -> str:
    return "__".join(f"{p.replace('.', '_')}={v}" for p, v in zip(params, values))


def _resolve_cells(plan: ExperimentPlan, full: bool, seed_override: int | None):
    """Yield (label, EconomyConfig) pairs for every cell of the plan."""
    base_raw = json.loads(json.dumps(plan.economy_raw))
    sweep = plan.sweep
    if full and plan.full_overrides:
        base_raw.update(plan.full_overrides.get("economy", {}))
        if "sweep" in plan.full_overrides:
            sweep = _sweep_from_dict(plan.full_overrides["sweep"], base_raw)
    if seed_override is not None:
        base_raw["seed"] = seed_override
    if sweep is None:
        return [("", _config_from_dict(base_raw))], None
    cells = []
    master = base_raw["seed"]
    for idx, values in enumerate(sweep.values):
        raw = _apply_assignments(base_raw, sweep.parameters, values)
        if "seed" not in sweep.parameters:
            raw["seed"] = _cell_seed(master, idx)
        cells.append((_cell_label(sweep.parameters, values), _config_from_dict(raw)))
    return cells, sweep


def _cell_artifacts(
    label: str,
    cfg: EconomyConfig,
    outputs: tuple[str, ...],
    options: dict,
    out_dir: Path,
    name: str,
) -> tuple[list[Path], dict]:
    """Run one cell and write its artifacts; returns (files, summary)."""
    series = run(cfg)
    prefix = f"{name}__{label}__" if label else f"{name}__"
    files: list[Path] = []
    summary: dict = {"label": label, "seed": cfg.seed, "recorded": series.recorded}

    pooled = series.pooled_sizes()
    if "histogram" in outputs:
        hist = histogram(
            pooled,
            bins=int(options["histogram_bins"]),
            scale=options["histogram_scale"],
        )
        path = out_dir / f"{prefix}histogram.csv"
        write_csv(
            path,
            ["bin_left", "bin_right", "count", "density"],
            [hist.edges[:-1], hist.edges[1:], hist.counts, hist.density],
        )
        files.append(path)

    gs = None
    if "growth" in outputs or "dispersion" in outputs:
        gs = growth_series(series)
    if "growth" in outputs:
        path = out_dir / f"{prefix}growth.csv"
        with np.errstate(invalid="ignore"):
            write_csv(
                path,
                ["firm", "lambda", "mean_size", "sd_ratio", "sd_log_ratio", "sd_difference"],
                [
                    np.arange(cfg.firm_count),
                    gs.lambdas,
                    gs.mean_sizes,
                    np.nanstd(gs.ratio, axis=0),
                    np.nanstd(gs.log_ratio, axis=0),
                    np.nanstd(gs.difference, axis=0),
                ],
            )
        files.append(path)
    if "dispersion" in outputs:
        for grouping in ("by_lambda", "by_mean_size"):
            curve = conditional_dispersion(
                gs,
                grouping=grouping,
                bins=int(options["dispersion_bins"]),
                measure=options["dispersion_measure"],
                statistic=options["dispersion_statistic"],
            )
            path = out_dir / f"{prefix}dispersion_{grouping}.csv"
            write_csv(
                path,
                ["center", "dispersion", "count"],
                [curve.centers, curve.dispersion, curve.counts],
            )
            files.append(path)

    if "c_curve" in outputs:
        est = estimate_c(series)
        path = out_dir / f"{prefix}c_curve.csv"
        write_csv(
            path,
            ["lambda", "mean_size", "c_per_firm"],
            [est.lambdas, series.snapshots.mean(axis=0), est.per_firm],
        )
        files.append(path)
        summary["c_hat"] = est.aggregate

    if "fits" in outputs:
        payload = {}
        positive = pooled[pooled > 0.0]
        if positive.size >= 10:
            payload["exponential"] = _fit_payload(fit_exponential(positive))
        xmin = float(np.quantile(pooled, float(options["tail_quantile"])))
        if xmin > 0 and int((pooled >= xmin).sum()) >= 100:
            payload["powerlaw_tail"] = _fit_payload(fit_powerlaw_tail(pooled, xmin))
        path = out_dir / f"{prefix}fits.json"
        write_json(path, payload)
        files.append(path)

    return files, summary


def execute(
    plan: ExperimentPlan,
    full: bool = False,
    seed_override: int | None = None,
    output_dir_override: str | Path | None = None,
    workers_override: int | None = None,
) -> ExecutionResult:
    """Run every cell of the plan and serialize the requested artifacts.

    The output directory resolves as: explicit override, then the
    ``FIRMKINETICS_OUTPUT_DIR`` environment variable, then the plan.  The
    manifest is always written, even when a cell fails, with a status field;
    partial outputs of a failed cell are removed.
    """
    if output_dir_override is not None:
        out_dir = Path(output_dir_override) / plan.name
    elif os.environ.get(OUTPUT_DIR_ENV):
        out_dir = Path(os.environ[OUTPUT_DIR_ENV]) / plan.name
    else:
        out_dir = plan.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / f"{plan.name}__manifest.json"
    workers = workers_override if workers_override is not None else plan.workers

    cells, sweep = _resolve_cells(plan, full=full, seed_override=seed_override)
    files: list[Path] = []
    summaries: list[dict] = []
    status, error = "ok", None
    current_prefix = ""
    try:
        if workers > 1 and len(cells) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                jobs = {
                    pool.submit(
                        _cell_artifacts, label, cfg, plan.outputs, plan.options,
                        out_dir, plan.name,
                    ): label
                    for label, cfg in cells
                }
                for job, label in jobs.items():
                    current_prefix = f"{plan.name}__{label}__" if label else f"{plan.name}__"
                    cell_files, summary = job.result()
                    files.extend(cell_files)
                    summaries.append(summary)
        else:
            for label, cfg in cells:
                current_prefix = f"{plan.name}__{label}__" if label else f"{plan.name}__"
                cell_files, summary = _cell_artifacts(
                    label, cfg, plan.outputs, plan.options, out_dir, plan.name
                )
                files.extend(cell_files)
                summaries.append(summary)
        # sweep-level outputs: redistribution constant against system size
        if (
            sweep is not None
            and "c_curve" in plan.outputs
            and "firm_count" in sweep.parameters
        ):
            pos = sweep.parameters.index("firm_count")
            sizes = np.array([v[pos] for v in sweep.values], dtype=float)
            c_hats = np.array([s["c_hat"] for s in summaries])
            path = out_dir / f"{plan.name}__c_vs_system_size.csv"
            write_csv(path, ["firm_count", "c_hat"], [sizes, c_hats])
            files.append(path)
            if "fits" in plan.outputs and np.unique(sizes).size >= 3:
                fit = fit_c_scaling(sizes, c_hats)
                path = out_dir / f"{plan.name}__c_scaling_fit.json"
                write_json(path, _fit_payload(fit))
                files.append(path)
    except Exception as exc:  # failed cell: drop its partial outputs, keep the cause
        status, error = "failed", f"{type(exc).__name__}: {exc}"
        if current_prefix:
            for stale in out_dir.glob(f"{current_prefix}*"):
                if stale not in files:
                    stale.unlink(missing_ok=True)

    manifest = {
        "plan": plan.name,
        "schema_version": SCHEMA_VERSION,
        "version": _package_version(),
        "status": status,
        "error": error,
        "full_scale": full,
        "outputs": list(plan.outputs),
        "cells": [
            {
                "label": label,
                "seed": cfg.seed,
                "firm_count": cfg.firm_count,
                "arity": cfg.arity,
                "mode": cfg.mode,
                "steps": cfg.steps,
                "burn_in": cfg.burn_in,
                "record_stride": cfg.record_stride,
            }
            for label, cfg in cells
        ],
        "files": sorted(str(p.name) for p in files),
    }
    write_json(manifest_path, manifest)
    return ExecutionResult(
        status=status,
        files=tuple(sorted(files)),
        manifest=manifest_path,
        error=error,
    )


# --------------------------------------------------------------------------
# validation report
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            out.append(f"{flag} {c.name}: measured={c.measured:.6g} ({c.threshold})")
        return out


def _mini_config(cfg: EconomyConfig) -> EconomyConfig:
    """Desk-scale copy of a config for smoke checks."""
    steps = min(cfg.steps, 60_000)
    burn = min(cfg.burn_in, steps // 2)
    return replace(
        cfg,
        steps=steps,
        burn_in=burn,
        record_stride=max(1, min(cfg.record_stride, max(1, (steps - burn) // 200))),
        renorm_interval=steps + 1,
    )


def validate(plan: ExperimentPlan) -> ValidationReport:
    """Run the invariant checks relevant to the plan's mode.

    Always checks determinism (replay equality) and the simplex marginal law
    at the plan's arity; coupled plans add the conservation drift check;
    constant-turnover plans add the steady-state variance oracle; zero-
    turnover coupled plans add the exponential steady-state fit.  Failures
    are report entries, never exceptions.
    """
    checks: list[CheckResult] = []
    cfg = _mini_config(plan.base)

    series_a = run(cfg)
    series_b = run(cfg)
    identical = (
        np.array_equal(series_a.snapshots, series_b.snapshots)
        and np.array_equal(series_a.times, series_b.times)
    )
    checks.append(
        CheckResult(
            name="determinism_replay",
            passed=bool(identical),
            measured=float(not identical),
            threshold="identical snapshots on replay",
        )
    )

    rng = spawn_rng(cfg.seed, stream=1)
    draws = sample_simplex_block(cfg.arity, 100_000, rng)[:, 0]
    ks = ks_statistic(draws, lambda t: epsilon_marginal_cdf(t, cfg.arity))
    checks.append(
        CheckResult(
            name="simplex_marginal_ks",
            passed=bool(ks < 0.01),
            measured=ks,
            threshold="KS < 0.01 vs 1-(1-theta)^(n-1)",
        )
    )

    if cfg.mode == "coupled":
        drift = abs(series_a.snapshots[-1].sum() - cfg.firm_count) / cfg.firm_count
        checks.append(
            CheckResult(
                name="conservation_drift",
                passed=bool(drift < 1e-9),
                measured=drift,
                threshold="relative drift < 1e-9 without renormalization",
            )
        )

    if cfg.turnover.kind == "constant" and cfg.mode in ("coupled", "reduced"):
        lam = float(cfg.turnover.lam)
        pooled = series_a.pooled_sizes()
        # the closed-form variance is the large-N limit; small systems sit
        # O(1/N) away from it, so the comparison needs a reasonable firm count
        if pooled.size >= 1000 and cfg.firm_count >= 100:
            measured = float(np.var(pooled))
            kind = "binary" if (cfg.mode == "coupled" and cfg.arity == 2) else "n_ary"
            predicted = variance_prediction(lam, kind)
            rel = abs(measured - predicted) / predicted
            checks.append(
                CheckResult(
                    name=f"variance_vs_prediction_{kind}",
                    passed=bool(rel < 0.10),
                    measured=measured,
                    threshold=f"within 10% of {predicted:.6g} (smoke tolerance)",
                )
            )
        if lam == 0.0 and cfg.mode == "coupled" and pooled.size >= 1000:
            fit = fit_exponential(pooled[pooled > 0])
            rate = fit.parameter("rate")
            checks.append(
                CheckResult(
                    name="exponential_steady_state_rate",
                    passed=bool(abs(rate - 1.0) < 0.05),
                    measured=rate,
                    threshold="rate within 1 +/- 0.05",
                )
            )
    return ValidationReport(checks=tuple(checks))
