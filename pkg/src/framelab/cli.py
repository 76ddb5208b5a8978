"""Command-line surface: config-driven checks with JSON reports.

One logical command per process.  Configs are JSON, reports are JSON, plot
data is CSV; identical config + seed gives byte-identical reports up to the
timestamp field.  Exit codes: 0 pass/consistent, 1 inconsistency, 2 usage
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import jsonschema
import numpy as np

from .domain import Domain, SampledFunction, dilate, load_domain, make_grid
from .errors import (
    ConfigError,
    ExprError,
    FrameLabError,
    GridMismatchError,
    HypothesisError,
    ReconstructionError,
)
from .expr import ExprMultiplier, parse_multiplier
from .framecore import exponential_system, measure_bounds, write_spectrum_csv
from .multiplication import (
    check_bessel_multiplication,
    check_converse,
    check_frame_multiplication,
    check_frame_sequence_multiplication,
    check_riesz_multiplication,
    check_tight_multiplication,
    multiply_system,
    refine_check,
)
from .pointset import (
    beurling_1d_frame_predicate,
    beurling_ball_frame_predicate,
    beurling_density,
    densify,
    gap_details,
    load_pointset,
    separation,
    write_density_csv,
)
from .translates import (
    BumpSpec,
    Generator,
    UnionPart,
    UnionSpec,
    build_bump_generator,
    classify_translates,
    load_generator_csv,
    obstruction_trend,
    oversampled_expansion,
    save_generator_csv,
    union_check,
    union_sweep,
)

__all__ = ["RunConfig", "parse_config", "parse_multiplier", "run", "main"]

COMMANDS = (
    "density",
    "gap",
    "frame-bounds",
    "mult-check",
    "translate-check",
    "build-generator",
    "reconstruct",
    "union-check",
    "corollary-demo",
)

_CHECK_KINDS = ("frame", "tight", "riesz", "bessel", "frame_sequence", "converse")

_MULTIPLIER_INPUT = {
    "type": "object",
    "additionalProperties": False,
    "minProperties": 1,
    "maxProperties": 1,
    "properties": {"expr": {"type": "string"}, "csv": {"type": "string"}},
}

_GENERATOR_INPUT = {
    "type": "object",
    "additionalProperties": False,
    "minProperties": 1,
    "maxProperties": 1,
    "properties": {
        "expr": {"type": "string"},
        "csv": {"type": "string"},
        "bump": {"type": "string"},
    },
}

_INPUT_SCHEMAS = {
    "density": {
        "type": "object",
        "additionalProperties": False,
        "required": ["pointset"],
        "properties": {
            "pointset": {"type": "string"},
            "r_values": {
                "type": "array",
                "items": {"type": "number", "exclusiveMinimum": 0},
                "minItems": 1,
            },
            "a": {"type": "number", "exclusiveMinimum": 0},
            "r": {"type": "number", "exclusiveMinimum": 0},
            "r_ball": {"type": "number", "exclusiveMinimum": 0},
        },
    },
    "gap": {
        "type": "object",
        "additionalProperties": False,
        "required": ["pointset"],
        "properties": {"pointset": {"type": "string"}},
    },
    "frame-bounds": {
        "type": "object",
        "additionalProperties": False,
        "required": ["domain", "pointset"],
        "properties": {
            "domain": {"type": "string"},
            "pointset": {"type": "string"},
        },
    },
    "mult-check": {
        "type": "object",
        "additionalProperties": False,
        "required": ["domain", "pointset", "multiplier"],
        "properties": {
            "domain": {"type": "string"},
            "pointset": {"type": "string"},
            "multiplier": _MULTIPLIER_INPUT,
            "check": {"enum": list(_CHECK_KINDS)},
            "sweep": {"type": "boolean"},
        },
    },
    "translate-check": {
        "type": "object",
        "additionalProperties": False,
        "required": ["domain", "pointset", "generator"],
        "properties": {
            "domain": {"type": "string"},
            "pointset": {"type": "string"},
            "generator": _GENERATOR_INPUT,
            "sweep": {"type": "boolean"},
        },
    },
    "build-generator": {
        "type": "object",
        "additionalProperties": False,
        "required": ["bump", "csv_out"],
        "properties": {
            "bump": {"type": "string"},
            "csv_out": {"type": "string"},
        },
    },
    "reconstruct": {
        "type": "object",
        "additionalProperties": False,
        "required": ["band", "delta", "pointset"],
        "properties": {
            "band": {"type": "string"},
            "delta": {"type": "number", "exclusiveMinimum": 0},
            "pointset": {"type": "string"},
            "densify": {
                "type": "object",
                "additionalProperties": False,
                "required": ["target_gap", "sep_min"],
                "properties": {
                    "target_gap": {"type": "number", "exclusiveMinimum": 0},
                    "sep_min": {"type": "number", "exclusiveMinimum": 0},
                },
            },
            "n_targets": {"type": "integer", "minimum": 1},
            "target_csv": {"type": "string"},
            "residual_tol": {"type": "number", "exclusiveMinimum": 0},
        },
    },
    "union-check": {
        "type": "object",
        "additionalProperties": False,
        "required": ["parts", "pointset"],
        "properties": {
            "pointset": {"type": "string"},
            "sweep": {"type": "boolean"},
            "parts": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["intervals", "expr"],
                    "properties": {
                        "intervals": {
                            "type": "array",
                            "minItems": 1,
                            "items": {
                                "type": "array",
                                "items": {"type": "number"},
                                "minItems": 2,
                                "maxItems": 2,
                            },
                        },
                        "expr": {"type": "string"},
                        "label": {"type": "string"},
                    },
                },
            },
        },
    },
    "corollary-demo": {
        "type": "object",
        "additionalProperties": False,
        "required": ["domain"],
        "properties": {
            "domain": {"type": "string"},
            "hat_expr": {"type": "string"},
        },
    },
}

_CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["command"],
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "inputs": {"type": "object"},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_per_unit": {"type": "integer", "minimum": 1},
                "refine": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 1},
                    "minItems": 2,
                },
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rank_tol": {"type": "number", "exclusiveMinimum": 0},
                "recon_tol": {"type": "number", "exclusiveMinimum": 0},
                "max_iter": {"type": "integer", "minimum": 1},
            },
        },
        "seed": {"type": "integer", "minimum": 0},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "report": {"type": "string"},
                "format": {"enum": ["json", "csv"]},
            },
        },
    },
}


@dataclass
class RunConfig:
    """Validated run description; flag overrides are applied after parsing."""

    command: str
    inputs: dict = field(default_factory=dict)
    n_per_unit: int = 128
    refine: tuple = (64, 128, 256)
    rank_tol: float = 1e-8
    recon_tol: float = 1e-10
    max_iter: int = 2000
    seed: int = 0
    report_path: str | None = None
    format: str = "json"

    def __post_init__(self):
        self.refine = tuple(int(v) for v in self.refine)
        if any(b <= a for a, b in zip(self.refine, self.refine[1:])):
            raise ConfigError("grid/refine: refinement list must be strictly increasing")


def _validate(instance, schema, prefix: str = "") -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(instance), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "/".join(str(p) for p in err.absolute_path)
        loc = "/".join(p for p in (prefix, path) if p) or "<root>"
        raise ConfigError(f"{loc}: {err.message}")


def parse_config(path) -> RunConfig:
    """Load and validate a JSON run config; unknown keys are rejected."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    _validate(raw, _CONFIG_SCHEMA)
    command = raw["command"]
    inputs = raw.get("inputs", {})
    _validate(inputs, _INPUT_SCHEMAS[command], prefix="inputs")
    grid = raw.get("grid", {})
    tol = raw.get("tolerances", {})
    out = raw.get("output", {})
    return RunConfig(
        command=command,
        inputs=inputs,
        n_per_unit=grid.get("n_per_unit", 128),
        refine=tuple(grid.get("refine", (64, 128, 256))),
        rank_tol=tol.get("rank_tol", 1e-8),
        recon_tol=tol.get("recon_tol", 1e-10),
        max_iter=tol.get("max_iter", 2000),
        seed=raw.get("seed", 0),
        report_path=out.get("report"),
        format=out.get("format", "json"),
    )


def _jsonable(obj):
    """Recursively coerce report values into strict-JSON types."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    return obj


def _atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".framelab-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_rows(path: str, header, rows) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".framelab-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _executor_for_env():
    raw = os.environ.get("FRAMELAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n > 1:
        return ThreadPoolExecutor(max_workers=n)
    return None


def _load_profile(grid, spec: dict):
    """Multiplier input {expr}|{csv} -> (SampledFunction, resample_fn|None)."""
    if "expr" in spec:
        mult = parse_multiplier(spec["expr"])
        return mult.sample(grid), mult
    gen = load_generator_csv(spec["csv"], grid, label="phi")
    return gen.hat, None


def _load_generator(grid, spec: dict, n_per_unit: int):
    """Generator input {expr}|{csv}|{bump} -> (Generator, hat_fn|None).

    A bump spec overrides the grid: the generator lives on its dilated band.
    """
    if "expr" in spec:
        mult = parse_multiplier(spec["expr"])
        return Generator(mult.sample(grid), label="expr"), mult
    if "csv" in spec:
        return load_generator_csv(spec["csv"], grid), None
    with open(spec["bump"], "r", encoding="utf-8") as fh:
        bump = BumpSpec.from_dict(json.load(fh))
    bump_grid = make_grid(bump.dilated, n_per_unit)
    return build_bump_generator(bump, bump_grid), None


# ---------------------------------------------------------------------------
# command handlers: each returns (results dict, passed, plot (header, rows)|None)


def _cmd_density(cfg: RunConfig):
    ps = load_pointset(cfg.inputs["pointset"])
    if "r_values" in cfg.inputs:
        r_values = list(cfg.inputs["r_values"])
    else:
        r_star = min(hi - lo for lo, hi in ps.box) / 2.0
        r_values = [r_star / 4.0, r_star / 2.0, r_star]
    report = beurling_density(ps, r_values)
    results = {"density": report.to_dict(), "separation": separation(ps)}
    if ("a" in cfg.inputs) != ("r" in cfg.inputs):
        raise ConfigError("inputs: the interval predicate needs both 'a' and 'r'")
    if "a" in cfg.inputs:
        pred = beurling_1d_frame_predicate(ps, cfg.inputs["a"], cfg.inputs["r"])
        results["interval_predicate"] = {
            "predicted_frame": pred.predicted_frame,
            "margin": pred.margin,
            "density_lower": pred.density_lower,
            "a": pred.a,
            "r": pred.r,
        }
    if "r_ball" in cfg.inputs:
        pred = beurling_ball_frame_predicate(ps, cfg.inputs["r_ball"])
        results["ball_predicate"] = {
            "predicted_frame": pred.predicted_frame,
            "product": pred.product,
            "gap": pred.gap,
            "r_ball": pred.r_ball,
        }
    rows = list(
        zip(
            report.r_values,
            report.nu_minus,
            report.nu_plus,
            report.d_minus,
            report.d_plus,
        )
    )
    return results, True, (["r", "nu_minus", "nu_plus", "d_minus", "d_plus"], rows)


def _cmd_gap(cfg: RunConfig):
    ps = load_pointset(cfg.inputs["pointset"])
    details = gap_details(ps)
    results = {"separation": separation(ps), "gap": details}
    rows = [[details["value"], separation(ps)]]
    return results, True, (["gap", "separation"], rows)


def _cmd_frame_bounds(cfg: RunConfig):
    dom = load_domain(cfg.inputs["domain"])
    ps = load_pointset(cfg.inputs["pointset"])
    grid = make_grid(dom, cfg.n_per_unit)
    report = measure_bounds(exponential_system(grid, ps), cfg.rank_tol)
    rows = [[i, float(v)] for i, v in enumerate(report.spectrum)]
    return {"report": report.to_dict()}, True, (["index", "eigenvalue"], rows)


_SINGLE_CHECKS = {
    "frame": check_frame_multiplication,
    "tight": check_tight_multiplication,
    "riesz": check_riesz_multiplication,
    "bessel": check_bessel_multiplication,
    "frame_sequence": check_frame_sequence_multiplication,
}


def _cmd_mult_check(cfg: RunConfig):
    dom = load_domain(cfg.inputs["domain"])
    ps = load_pointset(cfg.inputs["pointset"])
    check = cfg.inputs.get("check", "frame")
    grid = make_grid(dom, cfg.n_per_unit)
    phi, phi_fn = _load_profile(grid, cfg.inputs["multiplier"])
    sweep = cfg.inputs.get("sweep", phi_fn is not None)
    if sweep and phi_fn is None:
        raise ConfigError("inputs/multiplier: a CSV multiplier cannot be resampled for a sweep")
    base = exponential_system(grid, ps)
    if check == "converse":
        report = check_converse(multiply_system(base, phi), phi, cfg.rank_tol)
        return {"check": report.to_dict()}, report.consistent, None
    if sweep:
        executor = _executor_for_env()
        try:
            sweep_report = refine_check(
                dom,
                lambda g: exponential_system(g, ps),
                phi_fn,
                check=check,
                levels=cfg.refine,
                rank_tol=cfg.rank_tol,
                executor=executor,
            )
        finally:
            if executor is not None:
                executor.shutdown()
        rows = [
            [lv, m] for lv, m in zip(sweep_report.levels, sweep_report.metric_trend)
        ]
        return (
            {"sweep": sweep_report.to_dict()},
            sweep_report.consistent,
            (["level", "metric"], rows),
        )
    report = _SINGLE_CHECKS[check](base, phi, rank_tol=cfg.rank_tol)
    return {"check": report.to_dict()}, report.consistent, None


def _cmd_translate_check(cfg: RunConfig):
    dom = load_domain(cfg.inputs["domain"])
    ps = load_pointset(cfg.inputs["pointset"])
    grid = make_grid(dom, cfg.n_per_unit)
    gen, hat_fn = _load_generator(grid, cfg.inputs["generator"], cfg.n_per_unit)
    sweep = cfg.inputs.get("sweep", False)
    report = classify_translates(gen, ps, rank_tol=cfg.rank_tol)
    results = {"classification": report.to_dict()}
    passed = report.consistent
    plot = None
    if sweep:
        if hat_fn is None:
            raise ConfigError("inputs/generator: only expression generators support sweeps")
        executor = _executor_for_env()
        try:
            sweep_report = refine_check(
                dom,
                lambda g: exponential_system(g, ps),
                hat_fn,
                check="frame",
                levels=cfg.refine,
                rank_tol=cfg.rank_tol,
                executor=executor,
            )
        finally:
            if executor is not None:
                executor.shutdown()
        results["sweep"] = sweep_report.to_dict()
        passed = sweep_report.consistent
        plot = (
            ["level", "metric"],
            [[lv, m] for lv, m in zip(sweep_report.levels, sweep_report.metric_trend)],
        )
    return results, passed, plot


def _cmd_build_generator(cfg: RunConfig):
    with open(cfg.inputs["bump"], "r", encoding="utf-8") as fh:
        spec = BumpSpec.from_dict(json.load(fh))
    grid = make_grid(spec.dilated, cfg.n_per_unit)
    gen = build_bump_generator(spec, grid)
    save_generator_csv(gen, cfg.inputs["csv_out"])
    on_base = spec.base_domain.contains(grid.nodes)
    results = {
        "bump": spec.to_dict(),
        "nodes": grid.size,
        "base_nodes": int(on_base.sum()),
        "max_dev_on_base": float(np.abs(gen.hat.values[on_base] - 1.0).max()),
        "csv_out": cfg.inputs["csv_out"],
    }
    rows = [
        [float(w), float(v.real), float(v.imag)]
        for w, v in zip(grid.nodes, gen.hat.values)
    ]
    return results, True, (["omega", "re", "im"], rows)


def _cmd_reconstruct(cfg: RunConfig):
    band = load_domain(cfg.inputs["band"])
    delta = cfg.inputs["delta"]
    ps = load_pointset(cfg.inputs["pointset"])
    if "densify" in cfg.inputs:
        d = cfg.inputs["densify"]
        ps = densify(ps, d["target_gap"], d["sep_min"])
    spec = BumpSpec(band, delta)
    grid = make_grid(spec.dilated, cfg.n_per_unit)
    gen = build_bump_generator(spec, grid)
    inside = band.contains(grid.nodes)

    targets = []
    if "target_csv" in cfg.inputs:
        targets.append(load_generator_csv(cfg.inputs["target_csv"], grid, label="f").hat)
    else:
        rng = np.random.default_rng(cfg.seed)
        for _ in range(cfg.inputs.get("n_targets", 1)):
            vals = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
            targets.append(SampledFunction(grid, vals * inside))

    tol = cfg.inputs.get("residual_tol", 1e-8)
    runs, first = [], None
    for f_hat in targets:
        res = oversampled_expansion(
            f_hat, gen, ps, band, tol=cfg.recon_tol, max_iter=cfg.max_iter,
            rank_tol=cfg.rank_tol,
        )
        if first is None:
            first = (f_hat, res)
        runs.append(
            {
                "cg_residual": res.cg_residual,
                "product_residual": res.product_residual,
                "vanish_outside": res.vanish_outside,
                "coeff_norm_sq": res.coeff_norm_sq,
                "coeff_bound": res.coeff_bound,
                "coeff_bound_ok": res.coeff_bound_ok,
            }
        )
    passed = all(
        r["product_residual"] <= tol and r["vanish_outside"] <= tol and r["coeff_bound_ok"]
        for r in runs
    )
    f_hat, res = first
    recon = (exponential_system(grid, ps).matrix @ res.alphas) * gen.hat.values
    results = {
        "n_points": ps.size,
        "grid_nodes": grid.size,
        "exp_lower": res.exp_report.lower,
        "exp_upper": res.exp_report.upper,
        "residual_tol": tol,
        "targets": runs,
        "expansion": res.to_records(),
    }
    rows = [
        [float(w), float(t.real), float(t.imag), float(v.real), float(v.imag)]
        for w, t, v in zip(grid.nodes, f_hat.values, recon)
    ]
    return results, passed, (["omega", "re_target", "im_target", "re_recon", "im_recon"], rows)


def _cmd_union_check(cfg: RunConfig):
    ps = load_pointset(cfg.inputs["pointset"])
    parts = tuple(
        UnionPart(
            Domain(p["intervals"]),
            parse_multiplier(p["expr"]),
            label=p.get("label", str(j)),
        )
        for j, p in enumerate(cfg.inputs["parts"])
    )
    spec = UnionSpec(parts, ps)
    if cfg.inputs.get("sweep", False):
        report = union_sweep(spec, levels=cfg.refine, rank_tol=cfg.rank_tol)
        rows = [
            [lv, p, lo]
            for lv, p, lo in zip(report.levels, report.p_hats, report.lowers)
        ]
        return {"sweep": report.to_dict()}, report.consistent, (["level", "p_hat", "lower"], rows)
    report = union_check(spec, cfg.n_per_unit, cfg.rank_tol)
    rows = [[report.p_hat, report.P_hat, report.total_report.lower, report.total_report.upper]]
    return (
        {"union": report.to_dict()},
        report.consistent,
        (["p_hat", "P_hat", "lower", "upper"], rows),
    )


def _cmd_corollary_demo(cfg: RunConfig):
    dom = load_domain(cfg.inputs["domain"])
    if len(dom.intervals) != 1:
        raise ConfigError("inputs/domain: the demo needs a single-interval band")
    (a, b) = dom.intervals[0]
    center, length = (a + b) / 2.0, b - a
    hat_src = cfg.inputs.get(
        "hat_expr", f"1 - abs(2 * (t - {center!r}) / {length!r})"
    )
    hat = parse_multiplier(hat_src)
    control = parse_multiplier("1")
    hat_report = obstruction_trend(dom, hat, levels=cfg.refine, rank_tol=cfg.rank_tol)
    control_report = obstruction_trend(dom, control, levels=cfg.refine, rank_tol=cfg.rank_tol)
    passed = (
        hat_report.consistent
        and control_report.consistent
        and not control_report.measured_obstruction
    )
    results = {
        "hat_expr": hat.source,
        "hat": hat_report.to_dict(),
        "control": control_report.to_dict(),
    }
    rows = [
        [lv, h, c]
        for lv, h, c in zip(
            hat_report.levels, hat_report.lower_bounds, control_report.lower_bounds
        )
    ]
    return results, passed, (["level", "hat_lower", "control_lower"], rows)


_HANDLERS = {
    "density": _cmd_density,
    "gap": _cmd_gap,
    "frame-bounds": _cmd_frame_bounds,
    "mult-check": _cmd_mult_check,
    "translate-check": _cmd_translate_check,
    "build-generator": _cmd_build_generator,
    "reconstruct": _cmd_reconstruct,
    "union-check": _cmd_union_check,
    "corollary-demo": _cmd_corollary_demo,
}


def run(cfg: RunConfig) -> int:
    """Dispatch one command, write its report, and return the exit code."""
    try:
        results, passed, plot = _HANDLERS[cfg.command](cfg)
    except (ConfigError, ExprError, GridMismatchError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FrameLabError, ReconstructionError, HypothesisError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3

    report = {
        "command": cfg.command,
        "inputs": cfg.inputs,
        "grid": {"n_per_unit": cfg.n_per_unit, "refine": list(cfg.refine)},
        "tolerances": {
            "rank_tol": cfg.rank_tol,
            "recon_tol": cfg.recon_tol,
            "max_iter": cfg.max_iter,
        },
        "seed": cfg.seed,
        "results": results,
        "passed": bool(passed),
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True, allow_nan=False) + "\n"
    try:
        if cfg.report_path:
            _atomic_write_text(cfg.report_path, text)
            if cfg.format == "csv" and plot is not None:
                base, _ = os.path.splitext(cfg.report_path)
                _atomic_write_rows(base + ".csv", plot[0], plot[1])
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return 2
    return 0 if passed else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="framelab",
        description="Frame-theory workbench: density, frame bounds, multiplier "
        "and translate checks on sampled frequency bands.",
    )
    parser.add_argument("--config", required=True, help="JSON run config")
    parser.add_argument("--out", help="report path (overrides config output.report)")
    parser.add_argument("--format", choices=["json", "csv"], help="report format override")
    parser.add_argument("--seed", type=int, help="seed override")
    parser.add_argument("--refine", help="comma-separated refinement levels, e.g. 64,128,256")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = parse_config(args.config)
        if args.out is not None:
            cfg.report_path = args.out
        if args.format is not None:
            cfg.format = args.format
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be nonnegative")
            cfg.seed = args.seed
        if args.refine is not None:
            try:
                levels = tuple(int(v) for v in args.refine.split(","))
            except ValueError:
                raise ConfigError("--refine expects comma-separated integers")
            cfg = RunConfig(**{**cfg.__dict__, "refine": levels})
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
