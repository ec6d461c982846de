"""Command-line front end.

Every command resolves its full configuration into a run manifest that is
embedded in each report, so a report is enough to reproduce the run: exact
modes are bit-identical, Monte Carlo modes are identical given the seed.

Exit codes: 0 pass, 1 property failure (with witness), 2 usage or
validation error, 3 resource budget exceeded.
"""

from __future__ import annotations

import csv
import datetime
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import __version__
from . import coupling as coupling_mod
from . import engine, kernels, montecarlo, trapsim
from .errors import PascalwalkError, ResourceBudgetError, ValidationError
from .perturb import (InsertionPath, load_insertion_path, parse_phi_spec)
from .pmf import parse_pmf_spec, validate_class

EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _manifest(ctx, command, config):
    return {
        "command": command,
        "config": _jsonable(config),
        "seed": ctx.obj.get("seed"),
        "artifact_version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "output_dir": str(ctx.obj["out"]) if ctx.obj.get("out") else None,
    }


def _emit(ctx, name, report, rows=None, header=None):
    """Write the report (JSON or CSV) to stdout and, if set, the output dir."""
    fmt = ctx.obj.get("format", "json")
    if fmt == "csv" and rows is not None:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(header)
        writer.writerows(_jsonable(list(r)) for r in rows)
        text = buf.getvalue()
    else:
        text = json.dumps(_jsonable(report), indent=2)
    click.echo(text)
    out = ctx.obj.get("out")
    if out:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        suffix = "csv" if fmt == "csv" and rows is not None else "json"
        (out / f"{name}.{suffix}").write_text(text + "\n")
        if rows is not None and suffix == "json":
            buf = io.StringIO()
            writer = csv.writer(buf)
            writer.writerow(header)
            writer.writerows(_jsonable(list(r)) for r in rows)
            (out / f"{name}.csv").write_text(buf.getvalue())


def _run(fn):
    """Translate package errors into the documented exit codes."""
    try:
        return fn()
    except (ValidationError, click.UsageError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    except ResourceBudgetError as exc:
        click.echo(f"resource budget exceeded: {exc}", err=True)
        sys.exit(EXIT_BUDGET)
    except PascalwalkError as exc:
        click.echo(f"failure: {exc}", err=True)
        sys.exit(EXIT_FAIL)


@click.group()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--threads", type=int, default=1, show_default=True,
              help="Worker cap; results do not depend on it.")
@click.option("--exact/--float", "exact", default=True,
              help="Arithmetic regime for the DP engines.")
@click.option("--out", type=click.Path(), default=None,
              help="Directory for report files.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
              default="json", show_default=True)
@click.pass_context
def main(ctx, seed, threads, exact, out, fmt):
    """Verification suite for perturbed-walk range monotonicity."""
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, threads=threads, mode="exact" if exact else "float",
                   out=out, format=fmt)


def _load_phi(ctx, pmf, phi, phi_file):
    if phi_file:
        from .perturb import load_trajectory

        return load_trajectory(phi_file)
    if not phi:
        raise ValidationError("need --phi or --phi-file")
    return parse_phi_spec(phi, pmf.dim)


def _load_f(pmf, f_spec, f_file, horizon):
    if f_file:
        return load_insertion_path(f_file)
    if f_spec == "zero" or f_spec is None:
        return InsertionPath.zero(pmf.dim, horizon)
    raise ValidationError(f"unknown insertion path spec {f_spec!r}")


@main.group()
def verify():
    """Exact verification suites."""


@verify.command("pascal")
@click.option("--pmf", "pmf_spec", required=True)
@click.option("--phi", default=None)
@click.option("--phi-file", default=None)
@click.option("--horizon", type=int, required=True)
@click.option("--allow-unproved", is_flag=True)
@click.pass_context
def verify_pascal_cmd(ctx, pmf_spec, phi, phi_file, horizon, allow_unproved):
    def body():
        pmf = parse_pmf_spec(pmf_spec)
        traj = _load_phi(ctx, pmf, phi, phi_file)
        report = engine.verify_pascal(
            pmf, traj, horizon, ctx.obj["mode"], allow_unproved=allow_unproved
        )
        rows = [
            (n, report.series_perturbed.values[n], report.series_origin.values[n],
             m, "PASS" if m >= 0 else "FAIL")
            for n, m in enumerate(report.margins)
        ]
        payload = {
            "manifest": _manifest(ctx, "verify pascal",
                                  {"pmf": pmf_spec, "phi": phi or phi_file,
                                   "horizon": horizon, "mode": ctx.obj["mode"]}),
            "passed": report.passed,
            "unproved_regime": report.unproved_regime,
            "margins": list(report.margins),
            "witness": None if report.passed else
                       int(min(range(len(report.margins)),
                               key=lambda i: report.margins[i])),
        }
        _emit(ctx, "pascal", payload, rows,
              ("n", "Wtilde_phi", "Wtilde_0", "margin", "verdict"))
        if not report.passed:
            sys.exit(EXIT_FAIL)

    _run(body)


@verify.command("domination")
@click.option("--pmf", "pmf_spec", required=True)
@click.option("--phi", default=None)
@click.option("--phi-file", default=None)
@click.option("--horizon", type=int, required=True)
@click.pass_context
def verify_domination_cmd(ctx, pmf_spec, phi, phi_file, horizon):
    def body():
        pmf = parse_pmf_spec(pmf_spec)
        traj = _load_phi(ctx, pmf, phi, phi_file)
        from .perturb import TrapTrajectory

        run_p = engine.evolve_survival(pmf, traj, horizon, ctx.obj["mode"])
        run_0 = engine.evolve_survival(pmf, TrapTrajectory.zero(pmf.dim), horizon,
                                       ctx.obj["mode"])
        rows = []
        passed = True
        worst = None
        for n in range(horizon + 1):
            rep = engine.check_sym_domination(run_p.fields[n], run_0.fields[n])
            passed &= rep.passed
            rows.append((n, rep.min_slack, rep.witness[0], rep.witness[1],
                         "PASS" if rep.passed else "FAIL"))
            if worst is None or rep.min_slack < worst[1]:
                worst = (n, rep.min_slack, rep.witness)
        payload = {
            "manifest": _manifest(ctx, "verify domination",
                                  {"pmf": pmf_spec, "phi": phi or phi_file,
                                   "horizon": horizon}),
            "passed": passed,
            "worst": {"n": worst[0], "slack": worst[1],
                      "k": worst[2][0], "x0": worst[2][1]},
        }
        _emit(ctx, "domination", payload, rows,
              ("n", "min_slack", "k", "x0", "verdict"))
        if not passed:
            sys.exit(EXIT_FAIL)

    _run(body)


@verify.command("decomposition")
@click.option("--pmf", "pmf_spec", required=True)
@click.option("--phi", default=None)
@click.option("--phi-file", default=None)
@click.option("--horizon", type=int, required=True)
@click.pass_context
def verify_decomposition_cmd(ctx, pmf_spec, phi, phi_file, horizon):
    def body():
        pmf = parse_pmf_spec(pmf_spec)
        traj = _load_phi(ctx, pmf, phi, phi_file)
        report = engine.verify_decomposition(pmf, traj, horizon)
        rows = [(n, r, "PASS" if r == 0 else "FAIL")
                for n, r in enumerate(report.residuals)]
        payload = {
            "manifest": _manifest(ctx, "verify decomposition",
                                  {"pmf": pmf_spec, "phi": phi or phi_file,
                                   "horizon": horizon}),
            "passed": report.passed,
            "residuals": list(report.residuals),
        }
        _emit(ctx, "decomposition", payload, rows, ("n", "residual", "verdict"))
        if not report.passed:
            sys.exit(EXIT_FAIL)

    _run(body)


@verify.command("w-recursion")
@click.option("--pmf", "pmf_spec", required=True)
@click.option("--phi", default=None)
@click.option("--phi-file", default=None)
@click.option("--horizon", type=int, required=True)
@click.option("--allow-unproved", is_flag=True)
@click.pass_context
def verify_w_recursion_cmd(ctx, pmf_spec, phi, phi_file, horizon, allow_unproved):
    def body():
        pmf = parse_pmf_spec(pmf_spec)
        traj = _load_phi(ctx, pmf, phi, phi_file)
        report = engine.verify_w_recursion(pmf, traj, horizon,
                                           allow_unproved=allow_unproved)
        rows = [(n, s, "PASS" if s >= 0 else "FAIL")
                for n, s in enumerate(report.slacks)]
        payload = {
            "manifest": _manifest(ctx, "verify w-recursion",
                                  {"pmf": pmf_spec, "phi": phi or phi_file,
                                   "horizon": horizon}),
            "passed": report.passed,
            "unproved_regime": report.unproved_regime,
            "slacks": list(report.slacks),
        }
        _emit(ctx, "w_recursion", payload, rows, ("n", "slack", "verdict"))
        if not report.passed:
            sys.exit(EXIT_FAIL)

    _run(body)


@verify.command("conditions")
@click.option("--pmf", "pmf_spec", required=True)
@click.option("--horizon", type=int, default=16, show_default=True)
@click.option("--mode", "which", type=click.Choice(["mono", "moreau"]),
              default="mono", show_default=True)
@click.pass_context
def verify_conditions_cmd(ctx, pmf_spec, horizon, which):
    def body():
        pmf = parse_pmf_spec(pmf_spec)
        check = (kernels.check_mono_conditions if which == "mono"
                 else kernels.check_moreau_conditions)
        arithmetic = "exact" if ctx.obj["mode"] == "exact" else "float"
        report = check(pmf, horizon, mode=arithmetic)
        payload = {
            "manifest": _manifest(ctx, "verify conditions",
                                  {"pmf": pmf_spec, "horizon": horizon,
                                   "which": which, "mode": report.mode}),
            "passed": report.holds,
            "min_slack": report.min_slack,
            "witness": {"condition": report.witness[0], "n": report.witness[1],
                        "x": report.witness[2]},
            "failures": [
                {"condition": c, "n": n, "x": x} for c, n, x in report.failures
            ],
        }
        _emit(ctx, "conditions", payload)
        if not report.holds:
            sys.exit(EXIT_FAIL)

    _run(body)


@verify.command("pnxodd")
@click.option("--dim", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--radius", type=int, default=None)
@click.pass_context
def verify_pnxodd_cmd(ctx, dim, n, radius):
    def body():
        report = coupling_mod.verify_pnxodd_exact(dim, n, radius or n)
        payload = {
            "manifest": _manifest(ctx, "verify pnxodd",
                                  {"dim": dim, "n": n, "radius": radius or n}),
            "passed": report.passed,
            "checked_sites": report.checked_sites,
            "worst_site": report.worst_site,
            "min_slack": report.min_slack,
        }
        _emit(ctx, "pnxodd", payload)
        if not report.passed:
            sys.exit(EXIT_FAIL)

    _run(body)


@main.group("range")
def range_group():
    """Expected-range computations."""


@range_group.command("exact")
@click.option("--pmf", "pmf_spec", required=True)
@click.option("--f-file", default=None)
@click.option("--n", "horizon", type=int, required=True)
@click.pass_context
def range_exact_cmd(ctx, pmf_spec, f_file, horizon):
    def body():
        pmf = parse_pmf_spec(pmf_spec)
        path = _load_f(pmf, None, f_file, horizon)
        value = engine.range_via_hits(pmf, path, horizon)
        baseline = engine.range_via_hits(
            pmf, InsertionPath.zero(pmf.dim, horizon), horizon
        )
        payload = {
            "manifest": _manifest(ctx, "range exact",
                                  {"pmf": pmf_spec, "f": f_file, "n": horizon}),
            "expected_range": value,
            "expected_range_unperturbed": baseline,
            "margin": value - baseline,
        }
        _emit(ctx, "range_exact", payload)

    _run(body)


@range_group.command("mc")
@click.option("--pmf", "pmf_spec", required=True)
@click.option("--f-file", default=None)
@click.option("--n", "horizon", type=int, required=True)
@click.option("--reps", type=int, default=10000, show_default=True)
@click.pass_context
def range_mc_cmd(ctx, pmf_spec, f_file, horizon, reps):
    def body():
        pmf = parse_pmf_spec(pmf_spec)
        path = _load_f(pmf, None, f_file, horizon)
        est = montecarlo.mc_range(pmf, path, horizon, reps, ctx.obj["seed"])
        payload = {
            "manifest": _manifest(ctx, "range mc",
                                  {"pmf": pmf_spec, "f": f_file, "n": horizon,
                                   "reps": reps}),
            "mean": est.mean,
            "stderr": est.stderr,
            "reps": est.reps,
        }
        _emit(ctx, "range_mc", payload,
              [(est.mean, est.stderr, est.reps)], ("mean", "stderr", "reps"))

    _run(body)


@range_group.command("enumerate")
@click.option("--pmf", "pmf_spec", required=True)
@click.option("--f-file", default=None)
@click.option("--n", "horizon", type=int, required=True)
@click.pass_context
def range_enumerate_cmd(ctx, pmf_spec, f_file, horizon):
    def body():
        pmf = parse_pmf_spec(pmf_spec)
        path = _load_f(pmf, None, f_file, horizon)
        value = montecarlo.enumerate_range(pmf, path, horizon)
        payload = {
            "manifest": _manifest(ctx, "range enumerate",
                                  {"pmf": pmf_spec, "f": f_file, "n": horizon}),
            "expected_range": value,
        }
        _emit(ctx, "range_enumerate", payload)

    _run(body)


def _load_trap_config(ctx, config_path, overrides):
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    data = {}
    if config_path:
        with open(config_path, "rb") as fh:
            data = tomllib.load(fh)
    data.update({k: v for k, v in overrides.items() if v is not None})
    dim = int(data.get("dim", 1))
    pmf = parse_pmf_spec(data.get("pmf", f"srw:{dim}"))
    holding_kind = data.get("holding", "exponential")
    if holding_kind == "exponential":
        holding = trapsim.HoldingLaw.exponential(float(data.get("rate", 1.0)))
    elif holding_kind == "pareto":
        holding = trapsim.HoldingLaw.pareto(float(data.get("shape", 1.0)),
                                            float(data.get("scale", 1.0)))
    elif holding_kind == "deterministic":
        holding = trapsim.HoldingLaw.deterministic(float(data.get("period", 1.0)))
    else:
        raise ValidationError(f"unknown holding law {holding_kind!r}")
    particle_spec = data.get("particle", "static")
    if particle_spec == "static":
        particle = trapsim.ParticleTrajectory.static(dim)
    elif str(particle_spec).startswith("zigzag:"):
        particle = trapsim.zigzag_particle(
            dim, float(data.get("horizon", 1.0)),
            float(str(particle_spec).split(":", 1)[1])
        )
    else:
        particle = trapsim.load_particle(str(particle_spec))
    return trapsim.TrapSimConfig(
        dim=dim,
        window=int(data.get("window", trapsim.recommended_window(
            dim, pmf, holding, float(data.get("horizon", 1.0)), particle))),
        pmf=pmf,
        holding=holding,
        horizon=float(data.get("horizon", 1.0)),
        particle=particle,
        reps=int(data.get("reps", 1000)),
        seed=int(data.get("seed", ctx.obj["seed"])),
        intensity=float(data.get("intensity", 1.0)),
    ), data


@main.group("trap")
def trap_group():
    """Continuous-time trap-field simulation."""


@trap_group.command("simulate")
@click.option("--config", "config_path", default=None)
@click.option("--horizon", type=float, default=None)
@click.option("--window", type=int, default=None)
@click.option("--reps", type=int, default=None)
@click.pass_context
def trap_simulate_cmd(ctx, config_path, horizon, window, reps):
    def body():
        config, raw = _load_trap_config(
            ctx, config_path,
            {"horizon": horizon, "window": window, "reps": reps},
        )
        result = trapsim.simulate_trap_field(config)
        margin = result.moving.estimate - result.origin.estimate
        combined = (result.moving.stderr ** 2 + result.origin.stderr ** 2) ** 0.5
        payload = {
            "manifest": _manifest(ctx, "trap simulate", raw),
            "estimate": result.moving.estimate,
            "stderr": result.moving.stderr,
            "estimate_origin": result.origin.estimate,
            "stderr_origin": result.origin.stderr,
            "reps": result.moving.reps,
            "method": result.moving.method,
            "pascal_margin": margin,
            "pascal_verdict": "CONSISTENT" if margin <= 3 * combined else "VIOLATED",
            "truncation_events": result.truncation_events,
            "tie_events": result.tie_events,
            "window_warning": result.window_warning,
        }
        _emit(ctx, "trap_simulate", payload)

    _run(body)


@trap_group.command("identity")
@click.option("--config", "config_path", default=None)
@click.option("--horizon", type=float, default=None)
@click.option("--window", type=int, default=None)
@click.option("--reps", type=int, default=None)
@click.pass_context
def trap_identity_cmd(ctx, config_path, horizon, window, reps):
    def body():
        config, raw = _load_trap_config(
            ctx, config_path,
            {"horizon": horizon, "window": window, "reps": reps},
        )
        result = trapsim.survival_via_identity(config)
        payload = {
            "manifest": _manifest(ctx, "trap identity", raw),
            "estimate": result.moving.estimate,
            "stderr": result.moving.stderr,
            "estimate_origin": result.origin.estimate,
            "stderr_origin": result.origin.stderr,
            "hit_sum": result.hit_sum_moving,
            "hit_sum_origin": result.hit_sum_origin,
            "method": result.moving.method,
            "window_warning": result.window_warning,
        }
        _emit(ctx, "trap_identity", payload)

    _run(body)


@main.group("coupling")
def coupling_group():
    """Coupled-walk verification."""


@coupling_group.command("run")
@click.option("--x", "x_spec", required=True, help="Comma-separated start point.")
@click.option("--n", type=int, required=True)
@click.option("--reps", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.pass_context
def coupling_run_cmd(ctx, x_spec, n, reps, seed):
    def body():
        x = tuple(int(c) for c in x_spec.split(","))
        report = coupling_mod.run_coupling(x, n, reps, seed if seed is not None
                                           else ctx.obj["seed"])
        payload = {
            "manifest": _manifest(ctx, "coupling run",
                                  {"x": list(x), "n": n, "reps": reps,
                                   "seed": seed if seed is not None
                                   else ctx.obj["seed"]}),
            "freq_driven_at_zero": report.freq_driven_at_zero,
            "freq_shadow_at_zero": report.freq_shadow_at_zero,
            "stderr_driven": report.stderr_driven,
            "stderr_shadow": report.stderr_shadow,
            "implication_violations": report.implication_violations,
            "shadow_step_frequencies": {
                f"{c}{'+' if s > 0 else '-'}": f
                for (c, s), f in report.shadow_step_frequencies.items()
            },
        }
        _emit(ctx, "coupling_run", payload)

    _run(body)


@coupling_group.command("oracle")
@click.option("--x", "x_spec", required=True)
@click.option("--n", type=int, required=True)
@click.pass_context
def coupling_oracle_cmd(ctx, x_spec, n):
    def body():
        x = tuple(int(c) for c in x_spec.split(","))
        report = coupling_mod.exhaustive_coupling_oracle(x, n)
        passed = report.implication_holds and report.shadow_law_uniform
        payload = {
            "manifest": _manifest(ctx, "coupling oracle", {"x": list(x), "n": n}),
            "paths": report.paths,
            "implication_holds": report.implication_holds,
            "shadow_law_uniform": report.shadow_law_uniform,
            "passed": passed,
        }
        _emit(ctx, "coupling_oracle", payload)
        if not passed:
            sys.exit(EXIT_FAIL)

    _run(body)


@main.command("counterexample")
@click.option("--n", "horizon", type=int, default=10000, show_default=True)
@click.option("--reps", type=int, default=1000, show_default=True)
@click.pass_context
def counterexample_cmd(ctx, horizon, reps):
    def body():
        report = montecarlo.counterexample_ratio(horizon, reps, ctx.obj["seed"])
        payload = {
            "manifest": _manifest(ctx, "counterexample",
                                  {"n": horizon, "reps": reps}),
            "mean_ratio": report.mean_ratio,
            "stderr": report.stderr,
            "all_visited_sites_even": report.all_visited_sites_even,
        }
        _emit(ctx, "counterexample", payload)
        if not report.all_visited_sites_even:
            sys.exit(EXIT_FAIL)

    _run(body)


if __name__ == "__main__":
    main()
