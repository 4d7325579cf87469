"""Batch experiment driver.

Every command writes a report ``{"schema": "ufest/1", ...}`` as JSON or
CSV. All randomness derives from ``--seed``: stream 0 draws the fixed
unitary (``estimate``) or the Haar samples, stream 1 the shot randomness.

Exit codes: 0 success, 2 configuration error, 3 shot budget exceeded,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import __version__
from .circuit import GHadamardInstance, p_zero_formula, query_count, simulate_ghadamard
from .embed import circuit_dim, direct_sum_operator, useful_dim
from .errors import BudgetCapError, IndeterminateError, NumericalError, UfestError
from .estimator import SHOT_CAP, bias_g_average, estimate_pac, exact_inner_expectation, plan_for
from .fourier import RepQuery, complement_norm_sq, rep_epsilon
from .functions import (
    Determinant,
    IrrepEntry,
    Monomial,
    NormalizedTrace,
    UnivariatePoly,
    build_a,
    describe,
    evaluate,
    truncated_a,
)
from .haar import RngStream, mc_integrate, moment_G, sample_haar
from .irreps import IrrepLabel

SCHEMA = "ufest/1"
EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_NUMERIC = 0, 2, 3, 4
ROW_FIELDS = (
    "family", "trueValue", "estimate", "absError", "shots", "totalQueries",
    "repEpsilon", "biasG", "stderr", "runtimeMillis",
)
COMMANDS = ("estimate", "bias-scan", "rep", "verify-circuit", "moments")
FAMILIES = ("monomial", "poly", "trace", "det", "irrep")
RESIDUAL_TOL = 1e-9


class ConfigError(UfestError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def format_number(x):
    """Complex values as ``re+imi`` and reals with 17 significant digits."""
    if x is None:
        return None
    if isinstance(x, (bool, int, np.integer)):
        return int(x)
    if isinstance(x, complex) or np.iscomplexobj(x):
        x = complex(x)
        return f"{x.real:.17g}{x.imag:+.17g}i"
    return f"{float(x):.17g}"


def make_row(family, **fields) -> dict:
    row = {k: None for k in ROW_FIELDS}
    row["family"] = family
    for k, v in fields.items():
        if k not in row:
            raise KeyError(k)
        row[k] = format_number(v)
    return row


def _add_family_args(p):
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--d", type=int)
    p.add_argument("--alpha", type=int)
    p.add_argument("--coeffs", help="comma-separated coefficients a0,a1,... (Python complex syntax)")
    p.add_argument("--label", help="U(2) signature, e.g. 2,0 or 1,-1")
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--j", type=int, default=0)


def _add_common(p):
    p.add_argument("--config", help="JSON file whose kebab-case keys mirror the flags")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="report path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--timing", action="store_true", help="record runtimeMillis (breaks byte-identity)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ufest", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ufest {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("estimate", help="PAC estimate of f(g) at a Haar-random g")
    _add_family_args(p)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--shot-cap", type=int, default=SHOT_CAP)
    _add_common(p)

    p = sub.add_parser("bias-scan", help="averaged bias of degree-truncated plans")
    _add_family_args(p)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--samples", type=int, default=10_000)
    _add_common(p)

    p = sub.add_parser("rep", help="Rep_epsilon of a function family")
    _add_family_args(p)
    p.add_argument("--epsilon", type=float, required=False)
    p.add_argument("--numeric", action="store_true", help="Monte-Carlo evaluation instead of closed forms")
    p.add_argument("--samples", type=int, default=100_000)
    _add_common(p)

    p = sub.add_parser("verify-circuit", help="circuit-vs-formula and unbiasedness checks")
    p.add_argument("--d", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--dim-e", type=int, default=1)
    p.add_argument("--samples", type=int, default=50, help="random instances per (d, m)")
    _add_common(p)

    p = sub.add_parser("moments", help="Monte-Carlo check of G(alpha, d)")
    p.add_argument("--alpha", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--samples", type=int, default=100_000)
    _add_common(p)
    return parser


def _apply_config(parser, argv):
    """Merge a ``--config`` JSON file under the explicit flags."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return parser.parse_args(argv)
    try:
        with open(known.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {known.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    argv = list(argv)
    if "command" in cfg and not any(a in COMMANDS for a in argv):
        argv.insert(0, str(cfg["command"]))
    args = parser.parse_args(argv)
    explicit = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, value in cfg.items():
        if key == "command":
            continue
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigError(f"unknown config key {key!r} for command {args.command}")
        if attr not in explicit:
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            setattr(args, attr, value)
    return args


def _require(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise ConfigError(f"--{n.replace('_', '-')} is required for {args.command}")


def _parse_complex_list(text) -> tuple:
    try:
        return tuple(complex(t.strip().replace("i", "j")) for t in str(text).split(","))
    except ValueError as exc:
        raise ConfigError(f"cannot parse coefficients {text!r}") from exc


def spec_from_args(args):
    _require(args, "family")
    fam = args.family
    if fam == "irrep":
        _require(args, "label")
        try:
            l1, l2 = (int(t) for t in str(args.label).split(","))
            return IrrepEntry(IrrepLabel(l1, l2), args.i, args.j, args.d or 2)
        except ValueError as exc:
            raise ConfigError(f"bad irrep specification: {exc}") from exc
    _require(args, "d")
    if args.d < 1:
        raise ConfigError("--d must be at least 1")
    try:
        if fam == "monomial":
            _require(args, "alpha")
            return Monomial(args.alpha, args.d)
        if fam == "poly":
            _require(args, "coeffs")
            return UnivariatePoly(_parse_complex_list(args.coeffs), args.d)
        if fam == "trace":
            return NormalizedTrace(args.d)
        return Determinant(args.d)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _check_unit_interval(args, *names):
    for n in names:
        v = getattr(args, n)
        if v is None or not 0 < v < 1:
            raise ConfigError(f"--{n} must lie in (0, 1)")


def _check_samples(args, minimum=2):
    if args.samples < minimum:
        raise ConfigError(f"--samples must be at least {minimum}")


def cmd_estimate(args):
    spec = spec_from_args(args)
    _check_unit_interval(args, "epsilon", "delta")
    root = RngStream(args.seed)
    g = sample_haar(spec.d, root.spawn(0))
    plan = plan_for(build_a(spec))
    result = estimate_pac(plan, g, args.epsilon, args.delta, root.spawn(1), shot_cap=args.shot_cap)
    truth = evaluate(spec, g)
    rep = rep_epsilon(RepQuery(spec, args.epsilon))
    row = make_row(
        describe(spec), trueValue=truth, estimate=result.estimate,
        absError=abs(result.estimate - truth), shots=result.shots,
        totalQueries=result.total_queries, repEpsilon=rep,
    )
    summary = {
        "traceNorm": format_number(plan.trace_norm),
        "queriesPerShot": plan.queries_per_shot,
        "withinEpsilon": bool(abs(result.estimate - truth) <= args.epsilon),
    }
    return [row], summary


def cmd_bias_scan(args):
    spec = spec_from_args(args)
    _check_samples(args)
    if not args.epsilon > 0:
        raise ConfigError("--epsilon must be positive")
    root = RngStream(args.seed)
    rep = rep_epsilon(RepQuery(spec, args.epsilon))
    rows, closed = [], []
    for k in range(spec.degree + 1):
        form = truncated_a(spec, k)
        est = bias_g_average(plan_for(form), spec, args.samples, root.spawn(k))
        exact = complement_norm_sq(spec, k, args.samples, None, closed_form=True).mean.real
        rows.append(make_row(
            f"{describe(spec)}|degree<={k}", biasG=est.mean.real, stderr=est.stderr,
            repEpsilon=rep, totalQueries=2 * form.m,
        ))
        closed.append({"degree": k, "complementNormSq": format_number(exact)})
    return rows, {"closedForm": closed}


def cmd_rep(args):
    spec = spec_from_args(args)
    _require(args, "epsilon")
    if not args.epsilon > 0:
        raise ConfigError("--epsilon must be positive")
    query = RepQuery(spec, args.epsilon, numeric=args.numeric, samples=args.samples, seed=args.seed)
    return [make_row(describe(spec), repEpsilon=rep_epsilon(query))], {"numeric": bool(args.numeric)}


def _random_unit(gen, n):
    v = gen.standard_normal(n) + 1j * gen.standard_normal(n)
    return v / np.linalg.norm(v)


def verify_case(d: int, m: int, dim_e: int, instances: int, rng: RngStream) -> dict:
    """Residuals of the simulator against the closed formula and of the shot mean."""
    gen = rng.generator
    n_circ = circuit_dim(m, d, dim_e)
    n_use = useful_dim(m, d, dim_e)
    circuit_res = unbiased_res = 0.0
    queries_ok = True
    for _ in range(instances):
        g = sample_haar(d, rng)
        inst = GHadamardInstance(m, d, dim_e, _random_unit(gen, n_circ), _random_unit(gen, n_circ), int(gen.integers(2)))
        out = simulate_ghadamard(inst, g)
        circuit_res = max(circuit_res, abs(out.p0 - p_zero_formula(inst, g)))
        queries_ok &= out.queries == query_count(inst) == 2 * m
        phi_t, psi_t = _random_unit(gen, n_use), _random_unit(gen, n_use)
        target = np.vdot(phi_t, direct_sum_operator(g, m, dim_e) @ psi_t)
        unbiased_res = max(unbiased_res, abs(exact_inner_expectation(phi_t, psi_t, m, dim_e, g) - target))
    return {
        "d": d, "m": m, "dimE": dim_e, "instances": instances,
        "maxCircuitResidual": format_number(circuit_res),
        "maxUnbiasednessResidual": format_number(unbiased_res),
        "queriesPerInstance": 2 * m, "queryCountOk": bool(queries_ok),
        "pass": bool(queries_ok and circuit_res < RESIDUAL_TOL and unbiased_res < RESIDUAL_TOL),
        "_residual": max(circuit_res, unbiased_res),
    }


def cmd_verify_circuit(args):
    _check_samples(args, minimum=1)
    if (args.d is None) != (args.m is None):
        raise ConfigError("--d and --m must be given together")
    cases = [(args.d, args.m)] if args.d is not None else [(d, m) for d in (2, 3) for m in (1, 2)]
    root = RngStream(args.seed)
    rows, summaries = [], []
    for k, (d, m) in enumerate(cases):
        if d < 1 or m < 0 or args.dim_e < 1:
            raise ConfigError("need d >= 1, m >= 0, dim-e >= 1")
        s = verify_case(d, m, args.dim_e, args.samples, root.spawn(k))
        rows.append(make_row(f"ghadamard(d={d},m={m},dimE={args.dim_e})",
                             absError=s.pop("_residual"), totalQueries=2 * m))
        summaries.append(s)
    return rows, {"cases": summaries, "pass": all(s["pass"] for s in summaries)}


def cmd_moments(args):
    _require(args, "alpha", "d")
    _check_samples(args)
    if args.alpha < 0 or args.d < 1:
        raise ConfigError("need --alpha >= 0 and --d >= 1")
    alpha, d = args.alpha, args.d
    est = mc_integrate(lambda gs: np.abs(gs[:, 0, 0]) ** (2 * alpha), d, args.samples,
                       RngStream(args.seed).spawn(0), vectorized=True)
    exact = moment_G(alpha, d)
    row = make_row(f"moment(alpha={alpha},d={d})", trueValue=exact, estimate=est.mean.real,
                   absError=abs(est.mean.real - exact), stderr=est.stderr)
    return [row], {"withinThreeStderr": bool(abs(est.mean.real - exact) <= 3 * est.stderr)}


HANDLERS = {
    "estimate": cmd_estimate,
    "bias-scan": cmd_bias_scan,
    "rep": cmd_rep,
    "verify-circuit": cmd_verify_circuit,
    "moments": cmd_moments,
}


def _config_echo(args) -> dict:
    skip = {"config", "output", "format", "timing"}
    return {k.replace("_", "-"): v for k, v in sorted(vars(args).items()) if k not in skip}


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=ROW_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in report["rows"]:
        writer.writerow({k: "" if v is None else v for k, v in row.items()})
    return buf.getvalue()


def _error_report(kind: str, message: str) -> str:
    return json.dumps({"schema": SCHEMA, "error": {"type": kind, "message": message}}) + "\n"


def run(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _apply_config(parser, argv)
        if args.command is None:
            raise ConfigError(f"a command is required: one of {', '.join(COMMANDS)}")
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be a 64-bit unsigned integer")
        start = time.perf_counter()
        rows, summary = HANDLERS[args.command](args)
        if args.timing:
            elapsed = (time.perf_counter() - start) * 1000
            for row in rows:
                row["runtimeMillis"] = format_number(elapsed)
    except ConfigError as exc:
        sys.stderr.write(_error_report("config", str(exc)))
        return EXIT_CONFIG
    except BudgetCapError as exc:
        sys.stderr.write(_error_report("budget", str(exc)))
        return EXIT_BUDGET
    except (NumericalError, IndeterminateError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(_error_report("numerical", str(exc)))
        return EXIT_NUMERIC
    except (UfestError, ValueError) as exc:
        sys.stderr.write(_error_report("config", str(exc)))
        return EXIT_CONFIG
    report = {
        "schema": SCHEMA,
        "command": args.command,
        "config": _config_echo(args),
        "rows": rows,
        "summary": summary,
    }
    text = render(report, args.format)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify-circuit" and not summary["pass"]:
        return EXIT_NUMERIC
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
