"""Configuration-driven command-line front end.

Each subcommand loads a JSON config (``--config``), applies flag
overrides, dispatches to the engine or analysis modules, prints a summary
table, and optionally writes CSV/JSON reports. Exit status: 0 on success,
2 when a verdict fails (a violation was found where none was expected),
1 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Optional, Sequence

from . import analysis, config as cfg, montecarlo
from .dp import ValueQuery, evaluate_policy, optimal_value
from .errors import BanditError, ConfigError
from .model import BanditInstance
from .strategies import PolicyKind, PolicySpec

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERDICT_FAILED = 2


# ---------------------------------------------------------------------------
# Report emission.

def _format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def emit_report(rows: list[dict], fieldnames: Sequence[str], fmt: str,
                base_path: str, allow_empty: bool = False) -> list[str]:
    """Write the report files and return their paths.

    CSV carries the documented header with 17-significant-digit floats;
    JSON is an array of row objects. Identical inputs produce byte
    identical files.
    """
    if not rows and not allow_empty:
        raise BanditError("refusing to write an empty report")
    written = []
    if fmt in ("csv", "both"):
        path = base_path + ".csv"
        lines = [",".join(fieldnames)]
        lines += [",".join(_format_cell(row[f]) for f in fieldnames)
                  for row in rows]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        written.append(path)
    if fmt in ("json", "both"):
        path = base_path + ".json"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(rows, indent=2) + "\n")
        written.append(path)
    return written


def _print_table(rows: list[dict], fieldnames: Sequence[str],
                 limit: int = 12) -> None:
    def disp(value: Any) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return format(value, ".6g")
        return str(value)

    shown = rows[:limit]
    table = [[disp(r[f]) for f in fieldnames] for r in shown]
    widths = [max(len(f), *(len(t[i]) for t in table)) if table else len(f)
              for i, f in enumerate(fieldnames)]
    print("  ".join(f.ljust(w) for f, w in zip(fieldnames, widths)))
    for t in table:
        print("  ".join(c.ljust(w) for c, w in zip(t, widths)))
    if len(rows) > limit:
        print(f"... ({len(rows) - limit} more rows)")


# ---------------------------------------------------------------------------
# Config assembly.

def _compact_utility(text: str) -> dict:
    if text.startswith("{"):
        return json.loads(text)
    if text == "identity":
        return {"kind": "identity"}
    if text == "negated-identity":
        return {"kind": "negated", "inner": {"kind": "identity"}}
    if text.startswith("indicator:"):
        return {"kind": "indicator", "threshold": float(text.split(":", 1)[1])}
    raise ConfigError("utility", f"unknown utility shorthand {text!r}")


def _load_config(args: argparse.Namespace) -> cfg.ExperimentConfig:
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}")
    else:
        data = {"schema_version": cfg.SCHEMA_VERSION}
    if not isinstance(data, dict):
        raise ConfigError("$", "config must be a JSON object")

    def instance_section() -> dict:
        return data.setdefault("instance", {})

    if getattr(args, "alpha", None) is not None:
        data["alpha"] = args.alpha
    if getattr(args, "beta", None) is not None:
        data["beta"] = args.beta
    if getattr(args, "prior", None) is not None:
        instance_section().pop("prior_grid", None)
        instance_section()["prior"] = args.prior
    if getattr(args, "horizon", None) is not None:
        data.pop("horizon_grid", None)
        data["horizon"] = args.horizon
    if getattr(args, "wealth", None) is not None:
        data.pop("wealth_grid", None)
        data["wealth"] = args.wealth
    if getattr(args, "utility", None) is not None:
        data["utility"] = _compact_utility(args.utility)
    if getattr(args, "policy", None) is not None:
        data["policy"] = args.policy
    if getattr(args, "nmax", None) is not None:
        data["n_max"] = args.nmax
    if getattr(args, "samples", None) is not None:
        data["samples"] = args.samples
    if getattr(args, "seed", None) is not None:
        data["seed"] = args.seed
    if getattr(args, "ty", None) is not None:
        data["ty"] = args.ty

    conf = cfg.config_from_dict(data)
    if args.output is not None:
        conf = cfg.ExperimentConfig(**{**conf.__dict__, "output_path": args.output})
    if args.format is not None:
        conf = cfg.ExperimentConfig(**{**conf.__dict__, "output_format": args.format})
    return conf


def _require_instance(conf: cfg.ExperimentConfig) -> None:
    if conf.f1 is None or conf.f2 is None:
        raise ConfigError("instance", "both f1 and f2 are required")


def _single(conf_values: tuple, name: str):
    if len(conf_values) != 1:
        raise ConfigError(name, "exactly one value is required for this command")
    return conf_values[0]


def _policy_label(policy: PolicySpec) -> str:
    return policy.kind.value


# ---------------------------------------------------------------------------
# Command handlers. Each returns (rows, fieldnames, exit_code, summary).

def _cmd_value(conf: cfg.ExperimentConfig):
    _require_instance(conf)
    rows = []
    for xi in conf.prior_grid:
        for n in conf.horizon_grid:
            for x in conf.wealth_grid:
                query = ValueQuery(BanditInstance(conf.f1, conf.f2, xi),
                                   conf.utility, n, x)
                result = optimal_value(query)
                rows.append({"xi0": xi, "n": n, "x": x,
                             "v_optimal": result.value,
                             "first_arm": result.first_arm.value})
    return rows, ["xi0", "n", "x", "v_optimal", "first_arm"], EXIT_OK, \
        f"{len(rows)} optimal values computed"


def _cmd_evaluate(conf: cfg.ExperimentConfig):
    _require_instance(conf)
    if conf.policy is None:
        raise ConfigError("policy", "required for evaluate")
    rows = []
    for xi in conf.prior_grid:
        for n in conf.horizon_grid:
            for x in conf.wealth_grid:
                query = ValueQuery(BanditInstance(conf.f1, conf.f2, xi),
                                   conf.utility, n, x)
                rows.append({"xi0": xi, "n": n, "x": x,
                             "policy": _policy_label(conf.policy),
                             "w": evaluate_policy(query, conf.policy)})
    return rows, ["xi0", "n", "x", "policy", "w"], EXIT_OK, \
        f"{len(rows)} policy values computed"


def _cmd_verify_myopic(conf: cfg.ExperimentConfig):
    _require_instance(conf)
    rows = []
    worst = float("inf")
    for xi in conf.prior_grid:
        for n in conf.horizon_grid:
            for x in conf.wealth_grid:
                query = ValueQuery(BanditInstance(conf.f1, conf.f2, xi),
                                   conf.utility, n, x)
                w_myopic = evaluate_policy(query, PolicySpec.myopic())
                v = optimal_value(query).value
                gap = w_myopic - v
                worst = min(worst, gap)
                rows.append({"xi0": xi, "n": n, "x": x, "w_myopic": w_myopic,
                             "v_optimal": v, "gap": gap,
                             "passed": gap >= -analysis.GAP_TOL})
    ok = worst >= -analysis.GAP_TOL
    summary = (f"{len(rows)} cells, worst gap {worst:.3e}: "
               + ("all within tolerance" if ok else "MYOPIC SUBOPTIMAL"))
    return rows, ["xi0", "n", "x", "w_myopic", "v_optimal", "gap", "passed"], \
        EXIT_OK if ok else EXIT_VERDICT_FAILED, summary


def _cmd_check_condition(conf: cfg.ExperimentConfig):
    _require_instance(conf)
    u_grid = conf.u_grid
    if u_grid is None:
        u_grid = tuple(analysis.reachable_wealths(
            conf.f1, conf.f2, conf.wealth_grid, max(conf.horizon_grid)))
    verdict = analysis.check_condition_I(conf.f1, conf.f2, conf.utility, u_grid)
    rows = [{"u": u,
             "slack": analysis.condition_slack(conf.f1, conf.f2, conf.utility, u),
             "passed": analysis.condition_slack(conf.f1, conf.f2, conf.utility,
                                                u) >= -analysis.IDENTITY_TOL}
            for u in u_grid]
    if verdict.passed:
        summary = f"condition holds on {len(u_grid)} wealths, margin {verdict.margin:.3e}"
        code = EXIT_OK
    else:
        summary = (f"condition FAILS: margin {verdict.margin:.3e} "
                   f"at witness u={verdict.witness['u']}")
        code = EXIT_VERDICT_FAILED
    return rows, ["u", "slack", "passed"], code, summary


def _cmd_delta(conf: cfg.ExperimentConfig):
    _require_instance(conf)
    rows = []
    for n in conf.horizon_grid:
        for x in conf.wealth_grid:
            for xi in conf.prior_grid:
                d = analysis.delta_direct(BanditInstance(conf.f1, conf.f2, xi),
                                          conf.utility, n, x)
                rows.append({"xi0": xi, "n": n, "x": x, "delta": d})
    return rows, ["xi0", "n", "x", "delta"], EXIT_OK, \
        f"{len(rows)} first-pull differences computed"


def _cmd_d_scan(conf: cfg.ExperimentConfig):
    _require_instance(conf)
    rows = []
    worst = float("inf")
    all_passed = True
    for n in conf.horizon_grid:
        for x in conf.wealth_grid:
            verdict = analysis.d_monotonicity_scan(
                conf.f1, conf.f2, conf.utility, n, x, conf.tx_grid, conf.ty)
            worst = min(worst, verdict.margin)
            all_passed &= verdict.passed
            for t in conf.tx_grid:
                rows.append({"n": n, "x": x, "tX": t, "tY": conf.ty,
                             "d": analysis.weighted_delta(
                                 conf.f1, conf.f2, conf.utility, n, x, t,
                                 conf.ty)})
    summary = (f"weight-pair scan margin {worst:.3e}: "
               + ("monotone" if all_passed else "MONOTONICITY VIOLATED"))
    return rows, ["n", "x", "tX", "tY", "d"], \
        EXIT_OK if all_passed else EXIT_VERDICT_FAILED, summary


def _cmd_search_counterexample(conf: cfg.ExperimentConfig):
    _require_instance(conf)
    witness = analysis.search_counterexample(
        conf.f1, conf.f2, conf.utility, conf.n_max, conf.prior_grid,
        conf.wealth_grid)
    fieldnames = ["xi0", "n", "x", "gap"]
    if witness is None:
        return [], fieldnames, EXIT_OK, "no counterexample on the grid"
    return [witness], fieldnames, EXIT_VERDICT_FAILED, (
        f"counterexample at xi0={witness['xi0']}, n={witness['n']}, "
        f"x={witness['x']} (gap {witness['gap']:.3e})")


def _cmd_conjecture(conf: cfg.ExperimentConfig):
    if conf.alpha is None or conf.beta is None:
        raise ConfigError("alpha", "alpha and beta are required for conjecture")
    rows = []
    worst = float("inf")
    for xi, n, k, gap in analysis.conjecture_cells(
            conf.alpha, conf.beta, conf.prior_grid, conf.n_max):
        worst = min(worst, gap)
        rows.append({"xi0": xi, "n": n, "k": k, "gap": gap,
                     "passed": gap >= -analysis.GAP_TOL})
    ok = worst >= -analysis.GAP_TOL
    summary = (f"{len(rows)} cells up to n={conf.n_max}, worst gap "
               f"{worst:.3e}: " + ("conjecture confirmed on grid" if ok
                                   else "VIOLATION FOUND"))
    return rows, ["xi0", "n", "k", "gap", "passed"], \
        EXIT_OK if ok else EXIT_VERDICT_FAILED, summary


def _cmd_simulate(conf: cfg.ExperimentConfig):
    _require_instance(conf)
    if conf.policy is None:
        raise ConfigError("policy", "required for simulate")
    xi = _single(conf.prior_grid, "instance.prior")
    n = _single(conf.horizon_grid, "horizon")
    x = _single(conf.wealth_grid, "wealth")
    query = ValueQuery(BanditInstance(conf.f1, conf.f2, xi), conf.utility, n, x)
    sim_config = montecarlo.SimConfig(conf.samples, conf.seed)
    result = montecarlo.simulate_policy(query, conf.policy, sim_config)
    rows = [{"xi0": xi, "n": n, "x": x, "policy": _policy_label(conf.policy),
             "mean": result.mean, "std_error": result.std_error,
             "samples": result.samples, "seed": conf.seed,
             "generator": montecarlo.GENERATOR_ID}]
    fieldnames = ["xi0", "n", "x", "policy", "mean", "std_error", "samples",
                  "seed", "generator"]
    return rows, fieldnames, EXIT_OK, (
        f"mean {result.mean:.6g} (std error {result.std_error:.3g}, "
        f"{result.samples} samples, seed {conf.seed})")


_COMMANDS = {
    "value": _cmd_value,
    "evaluate": _cmd_evaluate,
    "verify-myopic": _cmd_verify_myopic,
    "check-condition": _cmd_check_condition,
    "delta": _cmd_delta,
    "d-scan": _cmd_d_scan,
    "search-counterexample": _cmd_search_counterexample,
    "conjecture": _cmd_conjecture,
    "simulate": _cmd_simulate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twoarm",
        description="Exact values and myopic-optimality verdicts for "
                    "mirrored two-armed bandits.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON experiment config")
        sp.add_argument("--output", help="report base path (extension added)")
        sp.add_argument("--format", choices=("csv", "json", "both"))
        sp.add_argument("--utility",
                        help="identity | indicator:K | negated-identity | JSON")
        sp.add_argument("--prior", type=float)
        sp.add_argument("--horizon", type=int)
        sp.add_argument("--wealth", type=float)
        if name in ("evaluate", "simulate"):
            sp.add_argument("--policy",
                            choices=("myopic", "l-first", "r-first", "u-swap",
                                     "v-swap"))
        if name in ("search-counterexample", "conjecture"):
            sp.add_argument("--nmax", type=int)
        if name == "conjecture":
            sp.add_argument("--alpha", type=float)
            sp.add_argument("--beta", type=float)
        if name == "simulate":
            sp.add_argument("--samples", type=int)
            sp.add_argument("--seed", type=int)
        if name == "d-scan":
            sp.add_argument("--ty", type=float)
    return parser


def _worker_cap() -> int:
    """Upper bound on workers from BANDIT_THREADS; execution is sequential,
    which satisfies any positive cap."""
    raw = os.environ.get("BANDIT_THREADS")
    if raw is None:
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError("BANDIT_THREADS", f"not an integer: {raw!r}")
    if cap < 1:
        raise ConfigError("BANDIT_THREADS", "must be at least 1")
    return cap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    try:
        _worker_cap()
        conf = _load_config(args)
        rows, fieldnames, code, summary = _COMMANDS[args.command](conf)
        if conf.output_path is not None:
            written = emit_report(rows, fieldnames, conf.output_format,
                                  conf.output_path, allow_empty=True)
            for path in written:
                print(f"wrote {path}")
        if rows:
            _print_table(rows, fieldnames)
        print(summary)
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BanditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main(sys.argv[1:]))
