"""Experiment configuration: strict JSON schema, defaults, round-tripping.

Configs are plain JSON with a ``schema_version`` field. Unknown keys are
rejected with the offending path so typos cannot silently fall back to
defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .errors import ConfigError
from .model import (FiniteDistribution, Identity, IndicatorThreshold, Negated,
                    PiecewiseLinear, UtilityFn)
from .strategies import PolicySpec, tree_from_dict, tree_to_dict

SCHEMA_VERSION = 1

#: Largest horizon the CLI will hand to the exact engines.
MAX_DP_HORIZON = 12

DEFAULT_PRIOR_GRID = tuple(round(i / 10, 1) for i in range(11))
DEFAULT_WEALTH_GRID = (0.0,)
DEFAULT_HORIZON_GRID = tuple(range(1, 7))
DEFAULT_TX_GRID = tuple(i * 0.25 for i in range(9))
DEFAULT_TY = 1.0
DEFAULT_SAMPLES = 100_000
DEFAULT_SEED = 0
DEFAULT_ENUMERATION_CAP = 10**6
DEFAULT_N_MAX = 6


@dataclass(frozen=True)
class ExperimentConfig:
    """Normalized, validated experiment parameters (scalars become 1-grids)."""

    schema_version: int = SCHEMA_VERSION
    f1: Optional[FiniteDistribution] = None
    f2: Optional[FiniteDistribution] = None
    prior_grid: tuple[float, ...] = DEFAULT_PRIOR_GRID
    horizon_grid: tuple[int, ...] = DEFAULT_HORIZON_GRID
    wealth_grid: tuple[float, ...] = DEFAULT_WEALTH_GRID
    utility: UtilityFn = field(default_factory=Identity)
    u_grid: Optional[tuple[float, ...]] = None
    tx_grid: tuple[float, ...] = DEFAULT_TX_GRID
    ty: float = DEFAULT_TY
    alpha: Optional[float] = None
    beta: Optional[float] = None
    n_max: int = DEFAULT_N_MAX
    policy: Optional[PolicySpec] = None
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    output_path: Optional[str] = None
    output_format: str = "csv"


def _require(data: Any, path: str, kind: type, what: str) -> Any:
    if not isinstance(data, kind):
        raise ConfigError(path, f"expected {what}")
    return data


def _check_keys(data: dict, path: str, allowed: set[str]) -> None:
    for key in data:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}" if path else key, "unknown key")


def _float_list(data: Any, path: str) -> tuple[float, ...]:
    _require(data, path, list, "a list of numbers")
    out = []
    for i, v in enumerate(data):
        _require(v, f"{path}[{i}]", (int, float), "a number")
        out.append(float(v))
    return tuple(out)


def distribution_from_dict(data: Any, path: str) -> FiniteDistribution:
    _require(data, path, dict, "an object with 'values' and 'probs'")
    _check_keys(data, path, {"values", "probs"})
    if "values" not in data or "probs" not in data:
        raise ConfigError(path, "both 'values' and 'probs' are required")
    values = _float_list(data["values"], f"{path}.values")
    probs = _float_list(data["probs"], f"{path}.probs")
    if len(values) != len(probs):
        raise ConfigError(path, "'values' and 'probs' must have equal length")
    try:
        return FiniteDistribution(tuple(zip(values, probs)))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def distribution_to_dict(dist: FiniteDistribution) -> dict:
    return {"values": list(dist.values), "probs": list(dist.probs)}


def utility_from_dict(data: Any, path: str = "utility") -> UtilityFn:
    _require(data, path, dict, "a utility object with a 'kind'")
    kind = data.get("kind")
    if kind == "identity":
        _check_keys(data, path, {"kind"})
        return Identity()
    if kind == "indicator":
        _check_keys(data, path, {"kind", "threshold"})
        if "threshold" not in data:
            raise ConfigError(f"{path}.threshold", "required for indicator")
        t = _require(data["threshold"], f"{path}.threshold", (int, float), "a number")
        return IndicatorThreshold(float(t))
    if kind == "piecewise":
        _check_keys(data, path, {"kind", "breakpoints"})
        pts = _require(data.get("breakpoints"), f"{path}.breakpoints",
                       list, "a list of [x, value] pairs")
        pairs = []
        for i, pt in enumerate(pts):
            _require(pt, f"{path}.breakpoints[{i}]", list, "an [x, value] pair")
            if len(pt) != 2:
                raise ConfigError(f"{path}.breakpoints[{i}]", "expected two numbers")
            pairs.append((float(pt[0]), float(pt[1])))
        try:
            return PiecewiseLinear(tuple(pairs))
        except ValueError as exc:
            raise ConfigError(f"{path}.breakpoints", str(exc)) from None
    if kind == "negated":
        _check_keys(data, path, {"kind", "inner"})
        if "inner" not in data:
            raise ConfigError(f"{path}.inner", "required for negated")
        return Negated(utility_from_dict(data["inner"], f"{path}.inner"))
    raise ConfigError(f"{path}.kind",
                      "expected one of identity, indicator, piecewise, negated")


def utility_to_dict(utility: UtilityFn) -> dict:
    if isinstance(utility, Identity):
        return {"kind": "identity"}
    if isinstance(utility, IndicatorThreshold):
        return {"kind": "indicator", "threshold": utility.threshold}
    if isinstance(utility, PiecewiseLinear):
        return {"kind": "piecewise",
                "breakpoints": [[x, y] for x, y in utility.breakpoints]}
    if isinstance(utility, Negated):
        return {"kind": "negated", "inner": utility_to_dict(utility.inner)}
    raise TypeError(f"not a utility: {utility!r}")


_POLICY_NAMES = {"myopic": PolicySpec.myopic, "l-first": PolicySpec.l_first,
                 "r-first": PolicySpec.r_first, "u-swap": PolicySpec.u_swap,
                 "v-swap": PolicySpec.v_swap}


def policy_from_value(data: Any, path: str = "policy") -> PolicySpec:
    if isinstance(data, str):
        if data in _POLICY_NAMES:
            return _POLICY_NAMES[data]()
        raise ConfigError(path, f"unknown policy {data!r}; expected one of "
                          f"{sorted(_POLICY_NAMES)} or an object with 'tree'")
    _require(data, path, dict, "a policy name or an object with 'tree'")
    _check_keys(data, path, {"tree"})
    if "tree" not in data:
        raise ConfigError(f"{path}.tree", "required for explicit policies")
    try:
        return PolicySpec.explicit(tree_from_dict(data["tree"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"{path}.tree", f"malformed tree: {exc}") from None


def policy_to_value(policy: PolicySpec) -> Any:
    if policy.tree is not None:
        return {"tree": tree_to_dict(policy.tree)}
    return policy.kind.value


_TOP_KEYS = {"schema_version", "instance", "utility", "horizon", "horizon_grid",
             "wealth", "wealth_grid", "u_grid", "tx_grid", "ty", "alpha",
             "beta", "n_max", "policy", "samples", "seed", "enumeration_cap",
             "output"}


def config_from_dict(data: dict) -> ExperimentConfig:
    _require(data, "$", dict, "a JSON object")
    _check_keys(data, "", _TOP_KEYS)
    if "schema_version" not in data:
        raise ConfigError("schema_version", "required")
    version = _require(data["schema_version"], "schema_version", int, "an integer")
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {version}")

    kwargs: dict[str, Any] = {"schema_version": version}

    if "instance" in data:
        inst = _require(data["instance"], "instance", dict, "an object")
        _check_keys(inst, "instance", {"f1", "f2", "prior", "prior_grid"})
        if "f1" in inst:
            kwargs["f1"] = distribution_from_dict(inst["f1"], "instance.f1")
        if "f2" in inst:
            kwargs["f2"] = distribution_from_dict(inst["f2"], "instance.f2")
        if "prior" in inst and "prior_grid" in inst:
            raise ConfigError("instance.prior", "give either prior or prior_grid")
        if "prior" in inst:
            p = _require(inst["prior"], "instance.prior", (int, float), "a number")
            kwargs["prior_grid"] = (float(p),)
        elif "prior_grid" in inst:
            kwargs["prior_grid"] = _float_list(inst["prior_grid"],
                                               "instance.prior_grid")
        for xi in kwargs.get("prior_grid", ()):
            if not 0.0 <= xi <= 1.0:
                raise ConfigError("instance.prior_grid",
                                  f"prior {xi} outside [0, 1]")

    if "utility" in data:
        kwargs["utility"] = utility_from_dict(data["utility"])

    if "horizon" in data and "horizon_grid" in data:
        raise ConfigError("horizon", "give either horizon or horizon_grid")
    if "horizon" in data:
        n = _require(data["horizon"], "horizon", int, "an integer")
        kwargs["horizon_grid"] = (n,)
    elif "horizon_grid" in data:
        grid = _require(data["horizon_grid"], "horizon_grid", list, "a list")
        kwargs["horizon_grid"] = tuple(
            _require(n, f"horizon_grid[{i}]", int, "an integer")
            for i, n in enumerate(grid))
    for n in kwargs.get("horizon_grid", ()):
        if not 1 <= n <= MAX_DP_HORIZON:
            raise ConfigError("horizon_grid",
                              f"horizon {n} outside [1, {MAX_DP_HORIZON}]")

    if "wealth" in data and "wealth_grid" in data:
        raise ConfigError("wealth", "give either wealth or wealth_grid")
    if "wealth" in data:
        x = _require(data["wealth"], "wealth", (int, float), "a number")
        kwargs["wealth_grid"] = (float(x),)
    elif "wealth_grid" in data:
        kwargs["wealth_grid"] = _float_list(data["wealth_grid"], "wealth_grid")

    if "u_grid" in data:
        kwargs["u_grid"] = _float_list(data["u_grid"], "u_grid")
    if "tx_grid" in data:
        kwargs["tx_grid"] = _float_list(data["tx_grid"], "tx_grid")
        if any(t < 0 for t in kwargs["tx_grid"]):
            raise ConfigError("tx_grid", "weights must be nonnegative")
    if "ty" in data:
        kwargs["ty"] = float(_require(data["ty"], "ty", (int, float), "a number"))
        if kwargs["ty"] < 0:
            raise ConfigError("ty", "weights must be nonnegative")
    for name in ("alpha", "beta"):
        if name in data:
            kwargs[name] = float(_require(data[name], name, (int, float),
                                          "a number"))
    if "n_max" in data:
        n_max = _require(data["n_max"], "n_max", int, "an integer")
        if not 1 <= n_max <= MAX_DP_HORIZON:
            raise ConfigError("n_max", f"outside [1, {MAX_DP_HORIZON}]")
        kwargs["n_max"] = n_max
    if "policy" in data:
        kwargs["policy"] = policy_from_value(data["policy"])
    if "samples" in data:
        samples = _require(data["samples"], "samples", int, "an integer")
        if samples < 1:
            raise ConfigError("samples", "must be at least 1")
        kwargs["samples"] = samples
    if "seed" in data:
        seed = _require(data["seed"], "seed", int, "an integer")
        if not 0 <= seed < 2**64:
            raise ConfigError("seed", "must fit an unsigned 64-bit integer")
        kwargs["seed"] = seed
    if "enumeration_cap" in data:
        cap = _require(data["enumeration_cap"], "enumeration_cap", int,
                       "an integer")
        if cap < 2:
            raise ConfigError("enumeration_cap", "must be at least 2")
        kwargs["enumeration_cap"] = cap
    if "output" in data:
        out = _require(data["output"], "output", dict, "an object")
        _check_keys(out, "output", {"path", "format"})
        if "path" in out:
            kwargs["output_path"] = _require(out["path"], "output.path", str,
                                             "a string")
        if "format" in out:
            fmt = _require(out["format"], "output.format", str, "a string")
            if fmt not in ("csv", "json", "both"):
                raise ConfigError("output.format",
                                  "expected csv, json, or both")
            kwargs["output_format"] = fmt

    return ExperimentConfig(**kwargs)


def config_to_dict(config: ExperimentConfig) -> dict:
    """Serialize so that ``config_from_dict`` reproduces the config exactly."""
    data: dict[str, Any] = {"schema_version": config.schema_version}
    instance: dict[str, Any] = {}
    if config.f1 is not None:
        instance["f1"] = distribution_to_dict(config.f1)
    if config.f2 is not None:
        instance["f2"] = distribution_to_dict(config.f2)
    instance["prior_grid"] = list(config.prior_grid)
    data["instance"] = instance
    data["utility"] = utility_to_dict(config.utility)
    data["horizon_grid"] = list(config.horizon_grid)
    data["wealth_grid"] = list(config.wealth_grid)
    if config.u_grid is not None:
        data["u_grid"] = list(config.u_grid)
    data["tx_grid"] = list(config.tx_grid)
    data["ty"] = config.ty
    if config.alpha is not None:
        data["alpha"] = config.alpha
    if config.beta is not None:
        data["beta"] = config.beta
    data["n_max"] = config.n_max
    if config.policy is not None:
        data["policy"] = policy_to_value(config.policy)
    data["samples"] = config.samples
    data["seed"] = config.seed
    data["enumeration_cap"] = config.enumeration_cap
    if config.output_path is not None or config.output_format != "csv":
        out: dict[str, Any] = {}
        if config.output_path is not None:
            out["path"] = config.output_path
        out["format"] = config.output_format
        data["output"] = out
    return data
