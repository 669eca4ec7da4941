"""Command-line front end.

Subcommands
-----------
* ``moments``    -- emit the moment table of a model
* ``kernel``     -- kernel value (and optionally the full jet) at points
* ``curvature``  -- metric/curvature report at points along (X, Y)
* ``minints``    -- minimum-integral report at points along (X, Y)
* ``verify``     -- run a named verification suite; exit 1 on failure
* ``bounds``     -- squeezing-number curvature intervals, single or grid
* ``trend``      -- level trends (normalised canonical value, Ricci)

A JSON config file (``--config``) may carry any long-option value under its
flag name with dashes replaced by underscores; explicit flags win over the
file.  Identical configurations (including ``--seed``) produce
byte-identical reports apart from the ``generated_at`` timestamp.  The
``BERGMAN_LAB_MAX_N`` environment variable caps every truncation degree.

Exit codes: 0 success, 1 verification failure, 2 bad configuration,
3 computation error.
"""
from __future__ import annotations

import argparse
import inspect
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .ball_oracle import ball_constant, squeezing_bounds
from .core import DomainSpec, ModelConfig, PointVec, WeightSpec
from .errors import BergmanLabError, ConfigError
from .kernel_engine import (
    ENV_MAX_DEGREE,
    _env_degree_cap,
    build_model,
    curvature_bisectional,
    kernel_jet,
    ricci,
)
from .min_integrals import min_integrals
from .moments import build_moment_table
from .report import csv_report, json_report, write_text
from .verify import SUITES, run_suite


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved run: one command plus everything it needs."""

    command: str
    model: ModelConfig | None
    pointvecs: tuple[PointVec, ...]
    seed: int
    output: str
    output_path: str | None
    options: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _add_io_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON file with default option values")
    sub.add_argument("--out", help="output path (default: stdout)")
    sub.add_argument("--format", choices=("json", "csv"), dest="fmt",
                     help="output format (default json)")
    sub.add_argument("--seed", type=int, help="64-bit sampling seed (default 0)")


def _add_model_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--model", choices=("ball", "polydisc", "ellipsoid"))
    sub.add_argument("--n", type=int, help="complex dimension")
    sub.add_argument("--m", type=int, help="weight level (default 1)")
    sub.add_argument("--r", type=float, help="ball radius (default 1)")
    sub.add_argument("--radii", help="comma list of per-axis radii")
    sub.add_argument("--exponents", help="comma list of ellipsoid exponents")
    sub.add_argument("--weight", choices=("auto", "unweighted", "ke", "power"))
    sub.add_argument("--power-exponent", type=float, dest="power_exponent")
    sub.add_argument("--N", type=int, dest="truncation",
                     help="starting truncation degree")
    sub.add_argument("--max-N", type=int, dest="max_truncation",
                     help="escalation cap for the truncation degree")
    sub.add_argument("--tol", type=float, help="relative stabilisation tolerance")


def _add_point_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--point", action="append",
                     help="comma list of complex coordinates; repeatable")
    sub.add_argument("--X", action="append", help="direction vector; repeatable")
    sub.add_argument("--Y", action="append", help="direction vector; repeatable")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bergman-lab",
        description="Weighted Bergman kernels, curvatures, minimum integrals "
                    "and their verification suites on Reinhardt domains.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("moments", help="emit the moment table")
    _add_model_flags(p)
    _add_io_flags(p)

    p = subs.add_parser("kernel", help="kernel values at points")
    _add_model_flags(p)
    _add_point_flags(p)
    _add_io_flags(p)
    p.add_argument("--full-jets", action="store_true", dest="full_jets",
                   help="include every jet entry, not just K")

    p = subs.add_parser("curvature", help="curvature reports at points")
    _add_model_flags(p)
    _add_point_flags(p)
    _add_io_flags(p)

    p = subs.add_parser("minints", help="minimum-integral reports at points")
    _add_model_flags(p)
    _add_point_flags(p)
    _add_io_flags(p)

    p = subs.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--cases", type=int)
    _add_model_flags(p)
    _add_io_flags(p)
    p.add_argument("--suite-option", action="append", dest="suite_options",
                   metavar="KEY=VALUE",
                   help="extra keyword for the suite function; repeatable")

    p = subs.add_parser("bounds", help="squeezing curvature intervals")
    p.add_argument("--s", help="squeezing lower bound(s), comma list")
    p.add_argument("--m", help="weight level(s), comma list")
    p.add_argument("--n", help="dimension(s), comma list")
    p.add_argument("--cos2", type=float, help="measured squared metric angle")
    p.add_argument("--B", type=float, dest="measured_B",
                   help="measured bisectional (or holomorphic) curvature")
    p.add_argument("--variant", choices=("bisectional", "holomorphic"))
    _add_io_flags(p)

    p = subs.add_parser("trend", help="level trends")
    p.add_argument("--quantity", choices=("Jtilde", "Cm", "ricci"))
    p.add_argument("--n", type=int)
    p.add_argument("--m-max", type=int, dest="m_max")
    p.add_argument("--m-min", type=int, dest="m_min")
    p.add_argument("--r", type=float)
    _add_io_flags(p)

    return parser


def _merge_config_file(args: argparse.Namespace) -> dict:
    """File values fill options the command line left unset."""
    merged = dict(vars(args))
    path = merged.get("config")
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a single JSON object")
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if merged.get(key) is None:
                merged[key] = value
    return merged


def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x != ""]


def _ints(text: str) -> list[int]:
    return [int(x) for x in str(text).split(",") if x != ""]


def _complex_vector(text: str) -> tuple[complex, ...]:
    try:
        return tuple(complex(part.strip().replace(" ", ""))
                     for part in str(text).split(","))
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex vector {text!r}") from exc


def _resolve_model(opts: dict) -> ModelConfig:
    kind = opts.get("model") or "ball"
    n = opts.get("n") or 1
    m = opts.get("m") or 1
    if kind == "ball":
        domain = DomainSpec.ball(n, opts.get("r") or 1.0)
    elif kind == "polydisc":
        radii = _floats(opts["radii"]) if opts.get("radii") else [1.0] * n
        domain = DomainSpec.polydisc(radii)
    else:
        radii = _floats(opts["radii"]) if opts.get("radii") else [1.0] * n
        expo = _floats(opts["exponents"]) if opts.get("exponents") else [1.0] * len(radii)
        domain = DomainSpec.ellipsoid(expo, radii)

    wkind = opts.get("weight") or "auto"
    if wkind == "auto":
        wkind = "ke" if (kind == "ball" and m > 1) else "unweighted"
    if wkind == "unweighted":
        if m > 1:
            raise ConfigError("m > 1 requires the ke weight on a ball")
        weight = WeightSpec.unweighted()
    elif wkind == "ke":
        weight = WeightSpec.ball_ke(m, domain.radii[0])
    elif wkind == "power":
        if opts.get("power_exponent") is None:
            raise ConfigError("power weight needs --power-exponent")
        weight = WeightSpec.radial_power(opts["power_exponent"])
    else:
        raise ConfigError(f"unknown weight {wkind!r}")

    N = opts.get("truncation") or 40
    cap = opts.get("max_truncation") or max(120, N)
    env = _env_degree_cap()
    if env is not None:
        N = min(N, env)
        cap = min(cap, env)
    return ModelConfig(domain, weight, truncation_degree=N,
                       tolerance=opts.get("tol") or 1e-10, max_degree=cap)


def _resolve_pointvecs(opts: dict) -> tuple[PointVec, ...]:
    points = [_complex_vector(t) for t in opts.get("point") or []]
    Xs = [_complex_vector(t) for t in opts.get("X") or []]
    Ys = [_complex_vector(t) for t in opts.get("Y") or []]
    if not points:
        return ()
    if len(Xs) == 1:
        Xs = Xs * len(points)
    if len(Ys) == 1:
        Ys = Ys * len(points)
    out = []
    for i, pt in enumerate(points):
        X = Xs[i] if i < len(Xs) else None
        Y = Ys[i] if i < len(Ys) else None
        out.append(PointVec(pt, X, Y))
    return tuple(out)


def parse_run_config(argv: list[str] | None = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    opts = _merge_config_file(args)
    command = opts.pop("command")
    needs_model = command in ("moments", "kernel", "curvature", "minints")
    model = _resolve_model(opts) if needs_model else None
    return RunConfig(
        command=command,
        model=model,
        pointvecs=_resolve_pointvecs(opts),
        seed=opts.get("seed") or 0,
        output=opts.get("fmt") or "json",
        output_path=opts.get("out"),
        options=opts,
    )


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------

def _emit(config: RunConfig, payload: dict, csv_header: list[str],
          csv_rows: list[list]) -> None:
    if config.output == "csv":
        write_text(csv_report(csv_header, csv_rows), config.output_path)
    else:
        write_text(json_report(config.command, payload), config.output_path)


def _require_points(config: RunConfig, need_x: bool = False) -> tuple[PointVec, ...]:
    if not config.pointvecs:
        raise ConfigError(f"{config.command} needs at least one --point")
    if need_x:
        for pv in config.pointvecs:
            if pv.X is None:
                raise ConfigError(f"{config.command} needs --X for every point")
    return config.pointvecs


def _jet_key(a, b) -> str:
    return ",".join(map(str, a)) + "|" + ",".join(map(str, b))


def _cmd_moments(config: RunConfig) -> int:
    table = build_moment_table(config.model)
    records = table.to_records()
    n = config.model.domain.dimension
    header = [f"alpha_{i + 1}" for i in range(n)] + ["value", "provenance"]
    rows = [rec["alpha"] + [rec["value"], rec["provenance"]] for rec in records]
    _emit(config, {"degree": table.degree, "entries": records}, header, rows)
    return 0


def _cmd_kernel(config: RunConfig) -> int:
    model = build_model(config.model)
    out = []
    for pv in _require_points(config):
        jet = kernel_jet(model, pv.point)
        rec = {"point": list(pv.point), "K": jet.value, "N_used": jet.N_used}
        if config.options.get("full_jets"):
            rec["jet"] = {_jet_key(a, b): v for (a, b), v in
                          sorted(jet.derivs.items())}
        out.append(rec)
    header = ["index", "K", "N_used"]
    rows = [[i, r["K"], r["N_used"]] for i, r in enumerate(out)]
    _emit(config, {"points": out}, header, rows)
    return 0


def _cmd_curvature(config: RunConfig) -> int:
    model = build_model(config.model)
    out = []
    for pv in _require_points(config, need_x=True):
        rep = curvature_bisectional(model, pv.point, pv.X,
                                    pv.Y if pv.Y is not None else pv.X)
        rec = rep.to_json_dict()
        rec["point"] = list(pv.point)
        out.append(rec)
    header = ["index", "B", "H", "S", "T", "ricci", "J", "J_tilde", "cos2",
              "N_used"]
    rows = [[i] + [r[k] for k in header[1:]] for i, r in enumerate(out)]
    _emit(config, {"reports": out}, header, rows)
    return 0


def _cmd_minints(config: RunConfig) -> int:
    model = build_model(config.model)
    out = []
    for pv in _require_points(config, need_x=True):
        rep = min_integrals(model, pv.point, pv.X,
                            pv.Y if pv.Y is not None else pv.X)
        rec = rep.to_json_dict()
        rec["point"] = list(pv.point)
        out.append(rec)
    header = ["index", "I0", "I1_X", "I1_Y", "I1_X_given_Y", "I2_XY", "S", "T",
              "B", "X_length2", "K", "J", "N_used"]
    rows = [[i] + [r[k] for k in header[1:]] for i, r in enumerate(out)]
    _emit(config, {"reports": out}, header, rows)
    return 0


def _parse_suite_options(raw: list[str] | None) -> dict:
    out: dict = {}
    for item in raw or []:
        if "=" not in item:
            raise ConfigError(f"--suite-option needs KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        try:
            parsed: object = json.loads(value)
        except json.JSONDecodeError:
            parsed = value
        out[key.replace("-", "_")] = parsed
    return out


def _cmd_verify(config: RunConfig) -> int:
    name = config.options["suite"]
    fn = SUITES[name]
    accepted = set(inspect.signature(fn).parameters)
    kwargs: dict = {}
    if "seed" in accepted:
        kwargs["seed"] = config.seed
    if config.options.get("cases") is not None and "cases" in accepted:
        kwargs["cases"] = config.options["cases"]
    if config.options.get("model") is not None and "models" in accepted:
        kwargs["models"] = (config.options["model"],)
    for key in ("n", "m"):
        if config.options.get(key) is not None and key in accepted:
            kwargs[key] = config.options[key]
    for key, value in _parse_suite_options(config.options.get("suite_options")).items():
        if key not in accepted:
            raise ConfigError(f"suite {name!r} takes no option {key!r}")
        kwargs[key] = value
    result = run_suite(name, **kwargs)

    keys = sorted({k for c in result.cases for k in c.residuals})
    header = ["index", "pass"] + keys
    rows = [[c.index, c.passed] + [c.residuals.get(k, "") for k in keys]
            for c in result.cases]
    _emit(config, result.to_json_dict(), header, rows)
    return 0 if result.passed else 1


def _cmd_bounds(config: RunConfig) -> int:
    opts = config.options
    s_list = _floats(opts["s"]) if opts.get("s") else [1.0]
    m_list = _ints(opts["m"]) if opts.get("m") else [1]
    n_list = _ints(opts["n"]) if opts.get("n") else [1]
    variant = opts.get("variant") or "bisectional"
    reports = [squeezing_bounds(s, m, n, cos2=opts.get("cos2"),
                                measured_B=opts.get("measured_B"),
                                variant=variant)
               for s in s_list for m in m_list for n in n_list]
    header = ["s", "m", "n", "variant", "D_m", "lower", "upper", "value",
              "contained"]
    rows = [[r.s, r.m, r.n, r.variant, r.D_m, r.lower, r.upper,
             "" if r.value is None else r.value,
             "" if r.contained is None else r.contained] for r in reports]
    _emit(config, {"reports": [r.to_json_dict() for r in reports]},
          header, rows)
    return 0


def _cmd_trend(config: RunConfig) -> int:
    opts = config.options
    quantity = opts.get("quantity") or "Jtilde"
    n = opts.get("n") or 1
    m_min = opts.get("m_min") or (2 if quantity != "ricci" else 1)
    m_max = opts.get("m_max") or 50
    rows: list[list] = []
    if quantity in ("Jtilde", "Cm"):
        for m in range(m_min, m_max + 1):
            root = ball_constant(m, n) ** (1.0 / m)
            value = root * (n + 1) ** n if quantity == "Jtilde" else root
            rows.append([m, value])
        limit = 1.0 if quantity == "Jtilde" else (n + 1) ** (-n)
    else:
        for m in range(m_min, m_max + 1):
            weight = WeightSpec.ball_ke(m, opts.get("r") or 1.0) if m > 1 \
                else WeightSpec.unweighted()
            cfg = ModelConfig(DomainSpec.ball(n, opts.get("r") or 1.0), weight,
                              truncation_degree=8, max_degree=18)
            model = build_model(cfg)
            X = np.zeros(n, dtype=complex)
            X[0] = 1.0
            rows.append([m, ricci(model, np.zeros(n, dtype=complex), X)])
        limit = 0.0
    payload = {"quantity": quantity, "n": n,
               "rows": [[m, v] for m, v in rows],
               "final_value": rows[-1][1], "limit": limit,
               "final_gap": abs(rows[-1][1] - limit)}
    _emit(config, payload, ["m", "value"], rows)
    return 0


_COMMANDS = {
    "moments": _cmd_moments,
    "kernel": _cmd_kernel,
    "curvature": _cmd_curvature,
    "minints": _cmd_minints,
    "verify": _cmd_verify,
    "bounds": _cmd_bounds,
    "trend": _cmd_trend,
}


def run(config: RunConfig) -> int:
    """Dispatch a resolved run configuration; returns the process exit code."""
    try:
        return _COMMANDS[config.command](config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BergmanLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main(argv: list[str] | None = None) -> int:
    try:
        config = parse_run_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
