"""Command-line interface: density, error-table, validate and simulate."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import validation
from .benchmark.inversion import fourier_benchmark
from .benchmark.models import ALIASES, MODEL_IDS, BuiltinModel, builtin
from .benchmark.simulate import DEFAULT_STEPS, simulate_paths
from .experiments import REGION_LEVEL, EmptyRegionError, default_grid, expansion_density, max_relative_errors
from .expansion import MAX_ORDER, ModelError, ModelSpec

SCHEMA = 1
METHODS = ("expansion", "fourier", "mc")
NA = "NA"
DEFAULT_GRID_POINTS = 201


class ConfigError(ValueError):
    def __init__(self, fld: str, msg: str):
        super().__init__(f"{fld}: {msg}")
        self.field = fld


# ---------------------------------------------------------------- configuration

def parse_delta(value) -> Fraction:
    """Exact step length from '1/252', '0.004' or a number."""
    try:
        d = Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError("delta", f"cannot parse {value!r} as a number or ratio") from None
    if d <= 0:
        raise ConfigError("delta", "must be > 0")
    return d


def parse_grid(value) -> Tuple[float, float, int]:
    if isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        parts = str(value).split(":")
    if len(parts) != 3:
        raise ConfigError("grid", "expected xmin:xmax:n")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError("grid", f"cannot parse {value!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError("grid", "bounds must be finite")
    if n < 2:
        raise ConfigError("grid", "n must be >= 2")
    if not hi > lo:
        raise ConfigError("grid", "xmax must exceed xmin")
    return lo, hi, n


def parse_orders(value) -> List[int]:
    """'3' means orders 0..3; '0,2' or a list names the orders explicitly."""
    if isinstance(value, int):
        orders = list(range(value + 1))
    elif isinstance(value, (list, tuple)):
        orders = [int(v) for v in value]
    else:
        text = str(value).strip()
        try:
            orders = [int(v) for v in text.split(",")] if "," in text else list(range(int(text) + 1))
        except ValueError:
            raise ConfigError("orders", f"cannot parse {value!r}") from None
    if not orders or any(not 0 <= m <= MAX_ORDER for m in orders):
        raise ConfigError("orders", f"orders must lie in 0..{MAX_ORDER}")
    return sorted(set(orders))


def parse_methods(value) -> List[str]:
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    items = [str(v).strip() for v in items if str(v).strip()]
    bad = [v for v in items if v not in METHODS]
    if bad or not items:
        raise ConfigError("methods", f"choose from {', '.join(METHODS)}; got {items}")
    return [m for m in METHODS if m in items]


def custom_model(obj: dict) -> ModelSpec:
    need = ("x0", "mu_derivs", "sigma_derivs", "a", "b")
    missing = [k for k in need if k not in obj]
    if missing:
        raise ConfigError("model", f"custom model is missing {', '.join(missing)}")
    extra = set(obj) - set(need)
    if extra:
        raise ConfigError("model", f"unknown custom model keys {sorted(extra)}")
    sig = [float(v) for v in obj["sigma_derivs"]]
    try:
        return ModelSpec(
            x0=float(obj["x0"]),
            drift_derivs=tuple(float(v) for v in obj["mu_derivs"]),
            diffusion_derivs=tuple(sig),
            gamma_a=float(obj["a"]),
            gamma_b=float(obj["b"]),
            pure_jump=all(v == 0.0 for v in sig),
        )
    except (ModelError, TypeError, ValueError) as exc:
        raise ConfigError("model", str(exc)) from None


@dataclass
class RunConfig:
    model: Union[str, dict] = "constant-diffusion"
    params: Dict[str, float] = field(default_factory=dict)
    delta: Fraction = Fraction(1, 52)
    orders: List[int] = field(default_factory=lambda: [0, 1, 2, 3])
    grid: Optional[Tuple[float, float, int]] = None
    methods: List[str] = field(default_factory=lambda: ["expansion"])
    seed: int = 0
    out: Optional[str] = None
    mc_paths: int = 100_000
    mc_steps: int = DEFAULT_STEPS

    def builtin_model(self) -> Optional[BuiltinModel]:
        if isinstance(self.model, dict):
            return None
        try:
            return builtin(self.model, **self.params)
        except (ModelError, TypeError) as exc:
            raise ConfigError("model", str(exc)) from None

    def model_spec(self) -> ModelSpec:
        if isinstance(self.model, dict):
            return custom_model(self.model)
        return self.builtin_model().to_model_spec()

    def x_grid(self) -> np.ndarray:
        if self.grid is not None:
            lo, hi, n = self.grid
            return np.linspace(lo, hi, n)
        bm = self.builtin_model()
        if bm is None:
            raise ConfigError("grid", "custom models need an explicit --grid")
        return default_grid(bm, float(self.delta), DEFAULT_GRID_POINTS)

    def echo(self) -> dict:
        """A config document that reproduces this run through --config."""
        return {
            "schema": SCHEMA,
            "model": self.model,
            "params": dict(self.params),
            "delta": str(self.delta),
            "orders": list(self.orders),
            "grid": None if self.grid is None else list(self.grid),
            "methods": list(self.methods),
            "seed": self.seed,
            "mc_paths": self.mc_paths,
            "mc_steps": self.mc_steps,
        }


CONFIG_KEYS = {"schema", "model", "params", "delta", "orders", "grid", "methods", "seed", "out", "mc_paths", "mc_steps"}


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError("config", f"no such file {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config", "top level must be an object")
    if isinstance(doc.get("config"), dict) and "command" in doc:
        # a metadata sidecar: rerun with its config echo
        doc = doc["config"]
    if doc.get("schema") != SCHEMA:
        raise ConfigError("schema", f"expected schema {SCHEMA}, got {doc.get('schema')!r}")
    unknown = set(doc) - CONFIG_KEYS
    if unknown:
        raise ConfigError("config", f"unknown keys {sorted(unknown)}")
    return doc


def _resolve_model(value):
    if isinstance(value, dict):
        custom_model(value)
        return value
    text = str(value)
    if text.endswith(".json"):
        try:
            obj = json.loads(Path(text).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("model", f"cannot read custom model {text}: {exc}") from None
        custom_model(obj)
        return obj
    if text not in MODEL_IDS and text not in ALIASES:
        raise ConfigError("model", f"unknown model {text!r}; use {', '.join(MODEL_IDS)}, 1/2/3 or a .json file")
    return ALIASES.get(text, text)


def parse_params(items: Optional[Sequence[str]]) -> Dict[str, float]:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError("param", f"expected name=value, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise ConfigError("param", f"{key}: not a number") from None
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    doc = load_config(getattr(args, "config", None))
    cfg = RunConfig()

    def pick(name, flag=None):
        v = getattr(args, flag or name, None)
        return v if v is not None else doc.get(name)

    if pick("model") is not None:
        cfg.model = _resolve_model(pick("model"))
    params = dict(doc.get("params") or {})
    params.update(parse_params(getattr(args, "param", None)))
    if params and isinstance(cfg.model, dict):
        raise ConfigError("params", "parameters only apply to built-in models")
    cfg.params = {k: float(v) for k, v in params.items()}
    if pick("delta") is not None:
        cfg.delta = parse_delta(pick("delta"))
    if pick("orders", "order") is not None:
        cfg.orders = parse_orders(pick("orders", "order"))
    if pick("grid") is not None:
        cfg.grid = parse_grid(pick("grid"))
    if pick("methods") is not None:
        cfg.methods = parse_methods(pick("methods"))
    for name in ("seed", "mc_paths", "mc_steps"):
        v = pick(name)
        if v is not None:
            try:
                setattr(cfg, name, int(v))
            except (TypeError, ValueError):
                raise ConfigError(name, f"expected an integer, got {v!r}") from None
    if cfg.mc_paths < 1 or cfg.mc_steps < 1:
        raise ConfigError("mc_paths" if cfg.mc_paths < 1 else "mc_steps", "must be >= 1")
    cfg.out = pick("out")
    # fail early on bad model parameters
    cfg.model_spec()
    if cfg.builtin_model() is None and any(m in cfg.methods for m in ("fourier", "mc")):
        raise ConfigError("methods", "fourier and mc need a built-in model")
    return cfg


# ---------------------------------------------------------------- CSV

def format_value(v: float) -> str:
    return NA if v is None or not math.isfinite(v) else repr(float(v))


@dataclass
class Table:
    """Named columns of equal length; NaN stands for NA."""

    columns: Dict[str, np.ndarray]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = list(self.columns)
        w.writerow(names)
        for row in zip(*(self.columns[n] for n in names)):
            w.writerow([format_value(v) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Table":
        rows = list(csv.reader(io.StringIO(text)))
        names = rows[0]
        data = {n: [] for n in names}
        for row in rows[1:]:
            for n, v in zip(names, row):
                data[n].append(math.nan if v == NA else float(v))
        return cls({n: np.array(v, dtype=float) for n, v in data.items()})

    def __eq__(self, other):
        if not isinstance(other, Table) or list(self.columns) != list(other.columns):
            return False
        return all(np.array_equal(self.columns[n], other.columns[n], equal_nan=True) for n in self.columns)


def _emit(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _write_meta(out: Optional[str], meta: dict):
    if out is not None:
        Path(out + ".json").write_text(json.dumps(meta, indent=2, default=_json_default) + "\n", encoding="utf-8")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Fraction):
        return str(o)
    raise TypeError(type(o).__name__)


def _model_meta(cfg: RunConfig) -> dict:
    bm = cfg.builtin_model()
    if bm is None:
        return {"custom": cfg.model}
    return {"id": bm.id, "params": bm.params()}


def mc_density(samples: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Histogram estimate with one bin of width dx centred on each grid point."""
    dx = x[1] - x[0]
    edges = np.concatenate([x - dx / 2, [x[-1] + dx / 2]])
    counts, _ = np.histogram(samples, bins=edges)
    return counts / (samples.size * dx)


def density_table(cfg: RunConfig) -> Tuple[Table, dict]:
    x = cfg.x_grid()
    delta = float(cfg.delta)
    cols: Dict[str, np.ndarray] = {"x": x}
    meta: Dict[str, object] = {}
    if "expansion" in cfg.methods:
        res = expansion_density(cfg.model_spec(), delta, max(cfg.orders), x)
        for m in cfg.orders:
            cols[f"p_m{m}"] = np.where(res.flags, np.nan, res.density(m))
        meta["expansion"] = dict(res.meta, path=res.path, flagged_points=int(res.flags.sum()))
    if "fourier" in cfg.methods:
        bench = fourier_benchmark(cfg.builtin_model(), delta, x)
        cols["p_fourier"] = bench.values
        meta["fourier"] = bench.meta()
    if "mc" in cfg.methods:
        samples = simulate_paths(cfg.builtin_model(), delta, cfg.mc_steps, cfg.mc_paths, cfg.seed)
        cols["p_mc"] = mc_density(samples, x)
        meta["mc"] = {"n_paths": cfg.mc_paths, "n_steps": cfg.mc_steps, "seed": cfg.seed,
                      "estimator": "histogram, bin width = grid spacing"}
    return Table(cols), meta


# ---------------------------------------------------------------- commands

def _run_meta(command: str, cfg: RunConfig, extra: dict) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "model": _model_meta(cfg),
        "delta": str(cfg.delta),
        "config": cfg.echo(),
        **extra,
    }


def cmd_density(args) -> int:
    cfg = build_config(args)
    table, meta = density_table(cfg)
    _emit(table.to_csv(), cfg.out)
    _write_meta(cfg.out, _run_meta("density", cfg, meta))
    return 0


def cmd_error_table(args) -> int:
    cfg = build_config(args)
    bm = cfg.builtin_model()
    if bm is None:
        raise ConfigError("model", "error-table needs a built-in model for the Fourier benchmark")
    deltas = [parse_delta(v) for v in args.deltas.split(",")] if args.deltas else [cfg.delta]
    rows = {"delta": [], "M": [], "max_rel_error": [], "region_points": []}
    details = []
    for d in deltas:
        x = None if cfg.grid is None else np.linspace(*cfg.grid)
        et = max_relative_errors(bm, float(d), cfg.orders, x)
        for m in cfg.orders:
            rows["delta"].append(float(d))
            rows["M"].append(m)
            rows["max_rel_error"].append(et.errors[m])
            rows["region_points"].append(et.region_size)
        details.append({"delta": str(d), "grid": [float(et.x[0]), float(et.x[-1]), int(et.x.size)],
                        "errors": {str(m): e for m, e in et.errors.items()}, "fourier": et.bench_meta})
    table = Table({k: np.array(v, dtype=float) for k, v in rows.items()})
    _emit(table.to_csv(), cfg.out)
    region = f"D = {{x : p_fourier(x) >= {REGION_LEVEL:g} * max p_fourier}}, singular or out-of-support points excluded"
    _write_meta(cfg.out, _run_meta("error-table", cfg, {"region": region, "runs": details}))
    return 0


GROUPS = validation.GROUPS


def cmd_validate(args) -> int:
    groups = GROUPS if not args.checks else [g.strip() for g in args.checks.split(",")]
    bad = [g for g in groups if g not in GROUPS]
    if bad:
        raise ConfigError("checks", f"unknown groups {bad}; choose from {', '.join(GROUPS)}")
    if args.mc_paths < validation.BLOCK:
        raise ConfigError("mc_paths", f"must be >= {validation.BLOCK}")
    checks = validation.run_suite(args.mc_paths, args.seed, groups)
    rep = validation.report(checks, mc_paths=args.mc_paths, seed=args.seed, groups=list(groups))
    text = json.dumps(rep, indent=2, default=_json_default) + "\n"
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0 if rep["passed"] else 1


def cmd_simulate(args) -> int:
    cfg = build_config(args)
    bm = cfg.builtin_model()
    if bm is None:
        raise ConfigError("model", "simulate needs a built-in model")
    samples = simulate_paths(bm, float(cfg.delta), cfg.mc_steps, cfg.mc_paths, cfg.seed)
    _emit(Table({"x": samples}).to_csv(), cfg.out)
    summary = {"n_paths": cfg.mc_paths, "n_steps": cfg.mc_steps, "seed": cfg.seed,
               "sample_mean": float(samples.mean()), "sample_sd": float(samples.std(ddof=1)),
               "exact_mean": bm.mean(float(cfg.delta))}
    _write_meta(cfg.out, _run_meta("simulate", cfg, {"summary": summary}))
    return 0


def _common(p: argparse.ArgumentParser, model=True):
    p.add_argument("--config", help="JSON run configuration (schema 1); flags override its values")
    if model:
        p.add_argument("--model", help="built-in id (pure-jump-ou, constant-diffusion, sqrt-diffusion or 1/2/3) "
                                       "or a custom model .json file")
        p.add_argument("--param", action="append", metavar="NAME=VALUE",
                       help="override a built-in parameter (kappa, theta, sigma, a, b, x0); repeatable")
        p.add_argument("--delta", help="time step, exact ratios such as 1/252 are accepted")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output file; a metadata sidecar is written to OUT.json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gammaexpansion",
                                     description="Closed-form transition density expansions for gamma-driven SDEs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="expansion densities on a grid, optionally with Fourier and MC columns")
    _common(p)
    p.add_argument("--order", help="M for orders 0..M, or a comma list such as 0,2")
    p.add_argument("--grid", help="xmin:xmax:n (default: mean - 8 sd .. mean + 12 sd, 201 points)")
    p.add_argument("--methods", help="comma list from expansion,fourier,mc")
    p.add_argument("--mc-paths", type=int, dest="mc_paths")
    p.add_argument("--mc-steps", type=int, dest="mc_steps")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("error-table", help="max relative error against the Fourier benchmark over region D")
    _common(p)
    p.add_argument("--order", help="M for orders 0..M, or a comma list")
    p.add_argument("--grid", help="xmin:xmax:n (default: 801 points per delta)")
    p.add_argument("--deltas", help="comma list of time steps; overrides --delta")
    p.set_defaults(func=cmd_error_table)

    p = sub.add_parser("validate", help="run the validation suite and print a JSON report")
    p.add_argument("--mc-paths", type=int, default=validation.DEFAULT_MC_PATHS, dest="mc_paths",
                   help="Monte Carlo budget; smaller values widen the reported confidence bands")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checks", help=f"comma list of groups ({', '.join(GROUPS)})")
    p.add_argument("--out", help="also write the report here")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="Euler samples of X(delta)")
    _common(p)
    p.add_argument("--n-paths", type=int, dest="mc_paths")
    p.add_argument("--n-steps", type=int, dest="mc_steps")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, EmptyRegionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ModelError as exc:
        print(f"error: model: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
