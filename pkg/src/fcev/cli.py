"""Command-line front end: price, greeks, sweep, check and bench.

Every flag can also be given in a plain ``key = value`` config file
(``--config``); values on the command line win over the file.
Exit codes: 0 ok, 1 failed check, 2 invalid input, 3 numerical failure.
"""

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import greeks as G
from .errors import ConvergenceError, DomainError, NumericalOverflow
from .model import CevSpec, Classical, Fractional, MarketSpec, Mixed, perturbed_k
from .pricing import call_price

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

MODELS = ("cev", "fcev", "mfcev")
NUMERIC_KEYS = ("s0", "strike", "rate", "sigma", "alpha", "hurst", "beta", "gamma", "maturity")
REQUIRED_KEYS = ("s0", "strike", "rate", "sigma", "alpha", "maturity")
PRICE_COLUMNS = ("model",) + NUMERIC_KEYS + ("price", "guard_triggered")
# the Greek gamma is "gamma_greek" because "gamma" already holds the mixed weight
GREEK_KEYS = tuple("gamma_greek" if g == "gamma" else g for g in G.GREEK_NAMES)
GREEK_COLUMNS = PRICE_COLUMNS + GREEK_KEYS + tuple("fd_" + g for g in G.GREEK_NAMES)
SWEEP_PARAMS = {"alpha": "alpha", "hurst": "hurst", "sigma": "sigma", "maturity": "maturity",
                "spot": "s0", "rate": "rate"}
# keys accepted in a config file besides the numeric ones
TEXT_KEYS = ("model", "out", "param", "from", "to", "steps", "variant", "overlay", "exclusive",
             "json", "only", "repeats", "fault_k")


class InputError(Exception):
    """Invalid user input; the message names the field."""


def fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".12g")


def read_config(path):
    """Flat ``key = value`` lines with ``#`` comments; ``overlay`` may repeat."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputError(f"config: cannot read {path}: {exc.strerror}") from None
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"config: line {n} is not key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in NUMERIC_KEYS and key not in TEXT_KEYS and key != "from_":
            raise InputError(f"config: unknown key {key!r} on line {n}")
        if key == "overlay":
            out.setdefault("overlay", []).append(value)
        else:
            out[key] = value
    return out


def _number(key, value):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise InputError(f"{key}: expected a number, got {value!r}") from None


def resolve(args):
    """Merge defaults < config file < command line into a flat dict."""
    merged = read_config(args.config) if getattr(args, "config", None) else {}
    for key, value in vars(args).items():
        if key in ("config", "command", "func"):
            continue
        if key == "overlay":
            if value:
                merged["overlay"] = value
            continue
        if key == "from_":
            key = "from"
        if value is not None and value is not False:
            merged[key] = value
        elif value is False and key not in merged:
            merged[key] = False
    for key in NUMERIC_KEYS:
        if key in merged and merged[key] is not None:
            merged[key] = _number(key, merged[key])
    for key in ("json", "exclusive"):
        if isinstance(merged.get(key), str):
            merged[key] = merged[key].lower() in ("true", "1", "yes", "on")
    if isinstance(merged.get("only"), str):
        merged["only"] = [merged["only"]]
    return merged


def build_specs(cfg):
    """(market, cev, driver) from a resolved config; DomainError names the field."""
    model = cfg.get("model", "cev")
    if model not in MODELS:
        raise InputError(f"model: expected one of {', '.join(MODELS)}, got {model!r}")
    for key in REQUIRED_KEYS:
        if cfg.get(key) is None:
            raise InputError(f"{key}: missing required value (--{key.replace('_', '-')})")
    market = MarketSpec(cfg["s0"], cfg["strike"], cfg["rate"], cfg["maturity"])
    cev = CevSpec(cfg["sigma"], cfg["alpha"])
    if model == "cev":
        driver = Classical()
    else:
        if cfg.get("hurst") is None:
            raise InputError(f"hurst: required for --model {model}")
        if model == "fcev":
            driver = Fractional(cfg["hurst"])
        else:
            for key in ("beta", "gamma"):
                if cfg.get(key) is None:
                    raise InputError(f"{key}: required for --model mfcev")
            driver = Mixed(cfg["beta"], cfg["gamma"], cfg["hurst"])
    return market, cev, driver


def _echo(cfg):
    model = cfg.get("model", "cev")
    row = {"model": model}
    for key in NUMERIC_KEYS:
        row[key] = cfg.get(key)
    if model == "cev":
        row["hurst"] = row["beta"] = row["gamma"] = None
    elif model == "fcev":
        row["beta"] = row["gamma"] = None
    return row


def price_row(cfg):
    market, cev, driver = build_specs(cfg)
    quote = call_price(market, cev, driver)
    row = _echo(cfg)
    row["price"] = quote.price
    row["guard_triggered"] = quote.diagnostics.guard_triggered
    return row


def greeks_row(cfg):
    market, cev, driver = build_specs(cfg)
    row = price_row(cfg)
    rep = G.greeks(market, cev, driver, variant=cfg.get("variant") or "printed", fd_check=True)
    for name, key in zip(G.GREEK_NAMES, GREEK_KEYS):
        row[key] = getattr(rep, name)
        row["fd_" + name] = rep.fd_cross_check[name]
    return row


def write_csv(rows, columns, out=None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c)) for c in columns])
    text = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def parse_overlay(text, base):
    """``model[/hurst[/sigma]]`` or ``key=value,key=value`` applied on top of ``base``."""
    cfg = dict(base)
    text = text.strip()
    if "=" in text:
        for item in text.split(","):
            if "=" not in item:
                raise InputError(f"overlay: cannot parse {item!r}")
            key, value = (p.strip() for p in item.split("=", 1))
            if key == "model":
                cfg["model"] = value
            elif key in NUMERIC_KEYS:
                cfg[key] = _number(key, value)
            else:
                raise InputError(f"overlay: unknown key {key!r}")
        return cfg
    parts = text.split("/")
    if len(parts) > 3:
        raise InputError(f"overlay: expected model/hurst/sigma, got {text!r}")
    cfg["model"] = parts[0]
    if len(parts) > 1 and parts[1]:
        cfg["hurst"] = _number("hurst", parts[1])
    if len(parts) > 2 and parts[2]:
        cfg["sigma"] = _number("sigma", parts[2])
    if cfg["model"] == "mfcev":
        cfg.setdefault("beta", 1.0)
        cfg.setdefault("gamma", 1.0)
        cfg["beta"] = 1.0 if cfg["beta"] is None else cfg["beta"]
        cfg["gamma"] = 1.0 if cfg["gamma"] is None else cfg["gamma"]
    return cfg


def sweep_grid(cfg):
    param = cfg.get("param")
    if param not in SWEEP_PARAMS:
        raise InputError(f"param: expected one of {', '.join(SWEEP_PARAMS)}, got {param!r}")
    lo, hi = _number("from", cfg.get("from")), _number("to", cfg.get("to"))
    try:
        steps = int(cfg.get("steps"))
    except (TypeError, ValueError):
        raise InputError(f"steps: expected an integer, got {cfg.get('steps')!r}") from None
    if steps < 2:
        raise InputError("steps: must be >= 2")
    if not lo < hi:
        raise InputError("from: must be below --to")
    return SWEEP_PARAMS[param], np.linspace(lo, hi, steps, endpoint=not cfg.get("exclusive"))


def cmd_price(cfg):
    write_csv([price_row(cfg)], PRICE_COLUMNS, cfg.get("out"))
    return EXIT_OK


def cmd_greeks(cfg):
    write_csv([greeks_row(cfg)], GREEK_COLUMNS, cfg.get("out"))
    return EXIT_OK


def cmd_sweep(cfg):
    key, grid = sweep_grid(cfg)
    series = [parse_overlay(o, cfg) for o in cfg.get("overlay") or []] or [dict(cfg)]
    points = []
    for base in series:
        for value in grid:
            point = dict(base)
            point[key] = float(value)
            build_specs(point)  # validate the whole grid before pricing
            points.append(point)
    rows = []
    for point in points:
        try:
            rows.append(price_row(point))
        except (NumericalOverflow, ConvergenceError, ArithmeticError) as exc:
            raise _GridFailure(f"{point.get('model')} {key}={fmt(point[key])}: {exc}") from exc
    write_csv(rows, PRICE_COLUMNS, cfg.get("out"))
    return EXIT_OK


class _GridFailure(Exception):
    pass


def cmd_check(cfg):
    from .checks import run_checks

    factor = cfg.get("fault_k")
    selected = cfg.get("only") or None
    if factor:
        with perturbed_k(_number("fault_k", factor)):
            results = run_checks(selected)
    else:
        results = run_checks(selected)
    ok = all(r.passed for r in results)
    if cfg.get("json"):
        payload = {"passed": ok, "checks": [
            {"name": r.name, "measured": r.measured, "tolerance": r.tolerance,
             "passed": r.passed, "seconds": round(r.seconds, 3), "detail": r.detail}
            for r in results]}
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = "".join(r.line() + "\n" for r in results)
        failed = [r.name for r in results if not r.passed]
        text += f"{len(results) - len(failed)}/{len(results)} checks passed"
        text += (f"; failed: {', '.join(failed)}\n" if failed else "\n")
    if cfg.get("out"):
        with open(cfg["out"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_CHECK


BENCH_ALPHAS = (1.0, 1.5, 1.9, 1.99)


def cmd_bench(cfg):
    """Wall-clock seconds per price across alpha for the three models."""
    repeats = int(cfg.get("repeats") or 20)
    base = {"s0": 100.0, "strike": 100.0, "rate": 0.05, "sigma": 0.2, "maturity": 0.5,
            "hurst": 0.7, "beta": 1.0, "gamma": 1.0}
    rows = []
    for alpha in BENCH_ALPHAS:
        for model in MODELS:
            point = dict(base, model=model, alpha=alpha)
            market, cev, driver = build_specs(point)
            t0 = time.perf_counter()
            for _ in range(repeats):
                call_price(market, cev, driver)
            rows.append({"model": model, "alpha": alpha,
                         "seconds_per_price": (time.perf_counter() - t0) / repeats, "repeats": repeats})
    write_csv(rows, ("model", "alpha", "seconds_per_price", "repeats"), cfg.get("out"))
    return EXIT_OK


def _contract_flags(p):
    p.add_argument("--model", choices=None, help="cev, fcev or mfcev (default cev)")
    for key in NUMERIC_KEYS:
        p.add_argument(f"--{key}", default=None, metavar="X")
    p.add_argument("--variant", choices=("printed", "exact"), default=None,
                   help="theta/rho formula variant (greeks only)")


def _common_flags(p):
    p.add_argument("--config", help="key = value file; command-line flags override it")
    p.add_argument("--out", help="write the output here instead of standard output")


def build_parser():
    parser = argparse.ArgumentParser(prog="fcev", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="one call price as a CSV row")
    _contract_flags(p)
    _common_flags(p)
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("greeks", help="Greeks with finite-difference cross-check columns")
    _contract_flags(p)
    _common_flags(p)
    p.set_defaults(func=cmd_greeks)

    p = sub.add_parser("sweep", help="prices over a parameter grid")
    _contract_flags(p)
    _common_flags(p)
    p.add_argument("--param", help=", ".join(SWEEP_PARAMS))
    p.add_argument("--from", dest="from_", metavar="X")
    p.add_argument("--to", metavar="X")
    p.add_argument("--steps", metavar="N")
    p.add_argument("--exclusive", action="store_true", default=False,
                   help="leave out the --to end of the grid")
    p.add_argument("--overlay", action="append",
                   help="extra series, model[/hurst[/sigma]] or key=value,...; repeatable")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="run the acceptance suite")
    _common_flags(p)
    p.add_argument("--json", action="store_true", default=False)
    p.add_argument("--only", action="append", help="run checks whose name contains this")
    p.add_argument("--fault-k", dest="fault_k", default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="timing per price across alpha (informational)")
    _common_flags(p)
    p.add_argument("--repeats", default=None, metavar="N")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return args.func(cfg)
    except InputError as exc:
        print(f"fcev: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        field = exc.field or "input"
        print(f"fcev: error: {field}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _GridFailure as exc:
        print(f"fcev: numerical failure at grid point {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (NumericalOverflow, ConvergenceError, ArithmeticError) as exc:
        print(f"fcev: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
