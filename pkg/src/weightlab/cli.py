"""Command line driver: ``weightlab <command> --config PATH [--out DIR] [--threads N] [--seed S]``.

Exit codes: 0 pass, 1 experiment failure, 2 configuration error, 3 numeric
failure.  Outputs embed the config digest, the seed and the tool version;
work is spread over a thread pool whose results are merged in input order,
so the thread count never changes a byte of output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig
from .geometry import Ball, DivergentIntegral, ToleranceNotMet
from .norms import FixedRule
from .operators import (CommutatorSpec, FractionalKernel, HilbertKernel, Symbol, g_family, test_function,
                        theorem_plan, theorem_ratio)
from .params import Setting, classify_region, is_inf, region_grid
from .weights import (ZeroWeight, catalog, check_membership_numeric, check_membership_symbolic,
                      global_functional)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("region-map", "check-pair", "verify-theorem", "scan-global", "catalog")


class ExperimentFailure(RuntimeError):
    """An experiment ran but its pass criterion failed."""


def _meta(cfg: ExperimentConfig, command: str) -> dict:
    return {"tool": "weightlab", "version": __version__, "command": command, "config_digest": cfg.digest,
            "seed": cfg.data["seed"]}


def _header(meta: dict) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in meta.items())


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _write(out: Path, name: str, text: str) -> Path:
    try:
        out.mkdir(parents=True, exist_ok=True)
        path = out / name
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {out / name}: {exc}") from exc
    return path


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def run_region_map(cfg: ExperimentConfig, out: Path, executor=None) -> dict:
    """CSV of the region classification on a ``(1/r, delta_tilde)`` grid."""
    s = cfg.setting()
    reg = cfg.data["region"]
    res = reg["resolution"]
    try:
        grid = region_grid(s, reg["r_inv_range"], reg["delta_tilde_range"],
                           tuple(res) if isinstance(res, list) else res, executor)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    text = _header(_meta(cfg, "region-map")) + grid.to_csv()
    _write(out, "region_map.csv", text)
    return {"rows": sum(1 for _ in grid.rows())}


def run_check_pair(cfg: ExperimentConfig, out: Path, executor=None) -> dict:
    """Symbolic (when possible) and numeric membership; disagreement is a failure."""
    s = cfg.setting()
    pair, entry = cfg.pair(s)
    plan = cfg.plan()
    sym = None
    flag = None
    if pair.is_power_pair:
        sym = check_membership_symbolic(pair, s)
    else:
        flag = "symbolic decision unsupported for this weight; numeric report only"
    num = check_membership_numeric(pair, s, plan, rtol=cfg.data["quadrature"]["rtol"], executor=executor)
    agree = None if sym is None else sym.agrees_with(num)
    report = {
        "meta": _meta(cfg, "check-pair"),
        "setting": s.to_dict(),
        "region": classify_region(s).tag,
        "catalog_entry": None if entry is None else entry.to_dict(),
        "symbolic": None if sym is None else sym.report(pair, s),
        "numeric": num.report(pair, s, plan.digest()),
        "flag": flag,
        "agreement": agree,
    }
    _write(out, "check_pair.json", _dump(report))
    if agree is False:
        raise ExperimentFailure(f"symbolic {sym.status} vs numeric {num.status}")
    return report


def _commutator(cfg: ExperimentConfig, s: Setting) -> CommutatorSpec:
    kind = cfg.data["kernel"]["kind"]
    if kind == "hilbert":
        if s.n != 1 or s.alpha != 0:
            raise ConfigError("the Hilbert kernel needs n = 1 and alpha = 0")
        kernel = HilbertKernel()
    else:
        if s.alpha == 0:
            raise ConfigError("the fractional kernel needs alpha > 0")
        kernel = FractionalKernel(float(s.alpha), s.n)
    sym_cfg = cfg.data["symbol"]
    d = float(s.delta)
    symbol = Symbol.power(d, s.n) if sym_cfg["kind"] == "power" else Symbol.sine(d, s.n, sym_cfg["freq"])
    return CommutatorSpec(kernel, symbol if s.m > 0 else None, s.m)


def run_verify_theorem(cfg: ExperimentConfig, out: Path, executor=None) -> dict:
    """Ratios ``osc(T f) / (||b||**m ||f/v||_r)`` over ``f = v g(./A)`` on ``[-A, A]``."""
    s = cfg.setting()
    pair, _ = cfg.pair(s)
    verdict = check_membership_symbolic(pair, s) if pair.is_power_pair else None
    if verdict is not None and not verdict.is_member:
        raise ConfigError(f"the pair is not a member ({verdict.status}); the experiment needs one")
    spec = _commutator(cfg, s)
    th = cfg.data["theorem"]
    rule = FixedRule(th["panels"], th["order"])
    rtol = cfg.data["quadrature"]["rtol"]
    gs = g_family(th["n_g"], cfg.data["seed"])
    jobs = [(float(A), i) for A in th["A"] for i in range(len(gs))]
    zero_v = isinstance(pair.v, ZeroWeight)

    def one(job):
        A, i = job
        if zero_v:
            return 0.0
        f = test_function(pair.v, gs[i], A, s.n)
        return theorem_ratio(spec, pair, s, f, theorem_plan(A, s.n), rule, rtol)

    mapper = executor.map if executor is not None else map
    ratios = list(mapper(one, jobs))
    for (A, i), r in zip(jobs, ratios):
        if not math.isfinite(r):
            raise DivergentIntegral(f"non-finite ratio for A={A}, g#{i}")
    pos = [r for r in ratios if r > 0]
    spread = max(pos) / min(pos) if pos else 1.0
    disp = float(np.std(np.log(pos))) if pos else 0.0
    ok = spread <= th["bound"]
    report = {
        "meta": _meta(cfg, "verify-theorem"),
        "setting": s.to_dict(),
        "kernel": spec.kernel.to_dict(),
        "symbol": None if spec.symbol is None else spec.symbol.to_dict(),
        "ratios": [{"A": A, "g": i, "ratio": r} for (A, i), r in zip(jobs, ratios)],
        "max": max(ratios), "min": min(ratios), "max_over_min": spread, "log_std": disp,
        "bound": th["bound"], "pass": ok,
    }
    _write(out, "verify_theorem.json", _dump(report))
    if not ok:
        raise ExperimentFailure(f"ratio spread {spread:.4g} exceeds {th['bound']}")
    return report


def scan_global(pair, s: Setting, radius: float = 1.0, j_max: int = 40, rtol: float = 1e-9, executor=None):
    """Global functional on ``B(0, radius)`` truncated at ``M = 2**j * radius``, ``j = 1..j_max``."""
    B = Ball(np.zeros(s.n), radius)
    js = list(range(1, j_max + 1))
    if isinstance(pair.v, ZeroWeight):
        return js, [0.0] * len(js)

    def one(j):
        return float(global_functional(pair, s, B, 2.0**j * radius, rtol).value)

    mapper = executor.map if executor is not None else map
    return js, list(mapper(one, js))


def fit_divergence(js, values, p) -> dict:
    """Least-squares line of ``value**p`` against ``log M`` (``p = r'``; 1 when infinite)."""
    y = np.asarray(values, dtype=float) ** p
    x = np.asarray(js, dtype=float) * math.log(2)
    if np.ptp(y) == 0:
        return {"slope": 0.0, "intercept": float(y[0]), "r2": 1.0}
    slope, icpt = np.polyfit(x, y, 1)
    pred = slope * x + icpt
    r2 = 1 - float(np.sum((y - pred) ** 2)) / float(np.sum((y - y.mean()) ** 2))
    return {"slope": float(slope), "intercept": float(icpt), "r2": r2}


def run_scan_global(cfg: ExperimentConfig, out: Path, executor=None) -> dict:
    s = cfg.setting()
    pair, _ = cfg.pair(s)
    sc = cfg.data["scan"]
    js, vals = scan_global(pair, s, float(sc["radius"]), sc["j_max"], cfg.data["quadrature"]["rtol"], executor)
    p = 1.0 if is_inf(s.r_conj) else float(s.r_conj)
    fit = fit_divergence(js, vals, p)
    last = abs(vals[-1] - vals[-2])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j", "M", "value", "value_pow_rconj"])
    for j, v in zip(js, vals):
        w.writerow([j, repr(2.0**j * float(sc["radius"])), repr(v), repr(v**p)])
    _write(out, "scan_global.csv", _header(_meta(cfg, "scan-global")) + buf.getvalue())
    summary = {"meta": _meta(cfg, "scan-global"), "fit": fit, "last_increment": last,
               "cauchy_1e-6": last <= 1e-6}
    _write(out, "scan_global.json", _dump(summary))
    return summary


def run_catalog(cfg: ExperimentConfig, out: Path, executor=None) -> dict:
    s = cfg.setting()
    rows = []
    for e in catalog(s):
        d = e.to_dict()
        d["symbolic"] = None if e.pair is None else check_membership_symbolic(e.pair, s).status
        rows.append(d)
    report = {"meta": _meta(cfg, "catalog"), "setting": s.to_dict(), "region": classify_region(s).tag,
              "entries": rows}
    _write(out, "catalog.json", _dump(report))
    bad = [r["name"] for r in rows if r["symbolic"] is not None and r["symbolic"] != r["expected"]]
    if bad:
        raise ExperimentFailure(f"catalog entries disagree with their expected verdicts: {bad}")
    return report


RUNNERS = {"region-map": run_region_map, "check-pair": run_check_pair, "verify-theorem": run_verify_theorem,
           "scan-global": run_scan_global, "catalog": run_catalog}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _threads(arg: int | None) -> int:
    env = os.environ.get("WEIGHTLAB_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"WEIGHTLAB_THREADS must be an integer, got {env!r}") from exc
    return max(1, arg or 1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weightlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"weightlab {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON experiment config")
    ap.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    ap.add_argument("--threads", type=int, default=None, help="worker threads (WEIGHTLAB_THREADS wins)")
    ap.add_argument("--seed", type=int, default=None, help="override the config seed")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.load(args.config).with_seed(args.seed)
        n = _threads(args.threads)
        out = Path(args.out if args.out is not None else cfg.data["output"]["dir"])
        pool = ThreadPoolExecutor(max_workers=n) if n > 1 else nullcontext(None)
        with pool as ex:
            RUNNERS[args.command](cfg, out, ex)
    except ConfigError as exc:
        print(f"weightlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExperimentFailure as exc:
        print(f"weightlab: experiment failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ToleranceNotMet, DivergentIntegral, FloatingPointError, ArithmeticError) as exc:
        print(f"weightlab: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"weightlab: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
