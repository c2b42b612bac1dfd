"""Command line front end.

Subcommands: muntz, ratio, sweep, verify-lemmas, estimate-constants.
Exit codes: 0 all checks pass, 1 an inequality check failed, 2 a solver
did not converge, 3 usage or configuration error.  TURANLAB_BITS overrides
the default precision; an explicit --bits wins.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .errors import (
    IllConditioned,
    InequalityViolation,
    NonConvergence,
    OracleDisagreement,
    TuranLabError,
)
from .extremal import ENDPOINT, VARIATION, RatioProblem, solve_endpoint, solve_variation
from .lemmas import ALL_LEMMAS, run_lemma_suite
from .muntz import muntz_chebyshev, t_squared_integral
from .poly import Weight
from .precision import PrecisionContext
from .sweep import SweepConfig, run_sweep

DEFAULT_SEED = 0x5EED


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_int_list(text):
    try:
        return [int(v) for v in str(text).split(",") if v != ""]
    except ValueError:
        raise _UsageError("expected a comma-separated integer list, got %r" % text)


def _read_config(path):
    if not os.path.exists(path):
        raise _UsageError("config file %r not found" % path)
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise _UsageError("config line %r is not key=value" % line)
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _common_flags(p):
    p.add_argument("--bits", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=None, help="sup-norm refinement tolerance")
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--config", default=None)


def _build_parser():
    top = _Parser(prog="turanlab", description=__doc__)
    top.add_argument("--version", action="version", version="turanlab %s" % __version__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("muntz", help="compute a Muntz-Chebyshev polynomial")
    p.add_argument("--nu", type=int, default=None)
    p.add_argument("--kappa", type=int, default=None)
    _common_flags(p)

    p = sub.add_parser("ratio", help="solve one extremal ratio problem")
    p.add_argument("--n", default=None)
    p.add_argument("--k", default=None)
    p.add_argument("--denominator", choices=[ENDPOINT, VARIATION], default=None)
    p.add_argument("--weight", choices=["unit", "circle"], default=None)
    _common_flags(p)

    p = sub.add_parser("sweep", help="run the (n, k, theorem) grid")
    p.add_argument("--n", default=None, help="comma-separated n values")
    p.add_argument("--k", default=None, help="comma-separated k values")
    p.add_argument("--theorems", default=None, help="subset of 2.1,2.2")
    _common_flags(p)

    p = sub.add_parser("verify-lemmas", help="run the randomized inequality suites")
    p.add_argument("--lemma", default=None,
                   help="one of %s or 'all'" % ",".join(ALL_LEMMAS))
    p.add_argument("--trials", type=int, default=None)
    _common_flags(p)

    p = sub.add_parser("estimate-constants", help="aggregate empirical constants")
    p.add_argument("--n", default=None)
    p.add_argument("--k", default=None)
    p.add_argument("--theorems", default=None)
    p.add_argument("--trials", type=int, default=None)
    _common_flags(p)

    return top


def _setting(args, cfg_file, key, fallback, cast=None):
    val = getattr(args, key.replace("-", "_"), None)
    if val is None and key in cfg_file:
        val = cfg_file[key]
    if val is None:
        return fallback
    return cast(val) if cast else val


def _make_ctx(args, cfg_file):
    bits = getattr(args, "bits", None)
    if bits is None and "bits" in cfg_file:
        bits = int(cfg_file["bits"])
    if bits is None:
        env = os.environ.get("TURANLAB_BITS")
        bits = int(env) if env else 256
    tol = _setting(args, cfg_file, "tol", 1e-12, float)
    return PrecisionContext(bits, tol, 1e-14)


def _emit(payload, out_path):
    text = json.dumps(payload, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_muntz(args, cfg_file):
    ctx = _make_ctx(args, cfg_file)
    nu = _setting(args, cfg_file, "nu", None, int)
    kappa = _setting(args, cfg_file, "kappa", None, int)
    if nu is None or kappa is None:
        raise _UsageError("muntz requires --nu and --kappa")
    mc = muntz_chebyshev(nu, kappa, ctx)
    payload = mc.to_json_dict(ctx)
    payload["t2_integral"] = ctx.dec(t_squared_integral(mc, ctx))
    _emit(payload, _setting(args, cfg_file, "out", None))
    return 0


def _cmd_ratio(args, cfg_file):
    ctx = _make_ctx(args, cfg_file)
    n = _setting(args, cfg_file, "n", None, int)
    k = _setting(args, cfg_file, "k", None, int)
    if n is None or k is None:
        raise _UsageError("ratio requires --n and --k")
    denom = _setting(args, cfg_file, "denominator", ENDPOINT)
    weight = Weight(_setting(args, cfg_file, "weight", "unit"))
    seed = _setting(args, cfg_file, "seed", DEFAULT_SEED, int)
    problem = RatioProblem(n, k, denom, weight)
    if denom == ENDPOINT:
        cert = solve_endpoint(problem, ctx)
    else:
        cert = solve_variation(problem, ctx, seed=seed)
    _emit(cert.to_json_dict(ctx), _setting(args, cfg_file, "out", None))
    return 0


def _cmd_sweep(args, cfg_file):
    ctx = _make_ctx(args, cfg_file)
    n_values = _parse_int_list(_setting(args, cfg_file, "n", "20,40,80"))
    k_values = _parse_int_list(_setting(args, cfg_file, "k", "1,2,4"))
    theorems = str(_setting(args, cfg_file, "theorems", "2.1,2.2")).split(",")
    out = _setting(args, cfg_file, "out", "sweep")
    cfg = SweepConfig(
        n_values=n_values,
        k_values=k_values,
        theorems=[t.strip() for t in theorems if t.strip()],
        bits=ctx.mantissa_bits,
        sup_tol=ctx.sup_tol,
        root_tol=ctx.root_tol,
        seed=_setting(args, cfg_file, "seed", DEFAULT_SEED, int),
        jobs=_setting(args, cfg_file, "jobs", 1, int),
        out_csv=out + ".csv",
        out_json=out + ".json",
    )
    report = run_sweep(cfg)
    sys.stdout.write(json.dumps({
        "rows": len(report.rows),
        "skipped": report.skipped,
        "out_csv": cfg.out_csv,
        "out_json": cfg.out_json,
    }, indent=2) + "\n")
    if any("error" in s["reason"] for s in report.skipped):
        return 2
    if not all(r.passed and r.chain_ok and r.proof_bound_ok for r in report.rows):
        return 1
    return 0


def _cmd_verify_lemmas(args, cfg_file):
    ctx = _make_ctx(args, cfg_file)
    which = _setting(args, cfg_file, "lemma", "all")
    trials = _setting(args, cfg_file, "trials", 200, int)
    seed = _setting(args, cfg_file, "seed", DEFAULT_SEED, int)
    ids = list(ALL_LEMMAS) if which == "all" else [which]
    reports = [run_lemma_suite(lid, trials, seed, ctx) for lid in ids]
    payload = {"reports": [r.to_json_dict(ctx) for r in reports]}
    _emit(payload, _setting(args, cfg_file, "out", None))
    return 0 if all(r.passed for r in reports) else 1


def _cmd_estimate_constants(args, cfg_file):
    ctx = _make_ctx(args, cfg_file)
    n_values = _parse_int_list(_setting(args, cfg_file, "n", "20,40,80"))
    k_values = _parse_int_list(_setting(args, cfg_file, "k", "1,2,4"))
    theorems = str(_setting(args, cfg_file, "theorems", "2.1,2.2")).split(",")
    trials = _setting(args, cfg_file, "trials", 40, int)
    seed = _setting(args, cfg_file, "seed", DEFAULT_SEED, int)
    cfg = SweepConfig(
        n_values=n_values,
        k_values=k_values,
        theorems=[t.strip() for t in theorems if t.strip()],
        bits=ctx.mantissa_bits,
        sup_tol=ctx.sup_tol,
        root_tol=ctx.root_tol,
        seed=seed,
        jobs=_setting(args, cfg_file, "jobs", 1, int),
        out_csv="",
        out_json="",
    )
    report = run_sweep(cfg)
    suite = run_lemma_suite("3.6", trials, seed, ctx)
    constants = report.constants
    if constants is not None and suite.worst_margin > constants.c3_hat:
        from dataclasses import replace

        constants = replace(constants, c3_hat=suite.worst_margin)
    payload = {
        "constants": None if constants is None else constants.to_json_dict(ctx),
        "cells": len(report.rows),
        "bernstein_trials": suite.trials,
    }
    _emit(payload, _setting(args, cfg_file, "out", None))
    return 0


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg_file = _read_config(args.config) if getattr(args, "config", None) else {}
        handler = {
            "muntz": _cmd_muntz,
            "ratio": _cmd_ratio,
            "sweep": _cmd_sweep,
            "verify-lemmas": _cmd_verify_lemmas,
            "estimate-constants": _cmd_estimate_constants,
        }[args.command]
        return handler(args, cfg_file)
    except _UsageError as exc:
        sys.stderr.write("usage error: %s\n" % exc)
        return 3
    except (ValueError,) as exc:
        sys.stderr.write("config error: %s\n" % exc)
        return 3
    except (NonConvergence, IllConditioned, OracleDisagreement) as exc:
        sys.stderr.write("solver error: %s\n" % exc)
        return 2
    except InequalityViolation as exc:
        sys.stderr.write("inequality violation: %s\n" % exc)
        return 1
    except TuranLabError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
