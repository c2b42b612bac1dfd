"""Grid sweeps over (n, k, theorem) cells with CSV/JSON report emission."""

from __future__ import annotations

import json
import os
import tempfile
import time
from collections import namedtuple
from dataclasses import dataclass, field

from mpmath import mpf

from . import __version__
from .errors import TuranLabError
from .extremal import theorem_check
from .lemmas import check_bernstein_restricted, estimate_constants
from .muntz import muntz_chebyshev, t_squared_integral, zero_bound_check
from .precision import PrecisionContext

CSV_HEADER = "n,k,theorem,weight,theorem_lower,value_lower,value_upper,gap,witness_ratio,pass"


@dataclass
class SweepConfig:
    n_values: list
    k_values: list
    theorems: list = field(default_factory=lambda: ["2.1", "2.2"])
    bits: int = 256
    sup_tol: float = 1e-12
    root_tol: float = 1e-14
    seed: int = 0x5EED
    grid_size: int = 4096
    jobs: int = 1
    out_csv: str = "sweep.csv"
    out_json: str = "sweep.json"

    def __post_init__(self):
        if not self.n_values or not self.k_values or not self.theorems:
            raise ValueError("n_values, k_values and theorems must be nonempty")
        if any(v < 1 for v in self.n_values) or any(v < 1 for v in self.k_values):
            raise ValueError("all n and k must be >= 1")
        for t in self.theorems:
            if t not in ("2.1", "2.2"):
                raise ValueError("unknown theorem %r" % t)

    def ctx(self):
        return PrecisionContext(self.bits, self.sup_tol, self.root_tol)


@dataclass
class SweepRow:
    n: int
    k: int
    theorem: str
    weight: str
    theorem_lower: object
    value_lower: object
    value_upper: object
    gap: object
    witness_ratio: object
    passed: bool
    chain_ok: bool = True
    proof_bound_ok: bool = True
    endpoint_lower: object = None
    endpoint_upper: object = None


@dataclass
class SweepReport:
    rows: list
    skipped: list
    constants: object
    metadata: dict


def _feasibility_skip(n, k):
    if k > n:
        return "variation guard: k > n"
    return None


def _run_cell(args):
    n, k, theorem, bits, sup_tol, root_tol, seed, grid_size = args
    ctx = PrecisionContext(bits, sup_tol, root_tol)
    rep = theorem_check(n, k, theorem, ctx, grid_size=grid_size, seed=seed)
    return SweepRow(
        n=n,
        k=k,
        theorem=theorem,
        weight=rep.problem.weight.value,
        theorem_lower=rep.theorem_lower,
        value_lower=rep.computed.value_lower,
        value_upper=rep.computed.value_upper,
        gap=rep.computed.gap,
        witness_ratio=rep.witness_ratio,
        passed=rep.passed,
        chain_ok=rep.chain_ok,
        proof_bound_ok=rep.proof_bound_ok,
        endpoint_lower=rep.endpoint.value_lower,
        endpoint_upper=rep.endpoint.value_upper,
    )


_ConstRow = namedtuple("_ConstRow", "n k theorem computed endpoint")
_Bracket = namedtuple("_Bracket", "value_lower value_upper")


def _sweep_constants(rows, cfg, ctx):
    """Constant estimates from the sweep cells plus the matching Muntz grid."""
    crow = [
        _ConstRow(r.n, r.k, r.theorem,
                  _Bracket(r.value_lower, r.value_upper),
                  _Bracket(r.endpoint_lower, r.endpoint_upper))
        for r in rows
    ]
    bern, slacks, t2 = [], [], []
    pairs = sorted({(n, k) for n in cfg.n_values for k in cfg.k_values
                    if 1 <= k <= 8 and n >= k + 1})
    for nu, kap in pairs:
        mc = muntz_chebyshev(nu, kap, ctx)
        slacks.extend(zero_bound_check(mc, ctx))
        t2.append(t_squared_integral(mc, ctx) * mpf(nu) / kap)
        bern.append(check_bernstein_restricted(mc, nu, kap, ctx))
    if not crow and not bern:
        return None
    return estimate_constants(crow, bern, slacks, t2, ctx)


def run_sweep(cfg: SweepConfig):
    """Execute every feasible cell; errors are recorded, never fatal."""
    cells = sorted(
        (n, k, t) for n in cfg.n_values for k in cfg.k_values for t in cfg.theorems
    )
    t0 = time.time()
    rows, skipped = [], []
    todo = []
    for n, k, t in cells:
        reason = _feasibility_skip(n, k)
        if reason:
            skipped.append({"n": n, "k": k, "theorem": t, "reason": reason})
        else:
            todo.append((n, k, t, cfg.bits, cfg.sup_tol, cfg.root_tol, cfg.seed,
                         cfg.grid_size))

    if cfg.jobs > 1 and len(todo) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_cell_safe, todo))
    else:
        results = [_run_cell_safe(args) for args in todo]

    for args, res in zip(todo, results):
        if isinstance(res, SweepRow):
            rows.append(res)
        else:
            skipped.append({"n": args[0], "k": args[1], "theorem": args[2],
                            "reason": "error: %s" % res})

    ctx = cfg.ctx()
    constants = _sweep_constants(rows, cfg, ctx) if rows else None
    meta = {
        "version": __version__,
        "seed": cfg.seed,
        "bits": cfg.bits,
        "wall_time_s": round(time.time() - t0, 3),
    }
    report = SweepReport(rows=rows, skipped=skipped, constants=constants, metadata=meta)
    if cfg.out_csv:
        emit_csv(report, cfg.out_csv)
    if cfg.out_json:
        emit_json(report, cfg.out_json, ctx)
    return report


def _run_cell_safe(args):
    try:
        return _run_cell(args)
    except (TuranLabError, ValueError, ZeroDivisionError) as exc:
        return "%s: %s" % (type(exc).__name__, exc)


def _fmt(x):
    """Shortest round-trip decimal (<= 17 significant digits)."""
    return repr(float(x))


def _atomic_write(path, data):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_csv(report: SweepReport, path):
    lines = [CSV_HEADER]
    for r in sorted(report.rows, key=lambda r: (r.n, r.k, r.theorem)):
        lines.append(",".join([
            str(r.n), str(r.k), r.theorem, r.weight,
            _fmt(r.theorem_lower), _fmt(r.value_lower), _fmt(r.value_upper),
            _fmt(r.gap), _fmt(r.witness_ratio),
            "true" if r.passed else "false",
        ]))
    _atomic_write(path, "\n".join(lines) + "\n")


def report_json_dict(report: SweepReport, ctx: PrecisionContext):
    rows = []
    for r in sorted(report.rows, key=lambda r: (r.n, r.k, r.theorem)):
        rows.append({
            "n": r.n, "k": r.k, "theorem": r.theorem, "weight": r.weight,
            "theorem_lower": ctx.dec(r.theorem_lower),
            "value_lower": ctx.dec(r.value_lower),
            "value_upper": ctx.dec(r.value_upper),
            "gap": ctx.dec(r.gap),
            "witness_ratio": ctx.dec(r.witness_ratio),
            "pass": r.passed,
            "chain_ok": r.chain_ok,
            "proof_bound_ok": r.proof_bound_ok,
            "endpoint_lower": None if r.endpoint_lower is None else ctx.dec(r.endpoint_lower),
            "endpoint_upper": None if r.endpoint_upper is None else ctx.dec(r.endpoint_upper),
        })
    return {
        "rows": rows,
        "skipped": report.skipped,
        "constants": None if report.constants is None else report.constants.to_json_dict(ctx),
        "metadata": report.metadata,
    }


def emit_json(report: SweepReport, path, ctx: PrecisionContext):
    _atomic_write(path, json.dumps(report_json_dict(report, ctx), indent=2) + "\n")
