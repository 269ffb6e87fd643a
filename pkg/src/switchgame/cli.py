"""Command-line front end.

Exit codes: 0 success, 2 bad input or usage, 3 solver failure or resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import bounds as bnd
from .core import (
    PiecewiseLinearCurve,
    ResourceLimitError,
    SolveReport,
    SolverFailure,
    SwitchGameError,
    StructuralError,
    load_game,
    normalize,
    snap_rational,
    validate,
)
from .generalgamma import (
    load_tensor,
    membership_G_S,
    quarter_bound,
    stationary_value_G,
    static_minimax_G,
)
from .matrixgame import pure_minimax
from .staticsolve import grid_oracle, static_minimax, trace_static_curve
from .stationary import (
    AUX_CAP,
    acoe_solve,
    build_auxiliary,
    stationary_value_oracle,
    trace_value_curve,
)
from .verify import evaluate_pair_exact, simulate_play

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 2, 3


class UsageError(Exception):
    pass


# -- helpers -----------------------------------------------------------------------

def _num(x):
    if x is None:
        return None
    x = float(x)
    if np.isfinite(x):
        return x
    return "inf" if x > 0 else "-inf"


def _snap(x):
    f = snap_rational(x) if x is not None and np.isfinite(x) else None
    return None if f is None else str(f)


def _c_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    if not 0 <= lo < hi:
        raise argparse.ArgumentTypeError("need 0 <= LO < HI")
    return lo, hi


def _nonneg(text: str) -> float:
    x = float(text)
    if x < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return x


def _json_default(o):
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return _num(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, default=_json_default) + "\n"


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _load(args):
    gf = load_game(args.input)
    problems = validate(gf.game)
    if problems:
        raise StructuralError(f"{args.input}: " + "; ".join(problems))
    return gf


def _single_c(args, gf) -> float:
    c = args.c if args.c is not None else gf.c
    if c is None:
        raise UsageError("this command needs --c (or 'c' in the game file)")
    return float(c)


def _range(args, gf) -> tuple[float, float]:
    r = args.c_range if args.c_range is not None else gf.c_range
    if r is None:
        raise UsageError("this command needs --c-range LO:HI (or 'c_range' in the game file)")
    return r


def _emit(args, name: str, doc: dict, csv_text: str | None = None) -> None:
    text = _dumps(doc)
    if args.out:
        _write_atomic(Path(args.out) / f"{name}.json", text)
        if csv_text is not None:
            _write_atomic(Path(args.out) / f"{name}.csv", csv_text)
    elif args.format == "csv" and csv_text is not None:
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(text)


# -- commands ---------------------------------------------------------------------

def _oracle_value(game, c):
    if game.n**game.n * game.m**game.n > AUX_CAP:
        return None
    return stationary_value_oracle(game, c)


def cmd_solve(args) -> int:
    gf = _load(args)
    c = _single_c(args, gf)
    sol = acoe_solve(gf.game, c)
    ov = _oracle_value(gf.game, c)
    report = SolveReport(
        value=sol.gamma,
        strategy_p2=sol.p2_strategy,
        strategy_p1=sol.p1_strategy,
        method="acoe",
        c=c,
        continuation_payoffs=tuple(float(h) for h in sol.continuation),
        oracle_value=ov,
        oracle_gap=None if ov is None else abs(ov - sol.gamma),
        tolerance=args.tolerance,
    )
    doc = report.to_dict()
    doc["residual"] = sol.residual
    doc["support_signature"] = [list(s) for s in sol.support_signature]
    if report.oracle_ok is False:
        _emit(args, "solve", doc)
        raise SolverFailure(f"oracle gap {report.oracle_gap:.3g} exceeds tolerance {args.tolerance:g}")
    csv_text = _csv(["c", "value", "oracle_value", "oracle_gap"], [(c, sol.gamma, ov, report.oracle_gap)])
    _emit(args, "solve", doc, csv_text)
    return EXIT_OK


def cmd_static(args) -> int:
    gf = _load(args)
    c = _single_c(args, gf)
    res = static_minimax(gf.game, c)
    doc = res.to_dict()
    csv_text = _csv(["c", "vtilde", "method"], [(c, res.value, res.method)])
    _emit(args, "static", doc, csv_text)
    return EXIT_OK


def _thresholds(game):
    """``ubar_c`` in original units, or ``(None, reason)``."""
    try:
        norm, amap = normalize(game)
        thr = bnd.ubar_c(norm)
    except (SwitchGameError, ValueError) as exc:
        return None, str(exc)
    return float(amap.c_to_original(thr.ubar_c)), thr.note or None


def _static_table(game, static, lo, hi, samples):
    if isinstance(static, PiecewiseLinearCurve):
        cs = np.union1d(np.linspace(lo, hi, samples), [b for b in static.breakpoints if lo <= b <= hi])
        return cs, np.asarray(static(cs), dtype=float), "uniform-envelope"
    mask = (static.cs >= lo - 1e-12) & (static.cs <= hi + 1e-12)
    return static.cs[mask], static.values[mask], static.method


def cmd_curve(args) -> int:
    gf = _load(args)
    game = gf.game
    lo, hi = _range(args, gf)
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    stat = trace_value_curve(game, hi)
    if game.is_uniform:
        static = trace_static_curve(game, hi)
    else:
        # static sampling needs enough points for the shape checks
        static = trace_static_curve(game, hi, samples=max(args.samples, 16))

    bps = [b for b in stat.breakpoints if lo <= b <= hi]
    cs = np.union1d(np.linspace(lo, hi, args.samples), bps)
    seg = stat.segment_index(cs)
    stat_rows = [(c, stat(c), int(k), stat.slopes[k]) for c, k in zip(cs, seg)]
    s_cs, s_vals, method = _static_table(game, static, lo, hi, args.samples)
    static_rows = [(c, v, method) for c, v in zip(s_cs, s_vals)]

    # measured gap on the static grid, plus every stationary breakpoint for exact envelopes
    gap_cs = s_cs if not isinstance(static, PiecewiseLinearCurve) else np.union1d(s_cs, bps)
    gaps = np.asarray(static(gap_cs), dtype=float) - np.asarray(stat(gap_cs), dtype=float)
    k = int(np.argmax(gaps))
    v_bar = pure_minimax(game.A)[0]
    c_bar = bnd.empirical_c_bar(stat, v_bar)
    ub, ub_note = _thresholds(game)

    summary = {
        "name": game.name,
        "c_range": [lo, hi],
        "stationary": stat.to_dict(),
        "static": (
            static.to_dict() | {"method": method}
            if isinstance(static, PiecewiseLinearCurve)
            else {"method": method, "tag": static.tag, "samples": len(static.cs)}
        ),
        "ubar_c": _num(ub),
        "ubar_c_snapped": _snap(ub),
        "ubar_c_note": ub_note,
        "c_bar_empirical": _num(c_bar),
        "c_bar_empirical_snapped": _snap(c_bar),
        "max_gap": float(gaps[k]),
        "max_gap_at": float(gap_cs[k]),
    }
    stat_csv = _csv(["c", "v", "segment_id", "slope"], stat_rows)
    static_csv = _csv(["c", "vtilde", "method"], static_rows)
    if args.out:
        out = Path(args.out)
        _write_atomic(out / "stationary.csv", stat_csv)
        _write_atomic(out / "static.csv", static_csv)
        _write_atomic(out / "summary.json", _dumps(summary))
    elif args.format == "csv":
        sys.stdout.write(stat_csv)
    else:
        sys.stdout.write(_dumps(summary))
    return EXIT_OK


def _bound_entry(value, gap, reason, scale):
    if value is None:
        return {"value": None, "dominates": None, "reason": reason}
    v = float(value) * scale
    return {"value": v, "dominates": bool(v >= gap - 1e-7 * max(1.0, scale)), "reason": None}


def cmd_bounds(args) -> int:
    gf = _load(args)
    norm, amap = normalize(gf.game)
    ledger = bnd.build_ledger(norm)
    cb, _ = ledger.c_bar_used
    if args.c is not None or (gf.c is not None and args.c_range is None):
        cs_orig = np.array([_single_c(args, gf)])
    else:
        r = args.c_range if args.c_range is not None else gf.c_range
        if r is None:
            top = cb if cb is not None and np.isfinite(cb) and cb > 0 else 1.0
            r = (0.0, float(amap.c_to_original(1.2 * top)))
        cs_orig = np.linspace(r[0], r[1], max(args.samples, 2))
    c_top = float(max(amap.c_to_normalized(cs_orig.max()), 1e-6))
    curve = trace_value_curve(norm, c_top)
    scale = amap.a_scale
    rows = []
    for c in cs_orig:
        cn = float(amap.c_to_normalized(c))
        v = float(curve(cn))
        try:
            vt = static_minimax(norm, cn, check=False).value
        except ResourceLimitError:
            vt = None
        gap = None if vt is None else (vt - v) * scale
        g = -np.inf if gap is None else gap
        sym = ledger.symmetric_ratio(cn, v, vt) if vt is not None else None
        entries = {
            "uniform_loss": _bound_entry(ledger.uniform_loss(cn, v), g, None, scale),
            "symmetric": _bound_entry(None if sym is None else sym[0], g, "S not symmetric" if not ledger.symmetric else "static value unavailable", scale),
            "uniform_S": _bound_entry(ledger.uniform_S(cn, v), g, "S not uniform", scale),
            "loss": _bound_entry(ledger.loss(cn), g, "flattening threshold unknown", scale),
            "mixture": _bound_entry(ledger.mixture(cn), g, ledger.mixture_reason(cn), scale),
        }
        if sym is not None:
            entries["symmetric"]["ratio_at_least_half"] = sym[1]
        rows.append({
            "c": float(c),
            "v": float(amap.value_to_original(v)),
            "vtilde": None if vt is None else float(amap.value_to_original(vt)),
            "gap": gap,
            "bounds": entries,
        })

    def orig_c(x):
        return None if x is None else _num(amap.c_to_original(x))

    doc = {
        "name": gf.game.name,
        "affine_map": {"a_scale": amap.a_scale, "a_shift": amap.a_shift, "s_scale": amap.s_scale},
        "ledger_normalized": ledger.to_dict(),
        "thresholds": {
            "ubar_c": orig_c(ledger.ubar_c),
            "c_bar": orig_c(ledger.c_bar),
            "bar_c_upper": orig_c(ledger.bar_c_upper),
            "c0": orig_c(ledger.c0),
        },
        "table": rows,
    }
    csv_rows = []
    names = ["uniform_loss", "symmetric", "uniform_S", "loss", "mixture"]
    for r in rows:
        csv_rows.append([r["c"], r["v"], r["vtilde"], r["gap"]] + [r["bounds"][k]["value"] for k in names])
    _emit(args, "bounds", doc, _csv(["c", "v", "vtilde", "gap"] + names, csv_rows))
    return EXIT_OK


def cmd_classify(args) -> int:
    g = load_tensor(args.input)
    dec = membership_G_S(g.r)
    doc = {
        "name": g.name,
        "states": g.n_states,
        "rows": g.n_rows,
        "member": dec is not None,
        "decomposition": None,
        "notes": [],
        "switching_solver_applies": False,
    }
    if dec is not None:
        doc["decomposition"] = {"A": dec.A.tolist(), "S": dec.S.tolist()}
        doc["notes"] = list(dec.notes)
        doc["switching_solver_applies"] = dec.cost_model_ok
    gn, shift, scale = g.normalized()
    quarter = {"normalized_shift": shift, "normalized_scale": scale}
    try:
        st = stationary_value_G(gn.r)
        sm = static_minimax_G(gn.r)
        q = quarter_bound(gn.r, st.value, sm.value)
        quarter.update({
            "v": st.value,
            "vtilde": sm.value,
            "y_static": sm.y.tolist(),
            "gap": sm.value - st.value,
            "delta": q.delta,
            "ratio": None if st.value >= 1.0 - 1e-12 else (1.0 - sm.value) / (1.0 - st.value),
            "ratio_ok": q.ratio_ok,
            "filter_strategy": q.filter_strategy.tolist(),
            "filter_value": q.filter_value,
            "sharper_delta": q.sharper_delta,
            "sharper_ok": q.sharper_ok,
            "notes": list(q.notes),
        })
    except ResourceLimitError as exc:
        quarter["skipped"] = str(exc)
    doc["quarter"] = quarter
    _emit(args, "classify", doc)
    return EXIT_OK


def cmd_simulate(args) -> int:
    gf = _load(args)
    c = _single_c(args, gf)
    sol = acoe_solve(gf.game, c)
    exact = evaluate_pair_exact(gf.game, c, sol.p1_strategy, sol.p2_strategy)
    sim = simulate_play(gf.game, c, sol.p1_strategy, sol.p2_strategy, args.horizon, args.seed)
    doc = {"c": c, "value": sol.gamma, "exact_pair_value": exact.value} | sim.to_dict()
    doc["within_3_se"] = bool(abs(sim.empirical_mean - exact.value) <= 3 * sim.standard_error + 1e-12)
    csv_text = _csv(["c", "exact", "empirical_mean", "standard_error"], [(c, exact.value, sim.empirical_mean, sim.standard_error)])
    _emit(args, "simulate", doc, csv_text)
    return EXIT_OK


def cmd_oracle(args) -> int:
    gf = _load(args)
    game = gf.game
    c = _single_c(args, gf)
    sol = acoe_solve(game, c)
    aux = build_auxiliary(game)
    av = aux.value(c)
    ev = evaluate_pair_exact(game, c, sol.p1_strategy, sol.p2_strategy).value
    doc = {
        "c": c,
        "acoe": sol.gamma,
        "auxiliary": av,
        "pair_exact": ev,
        "stationary_spread": max(sol.gamma, av, ev) - min(sol.gamma, av, ev),
    }
    try:
        st = static_minimax(game, c, check=False)
        gv = grid_oracle(game, c, args.grid)
        doc.update({"static": st.value, "grid": gv, "grid_minus_static": gv - st.value})
    except ResourceLimitError as exc:
        doc["static_skipped"] = str(exc)
    doc["agree"] = bool(doc["stationary_spread"] <= args.tolerance)
    _emit(args, "oracle", doc)
    if not doc["agree"]:
        raise SolverFailure(f"stationary routes disagree by {doc['stationary_spread']:.3g}")
    return EXIT_OK


COMMANDS = {
    "solve": (cmd_solve, "stationary value and strategies at one c"),
    "curve": (cmd_curve, "stationary and static value curves over a c range"),
    "static": (cmd_static, "static minimax at one c"),
    "bounds": (cmd_bounds, "threshold ledger and per-c loss bounds"),
    "classify": (cmd_classify, "membership test and quarter-bound report for a tensor game"),
    "simulate": (cmd_simulate, "Monte-Carlo play of the optimal stationary pair"),
    "oracle": (cmd_oracle, "cross-check all solution routes at one c"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="switchgame", description="Repeated zero-sum games with switching costs.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--input", required=True, metavar="PATH")
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--c", type=_nonneg, metavar="NUM")
        g.add_argument("--c-range", type=_c_range, metavar="LO:HI")
        sp.add_argument("--samples", type=int, default=64, metavar="N")
        sp.add_argument("--seed", type=int, default=0, metavar="N")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", metavar="DIR")
        sp.add_argument("--tolerance", type=float, default=1e-6, metavar="NUM")
        sp.add_argument("--horizon", type=int, default=100_000, metavar="T")
        sp.add_argument("--grid", type=int, default=200, metavar="K", help="lattice resolution for the static grid oracle")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    fn = COMMANDS[args.command][0]
    try:
        return fn(args)
    except UsageError as exc:
        print(f"switchgame {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverFailure, ResourceLimitError) as exc:
        print(f"switchgame {args.command}: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (SwitchGameError, ValueError) as exc:
        print(f"switchgame {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # numerical trouble not caught by a module check
        print(f"switchgame {args.command}: solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
