"""Batch experiment front end.

Subcommands: analyze, polarize, construct, simulate, evolve,
probe-conjectures.  Every run echoes its resolved configuration into the
output file, and with --no-timestamp two runs of the same command are
byte-identical.  Exit codes: 0 success, 2 configuration or input error,
3 size/depth cap exceeded.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys

import numpy as np

from . import jsonio
from .errors import (
    BadGridError,
    MacPolarError,
    ParseError,
    TooDeepError,
    TooLargeError,
)
from .linear_mac import (
    EXTREMAL_TOL,
    LinearComboMac,
    binary2_evolve,
    binary2_state,
    total_loss_predict,
)
from .mac import DEFAULT_MERGE_TOL, DiscreteMac
from .polarize import (
    MAX_BRANCH_OUTPUTS,
    build_code,
    direction_stats,
    iter_branch_channels,
    martingale_report,
)
from .codec import run_trials
from .subspace import (
    consistency_check,
    enumerate_subspaces,
    orthogonal_passage_check,
)


def _users_str(users) -> str:
    return ";".join(str(u) for u in users)


def _subsets(m: int):
    out = []
    for mask in range(1, 2 ** m):
        out.append(tuple(k for k in range(1, m + 1) if mask >> (k - 1) & 1))
    return out


def _as_explicit(channel) -> DiscreteMac:
    if isinstance(channel, LinearComboMac):
        return channel.to_explicit()
    return channel


def _config_echo(args, fields) -> dict:
    return {f: getattr(args, f) for f in fields}


# -- subcommands ------------------------------------------------------------------

def cmd_analyze(args) -> int:
    channel = jsonio.load_channel(args.channel)
    m = channel.m
    info = {s: channel.mutual_info(s) for s in _subsets(m)}
    full = tuple(range(1, m + 1))
    rows = [("mutual_info", _users_str(s), info[s], "", "") for s in _subsets(m)]
    rows.append(("sum_capacity", _users_str(full), info[full], "", ""))
    print(f"channel: q={channel.q} m={m} ({type(channel).__name__})")
    for s in _subsets(m):
        print(f"  I[{{{','.join(map(str, s))}}}] = {info[s]:.9f}")
    print(f"  sum capacity = {info[full]:.9f}")
    if m == 2:
        i1, i2, i12 = info[(1,)], info[(2,)], info[(1, 2)]
        walk = [(0.0, 0.0), (i1, 0.0), (i1, i12 - i1), (i12 - i2, i2), (0.0, i2)]
        seen = []
        for p in walk:
            if not any(abs(p[0] - x) < 1e-12 and abs(p[1] - y) < 1e-12
                       for x, y in seen):
                seen.append(p)
        dom = [(i1, i12 - i1), (i12 - i2, i2)]
        if abs(dom[0][0] - dom[1][0]) < 1e-12 and abs(dom[0][1] - dom[1][1]) < 1e-12:
            dom = dom[:1]
        for x, y in seen:
            rows.append(("vertex", "", "", x, y))
        for x, y in dom:
            rows.append(("dominant_face", "", "", x, y))
        print(f"  region vertices: {seen}")
        print(f"  dominant face: {dom}")
    if args.out:
        jsonio.write_csv(args.out, ("record", "users", "value", "r1", "r2"), rows,
                         config=_config_echo(args, ("channel", "out")),
                         timestamp=not args.no_timestamp)
    return 0


def cmd_polarize(args) -> int:
    channel = _as_explicit(jsonio.load_channel(args.channel))
    report = martingale_report(channel, args.l, merge_tol=args.merge_tol,
                               max_outputs=args.max_outputs)
    rows = []
    for lvl in report.levels:
        for j, s in enumerate(report.subsets):
            rows.append(("level_avg", lvl, "", _users_str(s), "",
                         report.averages[lvl][j], ""))
    for sig, ch in iter_branch_channels(channel, args.l, merge_tol=args.merge_tol,
                                        max_outputs=args.max_outputs):
        rows.append(("branch_capacity", args.l, sig, "", "", ch.sum_capacity(), ""))
        for st in direction_stats(ch):
            rows.append(("branch_direction", args.l, sig, "",
                         _users_str(st.alpha), st.i, st.z))
    print(f"levels 0..{args.l}: full-set average constant: "
          f"{report.full_set_constant}; strict subsets non-increasing: "
          f"{report.strict_non_increasing}")
    if args.out:
        jsonio.write_csv(
            args.out,
            ("record", "level", "sig", "users", "direction", "i", "z"), rows,
            config=_config_echo(args, ("channel", "l", "merge_tol",
                                       "max_outputs", "out")),
            timestamp=not args.no_timestamp)
    return 0


def cmd_construct(args) -> int:
    channel = _as_explicit(jsonio.load_channel(args.channel))
    spec = build_code(channel, args.l, args.eps, args.z_budget,
                      merge_tol=args.merge_tol, max_outputs=args.max_outputs)
    spec.check()
    if args.out:
        jsonio.save_codespec(args.out, spec)
    print(f"N = {spec.block_length}, |good set| = {spec.good_count}")
    print(f"sum rate R = {spec.sum_rate:.9f}")
    for k, rk in enumerate(spec.rate_vector, start=1):
        print(f"  R_{k} = {rk:.9f}")
    print(f"union bound on block error = {spec.union_bound:.6e}")
    return 0


def cmd_simulate(args) -> int:
    spec = jsonio.load_codespec(args.codespec)
    channel = _as_explicit(jsonio.load_channel(args.channel))
    report = run_trials(spec, channel, args.trials, args.seed)
    print(json.dumps(report.to_dict(), sort_keys=True))
    if args.out:
        jsonio.write_csv(args.out, report.CSV_COLUMNS, [report.csv_row()],
                         config=_config_echo(args, ("codespec", "channel",
                                                    "trials", "seed", "out")),
                         timestamp=not args.no_timestamp)
    return 0


def _parse_mode(mode: str):
    if mode == "enumerate":
        return "enumerate", None
    if mode.startswith("sample:"):
        n = int(mode.split(":", 1)[1])
        if n < 1:
            raise ValueError("sample path count must be >= 1")
        return "sample", n
    raise ValueError(f"bad --mode {mode!r}; use enumerate or sample:N")


GENERIC_EVOLVE_CAP = 12


def cmd_evolve(args) -> int:
    channel = jsonio.load_channel(args.channel)
    if not isinstance(channel, LinearComboMac):
        raise ParseError("evolve needs a linear-combination channel")
    mode, n_paths = _parse_mode(args.mode)
    config = _config_echo(args, ("channel", "l", "mode", "seed", "out"))
    if channel.q == 2 and channel.m == 2:
        state = binary2_state(channel)
        rep = binary2_evolve(state, args.l, mode=mode,
                             n_paths=n_paths or 1000, seed=args.seed)
        predicted = total_loss_predict(state)
        cols = ["level", "p0", "p1", "p2", "p3", "p4", "i1", "i2", "i_sum",
                "extremal_fraction", "pred_total_loss"]
        if mode == "sample":
            cols += [f"se_p{k}" for k in range(5)]
        rows = []
        for lv in rep.levels:
            row = [lv.level, *lv.p_avg, lv.i1, lv.i2, lv.i_sum,
                   lv.extremal_fraction, int(predicted)]
            if mode == "sample":
                row += list(lv.stderr)
            rows.append(tuple(row))
        final = rep.final
        print(f"total loss predicted: {predicted}; "
              f"p3 average at level {args.l}: {final.p_avg[3]:.6e}; "
              f"extremal fraction: {final.extremal_fraction:.4f}")
        if args.out:
            jsonio.write_csv(args.out, cols, rows, config=config,
                             timestamp=not args.no_timestamp)
        return 0
    if mode != "enumerate":
        raise ValueError("sample mode is only available for q=2, m=2")
    if args.l > GENERIC_EVOLVE_CAP:
        raise TooDeepError(f"generic evolve capped at depth {GENERIC_EVOLVE_CAP}")
    combos = [channel]
    subsets = _subsets(channel.m)
    rows = []
    for lvl in range(args.l + 1):
        extremal = float(np.mean([max(w for w, _ in c.terms) >= 1 - EXTREMAL_TOL
                                  for c in combos]))
        for s in subsets:
            avg = float(np.mean([c.mutual_info(s) for c in combos]))
            rows.append((lvl, _users_str(s), avg, extremal))
        if lvl < args.l:
            combos = [c2 for c in combos for c2 in (c.minus(), c.plus())]
    print(f"evolved to depth {args.l}: {len(combos)} branch channels")
    if args.out:
        jsonio.write_csv(args.out, ("level", "users", "i_avg",
                                    "extremal_fraction"), rows,
                         config=config, timestamp=not args.no_timestamp)
    return 0


def _parse_grid(spec: str):
    """Grid of 5-component states: 'step:K' for the lattice with denominator
    K, or a path to a JSON list of states."""
    if spec.startswith("step:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise BadGridError(f"bad grid spec {spec!r}") from exc
        if k < 1:
            raise BadGridError("grid step denominator must be >= 1")
        states = []
        for parts in itertools.product(range(k + 1), repeat=4):
            rest = k - sum(parts)
            if rest >= 0:
                states.append(tuple(p / k for p in (*parts, rest)))
        return states
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise BadGridError(f"cannot read grid {spec!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BadGridError(f"{spec}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, list) or not data:
        raise BadGridError("grid file must be a non-empty JSON list of states")
    return [tuple(float(x) for x in row) for row in data]


def cmd_probe_conjectures(args) -> int:
    ran_any = False
    rows = []
    print("probe results are numerical evidence, not proof")
    if args.grid:
        ran_any = True
        states = _parse_grid(args.grid)
        if not states:
            raise BadGridError("grid is empty")
        hits = [s for s in states if s[3] > max(s[1], s[2])]
        if not hits:
            print("total-loss probe: no instances with the diagonal component "
                  "dominant in grid")
        else:
            worst = None
            for s in hits:
                rep = binary2_evolve(np.array(s), args.l, mode="enumerate")
                p3 = rep.final.p_avg[3]
                rows.append(("total_loss", json.dumps(s), args.l, p3))
                if worst is None or p3 < worst[1]:
                    worst = (s, p3)
            print(f"total-loss probe: {len(hits)} states with dominant diagonal "
                  f"component; min averaged p3 at depth {args.l}: {worst[1]:.6e} "
                  f"(state {worst[0]})")
    if args.q and args.m and args.users:
        ran_any = True
        users = tuple(int(u) for u in args.users.split(","))
        all_subs = []
        for d in range(args.m + 1):
            all_subs.extend(enumerate_subspaces(args.m, d, args.q))
        counterexamples = 0
        consistent_with_witness = 0
        scanned = 0
        for size in range(1, args.max_family + 1):
            for family in itertools.combinations(all_subs, size):
                scanned += 1
                if not consistency_check(family, users):
                    continue
                witness = orthogonal_passage_check(family, users)
                if witness is None:
                    counterexamples += 1
                    rows.append(("witness_gap",
                                 json.dumps([s.basis.data.tolist() for s in family]),
                                 "", ""))
                else:
                    consistent_with_witness += 1
        print(f"witness probe: scanned {scanned} families over GF({args.q})^{args.m} "
              f"w.r.t. users {users}: {consistent_with_witness} consistent families "
              f"have a witness, {counterexamples} lack one")
    if not ran_any:
        raise BadGridError("nothing to probe: pass --grid and/or --q/--m/--users")
    if args.out:
        jsonio.write_csv(args.out, ("probe", "instance", "depth", "value"), rows,
                         config=_config_echo(args, ("grid", "l", "q", "m",
                                                    "users", "max_family", "out")),
                         timestamp=not args.no_timestamp)
    return 0


# -- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macpolar",
        description="Polar coding experiments for multiple access channels "
                    "over prime fields.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, out=True):
        if out:
            p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--no-timestamp", action="store_true",
                       help="omit the timestamp header from outputs")

    p = sub.add_parser("analyze", help="rate bounds of a channel")
    p.add_argument("--channel", required=True)
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("polarize", help="per-level averages and branch stats")
    p.add_argument("--channel", required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--merge-tol", type=float, default=DEFAULT_MERGE_TOL)
    p.add_argument("--max-outputs", type=int, default=MAX_BRANCH_OUTPUTS)
    common(p)
    p.set_defaults(func=cmd_polarize)

    p = sub.add_parser("construct", help="build a code spec")
    p.add_argument("--channel", required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--z-budget", type=float, required=True)
    p.add_argument("--merge-tol", type=float, default=DEFAULT_MERGE_TOL)
    p.add_argument("--max-outputs", type=int, default=MAX_BRANCH_OUTPUTS)
    common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("simulate", help="Monte Carlo block-error run")
    p.add_argument("--codespec", required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evolve", help="subspace-weight evolution of a "
                                      "linear-combination channel")
    p.add_argument("--channel", required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--mode", default="enumerate",
                   help="enumerate or sample:N")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("probe-conjectures",
                       help="numeric probes of the open questions")
    p.add_argument("--grid", default=None,
                   help="total-loss probe grid: step:K or a JSON file")
    p.add_argument("--l", type=int, default=14)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--users", default=None,
                   help="comma-separated user subset for the witness probe")
    p.add_argument("--max-family", type=int, default=2)
    common(p)
    p.set_defaults(func=cmd_probe_conjectures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TooLargeError, TooDeepError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (MacPolarError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
