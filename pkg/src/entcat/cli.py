"""Command-line entry point: ``entcat <subcommand> [options]``.

Exit status is 0 on success, 2 for malformed input and 3 when a numerical
precondition fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import capacity, catalysim, channels, convertibility, linalg, measures, nodedist, noniid
from .errors import InputError, InvalidArgument, PreconditionError

EXIT_INPUT = 2
EXIT_PRECONDITION = 3


def _read_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidArgument(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _g(x: float) -> str:
    return f"{x:.6g}"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _rows_to_json(header, rows) -> str:
    return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"


def _table(args, header, rows) -> str:
    return _rows_to_json(header, rows) if args.format == "json" else _csv(header, rows)


# ---------------------------------------------------------------------------
# subcommands


def cmd_measures(args) -> str:
    rho = linalg.from_json_dict(_read_json(args.state))
    out = {"dims": list(rho.dims), "S_total": measures.von_neumann_entropy(rho)}
    if len(rho.dims) >= 2:
        side = [args.cut]
        out["S"] = measures.von_neumann_entropy(linalg.partial_trace(rho, side))
        out["E_N"] = measures.log_negativity(rho, args.cut)
        rest = [k for k in range(len(rho.dims)) if k != args.cut]
        out["I"] = measures.mutual_information(rho, side, rest)
        if rho.dims == (2, 2):
            out["E_f"] = measures.eof_two_qubit(rho)
    else:
        out["S"] = out["S_total"]
    return json.dumps(out, indent=2) + "\n"


def cmd_fig2(args) -> str:
    if args.n_max < 1:
        raise InvalidArgument("--n-max must be at least 1")
    rows = capacity.fig2_curves(range(1, args.n_max + 1))
    header = ["n", "solid_pmax", "dashed_pmax"]
    return _table(args, header, [(n, f"{s:.4f}", f"{d:.4f}") for n, s, d in rows])


def _p_grid(args) -> list[float]:
    if args.p:
        grid = [float(x) for x in args.p.split(",")]
    else:
        grid = list(np.linspace(0.5, 1.0, args.points))
    if any(not 0.5 <= p <= 1 for p in grid):
        raise InvalidArgument("p grid must lie in [1/2, 1]")
    return grid


def cmd_fig3(args) -> str:
    rows = []
    for p in _p_grid(args):
        ef = measures.eof_bell_diagonal(p)
        mc = measures.squashed_ub_mc(measures.bell_mixture_71(p), args.samples, seed=args.seed, threads=args.threads)
        rows.append((_g(p), _g(ef), _g(mc)))
    return _table(args, ["p", "E_f", "E_sq_MC"], rows)


def cmd_table1(args) -> str:
    rows = []
    for d in range(3, 9):
        p = capacity.adc_transmit_range(d, args.m)
        rows.append((d, f"{p:.2f}", f"{p:.4f}"))
    return _table(args, ["d", "p_max", "p_star"], rows)


def cmd_capacity(args) -> str:
    ch = channels.from_json_dict(_read_json(args.channel))
    rep = capacity.capacity_report(ch, samples=args.samples if args.mc else None, seed=args.seed, threads=args.threads)
    return rep.to_json() + "\n"


def cmd_noniid(args) -> str:
    seq = noniid.build_sequence(args.f, args.eps, args.u)
    if args.format == "json":
        total, lower, upper = noniid.entropy_budget(seq, args.n)
        return json.dumps({
            "f": seq.f, "eps": seq.eps, "u": seq.u, "delta": seq.delta,
            "N": str(seq.N), "log2_N": seq.log2_N, "n": args.n,
            "P_f": noniid.singlet_probability(seq, args.n),
            "entropy_sum": total, "lower": lower, "upper": upper,
            "count": noniid.catalytic_singlet_count(seq, args.n),
        }, indent=2) + "\n"
    return noniid.prefix_csv(seq, args.n, args.stride)


def cmd_node(args) -> str:
    if args.format == "json":
        v = nodedist.feasibility(args.alpha, args.l)
        return json.dumps({
            "alpha": args.alpha,
            "l": args.l,
            "verdict": v.value,
            "analytic_verdict": nodedist.analytic_feasibility(args.alpha, args.l).value,
            "direct_link_entangled": nodedist.link_entangling(args.alpha, args.l),
            "half_link_entangled": nodedist.link_entangling(args.alpha, args.l / 2),
        }, indent=2) + "\n"
    return nodedist.det_grid_csv(args.grid, args.grid)


def cmd_catalysim(args) -> str:
    if args.preset:
        sc = catalysim.preset_scenario(args.preset, args.n, args.eps)
    elif args.scenario:
        sc = catalysim.load_scenario(_read_json(args.scenario))
    else:
        raise InvalidArgument("give a scenario file or --preset")
    return catalysim.scenario_report_json(catalysim.run_scenario(sc)) + "\n"


def cmd_net(args) -> str:
    net = convertibility.build_eps_net(args.d, args.eps)
    return json.dumps(net.to_json_dict()) + "\n"


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--seed", type=int, default=measures.DEFAULT_SEED)
    common.add_argument("--samples", type=int, default=10**5)
    common.add_argument("--threads", type=int, default=1)

    p = argparse.ArgumentParser(prog="entcat", description="Entanglement catalysis toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("measures", parents=[common], help="entropies and entanglement of a state file")
    s.add_argument("state")
    s.add_argument("--cut", type=int, default=0, help="subsystem on Alice's side")
    s.set_defaults(func=cmd_measures, default_format="json")

    s = sub.add_parser("fig2", parents=[common], help="Pauli-channel transmit and converse thresholds")
    s.add_argument("--n-max", type=int, default=50)
    s.set_defaults(func=cmd_fig2, default_format="csv")

    s = sub.add_parser("fig3", parents=[common], help="E_f and Monte-Carlo squashed bound for the dephased Bell pair")
    s.add_argument("--p", help="comma-separated p values (default: uniform grid)")
    s.add_argument("--points", type=int, default=21)
    s.set_defaults(func=cmd_fig3, default_format="csv")

    s = sub.add_parser("table1", parents=[common], help="amplitude-damping transmit thresholds for d=3..8")
    s.add_argument("--m", type=int, default=1)
    s.set_defaults(func=cmd_table1, default_format="csv")

    s = sub.add_parser("capacity", parents=[common], help="capacity bracket for a channel file")
    s.add_argument("channel")
    s.add_argument("--mc", action="store_true", help="include the Monte-Carlo squashed converse")
    s.set_defaults(func=cmd_capacity, default_format="json")

    s = sub.add_parser("noniid", parents=[common], help="non-identical sequence certificate")
    s.add_argument("--f", type=float, default=0.9)
    s.add_argument("--eps", type=float, default=0.01)
    s.add_argument("--u", type=float, default=1.0)
    s.add_argument("--n", type=int, default=10)
    s.add_argument("--stride", type=int, default=1)
    s.set_defaults(func=cmd_noniid, default_format="csv")

    s = sub.add_parser("node", parents=[common], help="intermediate-node distribution analysis")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--l", type=float, default=math.log(3.0))
    s.add_argument("--grid", type=int, default=200)
    s.set_defaults(func=cmd_node, default_format="csv")

    s = sub.add_parser("catalysim", parents=[common], help="simulate the single-copy catalytic protocol")
    s.add_argument("scenario", nargs="?")
    s.add_argument("--preset", choices=("identity", "permute_depolarize"))
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--eps", type=float, default=0.1)
    s.set_defaults(func=cmd_catalysim, default_format="json")

    s = sub.add_parser("net", parents=[common], help="epsilon-net of Schmidt vectors")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--eps", type=float, default=0.5)
    s.set_defaults(func=cmd_net, default_format="json")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        if args.samples < 1 or args.threads < 1:
            raise InvalidArgument("--samples and --threads must be positive")
        text = args.func(args)
    except InputError as exc:
        print(f"entcat: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"entcat: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
