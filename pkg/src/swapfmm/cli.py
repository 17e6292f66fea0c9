"""Command line interface: ``bench``, ``verify`` and ``translate``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench as _bench
from .errors import SwapFMMError
from .kernels import KernelConfig, padded_rows
from .operators import max_order, operator_data, pack
from .pipeline import l2l_arrays, m2l_arrays, m2m_arrays
from .solids import Solid, read_solids, write_solids
from .verify import run_all


def _reps(text):
    if text == "auto":
        return text
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("reps must be >= 1 or 'auto'")
    return n


def _config(args) -> KernelConfig:
    d = KernelConfig.default(args.precision)
    return KernelConfig(args.mu or d.mu, args.nu or d.nu, args.precision)


def _add_kernel_flags(p):
    p.add_argument("--precision", choices=("single", "double"), default="double")
    p.add_argument("--mu", type=int, default=None, help="block height (even)")
    p.add_argument("--nu", type=int, default=None, help="batch width")
    p.add_argument("--seed", type=int, default=0)


def _fmt(a):
    return " ".join(f"{v:.17g}" for v in np.ravel(a))


def cmd_bench(args) -> int:
    cfg = _config(args)
    cap = max_order(cfg.precision)
    if not 1 <= args.pmin <= args.pmax:
        raise SwapFMMError(f"need 1 <= pmin <= pmax, got {args.pmin}, {args.pmax}")
    if args.pmax > cap:
        raise SwapFMMError(f"pmax {args.pmax} exceeds the {cfg.precision} limit of {cap}")
    if args.batch is not None and args.batch < 1:
        raise SwapFMMError("batch must be >= 1")
    records = _bench.run_bench(
        args.pmin, args.pmax, args.batch, args.reps, args.kernel, args.seed, cfg
    )
    if args.csv and args.csv != "-":
        with open(args.csv, "w", newline="") as fh:
            _bench.write_csv(records, fh)
    else:
        _bench.write_csv(records, sys.stdout)
    return 0


def dump_tables(order, cfg, out=None):
    out = out or sys.stdout
    ops = operator_data(order + 1, cfg)
    mu = cfg.mu
    n = order
    F, G = ops.F[n], ops.G[n]
    print(f"# n = {n}, mu = {mu}, padded rows = {padded_rows(n + 1, mu)}", file=out)
    print(f"F_{n} =", file=out)
    for row in F:
        print("  " + _fmt(row), file=out)
    print(f"G_{n} =", file=out)
    for row in G:
        print("  " + _fmt(row), file=out)
    pf, pg = n % 2, (n + 1) % 2
    for name, A, p in (("F", F, pf), ("G", G, pg), ("F^T", F.T, pf), ("G^T", G.T, pg)):
        print(f"packed {name}_{n} (parity {p}): {_fmt(pack(A, n, mu, p))}", file=out)


def cmd_verify(args) -> int:
    cfg = _config(args)
    if args.dump_tables:
        dump_tables(args.order, cfg)
        return 0
    cap = max_order(cfg.precision)
    if args.pmax > cap:
        raise SwapFMMError(
            f"order {args.pmax} too large: {cfg.precision} precision supports P <= {cap}"
        )
    results = run_all(args.pmax, cfg, args.seed)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("all suites passed" if ok else "verification FAILED")
    return 0 if ok else 1


_OPS = {"m2l": (m2l_arrays, "L"), "m2m": (m2m_arrays, "M"), "l2l": (l2l_arrays, "L")}


def cmd_translate(args) -> int:
    cfg = _config(args)
    if args.input == "-":
        solids = read_solids(sys.stdin, cfg.dtype)
    else:
        with open(args.input) as fh:
            solids = read_solids(fh, cfg.dtype)
    fn, kind = _OPS[args.op]
    results = []
    for s in solids:
        p_out = args.pout or s.order
        ops = operator_data(max(s.order, p_out), cfg)
        data = fn(ops, s.data, [args.shift], p_out)[0]
        results.append(Solid(p_out, kind, data))
    if args.output == "-":
        write_solids(results, sys.stdout)
    else:
        with open(args.output, "w") as fh:
            write_solids(results, fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swapfmm", description="Batched solid-harmonic translations."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="time fast and naive M2L per order, CSV output")
    b.add_argument("--pmin", type=int, default=1)
    b.add_argument("--pmax", type=int, default=50)
    b.add_argument("--batch", type=int, default=None, help="translations per call (default nu)")
    b.add_argument("--reps", type=_reps, default="auto", help="repetitions or 'auto'")
    b.add_argument("--kernel", choices=("optimized", "naive", "both"), default="both")
    b.add_argument("--csv", default=None, help="output path (default stdout)")
    _add_kernel_flags(b)
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="run the oracle and invariant suites")
    v.add_argument("--pmax", type=int, default=20)
    v.add_argument("--dump-tables", action="store_true", help="print F_n, G_n and packed streams")
    v.add_argument("--order", type=int, default=1, help="row n for --dump-tables")
    _add_kernel_flags(v)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("translate", help="apply M2L, M2M or L2L to solids in a text file")
    t.add_argument("--op", choices=tuple(_OPS), required=True)
    t.add_argument("--shift", type=float, nargs=3, required=True, metavar=("X", "Y", "Z"))
    t.add_argument("--pout", type=int, default=None, help="output order (default input order)")
    t.add_argument("--input", "-i", default="-")
    t.add_argument("--output", "-o", default="-")
    _add_kernel_flags(t)
    t.set_defaults(func=cmd_translate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SwapFMMError, ValueError, OSError) as exc:
        print(f"swapfmm {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
