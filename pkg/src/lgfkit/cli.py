"""``lgfkit`` command line: precompute | eval | verify | export-pack.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from .stencils import MEHR_IDS, SPLIT_IDS, STENCIL_IDS, get_stencil

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _positive_float(s):
    v = float(s)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s}")
    return v


def _nonneg_int(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lgfkit", description="Lattice Green's functions for split and "
                "Mehrstellen Laplacian stencils.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pc = sub.add_parser("precompute", help="build a symmetry-reduced free-space table")
    pc.add_argument("--stencil", required=True, choices=STENCIL_IDS)
    pc.add_argument("--dim", type=int, choices=(2, 3), default=3)
    pc.add_argument("--extent", type=_nonneg_int, required=True)
    pc.add_argument("--sphere", type=_positive_float, default=None,
                    help="only fill tuples with |n| below this radius")
    pc.add_argument("--eps-a", type=_positive_float, default=1e-15)
    pc.add_argument("--eps-r", type=_positive_float, default=1e-15)
    pc.add_argument("--J", type=int, default=10)
    pc.add_argument("--out", required=True)
    pc.add_argument("--csv", default=None, help="also write a CSV export")
    pc.add_argument("--no-stamp", action="store_true", help="write a zero timestamp")
    pc.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                    help="parallelism cap (the table build is a single vectorised pass)")

    ev = sub.add_parser("eval", help="evaluate kernels at given indices")
    ev.add_argument("--stencil", required=True, choices=STENCIL_IDS)
    mode = ev.add_mutually_exclusive_group(required=True)
    mode.add_argument("--axial", action="store_true")
    mode.add_argument("--free3d", action="store_true")
    mode.add_argument("--free2d", action="store_true")
    ev.add_argument("--n", type=int, nargs="+", help="index (one value for --axial)")
    ev.add_argument("--batch", default=None, help="file with one index tuple per line")
    ev.add_argument("--c", type=float, default=None, help="axial shift c >= 0")
    ev.add_argument("--k2", type=float, default=None, help="transverse wavenumber")
    ev.add_argument("--k3", type=float, default=None, help="transverse wavenumber")
    ev.add_argument("--y2", type=float, default=None, help="sin^2(k2/2)")
    ev.add_argument("--y3", type=float, default=None, help="sin^2(k3/2)")
    ev.add_argument("--small-c-precise", action="store_true")
    ev.add_argument("--eps-a", type=_positive_float, default=1e-15)
    ev.add_argument("--eps-r", type=_positive_float, default=1e-15)
    ev.add_argument("--J", type=int, default=10)

    vf = sub.add_parser("verify", help="run a verification suite and print a JSON report")
    vf.add_argument("suite", choices=("residual3", "residual1", "seams", "oracle", "convergence"))
    vf.add_argument("--N", type=int, nargs="+", default=None, help="grid sizes (residual1)")
    vf.add_argument("--stencils", nargs="+", choices=STENCIL_IDS, default=None)
    vf.add_argument("--extent", type=int, default=None, help="table extent (residual3)")
    vf.add_argument("--region", type=int, default=None, help="residual region (residual3)")
    vf.add_argument("--samples", type=int, default=None)
    vf.add_argument("--seed", type=int, default=None)
    vf.add_argument("--out", default=None, help="write the report here as well")

    ex = sub.add_parser("export-pack", help="write an expansion or Taylor pack as JSON")
    ex.add_argument("--stencil", required=True, choices=SPLIT_IDS)
    ex.add_argument("--kind", choices=("expansion", "taylor"), default="expansion")
    ex.add_argument("--J", type=int, default=10)
    ex.add_argument("--n-max", type=int, default=22)
    ex.add_argument("--eps-a", type=_positive_float, default=1e-15)
    ex.add_argument("--eps-r", type=_positive_float, default=1e-15)
    ex.add_argument("--out", default=None)
    return p


# ---------------------------------------------------------------------------

def cmd_precompute(args) -> int:
    from .free3d import IEvaluator, build_table
    from .series import build_expansion_pack

    st = get_stencil(args.stencil)
    if not st.is_split:
        raise UsageError(f"{args.stencil}: free-space Mehrstellen tables are out of scope "
                         "(no expansion of the Mehrstellen symbol is provided for unbounded "
                         "domains); use the axial evaluator for one-unbounded problems")
    if args.J < 1:
        raise UsageError("--J must be at least 1")
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    t0 = time.perf_counter()
    pack = build_expansion_pack(st, J=args.J, n_max=max(args.extent, 1),
                                eps_a=args.eps_a, eps_r=args.eps_r, with_tails=True)
    table = build_table(IEvaluator(st, pack), args.extent, args.dim, args.sphere)
    table.write(args.out, stamp=not args.no_stamp)
    if args.csv:
        table.write_csv(args.csv)
    wall = time.perf_counter() - t0
    print(f"wrote {args.out}: {table.values.size} entries, N_evals = {table.evaluations}, "
          f"wall time = {wall:.3f} s")
    return EXIT_OK


def _read_batch(path, width):
    rows = []
    for ln, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        try:
            vals = [int(x) for x in line.split()]
        except ValueError:
            raise UsageError(f"{path}:{ln}: expected integers") from None
        if len(vals) != width:
            raise UsageError(f"{path}:{ln}: expected {width} indices")
        rows.append(tuple(vals))
    return rows


def cmd_eval(args) -> int:
    width = 1 if args.axial else 3 if args.free3d else 2
    if (args.n is None) == (args.batch is None):
        raise UsageError("give exactly one of --n or --batch")
    rows = _read_batch(args.batch, width) if args.batch else [tuple(args.n)]
    if any(len(r) != width for r in rows):
        raise UsageError(f"--n expects {width} value(s)")
    st = get_stencil(args.stencil)
    if args.axial:
        vals = _eval_axial(args, st, [r[0] for r in rows])
    else:
        if not st.is_split:
            raise UsageError(f"{args.stencil}: free-space evaluation is out of scope for "
                             "Mehrstellen stencils")
        from .free3d import IEvaluator, lgf2_batch, lgf3_batch
        from .series import build_expansion_pack

        top = max(max(abs(v) for v in r) for r in rows)
        pack = build_expansion_pack(st, J=args.J, n_max=max(top, 22), eps_a=args.eps_a,
                                    eps_r=args.eps_r, with_tails=True)
        ev = IEvaluator(st, pack)
        vals = (lgf3_batch if args.free3d else lgf2_batch)(ev, rows)
    for v in vals:
        print(f"{float(v):.17g}")
    return EXIT_OK


def _eval_axial(args, st, ns):
    from .axial import axial_kernel
    from .stencils import split_symbol

    ker = axial_kernel(st, args.small_c_precise)
    have_k = args.k2 is not None or args.k3 is not None
    have_y = args.y2 is not None or args.y3 is not None
    if sum([args.c is not None, have_k, have_y]) != 1:
        raise UsageError("give exactly one of --c, --k2/--k3 or --y2/--y3")
    if have_k:
        k2, k3 = args.k2 or 0.0, args.k3 or 0.0
    if st.is_split:
        if have_y:
            raise UsageError("split stencils take --c or --k2/--k3")
        c = args.c if args.c is not None else float(np.sum(split_symbol(st, np.array([k2, k3]))))
        if not (0 <= c <= ker.c_max):
            raise UsageError(f"c = {c} outside [0, {ker.c_max}]")
        return ker.eval(ns, c)
    if args.c is not None:
        raise UsageError("Mehrstellen stencils take --k2/--k3 or --y2/--y3")
    if have_k:
        y2, y3 = math.sin(0.5 * k2) ** 2, math.sin(0.5 * k3) ** 2
    else:
        y2, y3 = args.y2 or 0.0, args.y3 or 0.0
    if not (0 <= y2 <= 1 and 0 <= y3 <= 1):
        raise UsageError("y2, y3 must lie in [0, 1]")
    return ker.eval(ns, y2, y3)


def cmd_verify(args) -> int:
    from .verify import report_json, run_suite

    kw = {}
    if args.N is not None:
        if args.suite != "residual1":
            raise UsageError("--N applies to residual1")
        kw["Ns"] = tuple(args.N)
    if args.stencils is not None:
        if args.suite not in ("residual1", "residual3"):
            raise UsageError("--stencils applies to residual1 and residual3")
        if args.suite == "residual3" and any(s in MEHR_IDS for s in args.stencils):
            raise UsageError("residual3 covers split stencils only")
        kw["stencils"] = tuple(args.stencils)
    for key in ("extent", "region"):
        if getattr(args, key) is not None:
            if args.suite != "residual3":
                raise UsageError(f"--{key} applies to residual3")
            kw[key] = getattr(args, key)
    for key in ("samples", "seed"):
        if getattr(args, key) is not None:
            if args.suite != "oracle":
                raise UsageError(f"--{key} applies to oracle")
            kw[key] = getattr(args, key)
    report = run_suite(args.suite, **kw)
    text = report_json(report)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    if not report["passed"]:
        for c in report["checks"]:
            if not c["passed"]:
                print(f"FAILED: {c['name']}: {c['value']:.3e} > {c['threshold']:.3e}",
                      file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_export_pack(args) -> int:
    st = get_stencil(args.stencil)
    if args.kind == "expansion":
        from .series import build_expansion_pack

        text = build_expansion_pack(st, J=args.J, n_max=args.n_max, eps_a=args.eps_a,
                                    eps_r=args.eps_r, with_tails=True).to_json()
    else:
        from .axial import axial_kernel

        ker = axial_kernel(st)
        if ker.c_star is None:
            raise UsageError(f"{args.stencil} has no repeated root; no Taylor pack exists")
        text = ker.taylor.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


_COMMANDS = {"precompute": cmd_precompute, "eval": cmd_eval, "verify": cmd_verify,
             "export-pack": cmd_export_pack}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"lgfkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, IndexError, OSError) as exc:
        print(f"lgfkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
