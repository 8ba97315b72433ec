"""``netplan`` command-line front end."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import report
from .mappers import plan_im2col, plan_sdk, plan_vwsdk
from .model import ArraySpec, LayerSpec, MappingError, Method, validate_layer
from .netfile import load_network
from .sim import audit_cells, build_layout, program, reference_conv, render_layout, simulate

logger = logging.getLogger("netplan")


def dims(text: str) -> tuple[int, int]:
    """Parse ``AxB`` into two positive integers."""
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected AxB, got {text!r}")
    try:
        a, b = int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers in {text!r}") from None
    if a < 1 or b < 1:
        raise argparse.ArgumentTypeError(f"dimensions must be positive, got {text!r}")
    return a, b


def array_arg(text: str) -> ArraySpec:
    rows, cols = dims(text)
    return ArraySpec(rows, cols)


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _methods(flag: str) -> tuple[Method, ...]:
    return report.ALL_METHODS if flag == "all" else (Method(flag),)


def _layer_from_args(args) -> LayerSpec:
    ifm_w, ifm_h = args.ifm
    k_w, k_h = args.kernel
    return validate_layer(LayerSpec(args.name, ifm_w, ifm_h, k_w, k_h, args.ic, args.oc))


def _emit_csv(text: str, dest: str | None):
    if dest is None:
        return
    if dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text)
        logger.info("wrote %s", dest)


def cmd_plan(args) -> int:
    layer = _layer_from_args(args)
    for method in _methods(args.method):
        if method is Method.VWSDK:
            plan, trace = plan_vwsdk(layer, args.array)
        else:
            plan, trace = (plan_im2col if method is Method.IM2COL else plan_sdk)(layer, args.array), None
        print(report.plan_text(plan))
        if args.verbose and trace is not None:
            print("search trace (window: num_pw x ar x ac = cycles):")
            for e in trace.entries:
                if e.breakdown is None:
                    print(f"  {e.window}: infeasible ({e.note})")
                else:
                    b = e.breakdown
                    extra = f"  [{e.note}]" if e.note else ""
                    print(f"  {e.window}: {b.num_pw} x {b.ar_cycles} x {b.ac_cycles} = {b.total}{extra}")
        if args.dump_layout:
            print(render_layout(build_layout(layer, args.array, plan)))
        print()
    return 0


def cmd_network(args) -> int:
    net = load_network(args.network)
    rows = report.network_rows(net, args.array, _methods(args.method))
    print(report.network_table(net, args.array, rows))
    _emit_csv(report.network_csv(rows), args.csv)
    return 0


def cmd_sweep(args) -> int:
    net = load_network(args.network)
    records = report.sweep_records(net, args.array, _methods(args.method))
    text = report.to_csv(report.SWEEP_COLUMNS, records)
    if args.csv is None or args.csv == "-":
        sys.stdout.write(text)
    else:
        _emit_csv(text, args.csv)
    return 0


def cmd_utilization(args) -> int:
    net = load_network(args.network)
    records = report.utilization_records(net, args.array, _methods(args.method))
    text = report.to_csv(report.UTIL_COLUMNS, records)
    if args.csv is None or args.csv == "-":
        sys.stdout.write(text)
    else:
        _emit_csv(text, args.csv)
    return 0


def cmd_verify(args) -> int:
    layer = _layer_from_args(args)
    rng = np.random.default_rng(args.seed)
    ifm = rng.integers(-8, 9, size=(layer.in_ch, layer.ifm_h, layer.ifm_w))
    weights = rng.integers(-8, 9, size=(layer.out_ch, layer.in_ch, layer.k_h, layer.k_w))
    expected = reference_conv(ifm, weights)

    failures = 0
    for method in _methods(args.method):
        plan = {
            Method.IM2COL: lambda: plan_im2col(layer, args.array),
            Method.SDK: lambda: plan_sdk(layer, args.array),
            Method.VWSDK: lambda: plan_vwsdk(layer, args.array)[0],
        }[method]()
        layout = build_layout(layer, args.array, plan)
        cells = program(layout, weights)
        if args.inject_fault:
            # Corrupt the first used cell of the first tile.
            r, c = map(int, np.argwhere(layout.tiles[0].cells >= 0)[0])
            cells[0][r, c] += 1
        ofm, measured = simulate(layer, args.array, plan, ifm, weights, programmed=cells)
        ok = np.array_equal(ofm, expected) and measured <= plan.total_cycles
        verdict = "PASS" if ok else "FAIL"
        print(
            f"{method.value:7s} {verdict} window={plan.window} ar={plan.ar_cycles} ac={plan.ac_cycles} "
            f"cycles measured={measured} analytic={plan.total_cycles}"
        )
        if not ok:
            failures += 1
            diff = np.argwhere(ofm != expected)
            if len(diff):
                o, y, x = map(int, diff[0])
                print(f"  first OFM mismatch at (oc={o}, y={y}, x={x}): got {ofm[o, y, x]}, want {expected[o, y, x]}")
            for tile, r, c in audit_cells(layout, weights, cells):
                t = layout.tiles[tile]
                print(f"  faulty cell: tile AR={t.ar_index} AC={t.ac_index} row={r} col={c}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netplan", description="Plan and verify CNN weight mappings on PIM arrays.")
    parser.add_argument("--log-level", default="WARNING", help="logging level (default: WARNING)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_array(p, multiple=False):
        if multiple:
            p.add_argument("--array", type=array_arg, nargs="+", required=True, metavar="RxC")
        else:
            p.add_argument("--array", type=array_arg, default=ArraySpec(512, 512), metavar="RxC",
                           help="array rows x columns (default 512x512)")

    def add_layer(p):
        p.add_argument("--ifm", type=dims, required=True, metavar="WxH")
        p.add_argument("--kernel", type=dims, required=True, metavar="WxH")
        p.add_argument("--ic", type=positive_int, required=True)
        p.add_argument("--oc", type=positive_int, required=True)
        p.add_argument("--name", default="layer")

    def add_method(p, default):
        p.add_argument("--method", choices=["im2col", "sdk", "vwsdk", "all"], default=default)

    p = sub.add_parser("plan", help="plan one layer")
    add_layer(p)
    add_array(p)
    add_method(p, "vwsdk")
    p.add_argument("--verbose", action="store_true", help="print the full search trace")
    p.add_argument("--dump-layout", action="store_true", help="print the per-cycle cell grid")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("network", help="plan every layer of a network file")
    p.add_argument("network", help="network file, or bundled name (vgg13, resnet18)")
    add_array(p)
    add_method(p, "all")
    p.add_argument("--csv", metavar="PATH", help="also write per-layer CSV ('-' for stdout)")
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("sweep", help="network speedups across array sizes (CSV)")
    p.add_argument("network")
    add_array(p, multiple=True)
    add_method(p, "all")
    p.add_argument("--csv", metavar="PATH")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="simulate plans on random tensors against a direct convolution")
    add_layer(p)
    add_array(p)
    add_method(p, "all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("utilization", help="per-layer mean/peak array utilization (CSV)")
    p.add_argument("network")
    add_array(p)
    add_method(p, "all")
    p.add_argument("--csv", metavar="PATH")
    p.set_defaults(func=cmd_utilization)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except MappingError as exc:
        print(f"netplan: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
