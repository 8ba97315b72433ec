"""Tabular and CSV rendering of plans, sweeps and utilization."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .mappers import plan_network
from .model import ArraySpec, MappingPlan, Method, NetworkSpec
from .sim import utilization

PLAN_COLUMNS = ("name", "method", "pw_w", "pw_h", "ic_t", "oc_t", "num_pw", "ar", "ac", "cycles", "speedup")
SWEEP_COLUMNS = ("array_rows", "array_cols", "method", "cycles", "speedup")
UTIL_COLUMNS = ("name", "method", "pw_w", "pw_h", "mean_pct", "peak_pct")

ALL_METHODS = (Method.IM2COL, Method.SDK, Method.VWSDK)


def fmt_speedup(baseline: int, cycles: int) -> str:
    return f"{baseline / cycles:.2f}"


@dataclass(frozen=True)
class ReportRow:
    name: str
    plan: MappingPlan
    im2col_cycles: int

    @property
    def speedup(self) -> str:
        return fmt_speedup(self.im2col_cycles, self.plan.total_cycles)

    def record(self) -> tuple:
        p = self.plan
        return (
            self.name, p.method.value, p.window.pw_w, p.window.pw_h, p.ic_tile, p.oc_tile,
            p.num_pw, p.ar_cycles, p.ac_cycles, p.total_cycles, self.speedup,
        )


def network_rows(net: NetworkSpec, array: ArraySpec, methods=ALL_METHODS) -> dict[Method, list[ReportRow]]:
    base = plan_network(net, array, Method.IM2COL)
    rows = {}
    for method in methods:
        np_ = base if method is Method.IM2COL else plan_network(net, array, method)
        rows[method] = [
            ReportRow(layer.name, plan, b.total_cycles)
            for layer, plan, b in zip(net.layers, np_.plans, base.plans)
        ]
    return rows


def to_csv(header, records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(records)
    return buf.getvalue()


def network_csv(rows: dict[Method, list[ReportRow]]) -> str:
    # One record per (layer, method), layer order outermost.
    methods = list(rows)
    n = len(next(iter(rows.values())))
    records = [rows[m][i].record() for i in range(n) for m in methods]
    return to_csv(PLAN_COLUMNS, records)


def network_table(net: NetworkSpec, array: ArraySpec, rows: dict[Method, list[ReportRow]]) -> str:
    methods = list(rows)
    header = ["#", "image", "kernel"] + [f"{m.value} (PWxICxOC)" for m in methods]
    body = []
    for i, layer in enumerate(net.layers):
        cells = [layer.name, f"{layer.ifm_w}x{layer.ifm_h}", f"{layer.k_w}x{layer.k_h}x{layer.in_ch}x{layer.out_ch}"]
        for m in methods:
            p = rows[m][i].plan
            cells.append(f"{p.window}x{p.ic_tile}x{p.oc_tile} [{p.total_cycles}]")
        body.append(cells)
    totals = {m: sum(r.plan.total_cycles for r in rows[m]) for m in methods}
    body.append(["total", "", ""] + [str(totals[m]) for m in methods])
    if Method.IM2COL in totals:
        body.append(["speedup", "", ""] + [fmt_speedup(totals[Method.IM2COL], totals[m]) for m in methods])
    lines = [f"network {net.name} on {array} array", _grid([header] + body)]
    return "\n".join(lines)


def _grid(table: list[list[str]]) -> str:
    widths = [max(len(str(row[c])) for row in table) for c in range(len(table[0]))]
    out = []
    for n, row in enumerate(table):
        out.append("  ".join(str(v).ljust(w) for v, w in zip(row, widths)).rstrip())
        if n == 0:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out)


def sweep_records(net: NetworkSpec, arrays: list[ArraySpec], methods=ALL_METHODS) -> list[tuple]:
    records = []
    for array in arrays:
        base = plan_network(net, array, Method.IM2COL).total_cycles
        for method in methods:
            total = plan_network(net, array, method).total_cycles
            records.append((array.rows, array.cols, method.value, total, fmt_speedup(base, total)))
    return records


def utilization_records(net: NetworkSpec, array: ArraySpec, methods=ALL_METHODS) -> list[tuple]:
    plans = {m: plan_network(net, array, m).plans for m in methods}
    records = []
    for i, layer in enumerate(net.layers):
        for m in methods:
            p = plans[m][i]
            rep = utilization(layer, array, p)
            records.append((layer.name, m.value, p.window.pw_w, p.window.pw_h, f"{rep.mean:.1f}", f"{rep.peak:.1f}"))
    return records


def plan_text(plan: MappingPlan) -> str:
    return "\n".join(
        [
            f"method          {plan.method.value}",
            f"window          {plan.window}",
            f"ic_tile         {plan.ic_tile}",
            f"oc_tile         {plan.oc_tile}",
            f"windows_per_pw  {plan.windows_per_pw}",
            f"num_pw          {plan.num_pw}",
            f"ar_cycles       {plan.ar_cycles}",
            f"ac_cycles       {plan.ac_cycles}",
            f"total_cycles    {plan.total_cycles}",
        ]
    )
