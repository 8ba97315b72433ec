"""Planners that turn a (layer, array) pair into a MappingPlan."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

from . import cycles
from .cycles import CycleBreakdown, ceil_div
from .model import (
    ArraySpec,
    BudgetExceededError,
    InfeasibleWindowError,
    LayerSpec,
    MappingError,
    MappingPlan,
    Method,
    NetworkSpec,
    WindowShape,
    validate_layer,
)

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_BUDGET = 2_000_000


def _continuous_plan(method: Method, layer: LayerSpec, window: WindowShape, bd: CycleBreakdown) -> MappingPlan:
    # Continuous packing maps every channel; AR/AC split rows and columns, not channels.
    return MappingPlan(
        method=method,
        window=window,
        ic_tile=layer.in_ch,
        oc_tile=layer.out_ch,
        windows_per_pw=cycles.windows_per_pw(layer, window),
        num_pw=bd.num_pw,
        ar_cycles=bd.ar_cycles,
        ac_cycles=bd.ac_cycles,
        total_cycles=bd.total,
    )


def plan_im2col(layer: LayerSpec, array: ArraySpec, method: Method = Method.IM2COL) -> MappingPlan:
    validate_layer(layer)
    return _continuous_plan(method, layer, layer.kernel, cycles.im2col_cycles(layer, array))


def plan_sdk(layer: LayerSpec, array: ArraySpec) -> MappingPlan:
    """Square-window SDK baseline with full channels.

    A square window is admissible only when neither its AR nor its AC cycle
    count exceeds im2col's; among admissible windows the one with the fewest
    total cycles wins, ties going to the smaller window.
    """
    validate_layer(layer)
    base = cycles.im2col_cycles(layer, array)
    best_window, best = layer.kernel, base
    for pw in range(max(layer.k_w, layer.k_h), min(layer.ifm_w, layer.ifm_h) + 1):
        window = WindowShape(pw, pw)
        bd = cycles.sdk_cycles(layer, array, window)
        if bd.ar_cycles > base.ar_cycles or bd.ac_cycles > base.ac_cycles:
            continue
        if bd.total < best.total:
            best_window, best = window, bd
    return _continuous_plan(Method.SDK, layer, best_window, best)


class TraceEntry(NamedTuple):
    window: WindowShape
    breakdown: CycleBreakdown | None
    note: str = ""

    @property
    def feasible(self) -> bool:
        return self.breakdown is not None


@dataclass
class SearchTrace:
    entries: list[TraceEntry] = field(default_factory=list)
    plan: MappingPlan | None = None

    def feasible_totals(self) -> list[int]:
        return [e.breakdown.total for e in self.entries if e.breakdown is not None]


def candidate_windows(layer: LayerSpec):
    """Yield windows in the variable-window search's scan order.

    Width varies fastest. After the width passes the IFM it resets to the
    kernel width and the height grows, so (k_w, h) is visited for every
    h > k_h while the kernel-sized window itself never is.
    """
    pw_w, pw_h = layer.k_w, layer.k_h
    while True:
        pw_w += 1
        if pw_w > layer.ifm_w:
            pw_w = layer.k_w
            pw_h += 1
            if pw_h > layer.ifm_h:
                return
        yield WindowShape(pw_w, pw_h)


def plan_vwsdk(layer: LayerSpec, array: ArraySpec) -> tuple[MappingPlan, SearchTrace]:
    validate_layer(layer)
    seed = cycles.im2col_cycles(layer, array)
    trace = SearchTrace(entries=[TraceEntry(layer.kernel, seed, "im2col seed")])
    best_window, best = layer.kernel, seed
    for window in candidate_windows(layer):
        # Cheap pre-check; raising for every oversized window dominates runtime.
        if window.area > array.rows:
            trace.entries.append(TraceEntry(window, None, "window area exceeds rows"))
            continue
        try:
            bd = cycles.vw_cycles(layer, array, window)
        except InfeasibleWindowError as exc:
            trace.entries.append(TraceEntry(window, None, str(exc)))
            continue
        trace.entries.append(TraceEntry(window, bd))
        if best.total > bd.total:
            best_window, best = window, bd

    if best_window == layer.kernel:
        plan = plan_im2col(layer, array, method=Method.VWSDK)
    else:
        plan = MappingPlan(
            method=Method.VWSDK,
            window=best_window,
            ic_tile=cycles.tiled_ic(array, best_window, layer.in_ch),
            oc_tile=cycles.tiled_oc(array, layer, best_window),
            windows_per_pw=cycles.windows_per_pw(layer, best_window),
            num_pw=best.num_pw,
            ar_cycles=best.ar_cycles,
            ac_cycles=best.ac_cycles,
            total_cycles=best.total,
        )
    trace.plan = plan
    return plan, trace


def _oracle_positions(ifm: int, pw: int, k: int) -> int:
    # Count clamped window starts by walking the axis, not by formula.
    step = pw - k + 1
    starts = set()
    x = 0
    while True:
        starts.add(min(x, ifm - pw))
        if x + pw >= ifm:
            return len(starts)
        x += step


def plan_oracle(layer: LayerSpec, array: ArraySpec, budget: int = DEFAULT_ORACLE_BUDGET) -> MappingPlan:
    """Exhaustive minimum over every window and every channel tile size.

    Independent of the search: position counts come from walking each axis
    and every tile size up to the per-window maximum is scored, not only the
    maximal one.
    """
    validate_layer(layer)
    kw, kh = layer.k_w, layer.k_h
    work = 0
    for pw_h in range(kh, layer.ifm_h + 1):
        for pw_w in range(kw, layer.ifm_w + 1):
            nwp = (pw_w - kw + 1) * (pw_h - kh + 1)
            work += min(layer.in_ch, array.rows // (pw_w * pw_h)) * min(layer.out_ch, array.cols // nwp) + 1
    if work > budget:
        raise BudgetExceededError(f"oracle needs {work} evaluations, budget is {budget}")

    # The kernel-sized window packs rows and columns continuously.
    windows = layer.out_w * layer.out_h
    best_total = (
        windows * ceil_div(kw * kh * layer.in_ch, array.rows) * ceil_div(layer.out_ch, array.cols)
    )
    best = (best_total, 0, kw, kh, None, None)
    scan = 0
    for pw_h in range(kh, layer.ifm_h + 1):
        for pw_w in range(kw, layer.ifm_w + 1):
            if pw_w == kw and pw_h == kh:
                continue
            scan += 1
            nwp = (pw_w - kw + 1) * (pw_h - kh + 1)
            max_ic = min(layer.in_ch, array.rows // (pw_w * pw_h))
            max_oc = min(layer.out_ch, array.cols // nwp)
            npw = _oracle_positions(layer.ifm_w, pw_w, kw) * _oracle_positions(layer.ifm_h, pw_h, kh)
            for ic in range(1, max_ic + 1):
                for oc in range(1, max_oc + 1):
                    total = npw * ceil_div(layer.in_ch, ic) * ceil_div(layer.out_ch, oc)
                    if (total, scan) < best[:2]:
                        best = (total, scan, pw_w, pw_h, ic, oc)

    total, _, pw_w, pw_h, ic, oc = best
    if ic is None:
        return plan_im2col(layer, array, method=Method.VWSDK)
    window = WindowShape(pw_w, pw_h)
    ar, ac = ceil_div(layer.in_ch, ic), ceil_div(layer.out_ch, oc)
    return MappingPlan(
        method=Method.VWSDK,
        window=window,
        ic_tile=ic,
        oc_tile=oc,
        windows_per_pw=(pw_w - kw + 1) * (pw_h - kh + 1),
        num_pw=total // (ar * ac),
        ar_cycles=ar,
        ac_cycles=ac,
        total_cycles=total,
    )


def plan_layer(layer: LayerSpec, array: ArraySpec, method: Method | str) -> MappingPlan:
    method = Method(method)
    if method is Method.IM2COL:
        return plan_im2col(layer, array)
    if method is Method.SDK:
        return plan_sdk(layer, array)
    return plan_vwsdk(layer, array)[0]


@dataclass(frozen=True)
class NetworkPlan:
    network: NetworkSpec
    array: ArraySpec
    method: Method
    plans: tuple[MappingPlan, ...]

    @property
    def total_cycles(self) -> int:
        return sum(p.total_cycles for p in self.plans)


def plan_network(net: NetworkSpec, array: ArraySpec, method: Method | str) -> NetworkPlan:
    method = Method(method)
    plans = []
    for layer in net.layers:
        try:
            plans.append(plan_layer(layer, array, method))
        except MappingError as exc:
            raise type(exc)(f"{net.name}/{layer.name}: {exc}") from exc
    logger.debug("%s on %s with %s: %d cycles", net.name, array, method, sum(p.total_cycles for p in plans))
    return NetworkPlan(net, array, method, tuple(plans))
