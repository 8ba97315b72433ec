"""Analytic cycle counts for im2col and variable-window mappings.

All arithmetic is exact integer arithmetic; ceilings are taken with
``-(-a // b)`` so no float ever enters a cycle count.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ArraySpec, InfeasibleWindowError, LayerSpec, WindowShape, WindowError


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class CycleBreakdown:
    num_pw: int
    ar_cycles: int
    ac_cycles: int

    @property
    def total(self) -> int:
        return self.num_pw * self.ar_cycles * self.ac_cycles


def windows_per_pw(layer: LayerSpec, w: WindowShape) -> int:
    return (w.pw_w - layer.k_w + 1) * (w.pw_h - layer.k_h + 1)


def _positions(ifm: int, pw: int, k: int) -> int:
    return ceil_div(ifm - pw, pw - k + 1) + 1


def num_parallel_windows(layer: LayerSpec, w: WindowShape) -> int:
    """Number of parallel-window positions needed to cover the OFM.

    Edge positions are clamped to the IFM boundary, so the last window on an
    axis may overlap its predecessor.
    """
    return _positions(layer.ifm_w, w.pw_w, layer.k_w) * _positions(layer.ifm_h, w.pw_h, layer.k_h)


def tiled_ic(array: ArraySpec, w: WindowShape, in_ch: int) -> int:
    per_row_budget = array.rows // w.area
    if per_row_budget == 0:
        raise InfeasibleWindowError(f"window {w} needs {w.area} rows, array has {array.rows}")
    return min(in_ch, per_row_budget)


def tiled_oc(array: ArraySpec, layer: LayerSpec, w: WindowShape) -> int:
    nwp = windows_per_pw(layer, w)
    per_col_budget = array.cols // nwp
    if per_col_budget == 0:
        raise InfeasibleWindowError(f"window {w} needs {nwp} columns per output channel, array has {array.cols}")
    return min(layer.out_ch, per_col_budget)


def ar_cycles_tiled(in_ch: int, ic_tile: int) -> int:
    return ceil_div(in_ch, ic_tile)


def ac_cycles_tiled(out_ch: int, oc_tile: int) -> int:
    return ceil_div(out_ch, oc_tile)


def im2col_cycles(layer: LayerSpec, array: ArraySpec) -> CycleBreakdown:
    # Rows are packed continuously: one kernel column may straddle AR cycles.
    return CycleBreakdown(
        num_pw=layer.out_w * layer.out_h,
        ar_cycles=ceil_div(layer.k_w * layer.k_h * layer.in_ch, array.rows),
        ac_cycles=ceil_div(layer.out_ch, array.cols),
    )


def vw_cycles(layer: LayerSpec, array: ArraySpec, w: WindowShape) -> CycleBreakdown:
    """Cycles for a parallel window strictly larger than the kernel, with channel tiling."""
    if w.pw_w == layer.k_w and w.pw_h == layer.k_h:
        raise WindowError(f"window {w} equals the kernel; use im2col_cycles")
    ic_t = tiled_ic(array, w, layer.in_ch)
    oc_t = tiled_oc(array, layer, w)
    return CycleBreakdown(
        num_pw=num_parallel_windows(layer, w),
        ar_cycles=ar_cycles_tiled(layer.in_ch, ic_t),
        ac_cycles=ac_cycles_tiled(layer.out_ch, oc_t),
    )


def sdk_cycles(layer: LayerSpec, array: ArraySpec, w: WindowShape) -> CycleBreakdown:
    """Cycles for a window carrying all channels, rows and columns packed continuously."""
    return CycleBreakdown(
        num_pw=num_parallel_windows(layer, w),
        ar_cycles=ceil_div(w.area * layer.in_ch, array.rows),
        ac_cycles=ceil_div(layer.out_ch * windows_per_pw(layer, w), array.cols),
    )
