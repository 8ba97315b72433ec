"""Functional crossbar simulator.

A plan is materialized as an :class:`ArrayLayout`: for every (AR cycle, AC
cycle) pair, a rows x cols matrix of flat kernel-element indices (-1 marks an
unused cell), plus the window-relative input element feeding each used row and
the output element produced by each used column. Executing the layout over all
parallel-window positions must reproduce a direct convolution exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cycles import ceil_div
from .model import (
    ArraySpec,
    InfeasiblePlanError,
    LayerSpec,
    MappingPlan,
    ShapeMismatchError,
    validate_layer,
    validate_plan,
)

UNUSED = -1


@dataclass(frozen=True)
class CycleTile:
    ar_index: int
    ac_index: int
    # (n_rows_used, 3) window-relative (in_ch, y, x) per used row
    row_inputs: np.ndarray
    # (n_cols_used, 3) (out_ch, dy, dx) per used column
    col_outputs: np.ndarray
    # (array.rows, array.cols) flat weight index or UNUSED
    cells: np.ndarray

    @property
    def used_cells(self) -> int:
        return int(np.count_nonzero(self.cells != UNUSED))


@dataclass(frozen=True)
class ArrayLayout:
    layer: LayerSpec
    array: ArraySpec
    plan: MappingPlan
    tiles: tuple[CycleTile, ...]

    @property
    def weight_placements(self) -> int:
        return sum(t.used_cells for t in self.tiles)


def weight_index(layer: LayerSpec, o, i, ky, kx):
    return ((o * layer.in_ch + i) * layer.k_h + ky) * layer.k_w + kx


def _row_slots(layer: LayerSpec, plan: MappingPlan) -> np.ndarray:
    pw_w, pw_h = plan.window.pw_w, plan.window.pw_h
    i, y, x = np.meshgrid(np.arange(layer.in_ch), np.arange(pw_h), np.arange(pw_w), indexing="ij")
    return np.stack([i.ravel(), y.ravel(), x.ravel()], axis=1)


def _row_groups(layer: LayerSpec, array: ArraySpec, plan: MappingPlan) -> list[np.ndarray]:
    slots = _row_slots(layer, plan)
    if plan.channel_tiled:
        per_tile = plan.ic_tile * plan.window.area
    else:
        per_tile = array.rows
    return [slots[s : s + per_tile] for s in range(0, len(slots), per_tile)]


def _col_groups(layer: LayerSpec, array: ArraySpec, plan: MappingPlan) -> list[np.ndarray]:
    nx = plan.window.pw_w - layer.k_w + 1
    ny = plan.window.pw_h - layer.k_h + 1
    if plan.channel_tiled:
        groups = []
        for start in range(0, layer.out_ch, plan.oc_tile):
            o_range = np.arange(start, min(start + plan.oc_tile, layer.out_ch))
            dy, dx, o = np.meshgrid(np.arange(ny), np.arange(nx), o_range, indexing="ij")
            groups.append(np.stack([o.ravel(), dy.ravel(), dx.ravel()], axis=1))
        return groups
    # Continuous packing: out-channel-major so each chunk covers contiguous channels.
    o, dy, dx = np.meshgrid(np.arange(layer.out_ch), np.arange(ny), np.arange(nx), indexing="ij")
    slots = np.stack([o.ravel(), dy.ravel(), dx.ravel()], axis=1)
    return [slots[s : s + array.cols] for s in range(0, len(slots), array.cols)]


def build_layout(layer: LayerSpec, array: ArraySpec, plan: MappingPlan) -> ArrayLayout:
    validate_layer(layer)
    validate_plan(layer, array, plan)
    row_groups = _row_groups(layer, array, plan)
    col_groups = _col_groups(layer, array, plan)
    if len(row_groups) != plan.ar_cycles or len(col_groups) != plan.ac_cycles:
        raise InfeasiblePlanError(
            f"layout needs {len(row_groups)}x{len(col_groups)} tiles, plan says {plan.ar_cycles}x{plan.ac_cycles}"
        )
    tiles = []
    for a, rows in enumerate(row_groups):
        if len(rows) > array.rows:
            raise InfeasiblePlanError(f"AR tile {a} uses {len(rows)} rows, array has {array.rows}")
        for c, cols in enumerate(col_groups):
            if len(cols) > array.cols:
                raise InfeasiblePlanError(f"AC tile {c} uses {len(cols)} columns, array has {array.cols}")
            ky = rows[:, None, 1] - cols[None, :, 1]
            kx = rows[:, None, 2] - cols[None, :, 2]
            live = (ky >= 0) & (ky < layer.k_h) & (kx >= 0) & (kx < layer.k_w)
            idx = weight_index(layer, cols[None, :, 0], rows[:, None, 0], ky, kx)
            cells = np.full((array.rows, array.cols), UNUSED, dtype=np.int64)
            cells[: len(rows), : len(cols)] = np.where(live, idx, UNUSED)
            tiles.append(CycleTile(a, c, rows, cols, cells))
    return ArrayLayout(layer, array, plan, tuple(tiles))


def program(layout: ArrayLayout, weights: np.ndarray) -> list[np.ndarray]:
    """Write weights into each tile's cells; unused cells hold zero."""
    layer = layout.layer
    expected = (layer.out_ch, layer.in_ch, layer.k_h, layer.k_w)
    weights = np.asarray(weights)
    if weights.shape != expected:
        raise ShapeMismatchError(f"weights shape {weights.shape} != {expected}")
    flat = weights.astype(np.int64).ravel()
    return [np.where(t.cells != UNUSED, flat[np.maximum(t.cells, 0)], 0) for t in layout.tiles]


def audit_cells(layout: ArrayLayout, weights: np.ndarray, programmed: list[np.ndarray]) -> list[tuple[int, int, int]]:
    """Return (tile, row, col) of every cell whose stored value disagrees with the layout."""
    bad = []
    for n, (want, got) in enumerate(zip(program(layout, weights), programmed)):
        for r, c in zip(*np.nonzero(want != got)):
            bad.append((n, int(r), int(c)))
    return bad


def pw_starts(ifm: int, pw: int, k: int) -> list[int]:
    step = pw - k + 1
    n = ceil_div(ifm - pw, step) + 1
    return sorted({min(j * step, ifm - pw) for j in range(n)})


def simulate(layer, array, plan, ifm, weights, programmed=None):
    """Run the plan on the array; return ``(ofm, measured_cycles)``.

    ``programmed`` overrides the cell contents (used to inject faults).
    """
    ifm = np.asarray(ifm)
    if ifm.shape != (layer.in_ch, layer.ifm_h, layer.ifm_w):
        raise ShapeMismatchError(f"ifm shape {ifm.shape} != {(layer.in_ch, layer.ifm_h, layer.ifm_w)}")
    layout = build_layout(layer, array, plan)
    if programmed is None:
        programmed = program(layout, weights)
    else:
        program(layout, weights)  # shape check only

    pw_w, pw_h = plan.window.pw_w, plan.window.pw_h
    nx, ny = pw_w - layer.k_w + 1, pw_h - layer.k_h + 1
    starts = [(y, x) for y in pw_starts(layer.ifm_h, pw_h, layer.k_h) for x in pw_starts(layer.ifm_w, pw_w, layer.k_w)]
    sy = np.array([s[0] for s in starts])[:, None]
    sx = np.array([s[1] for s in starts])[:, None]
    ifm = ifm.astype(np.int64)

    # Per-position partial sums, accumulated digitally across AR cycles.
    local = np.zeros((len(starts), layer.out_ch, ny, nx), dtype=np.int64)
    measured = 0
    for tile, matrix in zip(layout.tiles, programmed):
        rows, cols = tile.row_inputs, tile.col_outputs
        vectors = np.zeros((len(starts), array.rows), dtype=np.int64)
        vectors[:, : len(rows)] = ifm[rows[None, :, 0], sy + rows[None, :, 1], sx + rows[None, :, 2]]
        # One vector-matrix product per parallel-window position.
        outputs = vectors @ matrix
        measured += len(starts)
        np.add.at(
            local,
            (slice(None), cols[:, 0], cols[:, 1], cols[:, 2]),
            outputs[:, : len(cols)],
        )

    ofm = np.zeros((layer.out_ch, layer.out_h, layer.out_w), dtype=np.int64)
    written = np.zeros(ofm.shape, dtype=bool)
    for p, (y, x) in enumerate(starts):
        region = (slice(None), slice(y, y + ny), slice(x, x + nx))
        overlap = written[region]
        # Clamped edge windows recompute elements; the values must agree.
        assert np.array_equal(ofm[region][overlap], local[p][overlap])
        ofm[region] = local[p]
        written[region] = True
    assert written.all()
    return ofm, measured


def reference_conv(ifm, weights) -> np.ndarray:
    """Direct stride-1 valid cross-correlation in exact integer arithmetic."""
    ifm = np.asarray(ifm)
    weights = np.asarray(weights)
    if ifm.ndim != 3 or weights.ndim != 4 or weights.shape[1] != ifm.shape[0]:
        raise ShapeMismatchError(f"incompatible ifm {ifm.shape} and weights {weights.shape}")
    oc, ic, kh, kw = weights.shape
    _, h, w = ifm.shape
    if kh > h or kw > w:
        raise ShapeMismatchError(f"kernel {kw}x{kh} larger than ifm {w}x{h}")
    ifm = ifm.astype(np.int64)
    weights = weights.astype(np.int64)
    out = np.zeros((oc, h - kh + 1, w - kw + 1), dtype=np.int64)
    for ky in range(kh):
        for kx in range(kw):
            patch = ifm[:, ky : ky + h - kh + 1, kx : kx + w - kw + 1]
            out += np.einsum("oi,ihw->ohw", weights[:, :, ky, kx], patch)
    return out


@dataclass(frozen=True)
class UtilizationReport:
    ratios: tuple[float, ...]

    @property
    def mean(self) -> float:
        return 100.0 * sum(self.ratios) / len(self.ratios)

    @property
    def peak(self) -> float:
        return 100.0 * max(self.ratios)


def utilization(layer: LayerSpec, array: ArraySpec, plan: MappingPlan) -> UtilizationReport:
    layout = build_layout(layer, array, plan)
    total = array.rows * array.cols
    return UtilizationReport(tuple(t.used_cells / total for t in layout.tiles))


def render_layout(layout: ArrayLayout, used: str = "#", unused: str = ".") -> str:
    """Text grid per cycle tile; one character per cell."""
    blocks = []
    for t in layout.tiles:
        lines = [f"tile AR={t.ar_index} AC={t.ac_index} ({t.used_cells} used cells)"]
        for row in t.cells:
            lines.append("".join(used if v != UNUSED else unused for v in row))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks)
