"""Domain vocabulary: layers, arrays, parallel windows, mapping plans."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class MappingError(ValueError):
    """Base class for every error raised by the planner and simulator."""


class DimensionError(MappingError):
    pass


class WindowError(MappingError):
    pass


class InfeasibleWindowError(MappingError):
    """Window does not fit a single kernel channel or output channel in the array."""


class InfeasiblePlanError(MappingError):
    pass


class ShapeMismatchError(MappingError):
    pass


class BudgetExceededError(MappingError):
    pass


class Method(str, enum.Enum):
    IM2COL = "im2col"
    SDK = "sdk"
    VWSDK = "vwsdk"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class LayerSpec:
    """One stride-1 convolutional layer."""

    name: str
    ifm_w: int
    ifm_h: int
    k_w: int
    k_h: int
    in_ch: int
    out_ch: int

    @property
    def out_w(self) -> int:
        return self.ifm_w - self.k_w + 1

    @property
    def out_h(self) -> int:
        return self.ifm_h - self.k_h + 1

    @property
    def kernel(self) -> WindowShape:
        return WindowShape(self.k_w, self.k_h)


@dataclass(frozen=True)
class ArraySpec:
    rows: int
    cols: int

    def __post_init__(self):
        for label in ("rows", "cols"):
            value = getattr(self, label)
            if not _is_int(value) or value < 1:
                raise DimensionError(f"array {label} must be a positive integer, got {value!r}")

    def __str__(self) -> str:
        return f"{self.rows}x{self.cols}"


@dataclass(frozen=True, order=True)
class WindowShape:
    pw_w: int
    pw_h: int

    @property
    def area(self) -> int:
        return self.pw_w * self.pw_h

    def __str__(self) -> str:
        return f"{self.pw_w}x{self.pw_h}"


@dataclass(frozen=True)
class MappingPlan:
    method: Method
    window: WindowShape
    ic_tile: int
    oc_tile: int
    windows_per_pw: int
    num_pw: int
    ar_cycles: int
    ac_cycles: int
    total_cycles: int

    def __post_init__(self):
        if self.total_cycles != self.num_pw * self.ar_cycles * self.ac_cycles:
            raise InfeasiblePlanError(
                f"total_cycles {self.total_cycles} != {self.num_pw}*{self.ar_cycles}*{self.ac_cycles}"
            )

    @property
    def channel_tiled(self) -> bool:
        # Whole-channel row tiling applies only to windows larger than the kernel
        # chosen by the variable-window search; everything else packs rows continuously.
        return self.method is Method.VWSDK and self.windows_per_pw > 1


@dataclass(frozen=True)
class NetworkSpec:
    name: str
    layers: tuple[LayerSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise DimensionError(f"network {self.name!r} has no layers")
        seen = set()
        for layer in self.layers:
            if layer.name in seen:
                raise DimensionError(f"network {self.name!r}: duplicate layer name {layer.name!r}")
            seen.add(layer.name)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def validate_layer(layer: LayerSpec) -> LayerSpec:
    for label in ("ifm_w", "ifm_h", "k_w", "k_h", "in_ch", "out_ch"):
        value = getattr(layer, label)
        if not _is_int(value) or value < 1:
            raise DimensionError(f"layer {layer.name!r}: {label} must be a positive integer, got {value!r}")
    if layer.k_w > layer.ifm_w:
        raise DimensionError(f"layer {layer.name!r}: kernel width {layer.k_w} exceeds IFM width {layer.ifm_w}")
    if layer.k_h > layer.ifm_h:
        raise DimensionError(f"layer {layer.name!r}: kernel height {layer.k_h} exceeds IFM height {layer.ifm_h}")
    return layer


def validate_window(layer: LayerSpec, w: WindowShape) -> WindowShape:
    if not (_is_int(w.pw_w) and _is_int(w.pw_h)):
        raise WindowError(f"window {w!r} must have integer sides")
    if w.pw_w < layer.k_w or w.pw_h < layer.k_h:
        raise WindowError(f"window {w} is smaller than kernel {layer.kernel}")
    if w.pw_w > layer.ifm_w or w.pw_h > layer.ifm_h:
        raise WindowError(f"window {w} exceeds IFM {layer.ifm_w}x{layer.ifm_h}")
    return w


def validate_plan(layer: LayerSpec, array: ArraySpec, plan: MappingPlan) -> MappingPlan:
    """Check a plan's internal consistency against the layer it claims to map."""
    validate_window(layer, plan.window)
    nwp = (plan.window.pw_w - layer.k_w + 1) * (plan.window.pw_h - layer.k_h + 1)
    if plan.windows_per_pw != nwp:
        raise InfeasiblePlanError(f"windows_per_pw {plan.windows_per_pw} != {nwp} for window {plan.window}")
    if not 1 <= plan.ic_tile <= layer.in_ch:
        raise InfeasiblePlanError(f"ic_tile {plan.ic_tile} outside [1, {layer.in_ch}]")
    if not 1 <= plan.oc_tile <= layer.out_ch:
        raise InfeasiblePlanError(f"oc_tile {plan.oc_tile} outside [1, {layer.out_ch}]")
    if plan.channel_tiled:
        if plan.window.area * plan.ic_tile > array.rows or nwp * plan.oc_tile > array.cols:
            raise InfeasiblePlanError(f"tiles {plan.ic_tile}/{plan.oc_tile} overflow array {array}")
    return plan
