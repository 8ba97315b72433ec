"""Convolution weight mapping for processing-in-memory crossbar arrays."""

from .cycles import (
    CycleBreakdown,
    ac_cycles_tiled,
    ar_cycles_tiled,
    im2col_cycles,
    num_parallel_windows,
    tiled_ic,
    tiled_oc,
    vw_cycles,
)
from .mappers import NetworkPlan, SearchTrace, plan_im2col, plan_network, plan_oracle, plan_sdk, plan_vwsdk
from .model import (
    ArraySpec,
    LayerSpec,
    MappingError,
    MappingPlan,
    Method,
    NetworkSpec,
    WindowShape,
    validate_layer,
    validate_window,
)
from .netfile import load_network, parse_network, render_network
from .sim import build_layout, reference_conv, simulate, utilization

__version__ = "0.1.0"
