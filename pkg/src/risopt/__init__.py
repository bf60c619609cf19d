"""Simulation and optimization toolkit for irregular RIS-aided MU-MIMO downlinks."""

from risopt.config import AtsParams, Geometry, NeceParams, PathLossParams, SystemConfig
from risopt.channel import ChannelSet, draw_channels, place_users
from risopt.model import (
    EvaluationResult,
    equal_power_allocation,
    equivalent_channel,
    evaluate,
    quantized_phase_set,
    sinr,
    transmit_power,
    wsr,
    zf_precoder,
)

__all__ = [
    "AtsParams",
    "ChannelSet",
    "EvaluationResult",
    "Geometry",
    "NeceParams",
    "PathLossParams",
    "SystemConfig",
    "draw_channels",
    "equal_power_allocation",
    "equivalent_channel",
    "evaluate",
    "place_users",
    "quantized_phase_set",
    "sinr",
    "transmit_power",
    "wsr",
    "zf_precoder",
]
