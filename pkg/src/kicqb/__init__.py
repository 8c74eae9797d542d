"""Kicked-Ising quantum battery: exact charging engines and analysis tools."""

from .model import (
    Axis,
    BatterySpec,
    Boundary,
    ChargerSpec,
    ConfigError,
    KickSchedule,
    RunConfig,
    Variant,
    config_from_dict,
    is_self_dual,
    load_config,
)
from .pauli import PauliString

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "BatterySpec",
    "Boundary",
    "ChargerSpec",
    "ConfigError",
    "KickSchedule",
    "PauliString",
    "RunConfig",
    "Variant",
    "config_from_dict",
    "is_self_dual",
    "load_config",
]
