"""Retarded atom-wall interaction, parity mixing and quenching of hydrogen 2S near a conductor."""

from .errors import (
    DegenerateChannelError,
    DomainError,
    OutOfRegimeError,
    QuadratureError,
    TrackingError,
)
from .hydrogen import DEFAULT_CONSTANTS, AtomicConstants, LevelLabel, MixingChannel, VirtualChannel

__all__ = [
    "AtomicConstants",
    "DEFAULT_CONSTANTS",
    "DegenerateChannelError",
    "DomainError",
    "LevelLabel",
    "MixingChannel",
    "OutOfRegimeError",
    "QuadratureError",
    "TrackingError",
    "VirtualChannel",
]

__version__ = "0.1.0"
