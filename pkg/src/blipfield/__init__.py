"""Localized-photon (blip) field model: transport, detection and cavity effects."""
from .core import (
    NATURAL,
    BlipFieldError,
    BlipWavepacket,
    MomentumWavepacket,
    SpatialGrid,
    Units,
    gaussian_packet,
)

__version__ = "0.1.0"

__all__ = [
    "NATURAL",
    "BlipFieldError",
    "BlipWavepacket",
    "MomentumWavepacket",
    "SpatialGrid",
    "Units",
    "gaussian_packet",
]
