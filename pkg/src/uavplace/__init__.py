"""Terrain-aware UAV base-station placement toolkit."""

from .channel import BlockageMode, ChannelParams, LinkState
from .classify import ClassificationConfig, Mode, UserClass
from .losmodel import Family, LosModelParams
from .terrain import Area, Building, TerrainMap

__version__ = "0.1.0"

__all__ = [
    "BlockageMode", "ChannelParams", "LinkState", "ClassificationConfig", "Mode", "UserClass",
    "Family", "LosModelParams", "Area", "Building", "TerrainMap",
]
