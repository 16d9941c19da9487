"""Exception hierarchy shared by all modules."""


class UavPlaceError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(UavPlaceError, ValueError):
    """Invalid configuration value or unknown key."""


class DomainError(UavPlaceError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class InvalidTerrainError(UavPlaceError, ValueError):
    """Malformed building footprint or terrain map."""


class TerrainParseError(InvalidTerrainError):
    """Terrain file does not follow the JSON schema."""


class GenerationError(UavPlaceError, RuntimeError):
    """Random scene generation gave up after its attempt budget."""


class SamplingError(UavPlaceError, RuntimeError):
    """LoS sample collection could not place the UAV inside the area."""
