"""Exception hierarchy shared across the package."""


class EsrpError(Exception):
    """Base class for simulator errors."""


class ConfigError(EsrpError):
    """Invalid configuration, scenario file, or parameter value."""


class FormationError(EsrpError):
    """Cluster formation could not proceed (e.g. no node in sink range)."""


class UnknownNodeError(EsrpError):
    """Reference to a node id that was never deployed."""


class MalformedPacketError(EsrpError):
    """Byte string does not decode as the requested packet type."""
