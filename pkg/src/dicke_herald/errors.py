"""Exception hierarchy shared by all modules."""


class DickeHeraldError(Exception):
    """Base class for every error raised by this package."""


class InvalidSizeError(DickeHeraldError, ValueError):
    pass


class InvalidTargetError(DickeHeraldError, ValueError):
    pass


class InvalidStateError(DickeHeraldError, ValueError):
    pass


class PreconditionError(DickeHeraldError, ValueError):
    pass


class ZeroNormError(DickeHeraldError, ArithmeticError):
    """Raised when a state has no weight left, i.e. an impossible herald."""


class DestructiveInterferenceError(ZeroNormError):
    """The polarizer pattern cannot herald at this geometry."""


class ProtocolOverrunError(DickeHeraldError, RuntimeError):
    """A detection was applied to a register with no excitation left."""


class ModeMismatchError(DickeHeraldError, ValueError):
    pass


class GeometryInfeasibleError(DickeHeraldError, ValueError):
    """Not enough diffraction orders for the requested detector count."""


class ConfigError(DickeHeraldError, ValueError):
    pass
