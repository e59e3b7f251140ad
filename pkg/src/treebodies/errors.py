"""Exception hierarchy shared by every module of the package."""


class TreeBodiesError(Exception):
    """Base class for all package errors."""


class SchemaError(TreeBodiesError, ValueError):
    """Malformed JSON input or an invalid value for a domain type."""


class NodeNotInTree(TreeBodiesError, KeyError):
    pass


class NoSplitWithinFuel(TreeBodiesError):
    pass


class NotSilver(TreeBodiesError):
    pass


class NotMillerLike(TreeBodiesError):
    pass


class NotLaverLike(TreeBodiesError):
    pass


class NotUPMillerLike(TreeBodiesError):
    pass


class ZeroPoint(TreeBodiesError, ValueError):
    """supp() of the identically-zero rational is undefined."""


class OracleBreach(TreeBodiesError):
    """An open-dense oracle returned a box it cannot certify."""


class DiagonalObstruction(TreeBodiesError):
    """Unreachable for the built-in oracles; kept for user oracles."""


class LevelOverflow(TreeBodiesError):
    pass


class StageDeficitTooLarge(TreeBodiesError):
    pass


class DensitySearchExhausted(TreeBodiesError):
    pass


class ConvergenceFuelExhausted(TreeBodiesError):
    pass


class DepthTooShallow(TreeBodiesError):
    pass


class NotEvenlyCut(TreeBodiesError, ValueError):
    pass


class RefinerBreach(TreeBodiesError):
    pass
