class LightningError(Exception):
    """Base class for all errors raised by this package."""


class GeometryError(LightningError, ValueError):
    pass


class BasisError(LightningError):
    pass


class DataError(LightningError, ValueError):
    pass


class AssemblyError(LightningError):
    pass


class SolverError(LightningError):
    pass


class EvaluationError(LightningError, ValueError):
    pass
