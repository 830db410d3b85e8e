"""Exception and warning types shared across the toolkit."""


class SpikerecError(Exception):
    """Base class for all toolkit errors."""


class DomainError(SpikerecError):
    """Kernel evaluated at a point where it is undefined (e.g. a pole)."""


class DegenerateColumn(SpikerecError):
    """A collocation column of G is identically zero and cannot be normalized."""


class UnknownPreset(SpikerecError):
    """Experiment preset identifier is not one of the known five."""


class AllTruncated(SpikerecError):
    """The pseudo-inverse threshold removed every singular value."""


class ConvergenceFailure(SpikerecError):
    """The underlying SVD routine failed to converge."""


class RankDeficient(SpikerecError):
    """Krylov matrix has numerical rank below the requested model order."""


class DegenerateDesign(SpikerecError):
    """The design matrix for weight recovery is identically zero."""


class SizeMismatch(SpikerecError):
    """Truth and recovered signals have different spike counts."""


class FlatCurveWarning(UserWarning):
    """L-curve curvature had no interior maximum; endpoint gamma returned."""


class IllConditionedShiftWarning(UserWarning):
    """The ESPRIT shift sub-matrix V_minus is badly conditioned."""
