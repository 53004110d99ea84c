"""Exception hierarchy shared by every module of the package."""


class NCDiskError(Exception):
    """Base class; ``code`` is a stable machine-readable tag."""

    code = "error"


class DimensionMismatch(NCDiskError, ValueError):
    code = "dimension_mismatch"


class DivergentSubstitution(NCDiskError, ValueError):
    code = "divergent_substitution"


class SeriesSyntaxError(NCDiskError, ValueError):
    code = "syntax_error"

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class IndexOutOfRange(NCDiskError, ValueError):
    code = "index_out_of_range"


class CapExceeded(NCDiskError, ValueError):
    code = "cap_exceeded"


class NonzeroConstantTerm(NCDiskError, ValueError):
    code = "nonzero_constant_term"


class SingularLinearPart(NCDiskError, ValueError):
    code = "singular_linear_part"


class NonNilpotentAtTruncation(NCDiskError, ValueError):
    code = "non_nilpotent_at_truncation"


class SingularJacobian(NCDiskError, ValueError):
    code = "singular_jacobian"


class LiftMismatch(NCDiskError, ValueError):
    """Fiber lift whose linear part disagrees with the base Jacobian."""

    code = "lift_mismatch"


class MalformedGK(NCDiskError, ValueError):
    code = "malformed_gk"


class NonRecentred(NCDiskError, ValueError):
    code = "non_recentred"
