"""Exception hierarchy shared by all modules."""


class SpmorError(Exception):
    """Base class for every error raised by this package."""


class SingularMatrix(SpmorError):
    """A pivot fell below the relative singularity threshold."""


class PoleOrSingular(SingularMatrix):
    """Transfer-function or moment evaluation hit a pole."""


class ExpansionPointIsPole(SingularMatrix):
    """``s0*E - A`` cannot be factored at the requested expansion point."""


class ReducedPencilSingular(SingularMatrix):
    """The projected pencil is singular at the expansion point."""


class ReducedInnerGSingular(SingularMatrix):
    """The projected inner matrix ``V2^H G V2`` is singular."""


class SingularInnerG(SingularMatrix):
    """Variant AF2 requires a nonsingular inner matrix G."""


class ParseError(SpmorError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(SpmorError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonPdInductance(ValidationError):
    """The assembled inductance matrix is not positive definite."""


class RelationViolated(SpmorError):
    def __init__(self, relation, residual, tolerance):
        self.relation = relation
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"relation {relation!r} violated: residual {residual:.3e} > {tolerance:.3e}"
        )


class TargetUnreachable(SpmorError):
    """The Krylov sequence deflated completely before reaching the target.

    The maximal basis that could be built is attached as ``basis``.
    """

    def __init__(self, target_n, basis):
        self.target_n = target_n
        self.basis = basis
        super().__init__(
            f"block-Krylov space exhausted at n={basis.n} before target n={target_n}"
        )


class GridMismatch(SpmorError, ValueError):
    """Two frequency responses were sampled on different grids."""
