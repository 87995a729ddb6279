"""Exception hierarchy shared by all degenex modules.

Every error raised on purpose by the library derives from DegenexError, so
callers (and the CLI) can distinguish "the input is bad / the computation is
infeasible" from genuine bugs.
"""


class DegenexError(Exception):
    """Base class for all errors raised by degenex."""


class ZeroAtNegativePower(DegenexError):
    """A Laurent matrix with negative powers was evaluated at z = 0."""


class ShapeMismatch(DegenexError):
    """Matrix/vector dimensions are incompatible."""


class NotPSD(DegenexError):
    """A matrix required to be positive semidefinite has a clearly negative eigenvalue."""


class Disconnected(DegenexError):
    """The hypergraph is not connected."""


class EmptyPhi(DegenexError):
    """The target support carries no probability mass (q = 0)."""


class SingularMoment(DegenexError):
    """The moment matrix is too ill-conditioned to invert directly."""


class CoincidentPoints(DegenexError):
    """Interpolation points are not pairwise distinct (or contain zero)."""


class RankDeficient(DegenexError):
    """The vector family does not span the ambient space."""


class NotReproducingTarget(DegenexError):
    """The simulated protocol output does not match the target state."""


class DimensionTooLarge(DegenexError):
    """A dense simulation would exceed the configured size cap."""


class NotSymmetric(DegenexError):
    """A closed form that needs a centrally symmetric norm was asked for without one."""


class DegenerateRate(DegenexError):
    """Rate R = 0 was requested from an evaluator that is only defined for R > 0."""


class SupportMismatch(DegenexError):
    """A flag distribution puts mass where every sampled branch norm vanishes."""


class AbsoluteContinuityViolated(DegenexError):
    """KL divergence of P against Q with P not absolutely continuous w.r.t. Q."""


class AtomSingularity(DegenexError):
    """A potential/objective was evaluated exactly at an atom of the measure."""


class TooCloseToSupport(DegenexError):
    """Finite-difference harmonicity check attempted too close to the support."""


class GridTooSmall(DegenexError):
    """The candidate grid is too small for the requested point count."""


class SchemaError(DegenexError):
    """An input file does not match the documented JSON schema."""


class ValidationFailure(DegenexError):
    """A claimed degeneration (or internal consistency check) failed validation."""


class Infeasible(DegenexError):
    """No feasible certificate exists within the configured limits."""
