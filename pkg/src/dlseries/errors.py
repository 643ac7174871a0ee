"""Exception hierarchy shared by every module of the package."""


class DLSeriesError(Exception):
    """Base class for all errors raised by dlseries."""


class InfiniteCokernel(DLSeriesError):
    """A finite quotient was demanded but the cokernel has a free part."""


class NotContained(DLSeriesError):
    """A sublattice is not contained in the lattice it is quotiented from."""


class RankMismatch(DLSeriesError):
    """Two lattices or matrices live in ambient spaces of different rank."""


class InvalidCartan(DLSeriesError):
    """The supplied roots/coroots do not form a finite-type root datum."""


class NonCrystallographic(InvalidCartan):
    """Pairings between roots and coroots are not integral."""


class InvalidTwist(DLSeriesError):
    """The Frobenius twist is not a finite-order automorphism permuting the simple coroots."""


class TwistNotLiftable(DLSeriesError):
    """The twist does not lift to the free cover used by the regular embedding."""


class CapExceeded(DLSeriesError):
    """An enumeration would exceed its configured size cap."""


class NotComparable(DLSeriesError):
    """Two sequences are not comparable for the componentwise Bruhat order."""


class CharacterDomainMismatch(DLSeriesError):
    """A torus character was evaluated on the wrong finite torus."""


class NotInInterval(DLSeriesError):
    """A sequence lies outside the interval I(w, theta)."""


class InvalidLeviTwist(DLSeriesError):
    """The pair (I, v) does not satisfy v.phi(I) = I."""


class PreconditionError(DLSeriesError):
    """An operation was called outside its documented domain."""


class UnknownType(DLSeriesError):
    """A Cartan component could not be matched against the classification."""


class InvariantViolation(DLSeriesError):
    """An internal consistency check failed; this always indicates a bug."""
