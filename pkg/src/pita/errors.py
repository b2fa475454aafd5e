"""Exception types shared across the package."""


class PitaError(Exception):
    """Base class for errors raised by this package."""


class CompositionError(PitaError):
    """Endpoints of two maps do not match up for composition."""


class ShapeError(PitaError):
    """Input data does not have the shape a construction requires,
    e.g. a square that does not commute or a non-bijective map where
    a quasibijection is needed."""


class NotFactorisableError(PitaError):
    """No factorisation (or more than one) exists where exactly one
    was required."""


class UnsupportedInstanceError(PitaError):
    """The requested operation is not defined for this instance."""


class IntegrityError(PitaError):
    """An instance answered queries inconsistently, or a derived
    structure failed an internal cross-check that should hold by
    construction."""
