class OrbifoldKitError(Exception):
    """Base class for all errors raised by orbifoldkit."""


class EmptySolution(OrbifoldKitError):
    """A linear congruence has no solution on the torus."""


class InvalidInstance(OrbifoldKitError, ValueError):
    """Malformed instance, portrait or matrix input."""


class NotEquivariant(OrbifoldKitError):
    def __init__(self, which):
        super().__init__(f"{which} is not equivariant under the rotation group")
        self.which = which


class NotCompatible(OrbifoldKitError):
    """pi0 . Q . F does not factor through pi0 . Q by a single deck element."""


class InconsistentFiber(OrbifoldKitError):
    """Local degree ratio differs across a fiber; the pair is not a QOTE."""


class IncompletePortrait(OrbifoldKitError):
    """A postcritical vertex is missing part of its preimage list."""


class PathDisagreement(OrbifoldKitError):
    """The two pi-injectivity decision procedures gave different answers."""


class TrivialH(OrbifoldKitError):
    """Quotient requested for a pair whose subgroup H is trivial."""


class CheckFailure(OrbifoldKitError, AssertionError):
    """A mathematical identity that must hold was violated at runtime."""
