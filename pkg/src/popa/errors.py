"""Exception hierarchy. Every domain error derives from PopaError."""


class PopaError(ValueError):
    pass


class DimensionMismatch(PopaError):
    pass


class NonMember(PopaError):
    """A point lies outside the open half-space 1 + rho(x) > eps_mem."""


class ZeroDirection(PopaError):
    pass


class NullDirection(PopaError):
    """rho vanishes on a direction that needs rho != 0."""


class NoCase(PopaError):
    pass


class NotCommutative(PopaError):
    def __init__(self, msg, pair=None):
        super().__init__(msg)
        self.pair = pair


class DomainViolation(PopaError):
    pass


class Unvalidated(PopaError):
    pass


class ConstraintViolation(PopaError):
    pass


class NotHomomorphic(PopaError):
    pass


class InconsistentIndex(PopaError):
    pass


class NotCollinear(PopaError):
    pass


class ZeroImage(PopaError):
    pass


class NotUnitDirection(PopaError):
    pass


class NotInjective(PopaError):
    pass


class NonConvergent(PopaError):
    def __init__(self, msg, estimate=None):
        super().__init__(msg)
        self.estimate = estimate


class DegenerateFit(PopaError):
    pass


class BoxOutsideDomain(PopaError):
    pass
