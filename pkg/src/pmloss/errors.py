"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PmlossError(Exception):
    """Base class for all library errors."""


class PosetError(PmlossError):
    pass


class CycleError(PosetError):
    def __init__(self, p, q):
        super().__init__(f"relation closure makes {p!r} and {q!r} mutually below each other")
        self.witness = (p, q)


class DuplicateElement(PosetError):
    def __init__(self, element):
        super().__init__(f"element id {element!r} appears more than once")
        self.element = element


class EmptyAxis(PosetError):
    pass


class UnknownElement(PosetError):
    pass


class NotConvex(PosetError):
    def __init__(self, witness):
        p, r, q = witness
        super().__init__(f"subset is not convex: {p!r} < {r!r} < {q!r} with {r!r} outside")
        self.witness = witness


class NotConnected(PosetError):
    def __init__(self, components):
        super().__init__(f"subset splits into {len(components)} comparability components")
        self.components = components


class NotAGrid(PosetError):
    pass


class NotLinear(PosetError):
    pass


class NotComparable(PosetError):
    def __init__(self, p, q):
        super().__init__(f"{p!r} is not below {q!r}")
        self.pair = (p, q)


class FlowError(PmlossError):
    pass


class NotATranslation(FlowError):
    pass


class NotLinePreserving(FlowError):
    pass


class BackendError(PmlossError):
    pass


class ShapeMismatch(BackendError):
    pass


class ElementNotInObject(BackendError):
    pass


class WrongBackend(BackendError):
    pass


class NotInvertible(BackendError):
    pass


class ModuleError(PmlossError):
    pass


class LossError(PmlossError):
    pass


class InfiniteLoss(LossError):
    pass


class InsufficientFlowRange(LossError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NoEpsilonLabel(LossError):
    pass


class NotConstructible(LossError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NonInvertibleStructureMap(LossError):
    pass


class NotConstructibleInputShape(LossError):
    pass


class ProblemFileError(PmlossError):
    """Parse or schema problem in a JSON problem file; ``location`` is a dotted path."""

    def __init__(self, location, message):
        super().__init__(f"{location}: {message}")
        self.location = location
