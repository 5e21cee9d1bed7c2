"""Exception types shared across the toolkit."""


class BeliefKitError(Exception):
    """Base class for every error raised by this package."""


class DuplicateLabel(BeliefKitError):
    pass


class NotAPartition(BeliefKitError):
    def __init__(self, message, offending=None):
        super().__init__(message)
        self.offending = offending


class CarrierMismatch(BeliefKitError):
    pass


class UnknownPoint(BeliefKitError):
    pass


class UnknownPlayer(BeliefKitError):
    pass


class UnknownState(BeliefKitError):
    pass


class NotMeasurable(BeliefKitError):
    """A map fails measurability; `witness` is an offending target set."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotMeasurableSet(BeliefKitError):
    """A point set is not a union of atoms; `fragment` is the split piece."""

    def __init__(self, message, fragment=None):
        super().__init__(message)
        self.fragment = fragment


class NotAProduct(BeliefKitError):
    pass


class BadCoordinate(BeliefKitError):
    pass


class BadProbability(BeliefKitError):
    pass


class EventNotMeasurable(BeliefKitError):
    """An event escapes some player's sigma-field; carries the player and,
    for iterated operators, the iteration at which it happened."""

    def __init__(self, message, player=None, iteration=None):
        super().__init__(message)
        self.player = player
        self.iteration = iteration


class InvalidTypeSpace(BeliefKitError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InternalMeasurabilityFailure(BeliefKitError):
    """The hierarchy labeling map escaped M_{-i}; impossible on validated
    inputs, so reaching this is a bug or an unvalidated space."""


class ParameterSpaceMismatch(BeliefKitError):
    pass


class SearchSpaceTooLarge(BeliefKitError):
    def __init__(self, message, required=None, limit=None):
        super().__init__(message)
        self.required = required
        self.limit = limit


class NotAMorphism(BeliefKitError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InvalidGame(BeliefKitError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ParseError(BeliefKitError):
    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class SchemaError(BeliefKitError):
    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path


class SemanticError(BeliefKitError):
    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path
