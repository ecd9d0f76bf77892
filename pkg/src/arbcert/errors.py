"""Exception hierarchy for arbcert."""


class ArbcertError(Exception):
    """Base class for every error raised by this package."""


class TreeError(ArbcertError):
    pass


class MultipleRoots(TreeError):
    pass


class OrphanNode(TreeError):
    pass


class TimeSkip(TreeError):
    pass


class ShortBranch(TreeError):
    pass


class TimeOutOfRange(TreeError):
    pass


class TerminalNode(TreeError):
    pass


class UnknownNode(TreeError, KeyError):
    pass


class SubtreeTooLarge(TreeError):
    pass


class FamilyIncomplete(TreeError):
    pass


class ModelError(ArbcertError):
    pass


class InvariantViolation(ModelError):
    def __init__(self, node, reason):
        super().__init__(f"node {node!r}: {reason}")
        self.node = node
        self.reason = reason


class IncompleteStrategy(ModelError):
    pass


class NotSelfFinancing(ModelError):
    pass


class IntervalViolated(ArbcertError):
    pass


class ClassificationImpossible(ArbcertError):
    pass


class NotAViolation(ArbcertError):
    pass


class InternalInconsistency(ArbcertError):
    pass


class MalformedLP(ArbcertError):
    pass


class ModelTooLarge(ArbcertError):
    pass


class BadMeasure(ArbcertError):
    pass


class NotSingleStep(ArbcertError):
    pass


class MeasureNotEquivalent(BadMeasure):
    pass


class ModelSyntaxError(ArbcertError):
    pass


class BadConfig(ArbcertError):
    pass
