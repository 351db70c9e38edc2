"""Exception hierarchy shared by all modules."""


class QmtError(ValueError):
    """Base class for every validation error raised by the package."""


class NegativeValue(QmtError):
    pass


class ValueAboveOne(QmtError):
    pass


class AllZero(QmtError):
    pass


class TooSmallDimension(QmtError):
    pass


class DimensionMismatch(QmtError):
    pass


class IncompleteSet(QmtError):
    pass


class NonPositiveOrder(QmtError):
    pass


class OrderOutOfRange(QmtError):
    pass


class SingularGap(QmtError):
    pass


class InsufficientInput(QmtError):
    pass


class DegenerateSpectrum(QmtError):
    """Raised by the naive J evaluator when two nonzero values nearly coincide."""


class BadParams(QmtError):
    pass


class RankOutOfRange(QmtError):
    pass
