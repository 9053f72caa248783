"""Exception classes.

Every error carries an ``exit_code`` so the CLI can map failures onto its
exit-code contract: 2 usage/config, 3 data, 4 numeric.
"""


class RHullError(Exception):
    exit_code = 1


class UsageError(RHullError):
    exit_code = 2


class InvalidConfig(UsageError):
    pass


class DataError(RHullError):
    exit_code = 3


class ParseError(DataError):
    pass


class EmptyCloud(DataError):
    pass


class TooFewPoints(DataError):
    pass


class AllCollinear(DataError):
    pass


class GridMismatch(DataError):
    pass


class UnknownModel(DataError):
    pass


class NumericError(RHullError):
    exit_code = 4


class InvalidRadius(NumericError):
    pass


class EmptyBoundary(NumericError):
    pass


class DegenerateRegion(NumericError):
    pass


class AlphaOutOfRange(NumericError):
    pass


class DegenerateSampleSize(NumericError):
    pass


class RejectionStall(NumericError):
    pass
