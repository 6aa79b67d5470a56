"""Exception hierarchy shared across the pipeline.

Each exception carries an ``exit_code`` used by the command-line front end:
2 for configuration problems, 3 for data problems, 4 for numeric aborts.
"""


class ComplaintLabError(Exception):
    exit_code = 1


class ConfigError(ComplaintLabError):
    exit_code = 2


class DataError(ComplaintLabError):
    exit_code = 3


class NumericError(ComplaintLabError):
    exit_code = 4


# ingestion
class MissingColumn(DataError):
    def __init__(self, name):
        super().__init__(f"missing column {name!r}")
        self.name = name


class MalformedRow(DataError):
    def __init__(self, line_no, reason=""):
        msg = f"malformed row at line {line_no}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.line_no = line_no


class EncodingError(DataError):
    def __init__(self, offset):
        super().__init__(f"invalid UTF-8 at byte offset {offset}")
        self.offset = offset


# numerics
class ZeroVector(NumericError):
    pass


class NonFiniteInput(NumericError):
    pass


class RankTooLarge(ConfigError):
    pass


class EmptyMatrix(DataError):
    pass


class EmptyCorpus(DataError):
    pass


class EmptyDocument(DataError):
    pass


class RowCountMismatch(DataError):
    pass


class DimensionMismatch(DataError):
    pass


# classifiers
class DegenerateSplit(DataError):
    pass


class SingleClassTraining(DataError):
    pass


class EmptySequence(DataError):
    pass


class FeatureModelMismatch(ConfigError):
    """Bag-of-words features handed to a sequence model (or vice versa)."""


# metrics
class LengthMismatch(DataError):
    pass


class NonBinaryLabels(DataError):
    pass


class SchemaMismatch(DataError):
    pass


# generation
class CorpusTooShort(DataError):
    pass


class CorpusTooSmall(DataError):
    pass


class UnknownStartToken(DataError):
    pass


class EmptyBatch(DataError):
    pass


class NonFiniteLoss(NumericError):
    pass
