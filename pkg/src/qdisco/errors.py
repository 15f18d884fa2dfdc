"""Exception hierarchy shared by all modules.

Each error class carries an ``exit_code`` used by the command line frontend:
2 for usage problems, 3 for parse/reduction/compilation failures and 4 for
numeric failures.
"""


class QdiscoError(Exception):
    exit_code = 3


class UsageError(QdiscoError):
    exit_code = 2


class PregroupSyntaxError(QdiscoError, ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class NoReduction(QdiscoError):
    def __init__(self, message: str, residue=()):
        super().__init__(message)
        self.residue = tuple(residue)


class TypeMismatch(QdiscoError):
    pass


class ShapeMismatch(QdiscoError):
    exit_code = 4


class UnknownClass(QdiscoError):
    pass


class LexiconError(QdiscoError):
    pass


class Unsupported(QdiscoError):
    pass


class ExtractionFailed(QdiscoError):
    pass


class MissingParam(QdiscoError):
    def __init__(self, word: str, slot: int):
        super().__init__(f"no value for parameter {word}.{slot}")
        self.word = word
        self.slot = slot


class NonShiftable(QdiscoError):
    exit_code = 4


class SimulationTooLarge(QdiscoError):
    exit_code = 4


class EmptyCorpus(QdiscoError):
    pass


class NoParams(QdiscoError):
    pass


class ClassMismatch(QdiscoError):
    pass


class EmptyCandidates(QdiscoError):
    pass
