"""Exception hierarchy.

Every error carries its CLI exit code through ``exit_code`` so the command
line can report failures without a lookup table of its own.  Codes are
distinct except that both parse errors exit with 2 and a cuspidal direction
exits with 1, like a failed validation.
"""


class VeechError(Exception):
    exit_code = 1


class ZeroVector(VeechError, ValueError):
    exit_code = 10


class PoleInsideInterval(VeechError, ValueError):
    exit_code = 11


class BudgetExceeded(VeechError, RuntimeError):
    exit_code = 12


class MissingConstants(VeechError, LookupError):
    exit_code = 13


class NotAdmissible(VeechError, ValueError):
    exit_code = 14


class CuspidalOrBoundary(VeechError, ValueError):
    exit_code = 15


class CuspidalDirection(VeechError, ValueError):
    # a cuspidal direction is an answer ("L is infinite"), not a crash
    exit_code = 1


class FirstLetterClash(VeechError, ValueError):
    exit_code = 16


class ShearShapeViolation(VeechError, ArithmeticError):
    exit_code = 17


class ChainAdjacencyViolation(VeechError, ArithmeticError):
    exit_code = 18


class NonConvergence(VeechError, ArithmeticError):
    exit_code = 19


class OutOfRange(VeechError, ValueError):
    exit_code = 20


class IterationBudget(VeechError, RuntimeError):
    exit_code = 21


class BelowRay(VeechError, ValueError):
    exit_code = 23


class InsufficientDigits(VeechError, ValueError):
    exit_code = 22


class DescriptorParseError(VeechError, ValueError):
    exit_code = 2


class WordParseError(VeechError, ValueError):
    exit_code = 2
