"""Exception types shared across the package.

The split mirrors the CLI exit codes: contract violations and validation
errors exit 2, bound/plan failures exit 1, parse errors exit 3.
"""


class ContractViolation(ValueError):
    """A caller broke a documented precondition (bad index, dimension mismatch)."""


class ValidationError(ValueError):
    """Input data failed structural validation (bad table length, duplicate concepts)."""


class ParseError(ValueError):
    """A file could not be parsed; message carries line/position where known."""


class BoundViolation(RuntimeError):
    """A claimed error rate is inconsistent with the pairwise overlap constraints."""

    def __init__(self, message, pairs=()):
        super().__init__(message)
        self.pairs = tuple(pairs)


class InputOutsideClass(RuntimeError):
    """Queried bit pattern matches no concept in the plan's class."""
