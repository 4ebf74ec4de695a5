#!/usr/bin/env python3
"""Exception types shared by the solvers and the command line, with their exit codes."""

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


class LabError(Exception):
    exit_code = EXIT_ASSERTION


class InputError(LabError, ValueError):
    """Malformed or invalid input supplied by the caller."""
    exit_code = EXIT_INPUT


class GraphFormatError(InputError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class GameValidationError(InputError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class CertificateError(InputError):
    def __init__(self, kind, violations):
        self.kind = kind
        self.violations = list(violations)
        super().__init__(f"invalid {kind}: " + "; ".join(self.violations))


class UnknownFamilyError(InputError):
    pass


class ImplicitGameError(InputError):
    """An implicit game was handed to a routine that needs the explicit coalition list."""


class BudgetExceeded(LabError):
    exit_code = EXIT_BUDGET

    def __init__(self, budget, limit, detail=""):
        self.budget = budget
        self.limit = limit
        text = f"{budget} budget of {limit} exceeded"
        if detail:
            text += f" ({detail})"
        super().__init__(text)


class AssertionFailure(LabError):
    exit_code = EXIT_ASSERTION


class InternalConsistencyError(LabError):
    exit_code = EXIT_ASSERTION


def exit_code_for(error):
    if isinstance(error, LabError):
        return error.exit_code
    return EXIT_INPUT
