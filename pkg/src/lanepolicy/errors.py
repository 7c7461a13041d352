"""Exception hierarchy shared across the package.

Every error raised by library code derives from :class:`LanePolicyError` so
callers (including the CLI) can map failures onto exit codes without matching
on message text.
"""

from __future__ import annotations


class LanePolicyError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(LanePolicyError):
    """An input document, parameter value, or argument violates an invariant."""


class NumericDomainError(LanePolicyError):
    """A numeric routine met a non-finite value or an empty/degenerate domain."""


class BracketError(NumericDomainError):
    """A root bracket shows no sign change; the caller must widen or report."""


class InfeasibleError(LanePolicyError):
    """No feasible point exists; the message names the binding constraint."""


class UndefinedServiceError(LanePolicyError):
    """A bus-service quantity was requested at zero frequency."""
