# -*- coding: utf-8 -*-
"""
errors.py - Exception types shared by the UNForge modules.

Library code raises these; the command scripts (construct.py, verify.py,
pipeline.py) catch ForgeError and turn it into an error event and exit
status 2.
"""

from __future__ import annotations

from typing import Any


class ForgeError(Exception):
    """Base class for every error UNForge raises on purpose."""


class ParameterError(ForgeError, ValueError):
    """A recipe, construction parameter or audit spec is invalid."""


class ModulusMismatch(ForgeError, ValueError):
    """Two field elements or polynomials live over different moduli."""


class NotInvertible(ForgeError, ArithmeticError):
    """Inverse of zero, or of a truncated polynomial with zero constant term."""


class NotInComponent(ForgeError, ValueError):
    """A vertex is outside the zero-certificate component being indexed."""


class PreconditionError(ForgeError, ValueError):
    """A construction or audit precondition does not hold for the given input."""


class GraphFormatError(ForgeError, ValueError):
    """A graph file does not follow the BIPARTITE edge-list format."""


class SamplingBudgetExceeded(ForgeError, RuntimeError):
    """Rejection sampling gave up before producing a simple graph."""

    def __init__(self, message: str, attempts: int) -> None:
        super().__init__(message)
        self.attempts = attempts


class GadgetSearchExhausted(ForgeError, RuntimeError):
    """No sampled gadget passed verification within the attempt budget."""

    def __init__(self, message: str, best: Any) -> None:
        super().__init__(message)
        self.best = best


class ConvergenceError(ForgeError, RuntimeError):
    """An iterative eigensolver stopped above its residual tolerance."""

    def __init__(self, message: str, residual: float) -> None:
        super().__init__(message)
        self.residual = residual


class PathCountTooLarge(ForgeError, RuntimeError):
    """Simple-path enumeration refused because the estimate is too large."""

    def __init__(self, message: str, estimate: float) -> None:
        super().__init__(message)
        self.estimate = estimate


class RecipeError(ForgeError):
    """A recipe stage failed; the original error is chained as __cause__."""

    def __init__(self, message: str, kind: str, stage: str) -> None:
        super().__init__(message)
        self.kind = kind
        self.stage = stage
