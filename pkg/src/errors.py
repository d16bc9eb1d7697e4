# -*- coding: utf-8 -*-
"""
Exceptions for the weighted Bloch toolkit
=========================================

Every exception derives from WeightedBlochError and from the builtin category
it refines, so callers catching ValueError / ArithmeticError keep working.

The CLI maps exceptions onto exit codes:
    - usage / parse errors (ValueError family)     -> 2
    - numerical failures (ArithmeticError, solver)  -> 3
"""

from __future__ import annotations


class WeightedBlochError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(WeightedBlochError, ValueError):
    """Points or domains of different dimension were combined."""


class DomainError(WeightedBlochError, ValueError):
    """A point lies outside its domain, or a domain is malformed."""


class ParameterError(WeightedBlochError, ValueError):
    """A parameter is out of range or malformed."""


class UnknownNameError(ParameterError):
    """A builtin weight, kernel or catalog map name is not known."""


class ExpressionSyntaxError(WeightedBlochError, ValueError):
    """
    A weight expression could not be parsed.

    Attributes
    ----------
    offset : int
        Byte offset (UTF-8) into the source text where the problem was found.
    """

    def __init__(self, message, offset=0, text=None):
        self.offset = int(offset)
        self.text = text
        super().__init__("%s (at byte offset %d)" % (message, self.offset))


class UnknownIdentifierError(ExpressionSyntaxError):
    """An identifier other than r, x<k> or a known function was used."""

    def __init__(self, name, offset=0, text=None):
        self.name = name
        super().__init__("unknown identifier %r" % name, offset, text)


class CoordinateIndexError(ExpressionSyntaxError):
    """A coordinate variable x<k> refers past the dimension."""


class PositivityError(WeightedBlochError, ArithmeticError):
    """A weight evaluated to a value <= the positivity threshold."""


class WeightDomainError(WeightedBlochError, ArithmeticError):
    """Arithmetic domain error while evaluating a parsed expression."""


class GeodesicError(WeightedBlochError, RuntimeError):
    """No admissible initial path could be found for the geodesic solver."""


class StencilError(WeightedBlochError, ValueError):
    """A finite-difference stencil leaves the domain."""


USAGE_ERRORS = (ValueError, KeyError)
NUMERICAL_ERRORS = (ArithmeticError, GeodesicError, StencilError)
