"""Structured error types shared across the pipeline.

Every error raised by library code derives from DataError, so callers
(and the CLI) can distinguish bad data from programming bugs.
"""


class DataError(Exception):
    """Base class for all data/validation errors raised by this package."""


# -- timeseries ---------------------------------------------------------

class EmptyOverlap(DataError):
    """Two series share no common week range."""


class InsufficientOverlap(DataError):
    """Fewer than the minimum number of pairs remain after shifting."""


class EmptySlice(DataError):
    """No weeks of the series fall in the requested year."""


class NegativeValue(DataError):
    """Search-volume scaling requires non-negative input."""


# -- stats --------------------------------------------------------------

class ZeroVariance(DataError):
    """A coordinate of the pair list is constant."""


class TooFewPairs(DataError):
    """Correlation needs at least three pairs."""


class InvalidDof(DataError):
    """Degrees of freedom must be a positive integer."""


# -- regress ------------------------------------------------------------

class Underdetermined(DataError):
    """Not enough fitted weeks for the number of coefficients."""


class SingularDesign(DataError):
    """Design matrix columns are (near-)collinear."""


class MissingQuery(DataError):
    """A fitted query label is absent from the prediction panel."""


# -- selection ----------------------------------------------------------

class NoUsableQuery(DataError):
    """Every candidate query is NA at every candidate shift."""


# -- ingest -------------------------------------------------------------

class MalformedHeader(DataError):
    """CSV header does not match the interchange format."""


class MalformedRow(DataError):
    """CSV data row does not match the interchange format."""


class NonContiguousAfterFill(DataError):
    """Week stamps are out of order or duplicated, so zero-fill cannot repair them."""


class ValueOutOfRange(DataError):
    """Search-volume value outside the 0-100 range."""


class GapInCases(DataError):
    """Case series has a missing week (cases must be complete)."""


class NegativeCount(DataError):
    """Case counts must be non-negative."""


class DuplicateEntry(DataError):
    """Lexicon contains a repeated (query, language) entry."""


class EmptyQuery(DataError):
    """Lexicon query text is empty."""


# -- synth --------------------------------------------------------------

class InvalidConfig(DataError):
    """Scenario configuration violates its invariants."""


# -- report -------------------------------------------------------------

class OutOfRange(DataError):
    """Correlation coefficient outside [-1, 1]."""


class EmptyLabel(DataError):
    """Figure series must carry a non-empty label."""
