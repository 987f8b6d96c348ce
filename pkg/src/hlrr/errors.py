"""Exception types raised by the q-series engine."""


class QSeriesError(Exception):
    """Base class for all engine errors."""


class ZeroLeadingTerm(QSeriesError, ZeroDivisionError):
    """Inverting a series that vanishes to its working order."""


class SingularPochhammer(QSeriesError, ZeroDivisionError):
    """A Pochhammer ratio has an uncancelled zero factor in its denominator."""


class RepeatedVariable(QSeriesError, ValueError):
    """Symmetrisation over an alphabet with two equal variables."""


class BadParams(QSeriesError, ValueError):
    """Parameters outside the validity domain of a builder or identity."""


class UnknownIdentity(QSeriesError, KeyError):
    """Identity id not present in the catalogue."""

    def __str__(self):
        return Exception.__str__(self)


class UncertifiedSpec(QSeriesError, ValueError):
    """A lattice sum whose summand exponents are not provably bounded below."""


UncertifiedAlphabet = UncertifiedSpec


class NoStabilisation(QSeriesError, RuntimeError):
    """A rectangular limit did not stabilise before the configured cap."""


class PoleEncountered(QSeriesError, ZeroDivisionError):
    """A denominator factor of a finite hypergeometric sum is exactly zero."""
