"""Exception types raised by the moment-recovery routines.

Every error raised deliberately by this package derives from
:class:`MomentRecoveryError`, so callers can catch the whole family with a
single ``except`` clause while still distinguishing the specific failure.
"""

from __future__ import annotations

__all__ = [
    "MomentRecoveryError",
    "OutOfDomain",
    "PrecisionInsufficient",
    "NonIntegerScaledOrder",
    "InvalidRadius",
    "ResolutionMismatch",
    "UnsortedSupport",
    "InvalidRegion",
]


class MomentRecoveryError(Exception):
    """Base class for all errors raised by this package."""


class OutOfDomain(MomentRecoveryError, ValueError):
    """An evaluation point lies outside the closed unit square or interval."""


class PrecisionInsufficient(MomentRecoveryError):
    """The requested numeric policy cannot support the requested order.

    The alternating integer weights grow roughly like ``3**order``, so
    machine doubles lose all significance once the combined order passes a
    few dozen.  Callers should retry with ``exact-rational`` or a big-float
    policy with more bits.
    """


class NonIntegerScaledOrder(MomentRecoveryError, ValueError):
    """Extrapolation requested with a scale whose rescaled order ``a/c``
    is not an integer, so no moment array of that order can exist."""


class InvalidRadius(MomentRecoveryError, ValueError):
    """A kernel-concentration radius is not inside ``(0, min(x, 1-x))``."""


class ResolutionMismatch(MomentRecoveryError, ValueError):
    """Two gridded objects (fields, masks) do not share a compatible grid,
    or a field sampled at cell endpoints was passed where cell centers are
    required (or vice versa)."""


class UnsortedSupport(MomentRecoveryError, ValueError):
    """A discrete support is not strictly increasing."""


class InvalidRegion(MomentRecoveryError, ValueError):
    """A region is degenerate, self-intersecting, or leaves the unit square."""
