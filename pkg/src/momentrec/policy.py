"""Numeric evaluation policies.

Every routine that evaluates the inversion sums accepts a
:class:`NumericPolicy` deciding how arithmetic is carried out:

``exact-rational``
    All values are :class:`fractions.Fraction`.  No rounding anywhere.
    Slow but the only mode in which results are certificates.

``big-float(bits)``
    mpmath arbitrary-precision floats with a stated mantissa size.
    The default for anything with combined order above a few dozen.

``machine-double``
    Plain Python/NumPy doubles.  Fast, but the alternating weights reach
    ``~3**order`` so cancellation destroys the result well before the
    hard cap enforced here (combined order 60).
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

import mpmath

from .errors import PrecisionInsufficient

__all__ = [
    "NumericPolicy",
    "EXACT",
    "DOUBLE",
    "bigfloat",
    "parse_policy",
    "default_precision_bits",
    "default_policy",
    "working_precision",
    "coerce",
    "to_float",
    "format_value",
    "parse_value",
    "PolicyValue",
]

PolicyValue = Union[Fraction, mpmath.mpf, float]


@dataclass(frozen=True, slots=True)
class NumericPolicy:
    """How to carry out arithmetic: ``exact``, ``bigfloat``, or ``double``.

    Attributes
    ----------
    kind : str
        One of ``"exact"``, ``"bigfloat"``, ``"double"``.
    precision_bits : int
        Mantissa bits.  Only meaningful for ``bigfloat``; stored as 0 for
        the other kinds.
    """

    kind: str
    precision_bits: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("exact", "bigfloat", "double"):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "bigfloat" and self.precision_bits < 64:
            raise ValueError("big-float policy needs at least 64 bits")
        if self.kind != "bigfloat" and self.precision_bits != 0:
            object.__setattr__(self, "precision_bits", 0)

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"

    def effective_bits(self) -> float:
        """Mantissa bits this policy carries (inf for exact)."""
        if self.kind == "exact":
            return math.inf
        if self.kind == "bigfloat":
            return float(self.precision_bits)
        return 53.0

    def weakest(self, other: "NumericPolicy") -> "NumericPolicy":
        """The less precise of two policies."""
        return self if self.effective_bits() <= other.effective_bits() else other

    def spell(self) -> str:
        """Canonical command-line spelling."""
        if self.kind == "exact":
            return "exact-rational"
        if self.kind == "double":
            return "machine-double"
        return f"big-float({self.precision_bits})"


EXACT = NumericPolicy("exact")
DOUBLE = NumericPolicy("double")


def bigfloat(bits: int) -> NumericPolicy:
    return NumericPolicy("bigfloat", bits)


def default_precision_bits(alpha: int, alpha_prime: int = 0) -> int:
    """Default big-float mantissa size for the given orders.

    The alternating weight sums amplify rounding error by roughly
    ``2**(1.585 * (alpha + alpha_prime))``; one and a half bits per unit of
    combined order plus headroom keeps the final result good to far better
    than double precision at every order used here.
    """
    return max(128, math.ceil(1.5 * (alpha + alpha_prime)) + 64)


def default_policy(alpha: int, alpha_prime: int = 0) -> NumericPolicy:
    return bigfloat(default_precision_bits(alpha, alpha_prime))


def parse_policy(text: str) -> NumericPolicy:
    """Parse a policy spelling such as ``exact-rational`` or ``big-float(256)``.

    Accepted spellings (case-insensitive):

    * ``exact-rational``, ``exact``
    * ``big-float(N)``, ``bigfloat(N)``, ``bigfloat:N``
    * ``machine-double``, ``double``
    """
    t = text.strip().lower()
    if t in ("exact-rational", "exact"):
        return EXACT
    if t in ("machine-double", "double"):
        return DOUBLE
    for prefix in ("big-float(", "bigfloat("):
        if t.startswith(prefix) and t.endswith(")"):
            return bigfloat(int(t[len(prefix):-1]))
    if t.startswith(("big-float:", "bigfloat:")):
        return bigfloat(int(t.split(":", 1)[1]))
    raise ValueError(
        f"cannot parse numeric policy {text!r}; expected exact-rational, "
        "big-float(N), or machine-double"
    )


@contextlib.contextmanager
def working_precision(policy: NumericPolicy) -> Iterator[None]:
    """Context manager pinning mpmath's precision to the policy's bits.

    A no-op for exact and double policies.
    """
    if policy.kind == "bigfloat":
        with mpmath.workprec(policy.precision_bits):
            yield
    else:
        yield


def coerce(value, policy: NumericPolicy) -> PolicyValue:
    """Convert ``value`` into the policy's scalar type.

    Exact inputs (int, Fraction) convert losslessly into any policy.
    Inexact inputs (float, mpf) cannot be promoted to exact-rational:
    that would launder rounding error into a certificate, so it raises.
    """
    if policy.kind == "exact":
        if isinstance(value, (int, Fraction)):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        raise PrecisionInsufficient(
            f"cannot promote inexact {type(value).__name__} to exact-rational"
        )
    if policy.kind == "bigfloat":
        with mpmath.workprec(policy.precision_bits):
            if isinstance(value, Fraction):
                return mpmath.mpf(value.numerator) / value.denominator
            if isinstance(value, str):
                f = Fraction(value) if "/" in value else None
                if f is not None:
                    return mpmath.mpf(f.numerator) / f.denominator
                return mpmath.mpf(value)
            return mpmath.mpf(value)
    # double
    if isinstance(value, Fraction):
        return value.numerator / value.denominator
    if isinstance(value, str):
        if "/" in value:
            f = Fraction(value)
            return f.numerator / f.denominator
        return float(value)
    return float(value)


def to_float(value) -> float:
    """Collapse any policy scalar to a machine double (for plotting, grids)."""
    if isinstance(value, Fraction):
        return value.numerator / value.denominator
    return float(value)


def format_value(value, policy: NumericPolicy) -> str:
    """Render a policy scalar for delimited output, round-trippable
    under the same policy."""
    if policy.kind == "exact":
        return str(Fraction(value))
    if policy.kind == "bigfloat":
        dps = int(policy.precision_bits * 0.30103) + 5
        with mpmath.workprec(policy.precision_bits):
            return mpmath.nstr(
                mpmath.mpf(value), dps, strip_zeros=False, min_fixed=1, max_fixed=0
            )
    return repr(float(value))


def parse_value(text: str, policy: NumericPolicy) -> PolicyValue:
    """Inverse of :func:`format_value`."""
    return coerce(text.strip(), policy)
