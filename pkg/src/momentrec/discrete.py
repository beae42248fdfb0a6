"""Distribution-function recovery from power moments.

For a measure on [0, 1] with moments m(j) = E[X**j], the recovered
distribution function at x is the finite sum

    F(x) = sum_j c_j(alpha, kappa) * m(j),    kappa = floor(alpha * x),

whose integer coefficients collapse to the closed form

    c_0 = 1,   c_j = 0 for 1 <= j <= kappa,
    c_j = (-1)**(j - kappa) * C(alpha, j) * C(j - 1, kappa)  for j > kappa.

Equivalently F(x) = sum_k p_k * P(Binomial(alpha, x_k) <= kappa), which
is the identity the property tests pin the weights against.  F is
piecewise constant on the cells [kappa/alpha, (kappa+1)/alpha), hence
right-continuous, and converges to the true distribution function at
continuity points as the order grows.

Atom weights come out by differencing F across midpoints between
adjacent support points; the weights so produced always add up to m(0)
exactly, by telescoping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import OutOfDomain, PrecisionInsufficient, UnsortedSupport
from .inversion import _convert_value, _dot, floor_index
from .moments import MomentGrid, MomentVector
from .policy import (
    EXACT,
    NumericPolicy,
    default_policy,
    to_float,
    working_precision,
)

__all__ = [
    "cdf_weights",
    "binomial_cdf",
    "cdf_recover_1d",
    "RecoveredCDF",
    "recover_cdf_1d",
    "pmf_recover",
    "cdf_recover_2d",
]

# Same hard stop as the field inversion, per axis: the CDF weights also
# reach ~3**order, so doubles are refused beyond it.
_DOUBLE_AXIS_CAP = 60


def _check_cdf_policy(policy: NumericPolicy, alpha: int) -> None:
    if policy.kind == "double" and alpha > _DOUBLE_AXIS_CAP:
        raise PrecisionInsufficient(
            f"machine-double refused at order {alpha} > {_DOUBLE_AXIS_CAP} "
            "for distribution recovery"
        )


@lru_cache(maxsize=None)
def cdf_weights(alpha: int, kappa: int) -> tuple[int, ...]:
    """Integer coefficients c_j, j = 0..alpha, applied to the moment
    vector to evaluate the recovered distribution function on cell
    kappa."""
    if not (0 <= kappa <= alpha):
        raise ValueError(f"cell {kappa} outside 0..{alpha}")
    out = [0] * (alpha + 1)
    out[0] = 1
    for j in range(kappa + 1, alpha + 1):
        sign = -1 if (j - kappa) % 2 else 1
        out[j] = sign * math.comb(alpha, j) * math.comb(j - 1, kappa)
    return tuple(out)


def binomial_cdf(order: int, u, x, policy: NumericPolicy = EXACT):
    """P(Binomial(order, u) <= floor(order * x)).

    The recovered distribution function of a point mass at u equals this
    exactly, which makes it the independent oracle for cdf_weights.
    """
    kappa = floor_index(order, x)
    uf = Fraction(u)
    if uf < 0 or uf > 1:
        raise OutOfDomain(f"success probability {u} outside [0, 1]")
    if policy.is_exact:
        return sum(
            math.comb(order, k) * uf**k * (1 - uf) ** (order - k)
            for k in range(kappa + 1)
        )
    if policy.kind == "bigfloat":
        with working_precision(policy):
            um = mpmath.mpf(uf.numerator) / uf.denominator
            return mpmath.fsum(
                math.comb(order, k) * um**k * (1 - um) ** (order - k)
                for k in range(kappa + 1)
            )
    ud = uf.numerator / uf.denominator
    if ud == 0.0:
        return 1.0
    if ud == 1.0:
        return 1.0 if kappa == order else 0.0
    lgam = [math.lgamma(i + 1) for i in range(order + 1)]
    return math.fsum(
        math.exp(
            lgam[order]
            - lgam[k]
            - lgam[order - k]
            + k * math.log(ud)
            + (order - k) * math.log1p(-ud)
        )
        for k in range(kappa + 1)
    )


def _resolve_policy(m: MomentVector | MomentGrid, policy, alpha, alpha_prime=0):
    if policy is not None:
        return policy
    if m.policy.is_exact:
        return EXACT
    return default_policy(alpha, alpha_prime)


def cdf_recover_1d(
    m: MomentVector,
    x,
    alpha: int | None = None,
    policy: NumericPolicy | None = None,
):
    """Recovered distribution function at x, as a policy scalar."""
    if alpha is None:
        alpha = m.alpha
    if alpha > m.alpha:
        raise ValueError(f"moment vector of order {m.alpha} cannot drive order {alpha}")
    policy = _resolve_policy(m, policy, alpha)
    _check_cdf_policy(policy, alpha)
    if policy.is_exact and not m.policy.is_exact:
        raise PrecisionInsufficient(
            "exact-rational evaluation needs exact moments; these are "
            f"{m.policy.spell()}"
        )
    kappa = floor_index(alpha, x)
    ws = cdf_weights(alpha, kappa)
    with working_precision(policy):
        vec = [_convert_value(v, policy.kind) for v in m.values[: alpha + 1]]
        return _dot(ws, vec, policy.kind)


@dataclass(frozen=True)
class RecoveredCDF:
    """The recovered distribution function, stored by cell.

    Piecewise constant on [kappa/alpha, (kappa+1)/alpha); calling it
    evaluates by exact floor indexing.
    """

    alpha: int
    cell_values: tuple
    policy: NumericPolicy

    def __call__(self, x):
        return self.cell_values[floor_index(self.alpha, x)]

    def to_floats(self) -> tuple[float, ...]:
        return tuple(to_float(v) for v in self.cell_values)


def recover_cdf_1d(
    m: MomentVector,
    alpha: int | None = None,
    policy: NumericPolicy | None = None,
) -> RecoveredCDF:
    """All alpha + 1 cell values of the recovered distribution function."""
    if alpha is None:
        alpha = m.alpha
    policy = _resolve_policy(m, policy, alpha)
    cells = tuple(
        cdf_recover_1d(m, Fraction(kappa, alpha) if alpha else Fraction(0), alpha, policy)
        for kappa in range(alpha + 1)
    )
    return RecoveredCDF(alpha, cells, policy)


def pmf_recover(
    m: MomentVector,
    support,
    alpha: int | None = None,
    policy: NumericPolicy | None = None,
) -> tuple:
    """Atom weights on a known support, by differencing the recovered
    distribution function across midpoints between adjacent atoms.

    The weights telescope to m(0) exactly.  For noisy or low-order input
    individual weights can come out slightly negative; they are returned
    as computed so the caller sees the failure instead of a silent clip.
    """
    support = tuple(Fraction(u) if isinstance(u, (int, str, Fraction)) else u for u in support)
    if not support:
        raise ValueError("support must be nonempty")
    for u in support:
        uf = Fraction(u)
        if uf < 0 or uf > 1:
            raise OutOfDomain(f"support point {u} outside [0, 1]")
    for a, b in zip(support, support[1:]):
        if not (Fraction(a) < Fraction(b)):
            raise UnsortedSupport("support must be strictly increasing")
    if alpha is None:
        alpha = m.alpha
    policy = _resolve_policy(m, policy, alpha)
    total = m.values[0]
    if len(support) == 1:
        return (total,)
    mids = [
        (Fraction(a) + Fraction(b)) / 2 for a, b in zip(support, support[1:])
    ]
    fvals = [cdf_recover_1d(m, mid, alpha, policy) for mid in mids]
    probs = [fvals[0]]
    for lo, hi in zip(fvals, fvals[1:]):
        probs.append(hi - lo)
    probs.append(total - fvals[-1])
    return tuple(probs)


def cdf_recover_2d(
    m: MomentGrid,
    x,
    y,
    alpha: int | None = None,
    alpha_prime: int | None = None,
    policy: NumericPolicy | None = None,
):
    """Recovered joint distribution function at (x, y): the tensor
    product of the 1-D coefficient vectors applied to the moment
    rectangle."""
    if alpha is None:
        alpha = m.alpha
    if alpha_prime is None:
        alpha_prime = m.alpha_prime
    if alpha > m.alpha or alpha_prime > m.alpha_prime:
        raise ValueError(
            f"moment grid of order ({m.alpha}, {m.alpha_prime}) cannot drive "
            f"order ({alpha}, {alpha_prime})"
        )
    policy = _resolve_policy(m, policy, alpha, alpha_prime)
    _check_cdf_policy(policy, alpha)
    _check_cdf_policy(policy, alpha_prime)
    if policy.is_exact and not m.policy.is_exact:
        raise PrecisionInsufficient(
            "exact-rational evaluation needs exact moments; these are "
            f"{m.policy.spell()}"
        )
    kx = floor_index(alpha, x)
    ky = floor_index(alpha_prime, y)
    cx = cdf_weights(alpha, kx)
    cy = cdf_weights(alpha_prime, ky)
    kind = policy.kind
    with working_precision(policy):
        rows = [
            [_convert_value(v, kind) for v in m.values[j][: alpha_prime + 1]]
            for j in range(alpha + 1)
        ]
        inner = [_dot(cy, row, kind) for row in rows]
        return _dot(cx, inner, kind)
