"""Moment containers and forward moment computation.

A geometric moment of a density f on the unit square is
``m(k, j) = integral of x**k * y**j * f(x, y)``; for a region it is the
same integral of the indicator, and for a point measure a weighted power
sum.  Everything downstream consumes the finite rectangle of moments
``k <= alpha``, ``j <= alpha_prime`` stored in :class:`MomentGrid` (or the
1-D :class:`MomentVector`), tagged with the numeric policy its entries
were computed under.  That tag is load-bearing: recovery routines refuse
to pretend a double-precision moment array is exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import OutOfDomain, UnsortedSupport
from .policy import (
    DOUBLE,
    EXACT,
    NumericPolicy,
    coerce,
    default_policy,
    format_value,
    parse_policy,
    parse_value,
    to_float,
    working_precision,
)
from .regions import Region

__all__ = [
    "MomentGrid",
    "MomentVector",
    "SampleSet",
    "DiscreteMeasure",
    "DiscreteMeasure2D",
    "polynomial_moments",
    "region_moments",
    "empirical_moments",
    "discrete_moments",
    "discrete_moments_2d",
]


def _is_exact_number(v) -> bool:
    return isinstance(v, (int, Fraction, str))


@dataclass(frozen=True)
class MomentGrid:
    """Rectangle of moments m(k, j), 0 <= k <= alpha, 0 <= j <= alpha_prime.

    ``values[k][j]`` holds m(k, j) as a scalar of the policy's type.
    """

    alpha: int
    alpha_prime: int
    values: tuple
    policy: NumericPolicy

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.alpha_prime < 0:
            raise ValueError("orders must be nonnegative")
        vals = tuple(tuple(row) for row in self.values)
        if len(vals) != self.alpha + 1 or any(
            len(row) != self.alpha_prime + 1 for row in vals
        ):
            raise ValueError(
                f"values must be ({self.alpha + 1}) x ({self.alpha_prime + 1})"
            )
        object.__setattr__(self, "values", vals)

    def value(self, k: int, j: int):
        return self.values[k][j]

    def to_array(self) -> np.ndarray:
        return np.array(
            [[to_float(v) for v in row] for row in self.values], dtype=float
        )

    def monotone_violation(self, depth: int = 4) -> float:
        """Worst violation of the alternating-difference inequalities
        (-1)**(i+i') dx^i dy^i' m >= 0 that every moment array of a
        nonnegative measure on the square satisfies.  0.0 means no
        violation up to the given difference depth."""
        table = [list(row) for row in self.values]
        worst = 0.0
        for i in range(min(depth, self.alpha) + 1):
            col = [list(row) for row in table]
            for i2 in range(min(depth, self.alpha_prime) + 1):
                sign = 1 if (i + i2) % 2 == 0 else -1
                for row in col:
                    for v in row:
                        sv = sign * to_float(v)
                        if sv < -abs(worst):
                            worst = sv
                col = [
                    [row[j + 1] - row[j] for j in range(len(row) - 1)]
                    for row in col
                    if len(row) > 1
                ]
                if not col or not col[0]:
                    break
            table = [
                [table[k + 1][j] - table[k][j] for j in range(len(table[k]))]
                for k in range(len(table) - 1)
            ]
            if not table:
                break
        return abs(worst) if worst < 0 else 0.0

    def save(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["alpha", "alpha_prime", "policy"])
            writer.writerow([self.alpha, self.alpha_prime, self.policy.spell()])
            writer.writerow(["k", "j", "value"])
            for k in range(self.alpha + 1):
                for j in range(self.alpha_prime + 1):
                    writer.writerow([k, j, format_value(self.values[k][j], self.policy)])

    @classmethod
    def load(cls, path) -> "MomentGrid":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header[:3] != ["alpha", "alpha_prime", "policy"]:
                raise ValueError(f"{path}: not a 2-D moment file")
            meta = next(reader)
            alpha, alpha_prime = int(meta[0]), int(meta[1])
            policy = parse_policy(meta[2])
            next(reader)  # column header
            vals = [[None] * (alpha_prime + 1) for _ in range(alpha + 1)]
            for row in reader:
                if not row:
                    continue
                k, j = int(row[0]), int(row[1])
                vals[k][j] = parse_value(row[2], policy)
        if any(v is None for r in vals for v in r):
            raise ValueError(f"{path}: missing moment entries")
        return cls(alpha, alpha_prime, tuple(tuple(r) for r in vals), policy)


@dataclass(frozen=True)
class MomentVector:
    """Moments m(j), 0 <= j <= alpha, of a measure on [0, 1]."""

    alpha: int
    values: tuple
    policy: NumericPolicy

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError("order must be nonnegative")
        vals = tuple(self.values)
        if len(vals) != self.alpha + 1:
            raise ValueError(f"values must have length {self.alpha + 1}")
        object.__setattr__(self, "values", vals)

    def value(self, j: int):
        return self.values[j]

    def to_array(self) -> np.ndarray:
        return np.array([to_float(v) for v in self.values], dtype=float)

    def monotone_violation(self, depth: int | None = None) -> float:
        """Worst violation of (-1)**i d^i m >= 0 (0.0 if none)."""
        if depth is None:
            depth = self.alpha
        seq = list(self.values)
        worst = 0.0
        for i in range(min(depth, self.alpha) + 1):
            sign = 1 if i % 2 == 0 else -1
            for v in seq:
                sv = sign * to_float(v)
                if sv < -abs(worst):
                    worst = sv
            seq = [seq[j + 1] - seq[j] for j in range(len(seq) - 1)]
            if not seq:
                break
        return abs(worst) if worst < 0 else 0.0

    def save(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["alpha", "policy"])
            writer.writerow([self.alpha, self.policy.spell()])
            writer.writerow(["j", "value"])
            for j in range(self.alpha + 1):
                writer.writerow([j, format_value(self.values[j], self.policy)])

    @classmethod
    def load(cls, path) -> "MomentVector":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header[:2] != ["alpha", "policy"]:
                raise ValueError(f"{path}: not a 1-D moment file")
            meta = next(reader)
            alpha = int(meta[0])
            policy = parse_policy(meta[1])
            next(reader)
            vals = [None] * (alpha + 1)
            for row in reader:
                if not row:
                    continue
                vals[int(row[0])] = parse_value(row[1], policy)
        if any(v is None for v in vals):
            raise ValueError(f"{path}: missing moment entries")
        return cls(alpha, tuple(vals), policy)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Paired observations (x_i, y_i) in the closed unit square."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self) -> None:
        xs = np.asarray_chkfinite(self.xs, dtype=float)
        ys = np.asarray_chkfinite(self.ys, dtype=float)
        if xs.ndim != 1 or ys.ndim != 1 or xs.size != ys.size or xs.size == 0:
            raise ValueError("samples must be two equal-length 1-D arrays")
        if xs.min() < 0 or xs.max() > 1 or ys.min() < 0 or ys.max() > 1:
            raise OutOfDomain("samples must lie in the closed unit square")
        xs = xs.copy()
        ys = ys.copy()
        xs.flags.writeable = False
        ys.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return int(self.xs.size)

    def save(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y"])
            for x, y in zip(self.xs, self.ys):
                writer.writerow([repr(float(x)), repr(float(y))])

    @classmethod
    def load(cls, path) -> "SampleSet":
        xs: list[float] = []
        ys: list[float] = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if [h.strip() for h in header[:2]] != ["x", "y"]:
                raise ValueError(f"{path}: expected x,y sample file")
            for row in reader:
                if not row:
                    continue
                xs.append(float(row[0]))
                ys.append(float(row[1]))
        return cls(np.array(xs), np.array(ys))


def _check_support(support: tuple) -> None:
    for u in support:
        if not (0 <= u <= 1):
            raise OutOfDomain(f"support point {u} outside [0, 1]")
    for a, b in zip(support, support[1:]):
        if not (a < b):
            raise UnsortedSupport("support must be strictly increasing")


def _check_probs(probs, exact: bool) -> None:
    total = sum(probs)
    if any(to_float(p) < 0 for p in probs):
        raise ValueError("probabilities must be nonnegative")
    if exact:
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, need exactly 1")
    elif abs(to_float(total) - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {to_float(total)}, need 1")


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure on finitely many points of [0, 1].

    Exact (Fraction) support and weights keep the whole recovery pipeline
    in rational arithmetic; floats are accepted but poison exactness.
    """

    support: tuple
    probs: tuple

    def __post_init__(self) -> None:
        support = tuple(
            Fraction(u) if _is_exact_number(u) else u for u in self.support
        )
        probs = tuple(Fraction(p) if _is_exact_number(p) else p for p in self.probs)
        if len(support) != len(probs) or not support:
            raise ValueError("support and probs must be equal-length, nonempty")
        _check_support(support)
        _check_probs(probs, self.is_exact_input(support, probs))
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @staticmethod
    def is_exact_input(support, probs) -> bool:
        return all(isinstance(v, Fraction) for v in support) and all(
            isinstance(p, Fraction) for p in probs
        )

    @property
    def is_exact(self) -> bool:
        return self.is_exact_input(self.support, self.probs)

    def cdf(self, x):
        """P(X <= x), exact when the measure is exact and x is rational."""
        q = Fraction(x) if _is_exact_number(x) else x
        zero = Fraction(0) if self.is_exact else 0.0
        return sum((p for u, p in zip(self.support, self.probs) if u <= q), zero)


@dataclass(frozen=True)
class DiscreteMeasure2D:
    """Product-structured discrete measure: atoms at (xs[i], ys[j]) with
    weight probs[i][j]."""

    xs: tuple
    ys: tuple
    probs: tuple

    def __post_init__(self) -> None:
        xs = tuple(Fraction(u) if _is_exact_number(u) else u for u in self.xs)
        ys = tuple(Fraction(u) if _is_exact_number(u) else u for u in self.ys)
        probs = tuple(
            tuple(Fraction(p) if _is_exact_number(p) else p for p in row)
            for row in self.probs
        )
        if len(probs) != len(xs) or any(len(row) != len(ys) for row in probs):
            raise ValueError("probs must be len(xs) x len(ys)")
        _check_support(xs)
        _check_support(ys)
        flat = [p for row in probs for p in row]
        exact = all(isinstance(p, Fraction) for p in flat) and all(
            isinstance(u, Fraction) for u in xs + ys
        )
        _check_probs(flat, exact)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "probs", probs)

    @property
    def is_exact(self) -> bool:
        return all(
            isinstance(v, Fraction) for v in self.xs + self.ys
        ) and all(isinstance(p, Fraction) for row in self.probs for p in row)

    def cdf(self, x, y):
        qx = Fraction(x) if _is_exact_number(x) else x
        qy = Fraction(y) if _is_exact_number(y) else y
        zero = Fraction(0) if self.is_exact else 0.0
        return sum(
            (
                self.probs[i][j]
                for i, u in enumerate(self.xs)
                if u <= qx
                for j, v in enumerate(self.ys)
                if v <= qy
            ),
            zero,
        )


def polynomial_moments(
    coeffs: dict,
    alpha: int,
    alpha_prime: int,
    policy: NumericPolicy = EXACT,
) -> MomentGrid:
    """Moments of the polynomial density sum coeffs[p, q] * x**p * y**q.

    m(k, j) = sum over (p, q) of coeffs[p, q] / ((k + p + 1) * (j + q + 1)),
    computed in rational arithmetic and then coerced to the policy.
    """
    exact_coeffs = {
        (int(p), int(q)): Fraction(c) for (p, q), c in coeffs.items()
    }
    vals = []
    for k in range(alpha + 1):
        row = []
        for j in range(alpha_prime + 1):
            acc = Fraction(0)
            for (p, q), c in exact_coeffs.items():
                acc += c / ((k + p + 1) * (j + q + 1))
            row.append(acc)
        vals.append(row)
    with working_precision(policy):
        out = tuple(tuple(coerce(v, policy) for v in row) for row in vals)
    return MomentGrid(alpha, alpha_prime, out, policy)


def region_moments(
    region: Region,
    alpha: int,
    alpha_prime: int,
    policy: NumericPolicy | None = None,
) -> MomentGrid:
    """Moments of the indicator of a region.

    Without an explicit policy, exact regions give exact moments and the
    disc-bounded regions fall back to the default big-float precision for
    the requested order.
    """
    if policy is None:
        policy = EXACT if region.is_exact else default_policy(alpha, alpha_prime)
    table = region.moment_table(alpha, alpha_prime, policy)
    return MomentGrid(alpha, alpha_prime, table, policy)


def empirical_moments(
    samples: SampleSet,
    alpha: int,
    alpha_prime: int,
    policy: NumericPolicy = DOUBLE,
) -> MomentGrid:
    """Sample moments (1/n) sum x_i**k * y_i**j.

    The double path is a pair of power matrices and one matmul; the other
    policies exist for error studies on small n and are loops.
    """
    n = samples.n
    if policy.kind == "double":
        px = samples.xs[:, None] ** np.arange(alpha + 1)[None, :]
        py = samples.ys[:, None] ** np.arange(alpha_prime + 1)[None, :]
        m = (px.T @ py) / n
        vals = tuple(tuple(float(v) for v in row) for row in m)
        return MomentGrid(alpha, alpha_prime, vals, policy)
    if policy.kind == "exact":
        fx = [Fraction(float(x)) for x in samples.xs]
        fy = [Fraction(float(y)) for y in samples.ys]
        vals = []
        for k in range(alpha + 1):
            row = []
            for j in range(alpha_prime + 1):
                row.append(sum(x**k * y**j for x, y in zip(fx, fy)) / n)
            vals.append(tuple(row))
        return MomentGrid(alpha, alpha_prime, tuple(vals), policy)
    with working_precision(policy):
        import mpmath

        mx = [mpmath.mpf(float(x)) for x in samples.xs]
        my = [mpmath.mpf(float(y)) for y in samples.ys]
        vals = []
        for k in range(alpha + 1):
            row = []
            for j in range(alpha_prime + 1):
                row.append(
                    mpmath.fsum(x**k * y**j for x, y in zip(mx, my)) / n
                )
            vals.append(tuple(row))
        return MomentGrid(alpha, alpha_prime, tuple(vals), policy)


def discrete_moments(
    measure: DiscreteMeasure,
    alpha: int,
    policy: NumericPolicy | None = None,
) -> MomentVector:
    """Power moments m(j) = sum p_k * x_k**j of a discrete measure."""
    if policy is None:
        policy = EXACT if measure.is_exact else DOUBLE
    vals = []
    with working_precision(policy):
        for j in range(alpha + 1):
            acc = sum(p * u**j for u, p in zip(measure.support, measure.probs))
            vals.append(coerce(acc, policy) if isinstance(acc, (int, Fraction)) else acc)
    return MomentVector(alpha, tuple(vals), policy)


def discrete_moments_2d(
    measure: DiscreteMeasure2D,
    alpha: int,
    alpha_prime: int,
    policy: NumericPolicy | None = None,
) -> MomentGrid:
    if policy is None:
        policy = EXACT if measure.is_exact else DOUBLE
    vals = []
    with working_precision(policy):
        for k in range(alpha + 1):
            row = []
            for j in range(alpha_prime + 1):
                acc = sum(
                    measure.probs[i][jj] * measure.xs[i] ** k * measure.ys[jj] ** j
                    for i in range(len(measure.xs))
                    for jj in range(len(measure.ys))
                )
                row.append(
                    coerce(acc, policy) if isinstance(acc, (int, Fraction)) else acc
                )
            vals.append(tuple(row))
    return MomentGrid(alpha, alpha_prime, tuple(vals), policy)
