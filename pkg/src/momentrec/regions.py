"""Planar regions inside the closed unit square with computable moments.

Each region exposes

``contains(x, y)``
    Exact point membership (closed sets: boundary points belong).
``contains_grid(xs, ys)``
    Vectorized float membership on the tensor grid ``xs x ys``, returned
    as a bool array indexed ``[ix, iy]``.
``moment_table(kmax, jmax, policy)``
    The rectangle of geometric moments ``m(k, j) = integral over the
    region of x**k * y**j``, for ``0 <= k <= kmax`` and ``0 <= j <= jmax``,
    as a tuple of tuples of policy scalars.

Polygon moments are evaluated edge by edge through the boundary-integral
recurrence below, entirely in rational arithmetic, so they are exact for
rational vertices at any order.  The curved regions have closed forms;
the two disc pieces involve values of the beta function at half-integer
arguments, which are transcendental in general, so those regions refuse
the exact-rational policy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Union

import mpmath
import numpy as np

from .errors import InvalidRegion, PrecisionInsufficient
from .policy import NumericPolicy, coerce, working_precision

__all__ = [
    "Polygon",
    "QuarterDisc",
    "HalfDisc",
    "ParabolicLens",
    "UnionRegion",
    "Region",
]

FractionPair = tuple[Fraction, Fraction]

# Overlap fraction (on a 256x256 probe grid) above which a union is
# rejected as non-disjoint.
_UNION_OVERLAP_TOL = 1e-3


def _orient(a: FractionPair, b: FractionPair, c: FractionPair) -> Fraction:
    """Twice the signed area of triangle abc (positive = counterclockwise)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _in_box(a: FractionPair, b: FractionPair, p: FractionPair) -> bool:
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _segments_touch(
    p1: FractionPair, p2: FractionPair, q1: FractionPair, q2: FractionPair
) -> bool:
    """Whether closed segments p1p2 and q1q2 share any point.  Exact."""
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4):
        return True
    if d1 == 0 and _in_box(q1, q2, p1):
        return True
    if d2 == 0 and _in_box(q1, q2, p2):
        return True
    if d3 == 0 and _in_box(p1, p2, q1):
        return True
    if d4 == 0 and _in_box(p1, p2, q2):
        return True
    return False


def _edge_power_integrals(
    x0: Fraction, y0: Fraction, x1: Fraction, y1: Fraction, kmax: int, jmax: int
) -> list[list[Fraction]]:
    """Per-edge integrals P[q][p] = int_0^1 X(t)**p * Y(t)**q dt.

    X, Y parametrize the segment (x0, y0) -> (x1, y1) linearly on [0, 1].
    Returns layers q = 0..jmax; layer q covers p = 0..(kmax + 1 + jmax - q),
    which is exactly the triangle of entries the recurrence consumes.
    Caller guarantees y0 != y1.
    """
    dx = x1 - x0
    dy = y1 - y0
    ptop = kmax + 1 + jmax
    if dx == 0:
        xp = [Fraction(1)]
        for _ in range(ptop):
            xp.append(xp[-1] * x0)
        yq = [Fraction(1)]
        for _ in range(jmax + 2):
            yq.append(yq[-1] * y0)
        y1q = [Fraction(1)]
        for _ in range(jmax + 2):
            y1q.append(y1q[-1] * y1)
        return [
            [xp[p] * (y1q[q + 1] - yq[q + 1]) / ((q + 1) * dy) for p in range(ptop - q + 1)]
            for q in range(jmax + 1)
        ]
    x0p = [Fraction(1)]
    x1p = [Fraction(1)]
    for _ in range(ptop + 1):
        x0p.append(x0p[-1] * x0)
        x1p.append(x1p[-1] * x1)
    y0q = [Fraction(1)]
    y1q = [Fraction(1)]
    for _ in range(jmax + 1):
        y0q.append(y0q[-1] * y0)
        y1q.append(y1q[-1] * y1)
    layers = [[(x1p[p + 1] - x0p[p + 1]) / ((p + 1) * dx) for p in range(ptop + 1)]]
    for q in range(1, jmax + 1):
        prev = layers[-1]
        layers.append(
            [
                (x1p[p + 1] * y1q[q] - x0p[p + 1] * y0q[q] - q * dy * prev[p + 1])
                / ((p + 1) * dx)
                for p in range(ptop - q + 1)
            ]
        )
    return layers


def _coerce_table(
    table: list[list], policy: NumericPolicy
) -> tuple[tuple, ...]:
    with working_precision(policy):
        return tuple(tuple(coerce(v, policy) for v in row) for row in table)


@dataclass(frozen=True, slots=True)
class Polygon:
    """A simple polygon with rational vertices in the closed unit square.

    Vertices may be given as ints, Fractions, decimal strings ("0.1"),
    or floats (floats convert exactly, so prefer strings for decimal
    data).  Orientation is normalized to counterclockwise; repeated
    vertices, zero area, points outside the square, and self-intersection
    are all rejected.
    """

    vertices: tuple[FractionPair, ...]

    def __post_init__(self) -> None:
        verts = tuple((Fraction(x), Fraction(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise InvalidRegion("polygon needs at least 3 vertices")
        for x, y in verts:
            if not (0 <= x <= 1 and 0 <= y <= 1):
                raise InvalidRegion(f"vertex ({x}, {y}) outside the unit square")
        n = len(verts)
        for i in range(n):
            if verts[i] == verts[(i + 1) % n]:
                raise InvalidRegion("repeated consecutive vertex")
        twice_area = sum(
            verts[i][0] * verts[(i + 1) % n][1] - verts[(i + 1) % n][0] * verts[i][1]
            for i in range(n)
        )
        if twice_area == 0:
            raise InvalidRegion("polygon has zero area")
        if twice_area < 0:
            verts = verts[:1] + tuple(reversed(verts[1:]))
        object.__setattr__(self, "vertices", verts)
        self._reject_self_intersection()

    def _reject_self_intersection(self) -> None:
        verts = self.vertices
        n = len(verts)
        edges = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                adjacent = j == i + 1 or (i == 0 and j == n - 1)
                if adjacent:
                    continue
                if _segments_touch(*edges[i], *edges[j]):
                    raise InvalidRegion("polygon edges intersect")
        for i in range(n):
            a = verts[i - 1]
            v = verts[i]
            b = verts[(i + 1) % n]
            if _orient(a, v, b) == 0:
                dot = (a[0] - v[0]) * (b[0] - v[0]) + (a[1] - v[1]) * (b[1] - v[1])
                if dot > 0:
                    raise InvalidRegion("polygon has a zero-width spike")

    @property
    def is_exact(self) -> bool:
        return True

    def area(self) -> Fraction:
        verts = self.vertices
        n = len(verts)
        twice = sum(
            verts[i][0] * verts[(i + 1) % n][1] - verts[(i + 1) % n][0] * verts[i][1]
            for i in range(n)
        )
        return twice / 2

    def contains(self, x, y) -> bool:
        px, py = Fraction(x), Fraction(y)
        verts = self.vertices
        n = len(verts)
        inside = False
        for i in range(n):
            a = verts[i]
            b = verts[(i + 1) % n]
            if _orient(a, b, (px, py)) == 0 and _in_box(a, b, (px, py)):
                return True
            if (a[1] > py) != (b[1] > py):
                xi = a[0] + (py - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
                if px < xi:
                    inside = not inside
        return inside

    def contains_grid(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        X = xs[:, None]
        Y = ys[None, :]
        inside = np.zeros((xs.size, ys.size), dtype=bool)
        verts = [(float(x), float(y)) for x, y in self.vertices]
        n = len(verts)
        edges = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
        for (x0, y0), (x1, y1) in edges:
            if y0 == y1:
                continue
            cond = (y0 > Y) != (y1 > Y)
            xi = x0 + (Y - y0) * (x1 - x0) / (y1 - y0)
            inside ^= cond & (X < xi)
        eps = 1e-12
        for (x0, y0), (x1, y1) in edges:
            ex = x1 - x0
            ey = y1 - y0
            norm2 = ex * ex + ey * ey
            t = ((X - x0) * ex + (Y - y0) * ey) / norm2
            d2 = (X - x0 - t * ex) ** 2 + (Y - y0 - t * ey) ** 2
            inside |= (d2 <= eps * eps) & (t >= -eps) & (t <= 1 + eps)
        return inside

    def moment_table(
        self, kmax: int, jmax: int, policy: NumericPolicy | None = None
    ) -> tuple[tuple, ...]:
        from .policy import EXACT

        policy = EXACT if policy is None else policy
        table = [[Fraction(0)] * (jmax + 1) for _ in range(kmax + 1)]
        verts = self.vertices
        n = len(verts)
        for i in range(n):
            (x0, y0) = verts[i]
            (x1, y1) = verts[(i + 1) % n]
            if y0 == y1:
                continue
            layers = _edge_power_integrals(x0, y0, x1, y1, kmax, jmax)
            dy = y1 - y0
            for k in range(kmax + 1):
                for j in range(jmax + 1):
                    table[k][j] += dy * layers[j][k + 1] / (k + 1)
        return _coerce_table(table, policy)

    def boundary_polylines(self) -> list[tuple[np.ndarray, np.ndarray]]:
        xs = np.array([float(v[0]) for v in self.vertices] + [float(self.vertices[0][0])])
        ys = np.array([float(v[1]) for v in self.vertices] + [float(self.vertices[0][1])])
        return [(xs, ys)]

    def spell(self) -> str:
        return "polygon[" + " ".join(f"{x},{y}" for x, y in self.vertices) + "]"


def _half_beta(p: int, q: int) -> mpmath.mpf:
    """beta(p/2, q/2) at the current working precision."""
    return mpmath.beta(mpmath.mpf(p) / 2, mpmath.mpf(q) / 2)


@dataclass(frozen=True, slots=True)
class QuarterDisc:
    """Quarter disc {x**2 + y**2 <= r**2, x >= 0, y >= 0} with the corner
    at the origin.  Moments involve half-integer beta values, so the
    exact-rational policy is refused."""

    radius: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        r = Fraction(self.radius)
        if not (0 < r <= 1):
            raise InvalidRegion("quarter disc radius must lie in (0, 1]")
        object.__setattr__(self, "radius", r)

    @property
    def is_exact(self) -> bool:
        return False

    def area(self) -> float:
        return float(mpmath.pi) * float(self.radius) ** 2 / 4

    def contains(self, x, y) -> bool:
        px, py = Fraction(x), Fraction(y)
        return px >= 0 and py >= 0 and px * px + py * py <= self.radius**2

    def contains_grid(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        r2 = float(self.radius) ** 2
        X = xs[:, None]
        Y = ys[None, :]
        return (X >= 0) & (Y >= 0) & (X * X + Y * Y <= r2)

    def moment_table(
        self, kmax: int, jmax: int, policy: NumericPolicy | None = None
    ) -> tuple[tuple, ...]:
        from .policy import default_policy

        policy = default_policy(kmax, jmax) if policy is None else policy
        if policy.is_exact:
            raise PrecisionInsufficient(
                "quarter-disc moments are transcendental; use a big-float policy"
            )
        bits = max(int(policy.effective_bits()) if policy.kind != "exact" else 0, 128)
        with mpmath.workprec(bits):
            r = mpmath.mpf(self.radius.numerator) / self.radius.denominator
            table = [
                [
                    mpmath.power(r, k + j + 2) * _half_beta(k + 1, j + 3) / (2 * (j + 1))
                    for j in range(jmax + 1)
                ]
                for k in range(kmax + 1)
            ]
        return _coerce_table(table, policy)

    def boundary_polylines(self) -> list[tuple[np.ndarray, np.ndarray]]:
        r = float(self.radius)
        th = np.linspace(0.0, np.pi / 2, 257)
        xs = np.concatenate([[0.0], r * np.cos(th[::-1]), [0.0]])
        ys = np.concatenate([[0.0], r * np.sin(th[::-1]), [0.0]])
        return [(xs, ys)]

    def spell(self) -> str:
        return f"quarter-disc[r={self.radius}]"


@dataclass(frozen=True, slots=True)
class HalfDisc:
    """Upper half disc {(x - c)**2 + y**2 <= r**2, y >= 0} resting on the
    bottom edge of the square.  Needs c - r >= 0 and c + r <= 1."""

    center: Fraction
    radius: Fraction

    def __post_init__(self) -> None:
        c = Fraction(self.center)
        r = Fraction(self.radius)
        if r <= 0:
            raise InvalidRegion("half disc radius must be positive")
        if c - r < 0 or c + r > 1:
            raise InvalidRegion("half disc leaves the unit square")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def is_exact(self) -> bool:
        return False

    def area(self) -> float:
        return float(mpmath.pi) * float(self.radius) ** 2 / 2

    def contains(self, x, y) -> bool:
        px, py = Fraction(x), Fraction(y)
        return py >= 0 and (px - self.center) ** 2 + py * py <= self.radius**2

    def contains_grid(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        c = float(self.center)
        r2 = float(self.radius) ** 2
        X = xs[:, None]
        Y = ys[None, :]
        return (Y >= 0) & ((X - c) ** 2 + Y * Y <= r2)

    def moment_table(
        self, kmax: int, jmax: int, policy: NumericPolicy | None = None
    ) -> tuple[tuple, ...]:
        from .policy import default_policy

        policy = default_policy(kmax, jmax) if policy is None else policy
        if policy.is_exact:
            raise PrecisionInsufficient(
                "half-disc moments are transcendental; use a big-float policy"
            )
        bits = max(int(policy.effective_bits()) if policy.kind != "exact" else 0, 128)
        with mpmath.workprec(bits):
            c = mpmath.mpf(self.center.numerator) / self.center.denominator
            r = mpmath.mpf(self.radius.numerator) / self.radius.denominator
            table = []
            for k in range(kmax + 1):
                row = []
                for j in range(jmax + 1):
                    acc = mpmath.mpf(0)
                    for p in range(0, k + 1, 2):
                        acc += (
                            comb(k, p)
                            * mpmath.power(c, k - p)
                            * mpmath.power(r, p + j + 2)
                            * _half_beta(p + 1, j + 1)
                            / (p + j + 2)
                        )
                    row.append(acc)
                table.append(row)
        return _coerce_table(table, policy)

    def boundary_polylines(self) -> list[tuple[np.ndarray, np.ndarray]]:
        c = float(self.center)
        r = float(self.radius)
        th = np.linspace(0.0, np.pi, 257)
        xs = np.concatenate([[c - r], c + r * np.cos(th[::-1]), [c - r]])
        ys = np.concatenate([[0.0], r * np.sin(th[::-1]), [0.0]])
        return [(xs, ys)]

    def spell(self) -> str:
        return f"half-disc[c={self.center},r={self.radius}]"


@dataclass(frozen=True, slots=True)
class ParabolicLens:
    """The lens {x**2 <= y <= sqrt(x)} between a parabola and its mirror
    image across the diagonal.  Moments are exact rationals."""

    @property
    def is_exact(self) -> bool:
        return True

    def area(self) -> Fraction:
        return Fraction(1, 3)

    def contains(self, x, y) -> bool:
        px, py = Fraction(x), Fraction(y)
        return 0 <= px <= 1 and 0 <= py <= 1 and py >= px * px and py * py <= px

    def contains_grid(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        X = xs[:, None]
        Y = ys[None, :]
        return (Y >= X * X) & (Y * Y <= X)

    def moment_table(
        self, kmax: int, jmax: int, policy: NumericPolicy | None = None
    ) -> tuple[tuple, ...]:
        from .policy import EXACT

        policy = EXACT if policy is None else policy
        table = [
            [
                Fraction(3, (2 * k + j + 3) * (k + 2 * j + 3))
                for j in range(jmax + 1)
            ]
            for k in range(kmax + 1)
        ]
        return _coerce_table(table, policy)

    def boundary_polylines(self) -> list[tuple[np.ndarray, np.ndarray]]:
        t = np.linspace(0.0, 1.0, 257)
        xs = np.concatenate([t, t[::-1] ** 2])
        ys = np.concatenate([t**2, t[::-1]])
        return [(xs, ys)]

    def spell(self) -> str:
        return "parabolic-lens"


@dataclass(frozen=True, slots=True)
class UnionRegion:
    """Union of essentially disjoint members (overlap below one part in a
    thousand on a 256x256 probe grid).  Moments add across members."""

    members: tuple

    def __post_init__(self) -> None:
        members = tuple(self.members)
        if len(members) < 2:
            raise InvalidRegion("union needs at least 2 members")
        object.__setattr__(self, "members", members)
        probe = (np.arange(256) + 0.5) / 256
        counts = np.zeros((256, 256), dtype=np.int32)
        for member in members:
            counts += member.contains_grid(probe, probe).astype(np.int32)
        overlap = float(np.mean(counts >= 2))
        if overlap > _UNION_OVERLAP_TOL:
            raise InvalidRegion(
                f"union members overlap on {overlap:.2%} of the square"
            )

    @property
    def is_exact(self) -> bool:
        return all(m.is_exact for m in self.members)

    def area(self):
        return sum(m.area() for m in self.members)

    def contains(self, x, y) -> bool:
        return any(m.contains(x, y) for m in self.members)

    def contains_grid(self, xs, ys) -> np.ndarray:
        out = self.members[0].contains_grid(xs, ys)
        for m in self.members[1:]:
            out |= m.contains_grid(xs, ys)
        return out

    def moment_table(
        self, kmax: int, jmax: int, policy: NumericPolicy | None = None
    ) -> tuple[tuple, ...]:
        from .policy import EXACT, default_policy

        if policy is None:
            policy = EXACT if self.is_exact else default_policy(kmax, jmax)
        tables = [m.moment_table(kmax, jmax, policy) for m in self.members]
        with working_precision(policy):
            return tuple(
                tuple(sum(t[k][j] for t in tables) for j in range(jmax + 1))
                for k in range(kmax + 1)
            )

    def boundary_polylines(self) -> list[tuple[np.ndarray, np.ndarray]]:
        out: list[tuple[np.ndarray, np.ndarray]] = []
        for m in self.members:
            out.extend(m.boundary_polylines())
        return out

    def spell(self) -> str:
        return "union[" + ";".join(m.spell() for m in self.members) + "]"


Region = Union[Polygon, QuarterDisc, HalfDisc, ParabolicLens, UnionRegion]
