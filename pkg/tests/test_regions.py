"""Region geometry and exact indicator moments.

The polygon moment table is checked against a symbolic integration
oracle on a scalene triangle, and the disc-bounded regions against
adaptive quadrature, so the Green's-theorem edge integrals never verify
themselves.
"""

from fractions import Fraction

import numpy as np
import pytest
import sympy
from scipy import integrate

from momentrec import (
    HalfDisc,
    InvalidRegion,
    ParabolicLens,
    Polygon,
    QuarterDisc,
    UnionRegion,
    region_moments,
)
from momentrec.benchmarks import G1, G2, STAIR_UNION


def _sympy_triangle_moments(a, b, c, kmax, jmax):
    """Exact x**k y**j integrals over a triangle via the affine map from
    the standard simplex; Jacobian is twice the area."""
    u, v = sympy.symbols("u v", nonnegative=True)
    ax, ay = map(sympy.Rational, a)
    bx, by = map(sympy.Rational, b)
    cx, cy = map(sympy.Rational, c)
    x = ax + u * (bx - ax) + v * (cx - ax)
    y = ay + u * (by - ay) + v * (cy - ay)
    jac = sympy.Abs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
    out = {}
    for k in range(kmax + 1):
        for j in range(jmax + 1):
            inner = sympy.integrate(x**k * y**j, (v, 0, 1 - u))
            out[(k, j)] = sympy.integrate(inner, (u, 0, 1)) * jac
    return out


def test_polygon_moments_match_symbolic_oracle():
    verts = (("0.1", "0.2"), ("0.7", "0.3"), ("0.4", "0.9"))
    tri = Polygon(verts)
    want = _sympy_triangle_moments(*verts, 3, 3)
    m = region_moments(tri, 3, 3)
    for (k, j), w in want.items():
        assert m.value(k, j) == Fraction(int(w.p), int(w.q))


def test_right_triangle_moments_closed_form():
    # G1 is {0 <= y <= x <= 1/2}: m(k, j) = (1/2)**(k+j+2) / ((j+1)(k+j+2))
    m = region_moments(G1, 4, 4)
    for k in range(5):
        for j in range(5):
            assert m.value(k, j) == Fraction(1, 2 ** (k + j + 2) * (j + 1) * (k + j + 2))


def test_polygon_area_and_orientation():
    cw = Polygon(((0, 0), (0, Fraction(1, 2)), (Fraction(1, 2), 0)))
    assert cw.area() == Fraction(1, 8)  # orientation normalized away
    assert cw.area() == G2.area()


def test_polygon_rejections():
    with pytest.raises(InvalidRegion):
        Polygon(((0, 0), (1, 1), (2, 0)))  # vertex outside the square
    with pytest.raises(InvalidRegion):
        Polygon(((0, 0), (1, 0), (Fraction(1, 2), 0)))  # zero area
    with pytest.raises(InvalidRegion):
        Polygon(((0, 0), (1, 1), (1, 0), (0, 1)))  # bowtie
    with pytest.raises(InvalidRegion):
        Polygon(((0, 0), (1, 0)))


def test_polygon_contains_boundary_and_interior():
    tri = G1
    assert tri.contains(Fraction(1, 4), Fraction(1, 8))
    assert not tri.contains(Fraction(1, 8), Fraction(1, 4))
    assert tri.contains(Fraction(1, 4), Fraction(1, 4))  # hypotenuse
    assert tri.contains(0, 0)


def test_contains_grid_matches_contains():
    xs = (np.arange(17) + 0.5) / 17
    for region in (G1, ParabolicLens(), QuarterDisc(), STAIR_UNION):
        grid = region.contains_grid(xs, xs)
        for i, x in enumerate(xs):
            for j, y in enumerate(xs):
                assert grid[i, j] == region.contains(Fraction(x), Fraction(y))


def test_quarter_disc_moments_match_quadrature():
    m = region_moments(QuarterDisc(), 3, 3)
    for k, j in ((0, 0), (1, 0), (2, 3)):
        want, err = integrate.dblquad(
            lambda y, x, k=k, j=j: x**k * y**j,
            0.0,
            1.0,
            0.0,
            lambda x: float(np.sqrt(max(0.0, 1.0 - x * x))),
            epsabs=1e-12,
        )
        assert float(m.value(k, j)) == pytest.approx(want, abs=max(1e-10, 10 * err))
    assert float(m.value(0, 0)) == pytest.approx(np.pi / 4, abs=1e-12)


def test_half_disc_moments_match_quadrature():
    hd = HalfDisc(Fraction(1, 2), Fraction(1, 4))
    m = region_moments(hd, 2, 2)
    for k, j in ((0, 0), (2, 1)):
        want, err = integrate.dblquad(
            lambda y, x, k=k, j=j: x**k * y**j,
            0.25,
            0.75,
            0.0,
            lambda x: float(np.sqrt(max(0.0, 0.0625 - (x - 0.5) ** 2))),
            epsabs=1e-12,
        )
        assert float(m.value(k, j)) == pytest.approx(want, abs=max(1e-10, 10 * err))


def test_half_disc_validation():
    with pytest.raises(InvalidRegion):
        HalfDisc(Fraction(1, 10), Fraction(1, 2))  # spills out the left edge
    with pytest.raises(InvalidRegion):
        HalfDisc(Fraction(1, 2), Fraction(0))


def test_parabolic_lens_closed_form():
    lens = ParabolicLens()
    m = region_moments(lens, 3, 3)
    assert m.value(0, 0) == lens.area() == Fraction(1, 3)
    # symmetric across the diagonal
    for k in range(4):
        for j in range(4):
            assert m.value(k, j) == m.value(j, k)
    assert lens.contains(Fraction(1, 2), Fraction(1, 2))
    assert not lens.contains(Fraction(9, 10), Fraction(1, 10))


def test_union_moments_add():
    m_union = region_moments(STAIR_UNION, 3, 3)
    m1 = region_moments(G1, 3, 3)
    m2 = region_moments(G2, 3, 3)
    for k in range(4):
        for j in range(4):
            assert m_union.value(k, j) == m1.value(k, j) + m2.value(k, j)
    assert STAIR_UNION.area() == Fraction(1, 4)


def test_union_rejects_overlap():
    big = Polygon(((0, 0), (1, 0), (1, 1), (0, 1)))
    with pytest.raises(InvalidRegion):
        UnionRegion((big, G1))
    with pytest.raises(InvalidRegion):
        UnionRegion((G1,))


def test_spell_is_stable():
    assert QuarterDisc().spell().startswith("quarter-disc")
    assert "polygon" in G1.spell()
    assert STAIR_UNION.spell().count("polygon") == 2
