"""The inversion operator: staircase structure, dual kernel form,
extrapolation, and the precision policy gates."""

from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from momentrec import (
    DOUBLE,
    EXACT,
    Approximant,
    InversionParams,
    NonIntegerScaledOrder,
    OutOfDomain,
    PrecisionInsufficient,
    SampleSet,
    beta_kernel_cells,
    beta_kernel_estimate,
    beta_kernel_pdf,
    bigfloat,
    check_precision_escalation,
    empirical_moments,
    extrapolated_grid,
    extrapolated_point,
    extrapolated_staircase,
    invert_grid,
    invert_point,
    kernel_density_grid,
    polynomial_moments,
    staircase_cells,
)
from momentrec.benchmarks import quadratic_mass_reference, quadratic_moments
from momentrec.inversion import (
    BetaKernel,
    floor_index,
    grid_axis,
    grid_cell_indexes,
    lattice_weights,
)


def uniform_moments(alpha, alpha_prime=None, policy=EXACT):
    # Lebesgue measure: m(k, j) = 1/((k+1)(j+1)); its recovery is 1 exactly
    if alpha_prime is None:
        alpha_prime = alpha
    return polynomial_moments({(0, 0): 1}, alpha, alpha_prime, policy)


def test_floor_index_is_exact():
    assert floor_index(5, Fraction(2, 5)) == 2
    assert floor_index(5, 1) == 5
    assert floor_index(5, 0) == 0
    # the binary doubles nearest 1/3 and 0.3 sit just below them
    assert floor_index(3, Fraction(1, 3)) == 1
    assert floor_index(3, 1 / 3) == 0
    assert floor_index(10, Fraction(3, 10)) == 3
    assert floor_index(10, 0.3) == 2
    with pytest.raises(OutOfDomain):
        floor_index(4, 1.5)
    with pytest.raises(OutOfDomain):
        floor_index(4, -0.1)


def test_lattice_weights_top_cell_and_alternation():
    assert lattice_weights(7, 7) == (8,)
    w = lattice_weights(4, 1)
    assert w[0] > 0
    assert all(a * b < 0 for a, b in zip(w, w[1:]))
    assert len(w) == 4


@given(st.integers(min_value=0, max_value=25))
def test_uniform_density_recovers_exactly(alpha):
    m = uniform_moments(alpha)
    params = InversionParams(alpha, alpha, EXACT)
    for x in (Fraction(0), Fraction(1, 3), Fraction(7, 9), Fraction(1)):
        assert invert_point(m, params, x, x) == 1


def test_top_cell_collapse():
    # at (1, 1) the double sum collapses to (a+1)(a'+1) m(a, a')
    m = quadratic_moments(9, 7)
    params = InversionParams(9, 7, EXACT)
    assert invert_point(m, params, 1, 1) == 10 * 8 * m.value(9, 7)


def test_invert_point_matches_grid_nodes_bitwise():
    m = quadratic_moments(8)
    params = InversionParams(8, 8, EXACT)
    fld = invert_grid(m, params, 11, "endpoint")
    for ix in range(11):
        for iy in range(11):
            x = Fraction(ix, 10)
            y = Fraction(iy, 10)
            point = invert_point(m, params, x, y)
            assert fld.values[ix, iy] == float(point)
            assert fld.cell_value_at(ix, iy) == point


def test_grid_is_staircase_of_cells():
    m = quadratic_moments(5)
    params = InversionParams(5, 5, EXACT)
    cells = staircase_cells(m, params)
    assert len(cells) == 6 and len(cells[0]) == 6
    fld = invert_grid(m, params, 16, "center")
    kx = grid_cell_indexes(5, 16, "center")
    for ix in (0, 7, 15):
        for iy in (0, 7, 15):
            assert fld.values[ix, iy] == float(cells[kx[ix]][kx[iy]])


def test_order_swap_transposes_cells():
    coeffs = {(2, 0): Fraction(3, 4), (0, 1): Fraction(1, 2), (1, 1): Fraction(1, 8)}
    swapped = {(q, p): c for (p, q), c in coeffs.items()}
    a, b = 6, 4
    cells = staircase_cells(polynomial_moments(coeffs, a, b), InversionParams(a, b, EXACT))
    cells_t = staircase_cells(
        polynomial_moments(swapped, b, a), InversionParams(b, a, EXACT)
    )
    for kx in range(a + 1):
        for ky in range(b + 1):
            assert cells[kx][ky] == cells_t[ky][kx]


def test_threads_do_not_change_results():
    m = quadratic_moments(6)
    params = InversionParams(6, 6, EXACT)
    assert staircase_cells(m, params, threads=1) == staircase_cells(
        m, params, threads=3
    )


def test_recovered_mass_identity():
    # integral of the recovered field is (a+1)/(a+3), not 1: the
    # operator is not mass-preserving at finite order
    alpha = 7
    cells = staircase_cells(quadratic_moments(alpha), InversionParams(alpha, alpha, EXACT))
    mass = sum(cells[kx][ky] for kx in range(alpha) for ky in range(alpha)) / Fraction(
        alpha * alpha
    )
    assert mass == quadratic_mass_reference(alpha)
    assert mass != 1


def test_grid_axis_conventions():
    assert grid_axis(5, "endpoint") == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert grid_axis(2, "center") == (0.25, 0.75)
    with pytest.raises(ValueError):
        grid_axis(1, "endpoint")
    with pytest.raises(ValueError):
        grid_axis(4, "midpoint")


def test_compatibility_gates():
    m = quadratic_moments(10, policy=DOUBLE)
    with pytest.raises(PrecisionInsufficient):
        invert_point(m, InversionParams(10, 10, EXACT), 0.5, 0.5)
    with pytest.raises(ValueError):
        invert_point(quadratic_moments(4), InversionParams(6, 4, EXACT), 0.5, 0.5)
    big = quadratic_moments(40, 25, policy=DOUBLE)
    with pytest.raises(PrecisionInsufficient):
        staircase_cells(big, InversionParams(40, 25, DOUBLE))


def test_kernel_path_has_no_order_cap():
    rng = np.random.default_rng(3)
    samples = SampleSet(rng.random(50), rng.random(50))
    cells = beta_kernel_cells(samples, InversionParams(100, 100, DOUBLE))
    assert cells.shape == (101, 101)
    assert np.all(np.isfinite(cells))
    assert cells.min() >= 0.0


def test_precision_escalation_passes_and_raises():
    pts = [(0.3, 0.7), (0.5, 0.5), (0.9, 0.1)]
    ok = quadratic_moments(8, policy=DOUBLE)
    worst = check_precision_escalation(ok, InversionParams(8, 8, DOUBLE), pts)
    assert worst < 1e-9
    assert check_precision_escalation(quadratic_moments(8), InversionParams(8, 8, EXACT), pts) == 0.0
    # combined order 50 passes the double gate but fails re-evaluation
    shaky = quadratic_moments(25, policy=DOUBLE)
    with pytest.raises(PrecisionInsufficient):
        check_precision_escalation(
            shaky, InversionParams(25, 25, DOUBLE), pts
        )


def test_extrapolated_point_combines_two_orders():
    m = quadratic_moments(20)
    alpha, scale = 5, Fraction(1, 2)
    x, y = Fraction(3, 10), Fraction(4, 5)
    got = extrapolated_point(m, alpha, scale, x, y, policy=EXACT)
    base = invert_point(m, InversionParams(5, 5, EXACT), x, y)
    fine = invert_point(m, InversionParams(10, 10, EXACT), x, y)
    assert got == (fine - scale * base) / (1 - scale)


def test_extrapolated_scale_validation():
    m = quadratic_moments(36)
    with pytest.raises(NonIntegerScaledOrder):
        extrapolated_point(m, 5, Fraction(3, 7), 0.5, 0.5)
    with pytest.raises(ValueError):
        extrapolated_point(m, 5, Fraction(3, 2), 0.5, 0.5)
    # 1/scale must be an integer for the staircase form only
    with pytest.raises(ValueError):
        extrapolated_staircase(m, 24, Fraction(2, 3))
    grid = extrapolated_grid(m, 24, Fraction(2, 3), 7, policy=EXACT)
    assert grid.cell_values is None


def test_extrapolated_staircase_matches_grid():
    m = quadratic_moments(12)
    cells, fx, fy = extrapolated_staircase(m, 6, Fraction(1, 2), policy=EXACT)
    assert (fx, fy) == (12, 12)
    fld = extrapolated_grid(m, 6, Fraction(1, 2), 13, "endpoint", policy=EXACT)
    for i in (0, 4, 9, 12):
        for j in (0, 4, 9, 12):
            assert fld.values[i, j] == pytest.approx(cells[i][j], rel=1e-12)


def test_beta_kernel_shapes_and_pdf():
    k = BetaKernel(order=6, cell=2)
    assert (k.shape1, k.shape2) == (3, 5)
    assert k.mean() == Fraction(3, 8)
    assert beta_kernel_pdf(1, 0, 0) == pytest.approx(2.0)
    with mpmath.workprec(80):
        total = mpmath.quad(lambda t: beta_kernel_pdf(6, 0.37, float(t)), [0, 1])
    assert float(total) == pytest.approx(1.0, abs=1e-9)


def test_kernel_cells_equal_inverted_empirical_moments():
    rng = np.random.default_rng(19)
    samples = SampleSet(rng.random(25), rng.random(25))
    alpha = 12
    params = InversionParams(alpha, alpha, bigfloat(4 * 2 * alpha + 64))
    m = empirical_moments(samples, alpha, alpha, EXACT)
    inverted = staircase_cells(m, params)
    kernel = beta_kernel_cells(samples, InversionParams(alpha, alpha, DOUBLE))
    for kx in range(alpha + 1):
        for ky in range(alpha + 1):
            assert float(inverted[kx][ky]) == pytest.approx(
                kernel[kx, ky], rel=1e-9, abs=1e-9
            )
    est = beta_kernel_estimate(samples, InversionParams(alpha, alpha, DOUBLE), 0.4, 0.9)
    assert est == pytest.approx(kernel[floor_index(alpha, 0.4), floor_index(alpha, 0.9)])


def test_kernel_density_grid_is_approximant():
    rng = np.random.default_rng(23)
    samples = SampleSet(rng.random(40), rng.random(40))
    fld = kernel_density_grid(samples, InversionParams(15, 15, DOUBLE), 31)
    assert fld.resolution == (31, 31)
    assert fld.params.policy == DOUBLE
    assert fld.cell_values is not None


def test_approximant_save_load_round_trip(tmp_path):
    m = quadratic_moments(4)
    fld = invert_grid(m, InversionParams(4, 4, EXACT), 9, "endpoint")
    path = tmp_path / "field.csv"
    fld.save(path)
    back = Approximant.load(path)
    assert back.sampling == "endpoint"
    assert back.resolution == (9, 9)
    assert back.params.alpha == 4
    assert np.array_equal(back.values, fld.values)
    assert back.grid_x == fld.grid_x
