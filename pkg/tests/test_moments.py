"""Moment containers and forward moment computations."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from momentrec import (
    DOUBLE,
    EXACT,
    DiscreteMeasure,
    DiscreteMeasure2D,
    MomentGrid,
    MomentVector,
    OutOfDomain,
    SampleSet,
    UnsortedSupport,
    bigfloat,
    discrete_moments,
    discrete_moments_2d,
    empirical_moments,
    polynomial_moments,
    region_moments,
)
from momentrec.benchmarks import QUADRATIC_COEFFS, UNIT_SQUARE, quadratic_moments


def test_polynomial_moments_closed_form():
    # m(k, j) of 3(x**2 + y**2)/2 is 3/2 (1/((k+3)(j+1)) + 1/((k+1)(j+3)))
    m = quadratic_moments(6)
    for k in range(7):
        for j in range(7):
            want = Fraction(3, 2) * (
                Fraction(1, (k + 3) * (j + 1)) + Fraction(1, (k + 1) * (j + 3))
            )
            assert m.value(k, j) == want
    assert m.value(0, 0) == 1


def test_polynomial_moments_policy_coercion():
    m = polynomial_moments(QUADRATIC_COEFFS, 3, 3, DOUBLE)
    assert m.policy == DOUBLE
    assert m.value(0, 0) == pytest.approx(1.0)


def test_moment_grid_shape_validation():
    with pytest.raises(ValueError):
        MomentGrid(1, 1, ((Fraction(1),),), EXACT)
    with pytest.raises(ValueError):
        MomentGrid(-1, 0, (), EXACT)


def test_moment_grid_save_load_round_trip(tmp_path):
    m = quadratic_moments(4)
    path = tmp_path / "m.csv"
    m.save(path)
    back = MomentGrid.load(path)
    assert back.policy == m.policy
    assert back.values == m.values


def test_moment_grid_save_load_bigfloat(tmp_path):
    policy = bigfloat(128)
    m = polynomial_moments(QUADRATIC_COEFFS, 3, 2, policy)
    path = tmp_path / "m.csv"
    m.save(path)
    back = MomentGrid.load(path)
    assert back.policy == policy
    for k in range(4):
        for j in range(3):
            assert abs(back.value(k, j) - m.value(k, j)) < 1e-30


def test_moment_vector_round_trip(tmp_path):
    m = MomentVector(5, tuple(Fraction(1, j + 1) for j in range(6)), EXACT)
    path = tmp_path / "v.csv"
    m.save(path)
    back = MomentVector.load(path)
    assert back.values == m.values
    assert back.alpha == 5


def test_monotone_violation_flags_bad_moments():
    good = quadratic_moments(5)
    assert good.monotone_violation() == 0.0
    vals = [list(row) for row in good.values]
    vals[3][2] += Fraction(1, 2)  # breaks complete monotonicity
    bad = MomentGrid(5, 5, tuple(tuple(r) for r in vals), EXACT)
    assert bad.monotone_violation() > 0.0


def test_moment_vector_monotone_violation():
    uniform = MomentVector(4, tuple(Fraction(1, j + 1) for j in range(5)), EXACT)
    assert uniform.monotone_violation() == 0.0
    bad = MomentVector(2, (Fraction(1), Fraction(0), Fraction(1)), EXACT)
    assert bad.monotone_violation() > 0.0


def test_region_moments_unit_square_are_product_integrals():
    m = region_moments(UNIT_SQUARE, 4, 4)
    for k in range(5):
        for j in range(5):
            assert m.value(k, j) == Fraction(1, (k + 1) * (j + 1))


def test_sample_set_validation():
    with pytest.raises(OutOfDomain):
        SampleSet(np.array([0.5, 1.2]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        SampleSet(np.array([0.5]), np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        SampleSet(np.array([np.nan]), np.array([0.5]))


def test_sample_set_save_load(tmp_path):
    rng = np.random.default_rng(7)
    s = SampleSet(rng.random(20), rng.random(20))
    path = tmp_path / "s.csv"
    s.save(path)
    back = SampleSet.load(path)
    assert np.array_equal(back.xs, s.xs)
    assert np.array_equal(back.ys, s.ys)


def test_empirical_moments_double_matches_exact():
    rng = np.random.default_rng(11)
    s = SampleSet(rng.random(50), rng.random(50))
    md = empirical_moments(s, 6, 6, DOUBLE)
    me = empirical_moments(s, 6, 6, EXACT)
    for k in range(7):
        for j in range(7):
            assert md.value(k, j) == pytest.approx(float(me.value(k, j)), rel=1e-12)
    assert me.value(0, 0) == 1


@given(st.integers(min_value=1, max_value=12))
def test_empirical_moments_zeroth_is_one(n):
    rng = np.random.default_rng(n)
    s = SampleSet(rng.random(n), rng.random(n))
    m = empirical_moments(s, 2, 2, DOUBLE)
    assert m.value(0, 0) == pytest.approx(1.0)


def test_discrete_measure_validation():
    with pytest.raises(UnsortedSupport):
        DiscreteMeasure((Fraction(1, 2), Fraction(1, 4)), (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(OutOfDomain):
        DiscreteMeasure((Fraction(5, 4),), (Fraction(1),))
    with pytest.raises(ValueError):
        DiscreteMeasure((Fraction(1, 2),), (Fraction(1, 2),))  # mass != 1


def test_discrete_measure_exactness_poisoning():
    exact = DiscreteMeasure((Fraction(1, 2),), (Fraction(1),))
    assert exact.is_exact
    inexact = DiscreteMeasure((0.5,), (1.0,))
    assert not inexact.is_exact
    assert discrete_moments(inexact, 3).policy == DOUBLE


def test_discrete_moments_power_sums():
    m = discrete_moments(
        DiscreteMeasure((Fraction(1, 4), Fraction(3, 4)), (Fraction(1, 3), Fraction(2, 3))),
        4,
    )
    for j in range(5):
        want = Fraction(1, 3) * Fraction(1, 4) ** j + Fraction(2, 3) * Fraction(3, 4) ** j
        assert m.value(j) == want


def test_discrete_moments_2d_product_structure():
    meas = DiscreteMeasure2D(
        (Fraction(1, 4), Fraction(3, 4)),
        (Fraction(1, 3), Fraction(2, 3)),
        ((Fraction(1, 6), Fraction(1, 3)), (Fraction(1, 4), Fraction(1, 4))),
    )
    m = discrete_moments_2d(meas, 3, 3)
    assert m.value(0, 0) == 1
    want = sum(
        meas.probs[i][j] * meas.xs[i] ** 2 * meas.ys[j] ** 3
        for i in range(2)
        for j in range(2)
    )
    assert m.value(2, 3) == want


def test_discrete_measure_cdf():
    meas = DiscreteMeasure(
        (Fraction(1, 4), Fraction(3, 4)), (Fraction(1, 3), Fraction(2, 3))
    )
    assert meas.cdf(Fraction(1, 8)) == 0
    assert meas.cdf(Fraction(1, 4)) == Fraction(1, 3)
    assert meas.cdf(Fraction(1, 2)) == Fraction(1, 3)
    assert meas.cdf(1) == 1
