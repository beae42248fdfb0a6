"""Error metrics: exact sup, trapezoid L1 with quadrature control."""

from fractions import Fraction

import pytest

from momentrec import (
    DOUBLE,
    EXACT,
    ErrorReport,
    InversionParams,
    ResolutionMismatch,
    invert_grid,
    l1_error,
    rate_table,
    sup_error,
    write_reports_csv,
)
from momentrec.benchmarks import (
    quadratic_moments,
    quadratic_pdf,
    quadratic_sup_reference,
)


def _field(alpha, resolution, sampling="endpoint", policy=EXACT):
    m = quadratic_moments(alpha, policy=policy)
    return invert_grid(m, InversionParams(alpha, alpha, policy), resolution, sampling)


def test_sup_error_exact_on_lattice():
    # on the order-alpha lattice the corner gap is exactly 6/(alpha+3)
    for alpha in (4, 9, 16):
        fld = _field(alpha, alpha + 1)
        sup = sup_error(fld, quadratic_pdf)
        assert isinstance(sup, Fraction)
        assert sup == quadratic_sup_reference(alpha)


def test_sup_error_float_path_agrees():
    fld = _field(8, 9, policy=DOUBLE)
    got = sup_error(fld, quadratic_pdf)
    assert isinstance(got, float)
    assert got == pytest.approx(float(quadratic_sup_reference(8)), rel=1e-9)


def test_sup_error_center_sampling_closed_form():
    # the worst center node is the corner-most one, ((2R-1)/2R, same),
    # inside cell (alpha-1, alpha-1): the staircase there carries the
    # kernel second moment g(k) = (k+1)(k+2)/((alpha+2)(alpha+3)) per
    # axis while the density keeps climbing toward the corner
    alpha, res = 10, 64
    centers = sup_error(_field(alpha, res, "center"), quadratic_pdf)
    g_last = Fraction(alpha * (alpha + 1), (alpha + 2) * (alpha + 3))
    x = Fraction(2 * res - 1, 2 * res)
    assert centers == 3 * x**2 - 3 * g_last
    # it exceeds the lattice sup: the lattice corner lands in the
    # degenerate top cell whose collapsed value tracks f(1, 1) closer
    assert centers > sup_error(_field(alpha, alpha + 1), quadratic_pdf)


def test_l1_error_pinned_value():
    # frozen reference: order 10, 201-node trapezoid of |f_a - f|
    fld = _field(10, 201)
    assert l1_error(fld, quadratic_pdf) == pytest.approx(
        0.16509544274038465, abs=1e-12
    )


def test_l1_error_control_bounds_quadrature():
    fld = _field(10, 201)
    total, ctrl = l1_error(fld, quadratic_pdf, with_control=True)
    finer = l1_error(_field(10, 401), quadratic_pdf)
    assert abs(total - finer) <= max(10 * ctrl, 1e-3)
    assert ctrl < total


def test_l1_error_requires_endpoint_and_odd_control():
    center = _field(6, 32, "center")
    with pytest.raises(ResolutionMismatch):
        l1_error(center, quadratic_pdf)
    even = _field(6, 10)
    with pytest.raises(ResolutionMismatch):
        l1_error(even, quadratic_pdf, with_control=True)
    l1_error(even, quadratic_pdf)  # no control is fine on even counts


def test_rate_table_flags_decrease(tmp_path):
    def evaluate(alpha):
        fld = _field(alpha, alpha + 1)
        return ErrorReport(
            alpha=alpha,
            alpha_prime=alpha,
            resolution=alpha + 1,
            sup_error=float(sup_error(fld, quadratic_pdf)),
            provenance="exact-rational",
        )

    csv_path = tmp_path / "rates.csv"
    reports, decreasing = rate_table((5, 10, 20), evaluate, csv_path)
    assert [r.alpha for r in reports] == [5, 10, 20]
    assert decreasing["sup_error"] is True
    assert decreasing["l1_error"] is None
    assert csv_path.exists()
    assert "sup_error" in csv_path.read_text().splitlines()[0]


def test_write_reports_csv(tmp_path):
    report = ErrorReport(
        alpha=3,
        alpha_prime=3,
        resolution=9,
        sup_error=0.5,
        l1_error=0.25,
        provenance="machine-double",
    )
    path = tmp_path / "r.csv"
    write_reports_csv([report], path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("3,3,9,0.5")
