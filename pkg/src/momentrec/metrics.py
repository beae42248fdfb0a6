"""Error metrics for recovered fields.

References passed to these functions are plain callables f(x, y) that
must handle both scalar arguments (Fractions included, for the exact
sup path) and numpy column/row vectors under broadcasting.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .errors import ResolutionMismatch
from .inversion import Approximant
from .policy import to_float

__all__ = [
    "ErrorReport",
    "sup_error",
    "l1_error",
    "rate_table",
    "write_reports_csv",
]


def sup_error(field: Approximant, reference):
    """Largest absolute deviation from the reference over the grid nodes.

    When the field carries an exact staircase, the whole comparison runs
    in rational arithmetic against exact grid abscissas and the result
    is a Fraction; otherwise float64.
    """
    nx, ny = field.resolution
    exact = (
        field.cell_values is not None
        and field.params.policy.is_exact
        and field.sampling in ("endpoint", "center")
    )
    if exact:
        if field.sampling == "endpoint":
            ax = [Fraction(i, nx - 1) for i in range(nx)]
            ay = [Fraction(i, ny - 1) for i in range(ny)]
        else:
            ax = [Fraction(2 * i + 1, 2 * nx) for i in range(nx)]
            ay = [Fraction(2 * i + 1, 2 * ny) for i in range(ny)]
        worst = Fraction(0)
        cells = field.cell_values
        idx_x = field.cell_index_x
        idx_y = field.cell_index_y
        for ix in range(nx):
            row = cells[idx_x[ix]]
            x = ax[ix]
            for iy in range(ny):
                diff = abs(row[idx_y[iy]] - reference(x, ay[iy]))
                if diff > worst:
                    worst = diff
        return worst
    xs = np.asarray(field.grid_x)
    ys = np.asarray(field.grid_y)
    ref = np.asarray(reference(xs[:, None], ys[None, :]), dtype=float)
    return float(np.max(np.abs(field.values - ref)))


def _trapezoid_weights(n: int) -> np.ndarray:
    w = np.full(n, 1.0 / (n - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def l1_error(field: Approximant, reference, with_control: bool = False):
    """Tensor-trapezoid integral of |field - reference| over the square.

    Needs endpoint sampling (the rule's weights assume both endpoints).
    With ``with_control=True`` also returns the one-step Richardson
    estimate |I - I_half| / 3 of the quadrature error, using every other
    node; that needs an odd node count per axis.
    """
    if field.sampling != "endpoint":
        raise ResolutionMismatch("trapezoid integration needs endpoint sampling")
    nx, ny = field.resolution
    if nx < 2 or ny < 2:
        raise ResolutionMismatch("need at least 2 nodes per axis")
    xs = np.asarray(field.grid_x)
    ys = np.asarray(field.grid_y)
    ref = np.asarray(reference(xs[:, None], ys[None, :]), dtype=float)
    diff = np.abs(field.values - ref)
    total = float(_trapezoid_weights(nx) @ diff @ _trapezoid_weights(ny))
    if not with_control:
        return total
    if nx % 2 == 0 or ny % 2 == 0:
        raise ResolutionMismatch(
            "quadrature control needs an odd node count per axis"
        )
    half = diff[::2, ::2]
    hx, hy = half.shape
    coarse = float(_trapezoid_weights(hx) @ half @ _trapezoid_weights(hy))
    return total, abs(total - coarse) / 3.0


@dataclass(frozen=True)
class ErrorReport:
    """One row of an error table."""

    alpha: int
    alpha_prime: int
    resolution: int
    sup_error: float | None = None
    l1_error: float | None = None
    l1_control: float | None = None
    sym_diff: float | None = None
    provenance: str = ""

    _FIELDS = (
        "alpha",
        "alpha_prime",
        "resolution",
        "sup_error",
        "l1_error",
        "l1_control",
        "sym_diff",
        "provenance",
    )

    def to_json_dict(self) -> dict:
        return {k: getattr(self, k) for k in self._FIELDS}

    def csv_row(self) -> list:
        out = []
        for k in self._FIELDS:
            v = getattr(self, k)
            if v is None:
                out.append("")
            elif isinstance(v, float):
                out.append(repr(v))
            else:
                out.append(v)
        return out


def write_reports_csv(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ErrorReport._FIELDS)
        for r in reports:
            writer.writerow(r.csv_row())


def rate_table(alphas, evaluate, csv_path=None):
    """Evaluate an error metric along a schedule of orders.

    ``evaluate(alpha) -> ErrorReport``.  Returns the reports plus, per
    metric, whether the sequence strictly decreases (None if the metric
    was absent anywhere).
    """
    reports = [evaluate(a) for a in alphas]
    decreasing: dict[str, bool | None] = {}
    for key in ("sup_error", "l1_error", "sym_diff"):
        vals = [getattr(r, key) for r in reports]
        if any(v is None for v in vals) or len(vals) < 2:
            decreasing[key] = None
        else:
            fv = [to_float(v) for v in vals]
            decreasing[key] = all(b < a for a, b in zip(fv, fv[1:]))
    if csv_path is not None:
        write_reports_csv(reports, csv_path)
    return reports, decreasing
