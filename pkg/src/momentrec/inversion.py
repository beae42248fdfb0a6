"""Moment inversion: windowed alternating sums and their kernel dual.

The recovery operator at orders (alpha, alpha_prime), evaluated at a
point (x, y) of the closed unit square, is

    f(x, y) = sum_{K = kx}^{alpha} sum_{J = ky}^{alpha_prime}
              w(alpha, kx, K) * w(alpha_prime, ky, J) * m(K, J)

with kx = floor(alpha * x), ky = floor(alpha_prime * y), and integer
weights

    w(a, c, K) = (-1)**(K - c) * (a + 1) * C(a, c) * C(a - c, K - c).

The point enters only through the floor indexes, so the operator is
piecewise constant on the (alpha + 1) x (alpha_prime + 1) lattice of
cells [kx/alpha, (kx+1)/alpha) x [ky/alpha_prime, (ky+1)/alpha_prime).
All grid evaluation therefore computes that staircase of cell values
once and reads any resolution off it by integer indexing; a grid node
and a bare point evaluation that land in the same cell agree bitwise.

The same operator applied to sample moments equals a product beta-kernel
density estimate: averaging

    (alpha + 1) * C(alpha, kx) * t**kx * (1 - t)**(alpha - kx)

over the sample.  That form has no alternating cancellation, so it is
the safe route for empirical data at any order, and it provides an
independent oracle for the weighted sums.

The alternating weights reach about 3**order, which dictates the
precision policy: exact rationals, or big floats with roughly 1.585 bits
per unit of combined order (the default rule adds headroom), or machine
doubles only for small orders.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .errors import (
    InvalidRadius,
    NonIntegerScaledOrder,
    OutOfDomain,
    PrecisionInsufficient,
    ResolutionMismatch,
)
from .moments import MomentGrid, SampleSet
from .policy import (
    DOUBLE,
    EXACT,
    NumericPolicy,
    default_policy,
    parse_policy,
    to_float,
    working_precision,
)

__all__ = [
    "floor_index",
    "lattice_weights",
    "InversionParams",
    "Approximant",
    "invert_point",
    "invert_grid",
    "extrapolated_point",
    "extrapolated_grid",
    "BetaKernel",
    "beta_kernel_pdf",
    "beta_kernel_cells",
    "beta_kernel_estimate",
    "kernel_density_grid",
    "beta_tail_mass",
    "beta_tail_bound",
    "kernel_offpeak_ratio",
    "sharp_tail_bound",
    "check_precision_escalation",
    "grid_axis",
    "grid_cell_indexes",
]

# Combined order past which machine doubles are refused outright.  Well
# before this the alternating sums already shed ~1.585 bits per unit of
# order; the cap is the hard stop, not a fitness claim.
DOUBLE_ORDER_CAP = 60


def floor_index(order: int, coord) -> int:
    """floor(order * coord) computed exactly; coord must be in [0, 1].

    Floats convert to Fractions first so values like 0.3 never misround
    across a cell boundary through float multiplication.
    """
    f = Fraction(coord)
    if f < 0 or f > 1:
        raise OutOfDomain(f"coordinate {coord} outside [0, 1]")
    return (order * f.numerator) // f.denominator


@lru_cache(maxsize=None)
def lattice_weights(order: int, cell: int) -> tuple[int, ...]:
    """Integer weights (w(order, cell, K) for K = cell..order)."""
    a, c = order, cell
    base = (a + 1) * math.comb(a, c)
    return tuple(
        (-1 if (k - c) % 2 else 1) * base * math.comb(a - c, k - c)
        for k in range(c, a + 1)
    )


@dataclass(frozen=True, slots=True)
class InversionParams:
    """Orders and the arithmetic policy used to evaluate the sums."""

    alpha: int
    alpha_prime: int
    policy: NumericPolicy

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.alpha_prime < 0:
            raise ValueError("orders must be nonnegative")

    @classmethod
    def create(
        cls,
        alpha: int,
        alpha_prime: int | None = None,
        policy: NumericPolicy | str | None = None,
    ) -> "InversionParams":
        if alpha_prime is None:
            alpha_prime = alpha
        if policy is None:
            policy = default_policy(alpha, alpha_prime)
        elif isinstance(policy, str):
            policy = parse_policy(policy)
        return cls(alpha, alpha_prime, policy)


def _dot(weights: tuple[int, ...], vec, kind: str):
    if kind == "exact":
        return sum(w * v for w, v in zip(weights, vec))
    if kind == "bigfloat":
        return mpmath.fdot(weights, vec)
    return math.fsum(w * v for w, v in zip(weights, vec))


def _convert_value(v, kind: str):
    if kind == "bigfloat":
        if isinstance(v, Fraction):
            return mpmath.mpf(v.numerator) / v.denominator
        return mpmath.mpf(v)
    if kind == "double":
        return float(v)
    return v


@lru_cache(maxsize=8)
def _converted_rows(m: MomentGrid, policy: NumericPolicy) -> tuple:
    """Moment values as scalars of the evaluation policy's type, rounded
    once under the policy's precision."""
    if policy.kind == "exact":
        return m.values
    with working_precision(policy):
        return tuple(
            tuple(_convert_value(v, policy.kind) for v in row) for row in m.values
        )


def _check_grid_compatible(m: MomentGrid, params: InversionParams) -> None:
    if m.alpha < params.alpha or m.alpha_prime < params.alpha_prime:
        raise ValueError(
            f"moment grid of order ({m.alpha}, {m.alpha_prime}) cannot drive "
            f"inversion at ({params.alpha}, {params.alpha_prime})"
        )
    if params.policy.is_exact and not m.policy.is_exact:
        raise PrecisionInsufficient(
            "exact-rational evaluation needs exact moments; these are "
            f"{m.policy.spell()}"
        )
    # The alternating weights reach ~4**order, so cancellation eats the
    # double mantissa; the kernel path has no such cap.
    if (
        params.policy.kind == "double"
        and params.alpha + params.alpha_prime > DOUBLE_ORDER_CAP
    ):
        raise PrecisionInsufficient(
            f"machine-double refused at combined order "
            f"{params.alpha + params.alpha_prime} > {DOUBLE_ORDER_CAP}; "
            "use exact-rational or a big-float policy"
        )


def _result_policy(m: MomentGrid, params: InversionParams) -> NumericPolicy:
    # A result never gets labeled more precise than its weakest input.
    return params.policy.weakest(m.policy) if not m.policy.is_exact else params.policy


def _urow(rows: tuple, params: InversionParams, ky: int) -> list:
    ap = params.alpha_prime
    wy = lattice_weights(ap, ky)
    kind = params.policy.kind
    return [_dot(wy, rows[k][ky : ap + 1], kind) for k in range(params.alpha + 1)]


def _staircase(
    m: MomentGrid, params: InversionParams, threads: int = 1
) -> tuple[tuple, ...]:
    """Cell values of the piecewise-constant inverse, indexed [kx][ky]."""
    alpha, ap = params.alpha, params.alpha_prime
    kind = params.policy.kind
    rows = _converted_rows(m, params.policy)
    with working_precision(params.policy):
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                urows = list(
                    pool.map(lambda ky: _urow(rows, params, ky), range(ap + 1))
                )
        else:
            urows = [_urow(rows, params, ky) for ky in range(ap + 1)]
        cells = []
        for kx in range(alpha + 1):
            wx = lattice_weights(alpha, kx)
            cells.append(
                tuple(_dot(wx, urows[ky][kx:], kind) for ky in range(ap + 1))
            )
    return tuple(cells)


@lru_cache(maxsize=32)
def _staircase_cached(m: MomentGrid, params: InversionParams) -> tuple[tuple, ...]:
    return _staircase(m, params)


def staircase_cells(
    m: MomentGrid, params: InversionParams, threads: int = 1
) -> tuple[tuple, ...]:
    """The full cell table, memoized: the error tables revisit the same
    (moments, params) pairs across resolutions."""
    _check_grid_compatible(m, params)
    if threads == 1:
        return _staircase_cached(m, params)
    return _staircase(m, params, threads=threads)


def invert_point(m: MomentGrid, params: InversionParams, x, y):
    """Evaluate the recovery operator at one point.

    Returns a scalar of the params policy's type (Fraction, mpf, or
    float).  Bitwise identical to the matching cell of a grid inversion.
    """
    _check_grid_compatible(m, params)
    kx = floor_index(params.alpha, x)
    ky = floor_index(params.alpha_prime, y)
    kind = params.policy.kind
    rows = _converted_rows(m, params.policy)
    with working_precision(params.policy):
        urow = _urow(rows, params, ky)
        wx = lattice_weights(params.alpha, kx)
        return _dot(wx, urow[kx:], kind)


def grid_axis(resolution: int, sampling: str) -> tuple[float, ...]:
    """Evaluation abscissas: i/(R-1) for endpoint sampling (includes both
    endpoints), (2i+1)/(2R) for center sampling (cell midpoints)."""
    if sampling == "endpoint":
        if resolution < 2:
            raise ValueError("endpoint sampling needs resolution >= 2")
        return tuple(i / (resolution - 1) for i in range(resolution))
    if sampling == "center":
        if resolution < 1:
            raise ValueError("resolution must be positive")
        return tuple((2 * i + 1) / (2 * resolution) for i in range(resolution))
    raise ValueError(f"unknown sampling {sampling!r}")


def grid_cell_indexes(order: int, resolution: int, sampling: str) -> tuple[int, ...]:
    """floor(order * x_i) for each grid abscissa, in pure integer
    arithmetic (the float abscissas are display-only)."""
    if sampling == "endpoint":
        return tuple((order * i) // (resolution - 1) for i in range(resolution))
    if sampling == "center":
        return tuple(
            (order * (2 * i + 1)) // (2 * resolution) for i in range(resolution)
        )
    raise ValueError(f"unknown sampling {sampling!r}")


@dataclass(frozen=True, eq=False)
class Approximant:
    """A recovered field on a tensor evaluation grid.

    ``values[ix, iy]`` is the float64 field at (grid_x[ix], grid_y[iy]).
    When the field came from a single staircase, ``cell_values`` holds the
    policy-typed cell table and ``cell_index_x/y`` map grid nodes to
    cells, so exact metrics can bypass the float cast.  Extrapolated
    fields combine two staircases and carry ``cell_values=None``.
    """

    grid_x: tuple[float, ...]
    grid_y: tuple[float, ...]
    values: np.ndarray
    params: InversionParams
    sampling: str
    cell_values: tuple | None = None
    cell_index_x: tuple[int, ...] | None = None
    cell_index_y: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(self.grid_x), len(self.grid_y)):
            raise ResolutionMismatch(
                f"values shape {vals.shape} does not match grid "
                f"({len(self.grid_x)}, {len(self.grid_y)})"
            )
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def resolution(self) -> tuple[int, int]:
        return (len(self.grid_x), len(self.grid_y))

    def value_at(self, ix: int, iy: int) -> float:
        return float(self.values[ix, iy])

    def cell_value_at(self, ix: int, iy: int):
        """Policy-typed value at a grid node (falls back to float64)."""
        if self.cell_values is None:
            return float(self.values[ix, iy])
        return self.cell_values[self.cell_index_x[ix]][self.cell_index_y[iy]]

    def save(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["alpha", "alpha_prime", "policy", "sampling", "nx", "ny"]
            )
            writer.writerow(
                [
                    self.params.alpha,
                    self.params.alpha_prime,
                    self.params.policy.spell(),
                    self.sampling,
                    len(self.grid_x),
                    len(self.grid_y),
                ]
            )
            writer.writerow(["x", "y", "value"])
            for ix, x in enumerate(self.grid_x):
                for iy, y in enumerate(self.grid_y):
                    writer.writerow([repr(x), repr(y), repr(float(self.values[ix, iy]))])

    @classmethod
    def load(cls, path) -> "Approximant":
        import csv

        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header[:4] != ["alpha", "alpha_prime", "policy", "sampling"]:
                raise ValueError(f"{path}: not a field file")
            meta = next(reader)
            alpha, ap = int(meta[0]), int(meta[1])
            policy = parse_policy(meta[2])
            sampling = meta[3]
            nx, ny = int(meta[4]), int(meta[5])
            next(reader)
            vals = np.empty((nx, ny), dtype=float)
            gx = [0.0] * nx
            gy = [0.0] * ny
            idx = 0
            for row in reader:
                if not row:
                    continue
                ix, iy = divmod(idx, ny)
                gx[ix] = float(row[0])
                gy[iy] = float(row[1])
                vals[ix, iy] = float(row[2])
                idx += 1
        if idx != nx * ny:
            raise ValueError(f"{path}: expected {nx * ny} rows, found {idx}")
        return cls(
            tuple(gx),
            tuple(gy),
            vals,
            InversionParams(alpha, ap, policy),
            sampling,
        )


def _cells_to_grid(
    cells: tuple[tuple, ...],
    alpha: int,
    alpha_prime: int,
    resolution: int,
    sampling: str,
) -> tuple[np.ndarray, tuple[int, ...], tuple[int, ...]]:
    kx = grid_cell_indexes(alpha, resolution, sampling)
    ky = grid_cell_indexes(alpha_prime, resolution, sampling)
    table = np.array([[to_float(v) for v in row] for row in cells], dtype=float)
    values = table[np.asarray(kx)[:, None], np.asarray(ky)[None, :]]
    return values, kx, ky


def invert_grid(
    m: MomentGrid,
    params: InversionParams,
    resolution: int,
    sampling: str = "endpoint",
    threads: int = 1,
) -> Approximant:
    """Recover the field on a resolution x resolution tensor grid.

    The staircase of cell values is computed once under the params
    policy; mapping it onto the grid is pure integer indexing, so the
    cost is O(order**3) arithmetic plus O(resolution**2) lookups
    regardless of resolution.
    """
    _check_grid_compatible(m, params)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    cells = staircase_cells(m, params, threads=threads)
    values, kx, ky = _cells_to_grid(
        cells, params.alpha, params.alpha_prime, resolution, sampling
    )
    out_params = InversionParams(
        params.alpha, params.alpha_prime, _result_policy(m, params)
    )
    return Approximant(
        grid_axis(resolution, sampling),
        grid_axis(resolution, sampling),
        values,
        out_params,
        sampling,
        cell_values=cells,
        cell_index_x=kx,
        cell_index_y=ky,
    )


def _scaled_orders(alpha: int, alpha_prime: int, scale) -> tuple[Fraction, int, int]:
    c = Fraction(scale)
    if not (0 < c < 1):
        raise ValueError("scale must lie in (0, 1)")
    fine_x = Fraction(alpha) / c
    fine_y = Fraction(alpha_prime) / c
    if fine_x.denominator != 1 or fine_y.denominator != 1:
        raise NonIntegerScaledOrder(
            f"orders ({alpha}, {alpha_prime}) rescaled by 1/{c} are not integers"
        )
    return c, int(fine_x), int(fine_y)


def extrapolated_point(
    m: MomentGrid,
    alpha: int,
    scale,
    x,
    y,
    alpha_prime: int | None = None,
    policy: NumericPolicy | None = None,
):
    """One-step order extrapolation at a point.

    Combines the inverses at orders a and a/scale as
    (1/(1-c)) * f_fine - (c/(1-c)) * f_base, which cancels the leading
    O(1/order) error term of smooth targets.  The moment grid must reach
    the rescaled (finer) order.
    """
    if alpha_prime is None:
        alpha_prime = alpha
    c, fine_x, fine_y = _scaled_orders(alpha, alpha_prime, scale)
    if policy is None:
        policy = EXACT if m.policy.is_exact else default_policy(fine_x, fine_y)
    base = invert_point(m, InversionParams(alpha, alpha_prime, policy), x, y)
    fine = invert_point(m, InversionParams(fine_x, fine_y, policy), x, y)
    with working_precision(policy):
        if policy.is_exact:
            return (fine - c * base) / (1 - c)
        if policy.kind == "bigfloat":
            cc = mpmath.mpf(c.numerator) / c.denominator
            return (fine - cc * base) / (1 - cc)
        return (fine - float(c) * base) / (1 - float(c))


def extrapolated_grid(
    m: MomentGrid,
    alpha: int,
    scale,
    resolution: int,
    sampling: str = "endpoint",
    alpha_prime: int | None = None,
    policy: NumericPolicy | None = None,
    threads: int = 1,
) -> Approximant:
    """Grid version of :func:`extrapolated_point`.

    The two staircases live on different cell lattices, so the combined
    field exists only on the evaluation grid; ``cell_values`` is None.
    """
    if alpha_prime is None:
        alpha_prime = alpha
    c, fine_x, fine_y = _scaled_orders(alpha, alpha_prime, scale)
    if policy is None:
        policy = EXACT if m.policy.is_exact else default_policy(fine_x, fine_y)
    base_params = InversionParams(alpha, alpha_prime, policy)
    fine_params = InversionParams(fine_x, fine_y, policy)
    _check_grid_compatible(m, fine_params)
    base_cells = staircase_cells(m, base_params, threads=threads)
    fine_cells = staircase_cells(m, fine_params, threads=threads)
    base_vals, _, _ = _cells_to_grid(base_cells, alpha, alpha_prime, resolution, sampling)
    fine_vals, _, _ = _cells_to_grid(fine_cells, fine_x, fine_y, resolution, sampling)
    cf = float(c)
    values = (fine_vals - cf * base_vals) / (1.0 - cf)
    out_params = InversionParams(fine_x, fine_y, _result_policy(m, fine_params))
    return Approximant(
        grid_axis(resolution, sampling),
        grid_axis(resolution, sampling),
        values,
        out_params,
        sampling,
    )


def extrapolated_staircase(
    m: MomentGrid,
    alpha: int,
    scale,
    alpha_prime: int | None = None,
    policy: NumericPolicy | None = None,
    threads: int = 1,
) -> tuple[np.ndarray, int, int]:
    """Extrapolated field as a cell table on the fine lattice.

    Only available when 1/scale is an integer, so the fine lattice
    refines the base lattice and the combined field is itself piecewise
    constant on fine cells.  Returns (float64 cells, fine orders).
    """
    if alpha_prime is None:
        alpha_prime = alpha
    c, fine_x, fine_y = _scaled_orders(alpha, alpha_prime, scale)
    ratio = Fraction(1) / c
    if ratio.denominator != 1:
        raise ValueError(
            f"scale {c} does not nest the lattices; use extrapolated_grid"
        )
    r = int(ratio)
    if policy is None:
        policy = EXACT if m.policy.is_exact else default_policy(fine_x, fine_y)
    base = staircase_cells(m, InversionParams(alpha, alpha_prime, policy), threads)
    fine = staircase_cells(m, InversionParams(fine_x, fine_y, policy), threads)
    base_arr = np.array([[to_float(v) for v in row] for row in base])
    fine_arr = np.array([[to_float(v) for v in row] for row in fine])
    # fine cell kf sits inside coarse cell kf // r, including the
    # degenerate top cell at x = 1
    ix = np.arange(fine_x + 1) // r
    iy = np.arange(fine_y + 1) // r
    cf = float(c)
    coarse_on_fine = base_arr[ix[:, None], iy[None, :]]
    values = (fine_arr - cf * coarse_on_fine) / (1.0 - cf)
    return values, fine_x, fine_y


@dataclass(frozen=True, slots=True)
class BetaKernel:
    """The beta window the operator applies along one axis at a point:
    a Beta(cell + 1, order - cell + 1) density in the integration
    variable."""

    order: int
    cell: int

    @property
    def shape1(self) -> int:
        return self.cell + 1

    @property
    def shape2(self) -> int:
        return self.order - self.cell + 1

    def mean(self) -> Fraction:
        return Fraction(self.shape1, self.order + 2)


def beta_kernel_pdf(order: int, x, t, policy: NumericPolicy = DOUBLE):
    """The kernel (order+1) * C(order, k) * t**k * (1-t)**(order-k) with
    k = floor(order * x), as a function of the sample coordinate t."""
    k = floor_index(order, x)
    tf = Fraction(t)
    if tf < 0 or tf > 1:
        raise OutOfDomain(f"sample coordinate {t} outside [0, 1]")
    if policy.is_exact:
        return (order + 1) * math.comb(order, k) * tf**k * (1 - tf) ** (order - k)
    if policy.kind == "bigfloat":
        with working_precision(policy):
            tm = mpmath.mpf(tf.numerator) / tf.denominator
            return (
                (order + 1)
                * math.comb(order, k)
                * tm**k
                * (1 - tm) ** (order - k)
            )
    td = tf.numerator / tf.denominator
    if td in (0.0, 1.0):
        exact = (order + 1) * math.comb(order, k) * tf**k * (1 - tf) ** (order - k)
        return float(exact)
    logv = (
        math.log(order + 1)
        + math.lgamma(order + 1)
        - math.lgamma(k + 1)
        - math.lgamma(order - k + 1)
        + k * math.log(td)
        + (order - k) * math.log1p(-td)
    )
    return math.exp(logv)


def _beta_matrix(t: np.ndarray, order: int) -> np.ndarray:
    """B[i, k] = (order+1) * C(order, k) * t_i**k * (1-t_i)**(order-k),
    one row per sample, computed in log space.  Rows at t = 0 or 1 are
    filled directly (only the first resp. last entry is nonzero)."""
    t = np.asarray(t, dtype=float)
    n = t.size
    ks = np.arange(order + 1)
    lgam = np.array([math.lgamma(i + 1) for i in range(order + 1)])
    logc = lgam[order] - lgam - lgam[::-1]
    out = np.zeros((n, order + 1))
    interior = (t > 0) & (t < 1)
    ti = t[interior]
    if ti.size:
        logs = (
            math.log(order + 1)
            + logc[None, :]
            + ks[None, :] * np.log(ti)[:, None]
            + (order - ks)[None, :] * np.log1p(-ti)[:, None]
        )
        out[interior] = np.exp(logs)
    out[t == 0, 0] = order + 1
    out[t == 1, order] = order + 1
    return out


def beta_kernel_cells(samples: SampleSet, params: InversionParams) -> np.ndarray:
    """Staircase of the kernel density estimate: cells[kx, ky] =
    (1/n) sum_i Bx[i, kx] * By[i, ky].  Float64; no cancellation, safe at
    any order."""
    bx = _beta_matrix(samples.xs, params.alpha)
    by = _beta_matrix(samples.ys, params.alpha_prime)
    return (bx.T @ by) / samples.n


def beta_kernel_estimate(samples: SampleSet, params: InversionParams, x, y) -> float:
    """Kernel density estimate at one point (float64)."""
    kx = floor_index(params.alpha, x)
    ky = floor_index(params.alpha_prime, y)
    bx = _beta_matrix(samples.xs, params.alpha)[:, kx]
    by = _beta_matrix(samples.ys, params.alpha_prime)[:, ky]
    return float(bx @ by) / samples.n


def kernel_density_grid(
    samples: SampleSet,
    params: InversionParams,
    resolution: int,
    sampling: str = "endpoint",
) -> Approximant:
    """Kernel density estimate on a tensor grid, as an Approximant.

    Numerically this equals inverting the empirical moments, but it runs
    in float64 at any order because nothing alternates in sign.
    """
    cells_arr = beta_kernel_cells(samples, params)
    cells = tuple(tuple(float(v) for v in row) for row in cells_arr)
    values, kx, ky = _cells_to_grid(
        cells, params.alpha, params.alpha_prime, resolution, sampling
    )
    out_params = InversionParams(params.alpha, params.alpha_prime, DOUBLE)
    return Approximant(
        grid_axis(resolution, sampling),
        grid_axis(resolution, sampling),
        values,
        out_params,
        sampling,
        cell_values=cells,
        cell_index_x=kx,
        cell_index_y=ky,
    )


def _check_radius(x: float, radius: float) -> None:
    if not (0 < x < 1):
        raise OutOfDomain("concentration statements need x strictly inside (0, 1)")
    if not (0 < radius < min(x, 1 - x)):
        raise InvalidRadius(
            f"radius {radius} must lie in (0, {min(x, 1 - x)}) for x = {x}"
        )


def beta_tail_mass(order: int, x: float, radius: float, floored: bool = False):
    """Mass the beta window at x places outside [x - radius, x + radius].

    With ``floored=False`` the window shapes are the idealized
    (order*x + 1, order*(1-x) + 1); with ``floored=True`` the integer
    shapes actually used at evaluation points.  Returns an mpf computed
    at precision scaled to the order (the mass underflows doubles fast).
    """
    _check_radius(x, radius)
    with mpmath.workprec(max(256, 4 * order)):
        if floored:
            k = floor_index(order, Fraction(x))
            a, b = k + 1, order - k + 1
        else:
            a = order * mpmath.mpf(x) + 1
            b = order * (1 - mpmath.mpf(x)) + 1
        inner = mpmath.betainc(a, b, x - radius, x + radius, regularized=True)
        return 1 - inner


def beta_tail_bound(order: int, x: float, radius: float):
    """The claimed envelope (1 - radius)**order * sqrt((order + 2) /
    (2 pi x (1 - x))) for the tail mass.  Kept verbatim so its failure
    is measurable; see sharp_tail_bound for one that holds."""
    _check_radius(x, radius)
    with mpmath.workprec(max(256, 4 * order)):
        return mpmath.power(1 - radius, order) * mpmath.sqrt(
            (order + 2) / (2 * mpmath.pi * x * (1 - x))
        )


def kernel_offpeak_ratio(x: float, radius: float):
    """Per-order geometric decay factor of the beta window at distance
    radius from its peak: max of g(x - radius), g(x + radius) with
    g(t) = (t/x)**x * ((1-t)/(1-x))**(1-x).  Always in (0, 1)."""
    _check_radius(x, radius)
    with mpmath.workprec(256):
        xm = mpmath.mpf(x)

        def g(t):
            return mpmath.power(t / xm, xm) * mpmath.power((1 - t) / (1 - xm), 1 - xm)

        return max(g(xm - radius), g(xm + radius))


def sharp_tail_bound(order: int, x: float, radius: float):
    """Tail envelope that does hold: offpeak_ratio**order times the same
    polynomial factor as beta_tail_bound."""
    g = kernel_offpeak_ratio(x, radius)
    with mpmath.workprec(max(256, 4 * order)):
        return mpmath.power(g, order) * mpmath.sqrt(
            (order + 2) / (2 * mpmath.pi * x * (1 - x))
        )


def check_precision_escalation(
    m: MomentGrid,
    params: InversionParams,
    points,
    rel_tol: float = 1e-9,
) -> float:
    """Re-evaluate at doubled precision and compare.

    Returns the worst relative difference over the probe points; raises
    PrecisionInsufficient if it exceeds rel_tol.  Exact policies return
    0.0 without re-evaluating.  Double policies are checked against the
    default big-float rule.
    """
    if params.policy.is_exact:
        return 0.0
    if params.policy.kind == "double":
        hi_policy = default_policy(params.alpha, params.alpha_prime)
    else:
        hi_policy = NumericPolicy("bigfloat", 2 * params.policy.precision_bits)
    hi = InversionParams(params.alpha, params.alpha_prime, hi_policy)
    worst = 0.0
    for x, y in points:
        v = to_float(invert_point(m, params, x, y))
        w = to_float(invert_point(m, hi, x, y))
        scale = max(abs(w), 1.0)
        rel = abs(v - w) / scale
        worst = max(worst, rel)
    if worst > rel_tol:
        raise PrecisionInsufficient(
            f"result moved by {worst:.3e} (relative) under doubled precision; "
            f"policy {params.policy.spell()} is insufficient at order "
            f"({params.alpha}, {params.alpha_prime})"
        )
    return worst
