"""Raster masks, level sets, and PGM rendering."""

from fractions import Fraction

import numpy as np
import pytest

from momentrec import (
    EXACT,
    InversionParams,
    RasterMask,
    ResolutionMismatch,
    invert_grid,
    level_set_mask,
    rasterize_region,
    recover_region_mask,
    render_pgm,
    symmetric_difference,
)
from momentrec.benchmarks import G1, STAIR_UNION, UNIT_SQUARE, quadratic_moments


def test_mask_basics_and_round_trip(tmp_path):
    bits = np.zeros((4, 3), dtype=bool)
    bits[1, 2] = True
    mask = RasterMask(bits)
    assert mask.resolution == (4, 3)
    assert mask.measure() == pytest.approx(1 / 12)
    path = tmp_path / "mask.csv"
    mask.save(path)
    back = RasterMask.load(path)
    assert np.array_equal(back.bits, mask.bits)
    with pytest.raises(ValueError):
        RasterMask(np.zeros(5, dtype=bool))


def test_mask_bits_are_frozen():
    mask = RasterMask(np.zeros((2, 2), dtype=bool))
    with pytest.raises(ValueError):
        mask.bits[0, 0] = True


def test_rasterize_region_counts_center_cells():
    mask = rasterize_region(G1, 64)
    # triangle below the diagonal in [0, 1/2]^2: an eighth of the square
    assert mask.measure() == pytest.approx(float(G1.area()), abs=0.01)
    assert rasterize_region(UNIT_SQUARE, 16).measure() == 1.0


def test_level_set_mask_requires_center_sampling():
    m = quadratic_moments(6)
    endpoint = invert_grid(m, InversionParams(6, 6, EXACT), 17, "endpoint")
    with pytest.raises(ResolutionMismatch):
        level_set_mask(endpoint)
    center = invert_grid(m, InversionParams(6, 6, EXACT), 17, "center")
    mask = level_set_mask(center, 1.5)
    assert 0.0 < mask.measure() < 1.0


def test_symmetric_difference_mask_and_region():
    a = RasterMask(np.zeros((8, 8), dtype=bool))
    b = RasterMask(np.ones((8, 8), dtype=bool))
    assert symmetric_difference(a, b) == 1.0
    assert symmetric_difference(a, a) == 0.0
    with pytest.raises(ResolutionMismatch):
        symmetric_difference(a, RasterMask(np.ones((4, 4), dtype=bool)))
    full = rasterize_region(UNIT_SQUARE, 8)
    assert symmetric_difference(full, UNIT_SQUARE) == 0.0
    with pytest.raises(ResolutionMismatch):
        symmetric_difference(RasterMask(np.ones((4, 2), dtype=bool)), UNIT_SQUARE)


def test_recover_region_mask_end_to_end():
    mask, field = recover_region_mask(STAIR_UNION, 20, resolution=96)
    assert field.sampling == "center"
    err = symmetric_difference(mask, STAIR_UNION)
    assert err < 0.09
    # recovery should beat a blank guess by a wide margin
    blank = RasterMask(np.zeros((96, 96), dtype=bool))
    assert err < symmetric_difference(blank, STAIR_UNION) / 2


def test_render_pgm_layout(tmp_path):
    bits = np.zeros((3, 2), dtype=bool)
    bits[0, 1] = True  # low x, high y: top-left of the image
    path = tmp_path / "m.pgm"
    render_pgm(RasterMask(bits), path)
    data = path.read_bytes()
    assert data.startswith(b"P5\n")
    raster = data[data.index(b"255\n") + 4 :]
    assert len(raster) == 6  # 3 wide, 2 tall
    assert raster[0] == 255  # row 0 is y = 1
    assert raster.count(255) == 1


def test_render_pgm_field_normalization(tmp_path):
    m = quadratic_moments(5)
    fld = invert_grid(m, InversionParams(5, 5, EXACT), 12, "center")
    path = tmp_path / "f.pgm"
    render_pgm(fld, path)
    data = path.read_bytes()
    raster = data[data.index(b"255\n") + 4 :]
    assert len(raster) == 144
    assert max(raster) == 255 and min(raster) == 0
