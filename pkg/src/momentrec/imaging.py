"""Binary-image recovery: threshold a recovered field into a raster mask.

Masks live on the centers of an R x R partition of the unit square, so a
mask and a field can only be compared when the field was sampled at cell
centers; endpoint-sampled fields are refused rather than silently
shifted by half a pixel.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ResolutionMismatch
from .inversion import Approximant, InversionParams, invert_grid
from .moments import region_moments
from .policy import NumericPolicy
from .regions import Region

__all__ = [
    "RasterMask",
    "level_set_mask",
    "rasterize_region",
    "recover_region_mask",
    "symmetric_difference",
    "render_pgm",
]


def _centers(n: int) -> np.ndarray:
    return (2 * np.arange(n) + 1) / (2 * n)


@dataclass(frozen=True, eq=False)
class RasterMask:
    """Boolean raster on cell centers; bits[ix, iy] covers the cell
    [ix/nx, (ix+1)/nx) x [iy/ny, (iy+1)/ny)."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise ValueError("mask must be 2-D")
        bits = bits.copy()
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @property
    def resolution(self) -> tuple[int, int]:
        return self.bits.shape

    def measure(self) -> float:
        """Fraction of the unit square covered."""
        return float(self.bits.mean())

    def save(self, path) -> None:
        nx, ny = self.bits.shape
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["nx", "ny"])
            writer.writerow([nx, ny])
            writer.writerow(["i", "j", "bit"])
            for i in range(nx):
                for j in range(ny):
                    writer.writerow([i, j, int(self.bits[i, j])])

    @classmethod
    def load(cls, path) -> "RasterMask":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            if next(reader)[:2] != ["nx", "ny"]:
                raise ValueError(f"{path}: not a mask file")
            meta = next(reader)
            nx, ny = int(meta[0]), int(meta[1])
            next(reader)
            bits = np.zeros((nx, ny), dtype=bool)
            for row in reader:
                if not row:
                    continue
                bits[int(row[0]), int(row[1])] = bool(int(row[2]))
        return cls(bits)


def level_set_mask(field: Approximant, threshold: float = 0.5) -> RasterMask:
    """The set where the recovered field reaches the threshold."""
    if field.sampling != "center":
        raise ResolutionMismatch(
            "masks live on cell centers; re-run the inversion with "
            "center sampling"
        )
    return RasterMask(field.values >= threshold)


def rasterize_region(region: Region, resolution: int) -> RasterMask:
    """Ground-truth mask of a region on the same center grid."""
    cs = _centers(resolution)
    return RasterMask(region.contains_grid(cs, cs))


def recover_region_mask(
    region: Region,
    alpha: int,
    alpha_prime: int | None = None,
    resolution: int = 512,
    threshold: float = 0.5,
    policy: NumericPolicy | None = None,
    threads: int = 1,
) -> tuple[RasterMask, Approximant]:
    """Moments -> inversion at cell centers -> threshold.

    Returns the mask together with the underlying field (the field is
    what a report plots).
    """
    if alpha_prime is None:
        alpha_prime = alpha
    m = region_moments(region, alpha, alpha_prime, policy)
    params = InversionParams.create(alpha, alpha_prime, policy)
    field = invert_grid(m, params, resolution, sampling="center", threads=threads)
    return level_set_mask(field, threshold), field


def symmetric_difference(mask: RasterMask, other) -> float:
    """Area of the symmetric difference, as a fraction of the square.

    ``other`` may be another mask on the same grid or a region (which is
    rasterized onto the mask's grid first).
    """
    if isinstance(other, RasterMask):
        if other.bits.shape != mask.bits.shape:
            raise ResolutionMismatch(
                f"mask shapes {mask.bits.shape} and {other.bits.shape} differ"
            )
        other_bits = other.bits
    else:
        nx, ny = mask.bits.shape
        if nx != ny:
            raise ResolutionMismatch("region comparison needs a square mask")
        other_bits = other.contains_grid(_centers(nx), _centers(ny))
    return float(np.mean(mask.bits ^ other_bits))


def render_pgm(obj, path) -> None:
    """Write a binary PGM (P5) image of a mask or a field.

    Row 0 of the raster is the top of the square (y = 1); masks map True
    to white, fields are min-max normalized (a constant field renders
    black).
    """
    if isinstance(obj, RasterMask):
        img = np.where(obj.bits, 255, 0).astype(np.uint8)
    else:
        vals = np.asarray(obj.values, dtype=float)
        lo, hi = float(vals.min()), float(vals.max())
        if hi > lo:
            img = np.clip((vals - lo) / (hi - lo) * 255.0, 0, 255).astype(np.uint8)
        else:
            img = np.zeros(vals.shape, dtype=np.uint8)
    raster = img.T[::-1, :]  # [ix, iy] -> rows of decreasing y
    ny, nx = raster.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n# origin: row 0 = y=1\n")
        fh.write(f"{nx} {ny}\n255\n".encode())
        fh.write(raster.tobytes())
