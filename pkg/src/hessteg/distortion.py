"""Per-pixel ±1 modification costs from aggregated second derivatives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hessteg.convolution import raster_to_f32
from hessteg.errors import CostError
from hessteg.hessian import HessianField
from hessteg.image_io import Image, atomic_write

DEFAULT_P = -1.0
DEFAULT_WET_COST = 1e10


@dataclass(frozen=True, eq=False)
class CostMap:
    costs: np.ndarray
    wet_cost: float = DEFAULT_WET_COST
    p: float = DEFAULT_P

    @property
    def width(self) -> int:
        return self.costs.shape[1]

    @property
    def height(self) -> int:
        return self.costs.shape[0]

    @property
    def wet_mask(self) -> np.ndarray:
        return self.costs >= self.wet_cost

    def to_f32_bytes(self) -> bytes:
        return raster_to_f32(self.costs)

    def save(self, path) -> None:
        atomic_write(path, self.to_f32_bytes())

    def visualization(self) -> Image:
        """Affine rescale of -log(cost) to [0, 255]; bright means cheap to modify."""
        v = -np.log(self.costs)
        lo, hi = float(v.min()), float(v.max())
        if hi > lo:
            v = (v - lo) * (255.0 / (hi - lo))
        else:
            v = np.zeros_like(v)
        return Image.from_array(np.rint(v).astype(np.uint8))


def holder_cost(pxx, pyy, pxy, p: float = DEFAULT_P, wet_cost: float = DEFAULT_WET_COST) -> np.ndarray:
    """(|a|^p + |b|^p + |c|^p)^(-1/p), wet where any term vanishes, capped at ``wet_cost``."""
    if not p < 0:
        raise CostError(f"exponent p must be negative, got {p}")
    if not wet_cost > 0:
        raise CostError(f"wet_cost must be positive, got {wet_cost}")
    d = np.abs(np.stack(np.broadcast_arrays(pxx, pyy, pxy)).astype(np.float64))
    zero = (d == 0).any(axis=0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        rho = np.power(np.power(d, p).sum(axis=0), -1.0 / p)
    rho = np.where(zero | ~np.isfinite(rho), wet_cost, np.minimum(rho, wet_cost))
    return rho


def cost_map(field: HessianField, p: float = DEFAULT_P, wet_cost: float = DEFAULT_WET_COST) -> CostMap:
    rho = holder_cost(field.pxx.values, field.pyy.values, field.pxy.values, p, wet_cost)
    return CostMap(rho, float(wet_cost), float(p))
