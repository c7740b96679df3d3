"""Multi-scale second-derivative magnitude maps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hessteg.convolution import ResponseMap, correlate
from hessteg.errors import FieldError, KernelError
from hessteg.image_io import Image
from hessteg.kernels import normalize_family, second_order_kernel

DEFAULT_N = {"Ky": 4, "Ko": 12}


def default_scale(family: str) -> int:
    return DEFAULT_N[normalize_family(family)]


@dataclass(frozen=True, eq=False)
class HessianField:
    """Aggregated |d2P/dx2|, |d2P/dy2| and |d2P/dxdy| over scales 1..N."""

    pxx: ResponseMap
    pyy: ResponseMap
    pxy: ResponseMap
    family: str
    N: int

    @property
    def width(self) -> int:
        return self.pxx.width

    @property
    def height(self) -> int:
        return self.pxx.height

    def stack(self) -> np.ndarray:
        return np.stack([self.pxx.values, self.pyy.values, self.pxy.values])


def max_abs_response(values: np.ndarray, family: str, kind: str, N: int, border: str) -> np.ndarray:
    """Pointwise max over n = 1..N of |values correlated with the scale-n kernel|."""
    out = None
    for n in range(1, N + 1):
        r = np.abs(correlate(values, second_order_kernel(family, kind, n), border))
        out = r if out is None else np.maximum(out, r, out=out)
    return out


def build_field(img: Image, family: str = "Ky", N: int | None = None, border: str = "mirror") -> HessianField:
    try:
        family = normalize_family(family)
    except KernelError as exc:
        raise FieldError(str(exc)) from None
    if N is None:
        N = DEFAULT_N[family]
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise FieldError(f"N must be a positive integer, got {N!r}")
    if N > min(img.width, img.height):
        raise FieldError(f"N={N} needs {2 * N + 1}-wide kernels; image is {img.width}x{img.height}")
    values = img.as_float()
    maps = [ResponseMap(max_abs_response(values, family, kind, N, border)) for kind in ("x2", "y2", "xy")]
    return HessianField(*maps, family=family, N=int(N))
