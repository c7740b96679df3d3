"""Kernel application over whole images with explicit border extension."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit

from hessteg.errors import ConvolutionError
from hessteg.image_io import Image, atomic_write
from hessteg.kernels import Kernel

BORDERS = ("mirror", "replicate")

# numpy "reflect" mirrors about the edge sample without repeating it
_PAD_MODE = {"mirror": "reflect", "replicate": "edge"}

_F32_HEADER = struct.Struct("<II")


@dataclass(frozen=True, eq=False)
class ResponseMap:
    """Real-valued raster aligned with a source image, shape (height, width)."""

    values: np.ndarray

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def __abs__(self) -> "ResponseMap":
        return ResponseMap(np.abs(self.values))

    def to_f32_bytes(self) -> bytes:
        return raster_to_f32(self.values)

    def save(self, path) -> None:
        atomic_write(path, self.to_f32_bytes())

    @classmethod
    def load(cls, path) -> "ResponseMap":
        return cls(f32_to_raster(Path(path).read_bytes()))


def raster_to_f32(values: np.ndarray) -> bytes:
    """8-byte header (width, height as little-endian uint32) then float32 samples."""
    h, w = values.shape
    return _F32_HEADER.pack(w, h) + np.ascontiguousarray(values, dtype="<f4").tobytes()


def f32_to_raster(data: bytes) -> np.ndarray:
    if len(data) < _F32_HEADER.size:
        raise ConvolutionError("f32 raster shorter than its header")
    w, h = _F32_HEADER.unpack_from(data)
    body = data[_F32_HEADER.size :]
    if len(body) != 4 * w * h:
        raise ConvolutionError(f"f32 raster expects {4 * w * h} data bytes, found {len(body)}")
    return np.frombuffer(body, dtype="<f4").reshape(h, w).astype(np.float64)


def pad(values: np.ndarray, n: int, border: str = "mirror") -> np.ndarray:
    if border not in _PAD_MODE:
        raise ConvolutionError(f"unknown border policy {border!r}; choose from {BORDERS}")
    return np.pad(values, n, mode=_PAD_MODE[border])


def correlate(values: np.ndarray, k: Kernel, border: str = "mirror") -> np.ndarray:
    """Apply ``k`` without flipping: out[r, c] = sum k[i][j] * ext[r+i-n, c+j-n].

    Taps are accumulated as differences from the centre sample plus the
    kernel sum times the centre, so zero-sum kernels give exactly 0 on
    locally constant windows. Only non-zero coefficients are visited, in a
    fixed order.
    """
    values = np.asarray(values, dtype=np.float64)
    h, w = values.shape
    if k.size > 2 * min(h, w) + 1:
        raise ConvolutionError(f"{k.size}x{k.size} kernel does not fit a {w}x{h} image")
    taps = k.nonzero()
    rows = np.array([i for i, _, _ in taps], dtype=np.int64)
    cols = np.array([j for _, j, _ in taps], dtype=np.int64)
    weights = np.array([float(v) for _, _, v in taps], dtype=np.float64)
    total = float(k.coeffs.total())
    return _correlate_taps(pad(values, k.n, border), k.n, h, w, rows, cols, weights, total)


@njit(cache=True)
def _correlate_taps(ext, n, h, w, rows, cols, weights, total):
    out = np.zeros((h, w))
    for r in range(h):
        centre = ext[r + n, n : n + w]
        for t in range(weights.shape[0]):
            src = r + n + rows[t]
            off = n + cols[t]
            v = weights[t]
            for c in range(w):
                out[r, c] += v * (ext[src, off + c] - centre[c])
        if total != 0.0:
            for c in range(w):
                out[r, c] += total * centre[c]
    return out


def convolve(img: Image, k: Kernel, border: str = "mirror") -> ResponseMap:
    return ResponseMap(correlate(img.as_float(), k, border))
