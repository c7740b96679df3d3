"""8-bit grayscale PGM reading/writing and cover/stego comparison."""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hessteg.errors import (
    ColorImageError,
    DiffError,
    InvalidDimensionsError,
    MalformedHeaderError,
    TruncatedDataError,
    UnsupportedMaxvalError,
)

_WHITESPACE = b" \t\n\r\v\f"


@dataclass(frozen=True, eq=False)
class Image:
    """Grayscale raster; ``pixels`` has shape (height, width), dtype uint8."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidDimensionsError(f"invalid dimensions {self.width}x{self.height}")
        px = np.asarray(self.pixels)
        if px.shape != (self.height, self.width):
            px = px.reshape(self.height, self.width)
        if px.dtype != np.uint8:
            if px.size and (px.min() < 0 or px.max() > 255):
                raise ValueError("pixel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_array(cls, arr) -> "Image":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ColorImageError(f"expected a 2-D grayscale array, got shape {arr.shape}")
        return cls(arr.shape[1], arr.shape[0], arr)

    @property
    def size(self) -> int:
        return self.width * self.height

    def as_float(self) -> np.ndarray:
        """The pixel function P as float64, indexed [row, column]."""
        return self.pixels.astype(np.float64)

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self):
        return f"Image({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class DiffMap:
    width: int
    height: int
    deltas: np.ndarray  # int8, values in {-1, 0, +1}

    @property
    def change_count(self) -> int:
        return int(np.count_nonzero(self.deltas))

    def to_image(self) -> Image:
        """Mid-gray visualization: 128 for no change, 255 for +1, 1 for -1."""
        return Image(self.width, self.height, 128 + 127 * self.deltas.astype(np.int16))


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c in _WHITESPACE:
            pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos : pos + 1] not in _WHITESPACE and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise MalformedHeaderError("unexpected end of header")
    return data[start:pos], pos


def _header_int(token: bytes, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise MalformedHeaderError(f"non-numeric {what}: {token!r}") from None


def parse_pgm(data: bytes) -> Image:
    if len(data) < 2:
        raise MalformedHeaderError("file too short for a PGM header")
    magic = data[:2]
    if magic in (b"P3", b"P6"):
        raise ColorImageError("color PPM input is not supported; convert to grayscale first")
    if magic not in (b"P2", b"P5"):
        raise MalformedHeaderError(f"bad magic {magic!r}, expected P2 or P5")
    pos = 2
    if len(data) > 2 and data[2:3] not in _WHITESPACE and data[2:3] != b"#":
        raise MalformedHeaderError("magic must be followed by whitespace")
    tok, pos = _read_token(data, pos)
    width = _header_int(tok, "width")
    tok, pos = _read_token(data, pos)
    height = _header_int(tok, "height")
    tok, pos = _read_token(data, pos)
    maxval = _header_int(tok, "maxval")
    if width <= 0 or height <= 0:
        raise InvalidDimensionsError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxvalError(f"unsupported maxval {maxval} (only 255)")
    count = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
            raise TruncatedDataError("missing raster data")
        raster = data[pos + 1 : pos + 1 + count]
        if len(raster) < count:
            raise TruncatedDataError(f"expected {count} samples, found {len(raster)}")
        pixels = np.frombuffer(raster, dtype=np.uint8)
    else:
        tokens = data[pos:].split()
        if len(tokens) < count:
            raise TruncatedDataError(f"expected {count} samples, found {len(tokens)}")
        try:
            values = np.array([int(t) for t in tokens[:count]], dtype=np.int64)
        except ValueError:
            raise MalformedHeaderError("non-numeric sample in P2 raster") from None
        if values.min() < 0 or values.max() > 255:
            raise MalformedHeaderError("sample outside [0, 255]")
        pixels = values.astype(np.uint8)
    return Image(width, height, pixels.reshape(height, width))


def load_image(path) -> Image:
    return parse_pgm(Path(path).read_bytes())


def encode_pgm(img: Image) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def atomic_write(path, data: bytes) -> None:
    """Write via a sibling temp file and rename, so readers never see partial output."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_image(img: Image, path) -> None:
    atomic_write(path, encode_pgm(img))


def diff(cover: Image, stego: Image) -> DiffMap:
    if (cover.width, cover.height) != (stego.width, stego.height):
        raise DiffError(
            f"dimension mismatch: {cover.width}x{cover.height} vs {stego.width}x{stego.height}"
        )
    d = stego.pixels.astype(np.int16) - cover.pixels.astype(np.int16)
    if d.size and np.abs(d).max() > 1:
        bad = int(np.count_nonzero(np.abs(d) > 1))
        raise DiffError(f"{bad} pixel(s) differ by more than 1")
    return DiffMap(cover.width, cover.height, d.astype(np.int8))
