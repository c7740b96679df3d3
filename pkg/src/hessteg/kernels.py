"""Exact rational construction of gradient and second-order derivative kernels.

Coefficient matrices are indexed ``[row][col]``; row offsets grow downwards and
column offsets grow to the right, so a kernel applied by correlation (see
:mod:`hessteg.convolution`) with a non-zero middle row measures horizontal
variation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from hessteg.errors import KernelError

CLASSIC_NAMES = ("Sobel", "Prewitt", "CentralDifference", "IntermediateDifference")
SECOND_ORDER_KINDS = ("x2", "y2", "xy")
KINDS = SECOND_ORDER_KINDS + ("first_x", "first_y")
FAMILIES = ("Ky", "Ko")

_ROTATED_KIND = {"x2": "y2", "y2": "x2", "xy": "xy", "first_x": "first_y", "first_y": "first_x"}


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class RationalMatrix:
    """Immutable matrix of :class:`fractions.Fraction` entries."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(_frac(v) for v in row) for row in self.entries)
        if not rows or not rows[0]:
            raise KernelError("empty matrix")
        if any(len(r) != len(rows[0]) for r in rows):
            raise KernelError("ragged matrix")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(tuple((Fraction(0),) * cols for _ in range(rows)))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "RationalMatrix":
        return cls(tuple(tuple(_frac(v) for v in r) for r in rows))

    @classmethod
    def outer(cls, col: Sequence, row: Sequence) -> "RationalMatrix":
        return cls(tuple(tuple(_frac(a) * _frac(b) for b in row) for a in col))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        r, c = idx
        return self.entries[r][c]

    def __mul__(self, scalar) -> "RationalMatrix":
        s = _frac(scalar)
        return RationalMatrix(tuple(tuple(v * s for v in r) for r in self.entries))

    __rmul__ = __mul__

    def __neg__(self) -> "RationalMatrix":
        return self * -1

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(tuple(zip(*self.entries)))

    def rotate_cw(self) -> "RationalMatrix":
        return RationalMatrix(tuple(zip(*self.entries[::-1])))

    def rotate_ccw(self) -> "RationalMatrix":
        return RationalMatrix(tuple(zip(*self.entries))[::-1])

    def total(self) -> Fraction:
        return sum((v for r in self.entries for v in r), Fraction(0))

    def convolve_full(self, other: "RationalMatrix") -> "RationalMatrix":
        """Full 2-D linear convolution (second operand flipped)."""
        rows, cols = self.rows + other.rows - 1, self.cols + other.cols - 1
        out = [[Fraction(0)] * cols for _ in range(rows)]
        for i, arow in enumerate(self.entries):
            for j, a in enumerate(arow):
                if not a:
                    continue
                for k, brow in enumerate(other.entries):
                    for m, b in enumerate(brow):
                        if b:
                            out[i + k][j + m] += a * b
        return RationalMatrix.from_rows(out)

    def strip_zero_rings(self) -> "RationalMatrix":
        """Remove all-zero outer rings, keeping the matrix square and centred."""
        m = self.entries
        while len(m) > 1 and len(m) == len(m[0]):
            ring = list(m[0]) + list(m[-1]) + [r[0] for r in m] + [r[-1] for r in m]
            if any(ring):
                break
            m = tuple(r[1:-1] for r in m[1:-1])
        return RationalMatrix(m)

    def to_array(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.entries], dtype=np.float64)

    def format_rows(self) -> list[str]:
        return [" ".join(str(v) for v in r) for r in self.entries]


@dataclass(frozen=True)
class Kernel:
    coeffs: RationalMatrix
    n: int
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KernelError(f"unknown kernel kind {self.kind!r}")
        if self.n < 1:
            raise KernelError(f"scale n must be >= 1, got {self.n}")
        size = 2 * self.n + 1
        if self.coeffs.shape != (size, size):
            raise KernelError(f"{self.coeffs.shape} coefficients do not fit n={self.n}")

    @property
    def size(self) -> int:
        return 2 * self.n + 1

    def entry(self, row_offset: int, col_offset: int) -> Fraction:
        """Coefficient at offsets in [-n, n] relative to the centre."""
        return self.coeffs[row_offset + self.n, col_offset + self.n]

    def middle_row(self) -> tuple[Fraction, ...]:
        return self.coeffs.entries[self.n]

    def nonzero(self) -> list[tuple[int, int, Fraction]]:
        """(row_offset, col_offset, value) for every non-zero coefficient."""
        n = self.n
        return [
            (i - n, j - n, v)
            for i, row in enumerate(self.coeffs.entries)
            for j, v in enumerate(row)
            if v
        ]

    def to_array(self) -> np.ndarray:
        return self.coeffs.to_array()

    def response(self, window) -> Fraction:
        """Exact correlation of the kernel with a same-sized window."""
        total = Fraction(0)
        for i, j, v in self.nonzero():
            total += v * _frac(window[i + self.n][j + self.n])
        return total

    def dump(self) -> str:
        lines = [f"{self.kind} {self.n} {self.size}"] + self.coeffs.format_rows()
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "Kernel":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        try:
            kind, n, size = lines[0].split()
            rows = [[Fraction(tok) for tok in ln.split()] for ln in lines[1:]]
        except (ValueError, IndexError) as exc:
            raise KernelError(f"malformed kernel dump: {exc}") from None
        if int(size) != 2 * int(n) + 1:
            raise KernelError("kernel dump header is inconsistent")
        return cls(RationalMatrix.from_rows(rows), int(n), kind)


def _centered(row: Sequence, n: int, kind: str) -> Kernel:
    """Place a 1-D stencil in the middle row of an otherwise zero square kernel."""
    size = 2 * n + 1
    rows = [[Fraction(0)] * size for _ in range(size)]
    rows[n] = [_frac(v) for v in row]
    return Kernel(RationalMatrix.from_rows(rows), n, kind)


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise KernelError(f"scale n must be a positive integer, got {n!r}")


_H = Fraction(1, 2)

_GRADIENT_KERNELS = {
    "Sobel": ((-1, 0, 1), (-2, 0, 2), (-1, 0, 1)),
    "Prewitt": ((-1, 0, 1), (-1, 0, 1), (-1, 0, 1)),
    "CentralDifference": ((0, 0, 0), (-_H, 0, _H), (0, 0, 0)),
    "IntermediateDifference": ((0, 0, 0), (0, -1, 1), (0, 0, 0)),
}

_Q = Fraction(1, 4)

# Second-order kernels as tabulated; xy entries keep the tabulated orientation.
_SECOND_ORDER_KERNELS = {
    ("Sobel", "x2"): (
        (1, 0, -2, 0, 1),
        (4, 0, -8, 0, 4),
        (6, 0, -12, 0, 6),
        (4, 0, -8, 0, 4),
        (1, 0, -2, 0, 1),
    ),
    ("Prewitt", "x2"): (
        (1, 0, -2, 0, 1),
        (2, 0, -4, 0, 2),
        (3, 0, -6, 0, 3),
        (2, 0, -4, 0, 2),
        (1, 0, -2, 0, 1),
    ),
    ("Sobel", "xy"): (
        (-1, -2, 0, 2, 1),
        (-2, -4, 0, 4, 2),
        (0, 0, 0, 0, 0),
        (2, 4, 0, -4, -2),
        (1, 2, 0, -2, -1),
    ),
    ("Prewitt", "xy"): (
        (-1, -1, 0, 1, 1),
        (-1, -1, 0, 1, 1),
        (0, 0, 0, 0, 0),
        (1, 1, 0, -1, -1),
        (1, 1, 0, -1, -1),
    ),
    ("CentralDifference", "x2"): (
        (0, 0, 0, 0, 0),
        (0, 0, 0, 0, 0),
        (_Q, 0, -_H, 0, _Q),
        (0, 0, 0, 0, 0),
        (0, 0, 0, 0, 0),
    ),
    ("IntermediateDifference", "x2"): (
        (0, 0, 0, 0, 0),
        (0, 0, 0, 0, 0),
        (0, 0, 1, -2, 1),
        (0, 0, 0, 0, 0),
        (0, 0, 0, 0, 0),
    ),
    ("CentralDifference", "xy"): ((-_Q, 0, _Q), (0, 0, 0), (_Q, 0, -_Q)),
    ("IntermediateDifference", "xy"): ((0, -1, 1), (0, 1, -1), (0, 0, 0)),
}


def _check_name(name: str) -> None:
    if name not in CLASSIC_NAMES:
        raise KernelError(f"unknown gradient operator {name!r}; choose from {CLASSIC_NAMES}")


def classic_gradient(name: str) -> Kernel:
    """Horizontal 3x3 gradient kernel of a classical operator."""
    _check_name(name)
    return Kernel(RationalMatrix.from_rows(_GRADIENT_KERNELS[name]), 1, "first_x")


def classic_second_order(name: str, kind: str) -> Kernel:
    _check_name(name)
    if kind not in ("x2", "xy"):
        raise KernelError(f"classic second-order kernels exist for x2 and xy, not {kind!r}")
    m = RationalMatrix.from_rows(_SECOND_ORDER_KERNELS[(name, kind)])
    return Kernel(m, m.rows // 2, kind)


def compose_second_order(name: str, kind: str) -> Kernel:
    """Derive a second-order kernel by convolving the gradient kernel with itself.

    ``x2`` convolves the horizontal kernel with itself; ``xy`` convolves it with
    its counter-clockwise quarter turn, which reproduces the tabulated sign
    orientation.
    """
    _check_name(name)
    k = classic_gradient(name).coeffs
    if kind == "x2":
        other = k
    elif kind == "xy":
        other = k.rotate_ccw()
    else:
        raise KernelError(f"composition defined for x2 and xy, not {kind!r}")
    m = k.convolve_full(other).strip_zero_rings()
    return Kernel(m, m.rows // 2, kind)


def rotate_90(k: Kernel) -> Kernel:
    """Clockwise quarter turn; maps horizontal kinds to their vertical counterparts."""
    return Kernel(k.coeffs.rotate_cw(), k.n, _ROTATED_KIND[k.kind])


def ky_x2(n: int) -> Kernel:
    """Gradient-variation kernel between the pixels at horizontal offsets -n, 0, +n."""
    _check_n(n)
    row = [Fraction(0)] * (2 * n + 1)
    row[0] = row[-1] = Fraction(1, 2 * n)
    row[n] = Fraction(-2, 2 * n)
    return _centered(row, n, "x2")


def ky_xy(n: int) -> Kernel:
    """Averaged diagonal variation kernel supported on the outer ring of the window.

    Entry at offsets (i, j) is sign(i*j) / (4|i||j|) when i, j != 0 and the
    position lies on the border, zero elsewhere.
    """
    _check_n(n)
    size = 2 * n + 1
    rows = [[Fraction(0)] * size for _ in range(size)]
    for i in range(-n, n + 1):
        for j in range(-n, n + 1):
            if i == 0 or j == 0 or (abs(i) != n and abs(j) != n):
                continue
            sign = 1 if i * j > 0 else -1
            rows[i + n][j + n] = Fraction(sign, 4 * abs(i) * abs(j))
    return Kernel(RationalMatrix.from_rows(rows), n, "xy")


def lagrange_d1(n: int) -> RationalMatrix:
    """First-derivative-at-0 weights of the interpolant through nodes -n..n.

    Weight of node i is l_i'(0) = sum_{a != i} 1/(i-a) * prod_{b != i,a} (0-b)/(i-b).
    """
    _check_n(n)
    nodes = range(-n, n + 1)
    weights = []
    for i in nodes:
        w = Fraction(0)
        for a in nodes:
            if a == i:
                continue
            term = Fraction(1, i - a)
            for b in nodes:
                if b != i and b != a:
                    term *= Fraction(-b, i - b)
            w += term
        weights.append(w)
    return RationalMatrix((tuple(weights),))


def lagrange_d2(n: int) -> tuple[Fraction, ...]:
    """Second-derivative-at-0 weights, summed over unordered node pairs."""
    _check_n(n)
    nodes = list(range(-n, n + 1))
    weights = []
    for i in nodes:
        others = [a for a in nodes if a != i]
        w = Fraction(0)
        for a, b in combinations(others, 2):
            if 0 not in (i, a, b):
                continue  # the product then contains the factor 0/(0-i)
            num, den = 2, (i - a) * (i - b)
            for c in others:
                if c != a and c != b:
                    num *= c
                    den *= c - i
            w += Fraction(num, den)
        weights.append(w)
    return tuple(weights)


def ko_x2(n: int) -> Kernel:
    return _centered(lagrange_d2(n), n, "x2")


def ko_xy(n: int) -> Kernel:
    d1 = lagrange_d1(n).entries[0]
    return Kernel(RationalMatrix.outer(d1, d1), n, "xy")


_X2 = {"Ky": ky_x2, "Ko": ko_x2}
_XY = {"Ky": ky_xy, "Ko": ko_xy}


def normalize_family(family: str) -> str:
    for f in FAMILIES:
        if family.lower() == f.lower():
            return f
    raise KernelError(f"unknown kernel family {family!r}; choose Ky or Ko")


@lru_cache(maxsize=256)
def second_order_kernel(family: str, kind: str, n: int) -> Kernel:
    """Kernel of one family for one derivative kind at scale n."""
    family = normalize_family(family)
    if kind == "x2":
        return _X2[family](n)
    if kind == "y2":
        return rotate_90(_X2[family](n))
    if kind == "xy":
        return _XY[family](n)
    raise KernelError(f"unknown second-order kind {kind!r}")
