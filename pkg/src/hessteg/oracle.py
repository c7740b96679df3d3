"""Brute-force second derivatives of the bivariate Lagrange interpolant.

Independent of :mod:`hessteg.kernels`: the interpolant through every sample of
a (2n+1)x(2n+1) window is differentiated term by term with the product rule
and evaluated at the window centre in floating point. Samples are addressed as
P(x, y) = window[y + n][x + n] (x = column offset, y = row offset).
"""

from __future__ import annotations

from functools import lru_cache
from math import prod

import numpy as np


def _basis(i: int, nodes: tuple[int, ...], t: float) -> float:
    return prod((t - a) / (i - a) for a in nodes if a != i)


def _basis_d1(i: int, nodes: tuple[int, ...], t: float) -> float:
    total = 0.0
    for a in nodes:
        if a == i:
            continue
        total += 1.0 / (i - a) * prod((t - b) / (i - b) for b in nodes if b not in (i, a))
    return total


def _basis_d2(i: int, nodes: tuple[int, ...], t: float) -> float:
    total = 0.0
    for a in nodes:
        if a == i:
            continue
        inner = 0.0
        for b in nodes:
            if b in (i, a):
                continue
            inner += 1.0 / (i - b) * prod((t - c) / (i - c) for c in nodes if c not in (i, a, b))
        total += inner / (i - a)
    return total


@lru_cache(maxsize=None)
def _factors(n: int, t: float) -> tuple[tuple[float, ...], tuple[float, ...], tuple[float, ...]]:
    nodes = tuple(range(-n, n + 1))
    return (
        tuple(_basis(i, nodes, t) for i in nodes),
        tuple(_basis_d1(i, nodes, t) for i in nodes),
        tuple(_basis_d2(i, nodes, t) for i in nodes),
    )


def interpolant_derivative(window, kind: str, x: float = 0.0, y: float = 0.0) -> float:
    """Second partial derivative ``kind`` of the window's interpolant at (x, y)."""
    w = np.asarray(window, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] % 2 == 0:
        raise ValueError(f"window must be odd and square, got shape {w.shape}")
    n = w.shape[0] // 2
    lx, dx, ddx = _factors(n, float(x))
    ly, dy, ddy = _factors(n, float(y))
    if kind == "x2":
        fx, fy = ddx, ly
    elif kind == "y2":
        fx, fy = lx, ddy
    elif kind == "xy":
        fx, fy = dx, dy
    else:
        raise ValueError(f"unknown kind {kind!r}")
    total = 0.0
    for yi in range(2 * n + 1):
        for xi in range(2 * n + 1):
            total += w[yi, xi] * fx[xi] * fy[yi]
    return total


def oracle_second_derivative(window, kind: str) -> float:
    return interpolant_derivative(window, kind, 0.0, 0.0)
