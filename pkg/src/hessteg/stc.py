"""Binary syndrome-trellis coding of LSB planes.

The parity-check matrix H (m rows, n columns) is banded: message bit b owns a
block of consecutive columns whose entries are the first ``widths[b]``
columns of an h-row submatrix placed at rows b..b+h-1 (rows past m dropped).
A trellis state holds the h pending syndrome bits; closing block b requires
the lowest bit to equal message bit b, after which the state shifts right.
"""

from __future__ import annotations

import numpy as np
from numba import njit

MIN_HEIGHT, MAX_HEIGHT = 6, 12
CANDIDATES = 16


def block_widths(n: int, m: int) -> np.ndarray:
    """Split n columns into m contiguous blocks whose widths differ by at most one."""
    b = np.arange(m + 1, dtype=np.int64)
    edges = (b * n) // m
    return np.diff(edges)


def random_submatrix(h: int, width: int, rng: np.random.Generator) -> np.ndarray:
    """Distinct random h-bit columns with the top and bottom bits always set."""
    pool = 1 << max(h - 2, 0)
    middle = rng.choice(pool, size=width, replace=width > pool).astype(np.int64)
    return 1 | (middle << 1) | (1 << (h - 1))


def trial_widths(widths: np.ndarray, h: int) -> np.ndarray:
    """Leading blocks of the real code covering a few thousand columns."""
    budget = int(np.clip((1 << 19) >> h, 1024, 4096))
    width = max(int(widths.max()), 1)
    return widths[: max(1, min(widths.size, budget // width))]


def trial_cost(submatrix: np.ndarray, h: int, widths: np.ndarray, rng: np.random.Generator) -> float:
    """Viterbi cost on a synthetic half-wet cost profile over the blocks ``widths``."""
    blocks = widths.size
    n = int(widths.sum())
    costs = rng.random(n)
    costs[rng.random(n) < 0.5] = 1e4
    cover = rng.integers(0, 2, size=n)
    msg = rng.integers(0, 2, size=blocks)
    return stc_embed(cover, costs, msg, submatrix, widths, h)[1]


def make_submatrix(
    h: int, widths: np.ndarray, rng: np.random.Generator, candidates: int = CANDIDATES
) -> np.ndarray:
    """Best of several random submatrices, ranked on the same synthetic trial.

    Depends only on the generator state and the code shape, so the extractor
    reproduces the embedder's choice without seeing the cover.
    """
    width = int(widths.max())
    pool = [random_submatrix(h, width, rng) for _ in range(candidates)]
    trial_seed = int(rng.integers(0, 2**63))
    trial = trial_widths(widths, h)
    scores = [trial_cost(sub, h, trial, np.random.default_rng(trial_seed)) for sub in pool]
    return pool[int(np.argmin(scores))]


@njit(cache=True)
def _viterbi(cover_bits, costs, msg, submatrix, widths, h):
    n = cover_bits.shape[0]
    m = msg.shape[0]
    states = 1 << h
    inf = np.inf
    cost = np.full(states, inf)
    cost[0] = 0.0
    nxt = np.empty(states)
    path = np.empty((n, states >> 3), dtype=np.uint8)

    j = 0
    for b in range(m):
        for k in range(widths[b]):
            col = submatrix[k]
            rho = costs[j]
            # c0: cost of stego bit 0, c1: cost of stego bit 1
            c0 = rho if cover_bits[j] else 0.0
            c1 = rho - c0
            for g in range(states >> 3):
                byte = 0
                for t in range(8):
                    s = (g << 3) | t
                    v0 = cost[s] + c0
                    v1 = cost[s ^ col] + c1
                    if v1 < v0:
                        nxt[s] = v1
                        byte |= 1 << t
                    else:
                        nxt[s] = v0
                path[j, g] = byte
            cost, nxt = nxt, cost
            j += 1
        bit = msg[b]
        half = states >> 1
        for s in range(half):
            cost[s] = cost[2 * s + bit]
        for s in range(half, states):
            cost[s] = inf

    state = 0
    best = cost[0]
    for s in range(1, states):
        if cost[s] < best:
            best = cost[s]
            state = s

    y = np.zeros(n, dtype=np.uint8)
    j = n
    for b in range(m - 1, -1, -1):
        state = 2 * state + msg[b]
        for k in range(widths[b] - 1, -1, -1):
            j -= 1
            if (path[j, state >> 3] >> (state & 7)) & 1:
                y[j] = 1
                state ^= submatrix[k]
            else:
                y[j] = 0
    return y, best


@njit(cache=True)
def _syndrome(bits, submatrix, widths):
    m = widths.shape[0]
    out = np.zeros(m, dtype=np.uint8)
    state = 0
    j = 0
    for b in range(m):
        for k in range(widths[b]):
            if bits[j]:
                state ^= submatrix[k]
            j += 1
        out[b] = state & 1
        state >>= 1
    return out


def _check_code(submatrix: np.ndarray, widths: np.ndarray, n: int, h: int) -> None:
    if not MIN_HEIGHT <= h <= MAX_HEIGHT:
        raise ValueError(f"constraint height {h} outside [{MIN_HEIGHT}, {MAX_HEIGHT}]")
    if widths.sum() != n:
        raise ValueError(f"block widths cover {widths.sum()} columns, expected {n}")
    if widths.size and widths.max() > submatrix.size:
        raise ValueError("a block is wider than the submatrix")
    if submatrix.size and (submatrix.min() < 0 or submatrix.max() >= 1 << h):
        raise ValueError(f"submatrix columns must be {h}-bit values")


def stc_embed(cover_bits, costs, msg, submatrix, widths, h: int) -> tuple[np.ndarray, float]:
    """Minimum-cost stego bits y with syndrome(y) == msg; returns (y, total cost)."""
    cover_bits = np.ascontiguousarray(cover_bits, dtype=np.uint8)
    costs = np.ascontiguousarray(costs, dtype=np.float64)
    msg = np.ascontiguousarray(msg, dtype=np.uint8)
    submatrix = np.ascontiguousarray(submatrix, dtype=np.int64)
    widths = np.ascontiguousarray(widths, dtype=np.int64)
    _check_code(submatrix, widths, cover_bits.size, h)
    if costs.size != cover_bits.size or msg.size != widths.size:
        raise ValueError("cover, cost and message lengths do not match the code")
    return _viterbi(cover_bits, costs, msg, submatrix, widths, h)


def stc_syndrome(bits, submatrix, widths, h: int = MAX_HEIGHT) -> np.ndarray:
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    submatrix = np.ascontiguousarray(submatrix, dtype=np.int64)
    widths = np.ascontiguousarray(widths, dtype=np.int64)
    _check_code(submatrix, widths, bits.size, h)
    return _syndrome(bits, submatrix, widths)
