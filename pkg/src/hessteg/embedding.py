"""Cost-driven ±1 embedding: payload-limited simulation, coded embedding and extraction."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy.special import entr, expit

from hessteg import stc
from hessteg.distortion import DEFAULT_P, DEFAULT_WET_COST, CostMap, cost_map
from hessteg.errors import (
    ConvergenceError,
    EmbeddingError,
    ExtractionError,
    PayloadError,
)
from hessteg.hessian import build_field, default_scale
from hessteg.image_io import Image, diff
from hessteg.kernels import normalize_family

log = logging.getLogger(__name__)

DEFAULT_HEIGHT = 7
MAX_ITER = 200
_LN2 = np.log(2.0)

# key-derived generator streams
_PERMUTATION, _CODE, _DIRECTION, _SIMULATION, _PADDING = range(1, 6)


@dataclass(frozen=True)
class StegoKey:
    seed: int

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise EmbeddingError(f"key seed must fit in 64 unsigned bits, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))

    def generator(self, stream: int) -> np.random.Generator:
        """Counter-based generator; each stream has its own Philox key."""
        return np.random.Generator(np.random.Philox(key=self.seed | (stream << 64)))


@dataclass(frozen=True)
class EmbedParams:
    alpha: float
    family: str = "Ky"
    N: int | None = None
    p: float = DEFAULT_P
    mode: str = "coded"
    constraint_height: int = DEFAULT_HEIGHT
    wet_cost: float = DEFAULT_WET_COST
    border: str = "mirror"

    def __post_init__(self):
        object.__setattr__(self, "family", normalize_family(self.family))
        if self.N is None:
            object.__setattr__(self, "N", default_scale(self.family))
        if not 0 < self.alpha <= 1:
            raise PayloadError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.mode not in ("coded", "simulate"):
            raise EmbeddingError(f"unknown mode {self.mode!r}")
        if not stc.MIN_HEIGHT <= self.constraint_height <= stc.MAX_HEIGHT:
            raise EmbeddingError(
                f"constraint height must be in [{stc.MIN_HEIGHT}, {stc.MAX_HEIGHT}], "
                f"got {self.constraint_height}"
            )

    def message_length(self, pixel_count: int) -> int:
        m = int(round(self.alpha * pixel_count))
        if self.mode == "coded" and m < 1:
            raise PayloadError(f"alpha={self.alpha} carries no bits in {pixel_count} pixels")
        return m

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class Message:
    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=np.uint8).ravel()
        if b.size and b.max() > 1:
            raise EmbeddingError("message bits must be 0 or 1")
        object.__setattr__(self, "bits", b)

    def __len__(self) -> int:
        return int(self.bits.size)

    def __eq__(self, other):
        if not isinstance(other, Message):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Message":
        """Most significant bit first within each byte."""
        return cls(np.unpackbits(np.frombuffer(data, dtype=np.uint8)))

    def to_bytes(self) -> bytes:
        return np.packbits(self.bits).tobytes()

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "Message":
        return cls(rng.integers(0, 2, size=length, dtype=np.uint8))


def compute_costs(img: Image, params: EmbedParams) -> CostMap:
    field = build_field(img, params.family, params.N, params.border)
    return cost_map(field, params.p, params.wet_cost)


def binary_entropy(beta) -> np.ndarray:
    """H2 in bits."""
    beta = np.asarray(beta, dtype=np.float64)
    return (entr(beta) + entr(1.0 - beta)) / _LN2


def change_probabilities(costs: np.ndarray, lam: float) -> np.ndarray:
    return expit(-lam * costs)


def solve_lambda(costs: np.ndarray, target_bits: float, rtol: float = 1e-9) -> float:
    """Smallest-error lambda with sum H2(beta_i(lambda)) == target_bits, by bisection."""
    costs = np.asarray(costs, dtype=np.float64).ravel()
    capacity = float(costs.size)
    if target_bits <= 0:
        raise PayloadError("payload must be positive")
    if target_bits > capacity * (1 + 1e-12):
        raise PayloadError(f"payload of {target_bits:.0f} bits exceeds capacity {capacity:.0f}")

    def entropy(lam):
        return float(binary_entropy(change_probabilities(costs, lam)).sum())

    if entropy(0.0) <= target_bits:
        return 0.0
    hi = 1.0 / float(np.median(costs))
    for _ in range(MAX_ITER):
        if entropy(hi) < target_bits:
            break
        hi *= 2.0
    else:
        raise ConvergenceError("could not bracket lambda")
    lo = 0.0
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        h = entropy(mid)
        if abs(h - target_bits) <= rtol * target_bits:
            return mid
        if h > target_bits:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    if abs(entropy(mid) - target_bits) > 1e-3 * target_bits:
        raise ConvergenceError(f"bisection did not converge in {MAX_ITER} iterations")
    return mid


def _directions(key: StegoKey, stream: int, values: np.ndarray) -> np.ndarray:
    """±1 per pixel, equiprobable except that 0 only rises and 255 only falls."""
    signs = np.where(key.generator(stream).random(values.size) < 0.5, -1, 1).astype(np.int16)
    signs[values == 0] = 1
    signs[values == 255] = -1
    return signs


def simulate(cover: Image, costs: CostMap, alpha: float, key: StegoKey) -> Image:
    """Payload-limited sender: flip each pixel independently with its optimal probability."""
    if not 0 < alpha <= 1:
        raise PayloadError(f"alpha must lie in (0, 1], got {alpha}")
    _check_shape(cover, costs)
    rho = costs.costs.ravel()
    lam = solve_lambda(rho, alpha * cover.size)
    beta = change_probabilities(rho, lam)
    log.debug("simulate: lambda=%.6g expected changes=%.1f", lam, beta.sum())
    x = cover.pixels.ravel().astype(np.int16)
    changed = key.generator(_SIMULATION).random(x.size) < beta
    signs = _directions(key, _DIRECTION, x)
    y = np.where(changed, x + signs, x)
    return Image(cover.width, cover.height, y.reshape(cover.height, cover.width).astype(np.uint8))


def _check_shape(img: Image, costs: CostMap) -> None:
    if costs.costs.shape != (img.height, img.width):
        raise EmbeddingError(
            f"cost map {costs.width}x{costs.height} does not match image {img.width}x{img.height}"
        )


def _code_structure(key: StegoKey, n: int, m: int, h: int):
    if not 1 <= m <= n // 2:
        raise PayloadError(f"{m} message bits need 1..{n // 2} for {n} pixels (alpha <= 0.5)")
    if not stc.MIN_HEIGHT <= h <= stc.MAX_HEIGHT:
        raise EmbeddingError(f"constraint height must be in [{stc.MIN_HEIGHT}, {stc.MAX_HEIGHT}]")
    return _derive_code(key.seed, n, m, h)


@lru_cache(maxsize=8)
def _derive_code(seed: int, n: int, m: int, h: int):
    # pure in its arguments; cached so an extract right after embed skips the search
    key = StegoKey(seed)
    perm = key.generator(_PERMUTATION).permutation(n)
    widths = stc.block_widths(n, m)
    submatrix = stc.make_submatrix(h, widths, key.generator(_CODE))
    for a in (perm, widths, submatrix):
        a.flags.writeable = False
    return perm, widths, submatrix


def embed(
    cover: Image,
    costs: CostMap,
    msg: Message,
    key: StegoKey,
    constraint_height: int = DEFAULT_HEIGHT,
    alpha: float | None = None,
) -> Image:
    """Syndrome-code ``msg`` into the LSBs of ``cover`` at minimal total cost."""
    _check_shape(cover, costs)
    n, m = cover.size, len(msg)
    if alpha is not None and m != int(round(alpha * n)):
        raise PayloadError(f"message has {m} bits but alpha={alpha} requires {int(round(alpha * n))}")
    perm, widths, submatrix = _code_structure(key, n, m, constraint_height)
    x = cover.pixels.ravel().astype(np.int16)
    xp = x[perm]
    y, total = stc.stc_embed(xp & 1, costs.costs.ravel()[perm], msg.bits, submatrix, widths, constraint_height)
    log.debug("embed: %d bits, trellis cost %.6g", m, total)
    flip = np.zeros(n, dtype=bool)
    flip[perm] = y != (xp & 1)
    signs = _directions(key, _DIRECTION, x)
    out = np.where(flip, x + signs, x)
    return Image(cover.width, cover.height, out.reshape(cover.height, cover.width).astype(np.uint8))


def extract(stego: Image, key: StegoKey, msg_len: int, constraint_height: int = DEFAULT_HEIGHT) -> Message:
    n = stego.size
    if not 1 <= msg_len <= n // 2:
        raise ExtractionError(f"message length {msg_len} is inconsistent with {n} pixels at rate <= 1/2")
    perm, widths, submatrix = _code_structure(key, n, msg_len, constraint_height)
    bits = stego.pixels.ravel()[perm] & 1
    return Message(stc.stc_syndrome(bits, submatrix, widths, constraint_height))


def pad_message(msg: Message, length: int, key: StegoKey) -> Message:
    """Extend ``msg`` to ``length`` bits with key-derived filler bits."""
    if len(msg) > length:
        raise PayloadError(f"message of {len(msg)} bits exceeds the {length}-bit payload")
    filler = key.generator(_PADDING).integers(0, 2, size=length - len(msg), dtype=np.uint8)
    return Message(np.concatenate([msg.bits, filler]))


@dataclass(frozen=True)
class ChangeStats:
    change_count: int
    change_rate: float
    mean_changed_cost: float | None
    mean_cost: float
    low_cost_half_ratio: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def change_stats(cover: Image, stego: Image, costs: CostMap) -> ChangeStats:
    d = diff(cover, stego)
    _check_shape(cover, costs)
    rho = costs.costs.ravel()
    changed = d.deltas.ravel() != 0
    count = int(changed.sum())
    n = rho.size
    low_half = np.zeros(n, dtype=bool)
    low_half[np.argsort(rho, kind="stable")[: n // 2]] = True
    return ChangeStats(
        change_count=count,
        change_rate=count / n,
        mean_changed_cost=float(rho[changed].mean()) if count else None,
        mean_cost=float(rho.mean()),
        low_cost_half_ratio=float((changed & low_half).sum() / count) if count else None,
    )
