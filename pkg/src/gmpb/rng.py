"""Seeded random stream shared by scenario construction, dynamics and optimizers.

The generator is SplitMix64: a 64-bit Weyl counter
passed through a fixed mixing function. Because the n-th output depends only on
``seed + n * GAMMA``, blocks of uniforms can be produced with numpy and are
bit-identical to the scalar path.

Uniform doubles take the top 53 bits of each output. Gaussians use the
Marsaglia polar form of Box-Muller with the second value of each pair cached.
"""

from __future__ import annotations

import math

import numba
import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / (1 << 53)


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


@numba.njit(cache=True)
def _polar_fill(state, out, start):
    """Fill ``out[start:]`` with polar-method Gaussians; returns (state, cached, has_cached).

    Same arithmetic as the scalar path, so results are bit-identical.
    """
    gamma = np.uint64(GAMMA)
    m1 = np.uint64(MIX1)
    m2 = np.uint64(MIX2)
    i = start
    n = out.shape[0]
    cached = 0.0
    has_cached = False
    while i < n:
        while True:
            state = state + gamma
            z = state
            z = (z ^ (z >> np.uint64(30))) * m1
            z = (z ^ (z >> np.uint64(27))) * m2
            z = z ^ (z >> np.uint64(31))
            u = 2.0 * (np.float64(z >> np.uint64(11)) * INV_2_53) - 1.0
            state = state + gamma
            z = state
            z = (z ^ (z >> np.uint64(30))) * m1
            z = (z ^ (z >> np.uint64(27))) * m2
            z = z ^ (z >> np.uint64(31))
            v = 2.0 * (np.float64(z >> np.uint64(11)) * INV_2_53) - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                break
        f = math.sqrt(-2.0 * math.log(s) / s)
        out[i] = u * f
        i += 1
        if i < n:
            out[i] = v * f
            i += 1
        else:
            cached = v * f
            has_cached = True
    return state, cached, has_cached


@numba.njit(cache=True)
def _uniform_fill(state, lo, hi, out):
    """``out[i] = lo[i] + (hi[i] - lo[i]) * u_i`` with the scalar path's edge rules."""
    gamma = np.uint64(GAMMA)
    m1 = np.uint64(MIX1)
    m2 = np.uint64(MIX2)
    for i in range(out.shape[0]):
        state = state + gamma
        z = state
        z = (z ^ (z >> np.uint64(30))) * m1
        z = (z ^ (z >> np.uint64(27))) * m2
        z = z ^ (z >> np.uint64(31))
        u = np.float64(z >> np.uint64(11)) * INV_2_53
        a, b = lo[i], hi[i]
        if a == b:
            out[i] = a
            continue
        r = a + (b - a) * u
        out[i] = np.nextafter(b, a) if r >= b else r
    return state


class RandomSource:
    """Deterministic SplitMix64 stream.

    Not thread safe; hand a source between threads only between draws.
    """

    def __init__(self, seed: int):
        if seed < 0 or seed > MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self._state = int(seed)
        self.cached_gaussian: float | None = None

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed}, state={self._state:#018x})"

    def getstate(self) -> tuple[int, float | None]:
        return self._state, self.cached_gaussian

    def setstate(self, state: tuple[int, float | None]) -> None:
        self._state, self.cached_gaussian = state

    def next_u64(self) -> int:
        self._state = (self._state + GAMMA) & MASK64
        return _mix(self._state)

    def next_double(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * INV_2_53

    def next_uniform(self, lo: float, hi: float) -> float:
        if lo > hi:
            raise ValueError(f"invalid range [{lo}, {hi})")
        u = self.next_double()
        if lo == hi:
            return lo
        r = lo + (hi - lo) * u
        # rounding can land exactly on hi
        return math.nextafter(hi, lo) if r >= hi else r

    def next_below(self, n: int) -> int:
        """Integer in [0, n) from a single uniform draw."""
        if n <= 0:
            raise ValueError(f"bound must be positive, got {n}")
        return min(int(self.next_double() * n), n - 1)

    def next_int(self, lo: int, hi: int) -> int:
        """Integer uniform on the closed range [lo, hi]."""
        if lo > hi:
            raise ValueError(f"invalid range [{lo}, {hi}]")
        return lo + self.next_below(hi - lo + 1)

    def next_gaussian(self) -> float:
        if self.cached_gaussian is not None:
            g = self.cached_gaussian
            self.cached_gaussian = None
            return g
        while True:
            u = 2.0 * self.next_double() - 1.0
            v = 2.0 * self.next_double() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                break
        f = math.sqrt(-2.0 * math.log(s) / s)
        self.cached_gaussian = v * f
        return u * f

    def next_permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of range(n); consumes exactly n - 1 draws.

        Step i (from n - 1 down to 1) swaps position i with ``next_below(i + 1)``;
        the draws are taken as one block, which gives the same values.
        """
        if n < 0:
            raise ValueError(f"n must be nonnegative, got {n}")
        perm = list(range(n))
        if n < 2:
            return perm
        bound = np.arange(n, 1, -1)
        picks = np.minimum((self.uniform_array(0.0, 1.0, n - 1) * bound).astype(np.int64), bound - 1).tolist()
        for i, j in zip(range(n - 1, 0, -1), picks):
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def gaussian_vector(self, n: int) -> np.ndarray:
        """``n`` Gaussians, identical to ``n`` calls of ``next_gaussian``."""
        out = np.empty(n)
        if n == 0:
            return out
        start = 0
        if self.cached_gaussian is not None:
            out[0] = self.cached_gaussian
            self.cached_gaussian = None
            start = 1
        if start < n:
            state, cached, has_cached = _polar_fill(np.uint64(self._state), out, start)
            self._state = int(state)
            self.cached_gaussian = float(cached) if has_cached else None
        return out

    def uniform_array(self, lo, hi, shape) -> np.ndarray:
        """Block of uniforms, identical to repeated ``next_uniform`` calls.

        ``lo`` and ``hi`` may be scalars or arrays broadcastable to ``shape``;
        values are filled in C order.
        """
        shape = (shape,) if isinstance(shape, (int, np.integer)) else tuple(shape)
        n = int(np.prod(shape, dtype=np.int64))
        lo = np.broadcast_to(np.asarray(lo, dtype=float), shape)
        hi = np.broadcast_to(np.asarray(hi, dtype=float), shape)
        if np.any(lo > hi):
            raise ValueError("invalid range: lo > hi")
        out = np.empty(n)
        if n:
            lo = np.ascontiguousarray(lo).reshape(-1)
            hi = np.ascontiguousarray(hi).reshape(-1)
            self._state = int(_uniform_fill(np.uint64(self._state), lo, hi, out))
        return out.reshape(shape)


def create_rng(seed: int) -> RandomSource:
    return RandomSource(seed)


def next_uniform(rng: RandomSource, lo: float, hi: float) -> float:
    return rng.next_uniform(lo, hi)


def next_gaussian(rng: RandomSource) -> float:
    return rng.next_gaussian()


def next_permutation(rng: RandomSource, n: int) -> list[int]:
    return rng.next_permutation(n)
