"""Orthonormal rotation matrices: Givens plane rotations and Gram-Schmidt."""

from __future__ import annotations

import functools
import math
from typing import NamedTuple

import numba
import numpy as np

from .rng import RandomSource

DRIFT_TOLERANCE = 1e-10
PIVOT_TOLERANCE = 1e-12
MAX_REDRAWS = 8


class PlanePair(NamedTuple):
    p: int
    q: int


class SingularMatrixError(ArithmeticError):
    """Gram-Schmidt hit a (near) dependent column; the caller should resample."""


def plane_pairs(d: int) -> list[PlanePair]:
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    return [PlanePair(p, q) for p in range(d) for q in range(p + 1, d)]


@functools.lru_cache(maxsize=64)
def _pair_table(d: int) -> np.ndarray:
    """plane_pairs(d) as a read-only (P, 2) int array."""
    p, q = np.triu_indices(d, k=1)
    table = np.stack([p, q], axis=1).astype(np.int64)
    table.flags.writeable = False
    return table


def givens_matrix(d: int, pair: PlanePair, theta: float) -> np.ndarray:
    p, q = pair
    if not 0 <= p < q < d:
        raise ValueError(f"invalid plane {pair} for dimension {d}")
    g = np.eye(d)
    c, s = np.cos(theta), np.sin(theta)
    g[p, p] = g[q, q] = c
    g[p, q] = -s
    g[q, p] = s
    return g


def orthonormality_error(m: np.ndarray) -> float:
    """max |M^T M - I|."""
    return float(np.max(np.abs(m.T @ m - np.eye(m.shape[0]))))


@numba.njit(cache=True)
def _cgs2(m, q, tol):
    """Returns -1 on success, else the index of the first dependent column."""
    d = m.shape[0]
    v = np.empty(d)
    for j in range(d):
        for i in range(d):
            v[i] = m[i, j]
        norm0 = math.sqrt(np.dot(v, v))
        if norm0 < tol:
            return j
        for _ in range(2):
            coef = np.zeros(j)
            for k in range(j):
                acc = 0.0
                for i in range(d):
                    acc += q[i, k] * v[i]
                coef[k] = acc
            for k in range(j):
                c = coef[k]
                for i in range(d):
                    v[i] -= c * q[i, k]
        norm = math.sqrt(np.dot(v, v))
        if norm < tol * max(1.0, norm0):
            return j
        for i in range(d):
            q[i, j] = v[i] / norm
    return -1


def gram_schmidt(m) -> np.ndarray:
    """Orthonormalize the columns of ``m`` left to right.

    Classical Gram-Schmidt with one reorthogonalization pass per column, which
    keeps the result orthonormal to machine precision for well-conditioned
    input. Raises ``SingularMatrixError`` when a column has (numerically) no
    component outside the span of the previous ones.
    """
    m = np.array(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("gram_schmidt expects a square matrix")
    q = np.zeros_like(m)
    bad = _cgs2(np.ascontiguousarray(m), q, PIVOT_TOLERANCE)
    if bad >= 0:
        raise SingularMatrixError(f"column {bad} is (numerically) dependent on earlier columns")
    return q


def random_orthogonal(rng: RandomSource, d: int) -> np.ndarray:
    """Gram-Schmidt of a d x d standard normal matrix drawn in row-major order."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    for _ in range(MAX_REDRAWS):
        m = rng.gaussian_vector(d * d).reshape(d, d)
        try:
            return gram_schmidt(m)
        except SingularMatrixError:
            continue
    raise SingularMatrixError(f"no full-rank draw after {MAX_REDRAWS} attempts")


@numba.njit(cache=True)
def _givens_rows(r, c, s, ps, qs):
    for i in range(len(ps) - 1, -1, -1):
        p, q = ps[i], qs[i]
        for col in range(r.shape[1]):
            rp = r[p, col]
            rq = r[q, col]
            r[p, col] = c * rp - s * rq
            r[q, col] = s * rp + c * rq


def apply_givens_product(r: np.ndarray, theta: float, order) -> np.ndarray:
    """Left-multiply ``r`` by G(order[0]) G(order[1]) ... G(order[-1]).

    The rightmost factor acts first. Each factor only touches rows p and q,
    so it is applied as a two-row update.
    """
    r = np.array(r, dtype=float)
    pairs = np.asarray(order, dtype=np.int64).reshape(-1, 2)
    if len(pairs) == 0:
        return r
    _givens_rows(r, math.cos(theta), math.sin(theta), pairs[:, 0].copy(), pairs[:, 1].copy())
    return r


def rotate_update(r_prev: np.ndarray, theta: float, rng: RandomSource) -> np.ndarray:
    """One environment step of a component's rotation.

    Consumes exactly one permutation draw over all planes, even when
    ``theta`` is zero, so RNG accounting does not depend on the angle.
    """
    pairs = _pair_table(r_prev.shape[0])
    perm = rng.next_permutation(len(pairs))
    r = apply_givens_product(r_prev, theta, pairs[perm])
    if orthonormality_error(r) > DRIFT_TOLERANCE:
        r = gram_schmidt(r)
    return r
