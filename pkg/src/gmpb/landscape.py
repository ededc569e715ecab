"""Landscape evaluation for a frozen environment.

A problem is a weighted sum of sub-functions, each defined on its own subset of
the decision variables. A sub-function is the upper envelope (max) of several
irregular, rotated, ill-conditioned cones called components. Everything here
is maximization.

Two evaluation paths exist. ``evaluate_problem`` and friends follow the
definition literally and are used as the reference. ``PackedProblem`` stacks
the same parameters into flat arrays and evaluates whole populations at once,
skipping components that provably cannot attain the max; the harness uses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np


@dataclass(frozen=True)
class Range:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty range [{self.lo}, {self.hi}]")

    def contains(self, value) -> bool:
        value = np.asarray(value)
        return bool(np.all((value >= self.lo) & (value <= self.hi)))

    def as_list(self) -> list[float]:
        return [self.lo, self.hi]


@dataclass(frozen=True)
class ParameterBounds:
    height: Range = Range(30.0, 70.0)
    width: Range = Range(1.0, 12.0)
    angle: Range = Range(-np.pi, np.pi)
    tau: Range = Range(-0.5, 0.5)
    eta: Range = Range(-20.0, 20.0)


@dataclass(frozen=True)
class SeverityBundle:
    """Per-sub-function change severities, shared by all its components."""

    shift: float
    height: float
    width: float
    angle: float
    tau: float
    eta: float

    def __post_init__(self):
        for name in ("shift", "height", "width", "angle", "tau", "eta"):
            if getattr(self, name) < 0:
                raise ValueError(f"severity {name} must be nonnegative")


@dataclass
class Component:
    center: np.ndarray
    height: float
    widths: np.ndarray
    angle: float
    rotation: np.ndarray
    tau: float
    eta: np.ndarray

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.widths = np.asarray(self.widths, dtype=float)
        self.rotation = np.asarray(self.rotation, dtype=float)
        self.eta = np.asarray(self.eta, dtype=float)
        d = self.center.shape[0]
        if self.widths.shape != (d,) or self.rotation.shape != (d, d):
            raise ValueError("component arrays disagree on dimension")
        if self.eta.shape != (4,):
            raise ValueError("eta must hold exactly 4 values")

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    @property
    def condition_number(self) -> float:
        """Largest over smallest width."""
        return float(self.widths.max() / self.widths.min())


@dataclass
class SubFunction:
    variable_indices: np.ndarray
    components: list[Component]
    weight: float
    severities: SeverityBundle

    def __post_init__(self):
        self.variable_indices = np.asarray(self.variable_indices, dtype=np.intp)
        if not self.components:
            raise ValueError("a sub-function needs at least one component")
        if len(set(self.variable_indices.tolist())) != len(self.variable_indices):
            raise ValueError("variable indices must be distinct")
        if any(c.dimension != self.dimension for c in self.components):
            raise ValueError("component dimension differs from sub-function dimension")
        if not self.weight > 0:
            raise ValueError("weight must be positive")

    @property
    def dimension(self) -> int:
        return len(self.variable_indices)

    @property
    def component_count(self) -> int:
        return len(self.components)


@dataclass
class ProblemInstance:
    dimension: int
    sub_functions: list[SubFunction]
    bounds: Range = Range(-50.0, 50.0)
    parameter_bounds: ParameterBounds = field(default_factory=ParameterBounds)
    rotation_enabled: bool = True
    environment_index: int = 0

    def __post_init__(self):
        used = np.concatenate([sf.variable_indices for sf in self.sub_functions])
        if sorted(used.tolist()) != list(range(self.dimension)):
            raise ValueError("variable indices must partition {0..d-1}")

    @property
    def grouping(self) -> list[list[int]]:
        return [sf.variable_indices.tolist() for sf in self.sub_functions]


def _transform(y, tau, eta_pos_a, eta_pos_b, eta_neg_a, eta_neg_b):
    zero = y == 0
    a = np.log(np.where(zero, 1.0, np.abs(y)))
    s = np.where(
        y > 0,
        np.sin(eta_pos_a * a) + np.sin(eta_pos_b * a),
        np.sin(eta_neg_a * a) + np.sin(eta_neg_b * a),
    )
    return np.where(zero, 0.0, np.sign(y) * np.exp(a + tau * s))


def irregularity_transform(y, tau: float, eta) -> np.ndarray:
    """Elementwise log-sine warping of a displacement vector.

    Positive entries use ``eta[0], eta[1]``, negative entries ``eta[2],
    eta[3]`` on ``|y|`` with the sign restored, and zero stays zero.
    """
    y = np.asarray(y, dtype=float)
    eta = np.asarray(eta, dtype=float)
    return _transform(y, tau, eta[0], eta[1], eta[2], eta[3])


def evaluate_component(x_sub, comp: Component) -> float:
    x_sub = np.asarray(x_sub, dtype=float)
    if x_sub.shape != (comp.dimension,):
        raise ValueError(f"expected {comp.dimension} coordinates, got shape {x_sub.shape}")
    t = irregularity_transform(comp.rotation @ (x_sub - comp.center), comp.tau, comp.eta)
    return float(comp.height - np.sqrt(np.sum(comp.widths * t * t)))


def evaluate_subfunction(x_sub, sf: SubFunction) -> float:
    x_sub = np.asarray(x_sub, dtype=float)
    if x_sub.shape != (sf.dimension,):
        raise ValueError(f"expected {sf.dimension} coordinates, got shape {x_sub.shape}")
    return max(evaluate_component(x_sub, c) for c in sf.components)


def evaluate_problem(x, prob: ProblemInstance) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (prob.dimension,):
        raise ValueError(f"expected {prob.dimension} coordinates, got shape {x.shape}")
    total = 0.0
    for sf in prob.sub_functions:
        total += sf.weight * sf.dimension * evaluate_subfunction(x[sf.variable_indices], sf)
    return total / prob.dimension


def subfunction_optimum_value(sf: SubFunction) -> float:
    return max(c.height for c in sf.components)


def problem_optimum_value(prob: ProblemInstance) -> float:
    total = 0.0
    for sf in prob.sub_functions:
        total += sf.weight * sf.dimension * subfunction_optimum_value(sf)
    return total / prob.dimension


def optimum_position(prob: ProblemInstance) -> np.ndarray:
    """Full vector made of each sub-function's tallest center.

    Its fitness equals ``problem_optimum_value`` since T(0) = 0.
    """
    x = np.empty(prob.dimension)
    for sf in prob.sub_functions:
        best = max(sf.components, key=lambda c: c.height)
        x[sf.variable_indices] = best.center
    return x


def promising_region_count(prob: ProblemInstance) -> int:
    """Upper bound on regions that may host the global optimum: product of m_i."""
    count = 1
    for sf in prob.sub_functions:
        count *= sf.component_count
    return count


def region_count_report(prob: ProblemInstance, cap: int = (1 << 64) - 1) -> tuple[int, bool]:
    """``promising_region_count`` saturated at ``cap``; the flag marks saturation."""
    count = promising_region_count(prob)
    return (cap, True) if count > cap else (count, False)


PRUNE_MARGIN = 1e-9


@numba.njit(cache=True)
def _component_value(disp, k, n, widths, heights, tau, eta):
    r2 = 0.0
    for j in range(disp.shape[1]):
        y = disp[k, j, n]
        if y > 0:
            a = math.log(y)
            t = math.exp(a + tau[k] * (math.sin(eta[k, 0] * a) + math.sin(eta[k, 1] * a)))
        elif y < 0:
            a = math.log(-y)
            t = -math.exp(a + tau[k] * (math.sin(eta[k, 2] * a) + math.sin(eta[k, 3] * a)))
        else:
            t = 0.0
        r2 += widths[k, j] * t * t
    return heights[k] - math.sqrt(r2)


@numba.njit(cache=True)
def _envelope(disp, starts, widths, heights, tau, eta, shrink, stretch, coef, out):
    """Accumulate coef[g] * max_k value_k into ``out`` for every point.

    ``disp`` holds rotated displacements (component, coordinate, point).
    Since |T_j| = |y_j| exp(tau * s_j) with |s_j| <= 2, each value lies in
    [h - stretch * r, h - shrink * r] where r is the untransformed weighted
    norm. The component with the largest upper bound is evaluated first and
    only components whose upper bound can still win are evaluated after it.
    """
    n_comp, d, n_pts = disp.shape
    upper = np.empty(n_comp)
    for n in range(n_pts):
        for g in range(len(starts) - 1):
            lo, hi = starts[g], starts[g + 1]
            floor = -np.inf
            lead = lo
            for k in range(lo, hi):
                r2 = 0.0
                for j in range(d):
                    y = disp[k, j, n]
                    r2 += widths[k, j] * y * y
                r = math.sqrt(r2)
                upper[k] = heights[k] - shrink[k] * r
                floor = max(floor, heights[k] - stretch[k] * r)
                if upper[k] > upper[lead]:
                    lead = k
            best = _component_value(disp, lead, n, widths, heights, tau, eta)
            cut = max(best, floor)
            cut -= PRUNE_MARGIN * (1.0 + abs(cut))
            for k in range(lo, hi):
                if k != lead and upper[k] >= cut:
                    v = _component_value(disp, k, n, widths, heights, tau, eta)
                    if v > best:
                        best = v
                        cut = best - PRUNE_MARGIN * (1.0 + abs(best))
            out[n] += coef[g] * best


@numba.njit(cache=True)
def _rotate(rot, disp):
    """out[k, :, n] = rot[k] @ disp[k, :, n] with a fixed summation order.

    BLAS picks different kernels for different batch sizes, which changes the
    last bit of the result; this loop gives each point the same arithmetic
    whatever batch it arrives in.
    """
    n_comp, d, n_pts = disp.shape
    out = np.zeros_like(disp)
    for k in range(n_comp):
        for i in range(d):
            for j in range(d):
                r = rot[k, i, j]
                for n in range(n_pts):
                    out[k, i, n] += r * disp[k, j, n]
    return out


class _Block:
    """All sub-functions sharing one dimension, components stored flat.

    Sub-function g owns components ``starts[g]:starts[g + 1]``.
    """

    def __init__(self, sfs: Sequence[SubFunction], dimension: int):
        comps = [c for sf in sfs for c in sf.components]
        counts = [sf.component_count for sf in sfs]
        self.indices = np.stack([sf.variable_indices for sf in sfs])
        self.owner = np.repeat(np.arange(len(sfs)), counts)
        self.starts = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self.coef = np.array([sf.weight * sf.dimension for sf in sfs])
        self.centers = np.array([c.center for c in comps])[..., None]
        self.widths = np.array([c.widths for c in comps])
        self.heights = np.array([c.height for c in comps])
        self.tau = np.array([c.tau for c in comps])
        self.eta = np.array([c.eta for c in comps])
        self.shrink = np.exp(-2.0 * np.abs(self.tau))
        self.stretch = np.exp(2.0 * np.abs(self.tau))
        rot = np.array([c.rotation for c in comps])
        self.rotation = None if np.array_equal(rot, np.broadcast_to(np.eye(dimension), rot.shape)) else rot

    def evaluate(self, X: np.ndarray, out: np.ndarray) -> None:
        # layout (component, coordinate, point)
        xs = np.transpose(X[:, self.indices], (1, 2, 0))[self.owner]
        disp = xs - self.centers
        if self.rotation is not None:
            disp = _rotate(self.rotation, np.ascontiguousarray(disp))
        _envelope(np.ascontiguousarray(disp), self.starts, self.widths, self.heights, self.tau, self.eta, self.shrink, self.stretch, self.coef, out)


class PackedProblem:
    """Vectorized evaluator for one environment of a problem instance.

    Build a new one after every environment change.
    """

    def __init__(self, prob: ProblemInstance):
        self.dimension = prob.dimension
        by_dim: dict[int, list[SubFunction]] = {}
        for sf in prob.sub_functions:
            by_dim.setdefault(sf.dimension, []).append(sf)
        self.blocks = [_Block(sfs, d_i) for d_i, sfs in sorted(by_dim.items())]

    def evaluate(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.dimension:
            raise ValueError(f"expected {self.dimension} coordinates, got {X.shape[1]}")
        total = np.zeros(X.shape[0])
        for block in self.blocks:
            block.evaluate(X, total)
        total /= self.dimension
        return total[0] if single else total
