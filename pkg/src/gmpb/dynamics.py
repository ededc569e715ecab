"""Environment changes: random-walk every component parameter, reflect into range."""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .landscape import Component, ParameterBounds, ProblemInstance, Range, SeverityBundle, SubFunction
from .rng import RandomSource
from .rotation import rotate_update

__all__ = ["SeverityBundle", "reflect", "shift_center", "advance_component", "advance_environment"]

_MAX_FOLDS = 64


def reflect(value: float, delta: float, lo: float, hi: float) -> float:
    """Return ``value + delta`` mirrored back into ``[lo, hi]``.

    A single mirror matches the usual three-branch rule; it repeats if one
    mirror overshoots the opposite bound.
    """
    if not lo < hi:
        raise ValueError(f"empty range [{lo}, {hi}]")
    v = value + delta
    for _ in range(_MAX_FOLDS):
        if v < lo:
            v = 2.0 * lo - v
        elif v > hi:
            v = 2.0 * hi - v
        else:
            return v
    # pathological step sizes: fold by the period 2*(hi - lo)
    span = hi - lo
    v = math.fmod(v - lo, 2.0 * span)
    if v < 0:
        v += 2.0 * span
    return lo + (v if v <= span else 2.0 * span - v)


def _reflect_all(values, deltas, bounds: Range) -> np.ndarray:
    return np.array([reflect(float(v), float(dv), bounds.lo, bounds.hi) for v, dv in zip(values, deltas)])


def _random_direction(rng: RandomSource, d: int) -> np.ndarray:
    while True:
        r = rng.gaussian_vector(d)
        norm = np.linalg.norm(r)
        if norm > 0:
            return r / norm


def shift_displacement(shift_severity: float, d: int, rng: RandomSource) -> np.ndarray:
    """Pre-reflection center displacement: ``shift_severity`` times a random unit vector."""
    if shift_severity < 0:
        raise ValueError("shift severity must be nonnegative")
    if shift_severity == 0:
        return np.zeros(d)
    return shift_severity * _random_direction(rng, d)


def shift_center(comp: Component, shift_severity: float, bounds: Range, rng: RandomSource) -> np.ndarray:
    step = shift_displacement(shift_severity, comp.dimension, rng)
    return _reflect_all(comp.center, step, bounds)


def _walk(value: float, severity: float, bounds: Range, rng: RandomSource) -> float:
    if severity == 0:
        return value
    return reflect(value, severity * rng.next_gaussian(), bounds.lo, bounds.hi)


def _walk_vector(values: np.ndarray, severity: float, bounds: Range, rng: RandomSource) -> np.ndarray:
    if severity == 0:
        return values.copy()
    return _reflect_all(values, severity * rng.gaussian_vector(len(values)), bounds)


def advance_component(
    comp: Component,
    sev: SeverityBundle,
    bounds: ParameterBounds,
    search: Range,
    rng: RandomSource,
    rotate: bool = True,
) -> Component:
    """Next-environment copy of ``comp``.

    Draw order: center, height, widths by dimension, angle, the four etas,
    tau, then the rotation's plane order. A zero severity skips its draws.
    """
    center = shift_center(comp, sev.shift, search, rng)
    height = _walk(comp.height, sev.height, bounds.height, rng)
    widths = _walk_vector(comp.widths, sev.width, bounds.width, rng)
    angle = _walk(comp.angle, sev.angle, bounds.angle, rng)
    eta = _walk_vector(comp.eta, sev.eta, bounds.eta, rng)
    tau = _walk(comp.tau, sev.tau, bounds.tau, rng)
    rotation = comp.rotation.copy()
    if rotate and comp.dimension > 1:
        rotation = rotate_update(comp.rotation, angle, rng)
    return Component(center=center, height=height, widths=widths, angle=angle, rotation=rotation, tau=tau, eta=eta)


def advance_environment(prob: ProblemInstance, rng: RandomSource) -> ProblemInstance:
    """Change every component once, sub-functions and components in index order."""
    subs = []
    for sf in prob.sub_functions:
        comps = [
            advance_component(c, sf.severities, prob.parameter_bounds, prob.bounds, rng, prob.rotation_enabled)
            for c in sf.components
        ]
        subs.append(dataclasses.replace(sf, components=comps))
    return dataclasses.replace(prob, sub_functions=subs, environment_index=prob.environment_index + 1)
