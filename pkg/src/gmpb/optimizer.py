"""Baseline solvers for exercising the harness.

``run_random_search`` is the control. ``run_mpso`` is a multi-swarm PSO over
the whole space, and ``run_cc_mpso`` runs one multi-swarm PSO per variable
group, cooperating through a context vector. ``run_mpso`` is the cooperative
engine with a single group, so the two coincide when the grouping is trivial.

None of these get told about environment changes unless the session was
created with ``signal_changes``. Otherwise they re-evaluate a point of known
fitness every iteration and treat a different answer as a change.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .harness import RunResult, Session, e_bbc
from .rng import RandomSource

CHANGE_TOLERANCE = 1e-9


@dataclass
class SwarmParams:
    population: int = 10
    swarm_count: int = 5
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    exclusion_fraction: float = 0.5
    convergence_fraction: float = 0.05
    reinit_fraction: float = 0.5
    max_velocity_fraction: float = 0.25
    max_iterations: int | None = None

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be at least 2")
        if self.swarm_count < 1:
            raise ValueError("swarm_count must be at least 1")
        if min(self.inertia, self.cognitive, self.social) < 0:
            raise ValueError("PSO coefficients must be nonnegative")
        if not 0 <= self.reinit_fraction <= 1:
            raise ValueError("reinit_fraction must lie in [0, 1]")
        if self.max_iterations is not None and self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive (or None for the whole budget)")


# per-group defaults for the cooperative solver: many small groups share the budget
CC_DEFAULTS = SwarmParams(population=5, swarm_count=3)


class MultiSwarm:
    """Several PSO swarms over one block of variables.

    Scores are maximized. A swarm marked fresh holds positions that still need
    evaluating and does not move on its next step.
    """

    def __init__(self, dim: int, params: SwarmParams, lo: float, hi: float, rng: RandomSource):
        self.dim = dim
        self.params = params
        self.lo, self.hi = lo, hi
        s, p = params.swarm_count, params.population
        self.pos = rng.uniform_array(lo, hi, (s, p, dim))
        self.vel = np.zeros_like(self.pos)
        self.pbest = self.pos.copy()
        self.pbest_score = np.full((s, p), -np.inf)
        self.fresh = np.ones(s, dtype=bool)
        span = hi - lo
        self.vmax = params.max_velocity_fraction * span
        self.exclusion_radius = params.exclusion_fraction * span / s ** (1.0 / dim)
        self.convergence_radius = params.convergence_fraction * span

    @property
    def size(self) -> int:
        return self.params.swarm_count * self.params.population

    def swarm_best(self) -> tuple[np.ndarray, np.ndarray]:
        idx = np.argmax(self.pbest_score, axis=1)
        rows = np.arange(len(idx))
        return self.pbest[rows, idx], self.pbest_score[rows, idx]

    def best(self) -> tuple[np.ndarray, float]:
        s, k = np.unravel_index(np.argmax(self.pbest_score), self.pbest_score.shape)
        return self.pbest[s, k].copy(), float(self.pbest_score[s, k])

    def propose(self, rng: RandomSource) -> np.ndarray:
        prm = self.params
        r = rng.uniform_array(0.0, 1.0, (2,) + self.pos.shape)
        gbest, _ = self.swarm_best()
        vel = (
            prm.inertia * self.vel
            + prm.cognitive * r[0] * (self.pbest - self.pos)
            + prm.social * r[1] * (gbest[:, None, :] - self.pos)
        )
        np.clip(vel, -self.vmax, self.vmax, out=vel)
        moving = ~self.fresh
        self.vel[moving] = vel[moving]
        self.pos[moving] = self.pos[moving] + vel[moving]
        out = (self.pos < self.lo) | (self.pos > self.hi)
        self.vel[out] = 0.0
        np.clip(self.pos, self.lo, self.hi, out=self.pos)
        return self.pos.reshape(-1, self.dim)

    def absorb(self, scores: np.ndarray) -> None:
        """Personal-best update from scores of the rows returned by ``propose``."""
        flat_score = self.pbest_score.reshape(-1)
        flat_best = self.pbest.reshape(-1, self.dim)
        flat_pos = self.pos.reshape(-1, self.dim)
        n = len(scores)
        better = scores > flat_score[:n]
        idx = np.flatnonzero(better)
        flat_score[idx] = scores[idx]
        flat_best[idx] = flat_pos[idx]
        self.fresh[:] = False

    def refresh(self, scores: np.ndarray) -> None:
        """Overwrite personal-best scores after a change (rows in ``pbest`` order)."""
        self.pbest_score.reshape(-1)[: len(scores)] = scores

    def reinitialize(self, swarms, rng: RandomSource) -> None:
        for s in swarms:
            self.pos[s] = rng.uniform_array(self.lo, self.hi, self.pos[s].shape)
            self.vel[s] = 0.0
            self.pbest[s] = self.pos[s]
            self.pbest_score[s] = -np.inf
            self.fresh[s] = True

    def diversify(self, rng: RandomSource) -> None:
        """Exclusion between swarms, then restart the worst one if all converged."""
        if self.params.swarm_count < 2:
            return
        gbest, gscore = self.swarm_best()
        doomed = set()
        for i in range(len(gbest)):
            for j in range(i + 1, len(gbest)):
                if self.fresh[i] or self.fresh[j] or i in doomed or j in doomed:
                    continue
                if np.linalg.norm(gbest[i] - gbest[j]) < self.exclusion_radius:
                    doomed.add(i if gscore[i] < gscore[j] else j)
        if doomed:
            self.reinitialize(sorted(doomed), rng)
            return
        spread = np.max(np.abs(self.pbest - gbest[:, None, :]), axis=(1, 2))
        if np.all(spread < self.convergence_radius) and not np.any(self.fresh):
            self.reinitialize([int(np.argmin(gscore))], rng)


def _check_partition(groups: Sequence[Sequence[int]], d: int) -> list[np.ndarray]:
    flat = sorted(int(i) for g in groups for i in g)
    if flat != list(range(d)) or any(len(g) == 0 for g in groups):
        raise ValueError(f"grouping must partition {{0..{d - 1}}} into nonempty groups")
    return [np.asarray(sorted(int(i) for i in g), dtype=np.intp) for g in groups]


def _result(session: Session, rng: RandomSource, name: str, started: float) -> RunResult:
    cfg = session.config
    return RunResult(
        e_bbc=e_bbc(session) if session.records else math.nan,
        records=list(session.records),
        seed=cfg.seed if cfg else rng.seed,
        scenario=cfg.label if cfg else "custom",
        mode=cfg.mode if cfg else "default",
        optimizer=name,
        wall_time=time.perf_counter() - started,
        signal_changes=session.signal_changes,
        evaluations=session.evaluations_used,
    )


def run_random_search(session: Session, rng: RandomSource, batch_size: int = 100) -> RunResult:
    started = time.perf_counter()
    lo, hi = session.bounds
    while not session.finished:
        n = min(batch_size, session.remaining)
        session.evaluate_batch(rng.uniform_array(lo, hi, (n, session.dimension)))
    return _result(session, rng, "random", started)


class _Cooperative:
    """Context-vector coordination of one MultiSwarm per group.

    Candidate scores are kept relative to a per-group baseline so that
    personal bests stay comparable while other groups improve the context:
    score = F(context with group replaced) - F(context) + baseline[group].
    """

    def __init__(self, session: Session, groups, params: SwarmParams, rng: RandomSource):
        self.session = session
        self.groups = groups
        self.params = params
        self.rng = rng
        lo, hi = session.bounds
        self.swarms = [MultiSwarm(len(g), params, lo, hi, rng) for g in groups]
        self.context = rng.uniform_array(lo, hi, session.dimension)
        self.baseline = np.zeros(len(groups))
        self.context_fitness = math.nan
        self.context_known = False
        self.reference: tuple[np.ndarray, float] | None = None
        self.environment_seen = session.environment

    def _splice(self, group: int, rows: np.ndarray) -> np.ndarray:
        full = np.repeat(self.context[None, :], len(rows), axis=0)
        full[:, self.groups[group]] = rows
        return full

    def _pull_context(self) -> None:
        for g, sw in enumerate(self.swarms):
            x, score = sw.best()
            if score > self.baseline[g]:
                self.context[self.groups[g]] = x
                self.baseline[g] = score
                self.context_known = False

    def run(self) -> None:
        session = self.session
        iterations = 0
        cap = self.params.max_iterations
        while not session.finished and (cap is None or iterations < cap):
            iterations += 1
            self.step()

    def step(self) -> None:
        session = self.session
        watch = not session.signal_changes and self.reference is not None
        head = []
        if watch:
            head.append(self.reference[0])
        if not self.context_known:
            head.append(self.context.copy())
        blocks = [self._splice(g, sw.propose(self.rng)) for g, sw in enumerate(self.swarms)]
        fit = session.evaluate_batch(np.vstack(head + blocks))
        k = 0
        changed = False
        if watch and len(fit) > k:
            ref_f = self.reference[1]
            changed = abs(fit[k] - ref_f) > CHANGE_TOLERANCE * max(1.0, abs(ref_f))
            k += 1
        if session.signal_changes and session.environment != self.environment_seen:
            changed = True
        if not self.context_known and len(fit) > k:
            self.context_fitness = float(fit[k])
            self.context_known = True
            self.reference = (self.context.copy(), self.context_fitness)
            k += 1
        if changed:
            self.environment_seen = session.environment
            if not session.finished:
                self.respond_to_change()
            return
        scores = fit[k:] - self.context_fitness
        for g, sw in enumerate(self.swarms):
            sw.absorb(scores[: sw.size] + self.baseline[g])
            scores = scores[sw.size :]
        self._pull_context()
        for sw in self.swarms:
            sw.diversify(self.rng)

    def respond_to_change(self) -> None:
        """Re-score memory in the new environment and restart part of each group."""
        session = self.session
        rows = [self.context.copy()]
        for g, sw in enumerate(self.swarms):
            rows.append(self._splice(g, sw.pbest.reshape(-1, sw.dim)))
        fit = session.evaluate_batch(np.vstack(rows))
        if len(fit) == 0:
            return
        self.context_fitness = float(fit[0])
        self.context_known = True
        self.reference = (self.context.copy(), self.context_fitness)
        self.environment_seen = session.environment
        self.baseline[:] = 0.0
        scores = fit[1:] - self.context_fitness
        n_restart = int(round(self.params.reinit_fraction * self.params.swarm_count))
        for sw in self.swarms:
            part = scores[: sw.size]
            scores = scores[sw.size :]
            sw.pbest_score[:] = -np.inf
            sw.refresh(part)
            if n_restart:
                _, gscore = sw.swarm_best()
                sw.reinitialize(np.argsort(gscore, kind="stable")[:n_restart].tolist(), self.rng)
        self._pull_context()


def run_cc_mpso(
    session: Session,
    grouping: Sequence[Sequence[int]],
    params: SwarmParams | None = None,
    rng: RandomSource | None = None,
    name: str = "ccmpso",
) -> RunResult:
    groups = _check_partition(grouping, session.dimension)
    params = params or CC_DEFAULTS
    rng = rng or session.rng
    started = time.perf_counter()
    _Cooperative(session, groups, params, rng).run()
    return _result(session, rng, name, started)


def run_mpso(session: Session, params: SwarmParams | None = None, rng: RandomSource | None = None) -> RunResult:
    return run_cc_mpso(session, [list(range(session.dimension))], params or SwarmParams(), rng, name="mpso")


def grouping_for(session_or_problem, kind: str) -> list[list[int]]:
    """Variable grouping by name: oracle (true sub-functions), single, separable."""
    prob = getattr(session_or_problem, "problem", session_or_problem)
    if kind == "oracle":
        return prob.grouping
    if kind == "single":
        return [list(range(prob.dimension))]
    if kind == "separable":
        return [[i] for i in range(prob.dimension)]
    raise ValueError(f"unknown grouping {kind!r}; expected oracle, single or separable")
