"""Evaluation-budget sessions and the best-before-change error."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import advance_environment
from .landscape import PackedProblem, ProblemInstance, problem_optimum_value
from .rng import RandomSource
from .scenario import ScenarioConfig

CSV_COLUMNS = ("environment", "best_fitness", "optimum_fitness", "error", "evaluations")


class BudgetExhausted(RuntimeError):
    pass


class NoSealedEnvironments(ValueError):
    pass


def fmt(value: float) -> str:
    """17 significant digits: parses back to the same double."""
    return format(float(value), ".17g")


@dataclass
class EnvironmentRecord:
    environment: int
    best_fitness: float
    optimum_fitness: float
    evaluations: int
    out_of_bounds: int = 0

    @property
    def error(self) -> float:
        return self.optimum_fitness - self.best_fitness


@dataclass
class RunResult:
    e_bbc: float
    records: list[EnvironmentRecord]
    seed: int
    scenario: str
    mode: str
    optimizer: str
    wall_time: float = 0.0
    signal_changes: bool = False
    evaluations: int = 0
    metadata: dict = field(default_factory=dict)


class Session:
    """Counts evaluations and changes the environment every ``change_period`` calls.

    The evaluation that reaches a multiple of the change period still sees the
    old environment; its record is sealed and the landscape changes right after.
    """

    def __init__(
        self,
        problem: ProblemInstance,
        change_period: int,
        environment_count: int,
        rng: RandomSource,
        config: ScenarioConfig | None = None,
        signal_changes: bool = False,
    ):
        if change_period <= 0 or environment_count <= 0:
            raise ValueError("change period and environment count must be positive")
        self.problem = problem
        self.rng = rng
        self.change_period = int(change_period)
        self.environment_count = int(environment_count)
        self.config = config
        self.signal_changes = signal_changes
        self.evaluations_used = 0
        self.records: list[EnvironmentRecord] = []
        self.finished = False
        self._start_environment()

    def _start_environment(self) -> None:
        self._packed = PackedProblem(self.problem)
        self.optimum_value = problem_optimum_value(self.problem)
        self.best_fitness = -math.inf
        self.best_position: np.ndarray | None = None
        self._in_environment = 0
        self._out_of_bounds = 0

    @property
    def dimension(self) -> int:
        return self.problem.dimension

    @property
    def bounds(self) -> tuple[float, float]:
        return self.problem.bounds.lo, self.problem.bounds.hi

    @property
    def environment(self) -> int:
        """Zero-based index of the current environment."""
        return len(self.records)

    @property
    def budget(self) -> int:
        return self.change_period * self.environment_count

    @property
    def remaining(self) -> int:
        return self.budget - self.evaluations_used

    def evaluate(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise ValueError("evaluate takes a single vector; use evaluate_batch")
        return float(self.evaluate_batch(x[None, :])[0])

    def evaluate_batch(self, X) -> np.ndarray:
        """Evaluate rows in order; stops early (shorter result) when the budget runs out.

        A batch may straddle an environment change: rows after the change are
        evaluated on the new landscape.
        """
        if self.finished:
            raise BudgetExhausted(f"all {self.budget} evaluations have been used")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dimension:
            raise ValueError(f"expected {self.dimension} coordinates, got {X.shape[1]}")
        out = []
        pos = 0
        while pos < len(X) and not self.finished:
            chunk = X[pos : pos + self.change_period - self._in_environment]
            fit = self._packed.evaluate(chunk)
            self._account(chunk, fit)
            out.append(fit)
            pos += len(chunk)
        return np.concatenate(out) if out else np.empty(0)

    def _account(self, chunk: np.ndarray, fit: np.ndarray) -> None:
        lo, hi = self.bounds
        self._out_of_bounds += int(np.count_nonzero(np.any((chunk < lo) | (chunk > hi), axis=1)))
        i = int(np.argmax(np.where(np.isnan(fit), -np.inf, fit)))
        if fit[i] > self.best_fitness:
            self.best_fitness = float(fit[i])
            self.best_position = chunk[i].copy()
        self.evaluations_used += len(chunk)
        self._in_environment += len(chunk)
        if self._in_environment == self.change_period:
            self._seal()

    def _seal(self) -> None:
        self.records.append(
            EnvironmentRecord(
                environment=len(self.records) + 1,
                best_fitness=self.best_fitness,
                optimum_fitness=self.optimum_value,
                evaluations=self.evaluations_used,
                out_of_bounds=self._out_of_bounds,
            )
        )
        if len(self.records) == self.environment_count:
            self.finished = True
            return
        self.problem = advance_environment(self.problem, self.rng)
        self._start_environment()

    def e_bbc(self) -> float:
        return e_bbc(self)


def create_session(
    prob: ProblemInstance, cfg: ScenarioConfig, rng: RandomSource, signal_changes: bool = False
) -> Session:
    return Session(prob, cfg.change_period, cfg.environments, rng, config=cfg, signal_changes=signal_changes)


def e_bbc(session_or_records) -> float:
    """Mean over sealed environments of (optimum - best found)."""
    records = getattr(session_or_records, "records", session_or_records)
    if not records:
        raise NoSealedEnvironments("E_BBC is undefined before the first environment is sealed")
    return math.fsum(r.error for r in records) / len(records)


def result_metadata(session: Session, optimizer: str | None = None) -> dict:
    cfg = session.config
    meta = {"tool": f"gmpb {__version__}"}
    if cfg is not None:
        meta.update(seed=cfg.seed, scenario=cfg.label, mode=cfg.mode)
    meta.update(change_period=session.change_period, environments=session.environment_count)
    if optimizer:
        meta["optimizer"] = optimizer
    meta["signal_changes"] = str(session.signal_changes).lower()
    if cfg is not None:
        for note in cfg.notes:
            meta.setdefault("note", note)
    return meta


def render_results(session: Session, optimizer: str | None = None) -> str:
    buf = io.StringIO()
    for key, value in result_metadata(session, optimizer).items():
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in session.records:
        writer.writerow([r.environment, fmt(r.best_fitness), fmt(r.optimum_fitness), fmt(r.error), r.evaluations])
    flagged = sum(r.out_of_bounds for r in session.records)
    cfg = session.config
    if cfg is not None:
        # repeated below the table so a truncated tail still identifies the run
        buf.write(f"# seed={cfg.seed}\n# scenario={cfg.label}\n# mode={cfg.mode}\n")
    if session.records:
        buf.write(f"# e_bbc={fmt(e_bbc(session))}\n")
    else:
        buf.write("# error=no sealed environments\n")
    buf.write(f"# out_of_bounds_queries={flagged}\n")
    return buf.getvalue()


def export_results(session: Session, path, optimizer: str | None = None) -> None:
    Path(path).write_text(render_results(session, optimizer), encoding="utf-8")


def read_results(path) -> tuple[dict, list[EnvironmentRecord]]:
    """Parse a results file back into (metadata, records)."""
    meta: dict[str, str] = {}
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
            elif line:
                rows.append(line)
    if not rows or tuple(next(csv.reader([rows[0]]))) != CSV_COLUMNS:
        raise ValueError(f"{path}: missing or malformed header row")
    records = []
    for row in csv.reader(rows[1:]):
        env, best, opt, _err, evals = row
        records.append(EnvironmentRecord(int(env), float(best), float(opt), int(evals)))
    return meta, records
