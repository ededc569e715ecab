"""The 15 large-scale scenarios, custom configurations, and instance sampling."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .landscape import Component, ParameterBounds, ProblemInstance, Range, SeverityBundle, SubFunction
from .rng import RandomSource, create_rng
from .rotation import random_orthogonal

MODES = ("default", "challenging")
ENVIRONMENTS = 30

# id: (d, nonseparable group sizes in listed order, separable count as listed)
SCENARIOS: dict[int, tuple[int, tuple[int, ...], int]] = {
    1: (50, (2, 3, 5, 6, 7, 8, 10), 10),
    2: (50, (2, 3, 5, 5), 35),
    3: (50, (2, 2, 3, 5, 5, 5, 5, 5, 8, 10), 0),
    4: (50, (), 50),
    5: (50, (50,), 0),
    6: (100, (2, 2, 3, 5, 5, 6, 6, 8, 8, 10, 10, 15), 20),
    7: (100, (2, 2, 3, 3, 5, 5, 10), 70),
    8: (100, (2, 2, 2, 2, 3, 3, 5, 5, 5, 5, 5, 5, 8, 8, 10, 10, 20), 0),
    9: (100, (), 100),
    10: (100, (100,), 0),
    11: (200, (2, 2, 3, 5, 5, 6, 6, 8, 8, 10, 10, 15, 20, 20, 30), 50),
    12: (200, (2, 3, 5, 10, 20, 30), 130),
    13: (200, (2, 2, 2, 3, 5, 5, 5, 5, 5, 8, 8, 10, 10, 10, 20, 20, 30, 50), 0),
    14: (200, (), 200),
    15: (200, (200,), 0),
}


class ConfigError(ValueError):
    pass


@dataclass
class SamplingRanges:
    """Initial-value ranges (also the bounds kept by the dynamics)."""

    search: tuple[float, float] = (-50.0, 50.0)
    height: tuple[float, float] = (30.0, 70.0)
    width: tuple[float, float] = (1.0, 12.0)
    angle: tuple[float, float] = (-math.pi, math.pi)
    tau: tuple[float, float] = (-0.5, 0.5)
    eta: tuple[float, float] = (-20.0, 20.0)
    components: tuple[int, int] = (5, 15)
    weight: tuple[float, float] = (0.5, 3.0)

    def parameter_bounds(self) -> ParameterBounds:
        return ParameterBounds(
            height=Range(*self.height),
            width=Range(*self.width),
            angle=Range(*self.angle),
            tau=Range(*self.tau),
            eta=Range(*self.eta),
        )


@dataclass
class SeverityRanges:
    """Ranges the per-sub-function severities are drawn from."""

    shift: tuple[float, float] = (1.0, 3.0)
    angle: tuple[float, float] = (math.pi / 12, math.pi / 6)
    height: tuple[float, float] = (5.0, 9.0)
    width: tuple[float, float] = (0.5, 1.5)
    tau: tuple[float, float] = (0.05, 0.15)
    eta: tuple[float, float] = (1.0, 3.0)


@dataclass
class ScenarioConfig:
    scenario_id: Union[int, str]
    mode: str
    seed: int
    dimension: int
    groups: list[int]
    separable_count: int
    change_period: int
    environments: int = ENVIRONMENTS
    ranges: SamplingRanges = field(default_factory=SamplingRanges)
    severities: SeverityRanges = field(default_factory=SeverityRanges)
    rotation_enabled: bool = True
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        validate_config(self)

    @property
    def label(self) -> str:
        return f"f{self.scenario_id}" if isinstance(self.scenario_id, int) else str(self.scenario_id)

    @property
    def budget(self) -> int:
        return self.change_period * self.environments

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict, source: str = "<config>") -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigError(f"{source}: top level must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"{source}: unknown field(s): {', '.join(unknown)}")
        required = ("scenario_id", "mode", "seed", "dimension", "groups", "separable_count", "change_period")
        missing = [k for k in required if k not in data]
        if missing:
            raise ConfigError(f"{source}: missing field(s): {', '.join(missing)}")
        kwargs = dict(data)
        kwargs["ranges"] = _nested(SamplingRanges, data.get("ranges", {}), f"{source}: ranges")
        kwargs["severities"] = _nested(SeverityRanges, data.get("severities", {}), f"{source}: severities")
        try:
            return cls(**kwargs)
        except ConfigError as exc:
            raise ConfigError(f"{source}: {exc}") from None


def _nested(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: must be an object")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{where}: unknown field(s): {', '.join(unknown)}")
    values = {}
    for name, pair in data.items():
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2 and all(_is_number(v) for v in pair)):
            raise ConfigError(f"{where}.{name}: expected [lo, hi] numbers, got {pair!r}")
        if pair[0] > pair[1]:
            raise ConfigError(f"{where}.{name}: lo > hi in {pair!r}")
        values[name] = tuple(pair)
    return cls(**values)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _is_int(v) -> bool:
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def validate_config(cfg: ScenarioConfig) -> None:
    sid = cfg.scenario_id
    if not ((_is_int(sid) and sid in SCENARIOS) or sid == "custom"):
        raise ConfigError(f"scenario_id: expected 1..15 or 'custom', got {sid!r}")
    if cfg.mode not in MODES:
        raise ConfigError(f"mode: expected one of {MODES}, got {cfg.mode!r}")
    if not _is_int(cfg.seed) or not 0 <= cfg.seed < 2**64:
        raise ConfigError(f"seed: expected a 64-bit unsigned integer, got {cfg.seed!r}")
    for name in ("dimension", "change_period", "environments"):
        value = getattr(cfg, name)
        if not _is_int(value) or value <= 0:
            raise ConfigError(f"{name}: expected a positive integer, got {value!r}")
    if not _is_int(cfg.separable_count) or cfg.separable_count < 0:
        raise ConfigError(f"separable_count: expected a nonnegative integer, got {cfg.separable_count!r}")
    if not isinstance(cfg.groups, (list, tuple)) or not all(_is_int(g) and g >= 1 for g in cfg.groups):
        raise ConfigError(f"groups: expected a list of positive integers, got {cfg.groups!r}")
    if sum(cfg.groups) + cfg.separable_count != cfg.dimension:
        raise ConfigError(
            f"groups: sizes {list(cfg.groups)} plus {cfg.separable_count} separable "
            f"variables do not add up to dimension {cfg.dimension}"
        )
    lo, hi = cfg.ranges.components
    if not (_is_int(lo) and _is_int(hi) and 1 <= lo <= hi):
        raise ConfigError(f"ranges.components: expected integers 1 <= lo <= hi, got {cfg.ranges.components!r}")
    if cfg.ranges.width[0] <= 0:
        raise ConfigError("ranges.width: widths must be positive")
    if cfg.ranges.weight[0] <= 0:
        raise ConfigError("ranges.weight: weights must be positive")
    if cfg.ranges.search[0] >= cfg.ranges.search[1]:
        raise ConfigError("ranges.search: empty search range")
    if any(v < 0 for pair in dataclasses.astuple(cfg.severities) for v in pair):
        raise ConfigError("severities: ranges must be nonnegative")
    if not isinstance(cfg.notes, list) or not all(isinstance(n, str) for n in cfg.notes):
        raise ConfigError("notes: expected a list of strings")
    if not isinstance(cfg.rotation_enabled, bool):
        raise ConfigError("rotation_enabled: expected true or false")


def scenario_config(scenario_id: int, mode: str = "default", seed: int = 0) -> ScenarioConfig:
    if scenario_id not in SCENARIOS:
        raise ConfigError(f"unknown scenario f{scenario_id}; expected f1..f15")
    if mode not in MODES:
        raise ConfigError(f"mode: expected one of {MODES}, got {mode!r}")
    d, groups, listed_separable = SCENARIOS[scenario_id]
    separable = d - sum(groups)
    notes = []
    if separable != listed_separable:
        notes.append(
            f"separable count corrected from {listed_separable} to {separable} "
            f"so that groups {list(groups)} plus separable variables sum to d={d}"
        )
    ranges = SamplingRanges()
    severities = SeverityRanges()
    period = 500 * d
    if mode == "challenging":
        ranges = dataclasses.replace(ranges, components=(15, 35))
        severities = dataclasses.replace(severities, shift=(3.0, 5.0))
        period = 200 * d
    return ScenarioConfig(
        scenario_id=scenario_id,
        mode=mode,
        seed=seed,
        dimension=d,
        groups=list(groups),
        separable_count=separable,
        change_period=period,
        ranges=ranges,
        severities=severities,
        notes=notes,
    )


def parse_scenario_id(text: str) -> int:
    """'f7', 'F7' or '7' -> 7."""
    s = text.strip().lower()
    s = s[1:] if s.startswith("f") else s
    if not s.isdigit() or int(s) not in SCENARIOS:
        raise ConfigError(f"unknown scenario {text!r}; expected f1..f15")
    return int(s)


def sample_subfunction(
    rng: RandomSource,
    variable_indices,
    ranges: SamplingRanges,
    severities: SeverityRanges,
    rotation_enabled: bool = True,
) -> SubFunction:
    """Draw one sub-function: m, severities, weight, then each component."""
    d_i = len(variable_indices)
    m = rng.next_int(*ranges.components)
    sev = severities
    shift = rng.next_uniform(*sev.shift)
    angle = rng.next_uniform(*sev.angle)
    height = rng.next_uniform(*sev.height)
    width = rng.next_uniform(*sev.width)
    tau = rng.next_uniform(*sev.tau)
    eta = rng.next_uniform(*sev.eta)
    bundle = SeverityBundle(shift=shift, height=height, width=width, angle=angle, tau=tau, eta=eta)
    weight = rng.next_uniform(*ranges.weight)
    # one component's scalars are consecutive draws: center, height, widths, angle, tau, etas
    r = ranges
    spans = [r.search] * d_i + [r.height] + [r.width] * d_i + [r.angle, r.tau] + [r.eta] * 4
    lo = np.array([a for a, _ in spans])
    hi = np.array([b for _, b in spans])
    comps = []
    for _ in range(m):
        u = rng.uniform_array(lo, hi, len(spans))
        center, h, widths = u[:d_i], u[d_i], u[d_i + 1 : 2 * d_i + 1]
        theta, t, etas = u[2 * d_i + 1], u[2 * d_i + 2], u[2 * d_i + 3 :]
        if rotation_enabled and d_i > 1:
            rot = random_orthogonal(rng, d_i)
        else:
            rot = np.eye(d_i)
        comps.append(
            Component(center=center, height=float(h), widths=widths, angle=float(theta), rotation=rot, tau=float(t), eta=etas)
        )
    return SubFunction(variable_indices=variable_indices, components=comps, weight=weight, severities=bundle)


def build_instance(cfg: ScenarioConfig, rng: RandomSource) -> ProblemInstance:
    """Sample environment 0 of ``cfg`` from ``rng``.

    The variable permutation is drawn first; sub-functions follow in config
    order (listed groups, then one per separable variable).
    """
    perm = rng.next_permutation(cfg.dimension)
    sizes = list(cfg.groups) + [1] * cfg.separable_count
    subs = []
    start = 0
    for size in sizes:
        idx = sorted(perm[start : start + size])
        start += size
        subs.append(sample_subfunction(rng, idx, cfg.ranges, cfg.severities, cfg.rotation_enabled))
    return ProblemInstance(
        dimension=cfg.dimension,
        sub_functions=subs,
        bounds=Range(*cfg.ranges.search),
        parameter_bounds=cfg.ranges.parameter_bounds(),
        rotation_enabled=cfg.rotation_enabled,
    )


def build_scenario(scenario_id: int, mode: str = "default", seed: int = 0) -> tuple[ProblemInstance, ScenarioConfig]:
    """Instance from a fresh stream seeded with ``seed``; see ``start_run`` to keep the stream."""
    cfg = scenario_config(scenario_id, mode, seed)
    return build_instance(cfg, create_rng(seed)), cfg


def start_run(cfg: ScenarioConfig) -> tuple[ProblemInstance, RandomSource]:
    """Build the instance and return the stream positioned for dynamics and optimizer draws."""
    rng = create_rng(cfg.seed)
    return build_instance(cfg, rng), rng


def save_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return ScenarioConfig.from_dict(data, source=str(path))
