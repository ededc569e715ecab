import dataclasses

import numpy as np
import pytest

from gmpb.harness import Session, create_session
from gmpb.landscape import evaluate_problem
from gmpb.optimizer import (
    CC_DEFAULTS,
    MultiSwarm,
    SwarmParams,
    _Cooperative,
    grouping_for,
    run_cc_mpso,
    run_mpso,
    run_random_search,
)
from gmpb.rng import create_rng
from gmpb.scenario import scenario_config, start_run


def short_session(sid=2, period=400, envs=3, seed=1, mode="default", signal=False):
    cfg = dataclasses.replace(scenario_config(sid, mode, seed), change_period=period, environments=envs)
    prob, rng = start_run(cfg)
    return create_session(prob, cfg, rng, signal_changes=signal), rng


class TestParams:
    @pytest.mark.parametrize(
        "kw", [{"population": 1}, {"swarm_count": 0}, {"inertia": -0.1}, {"max_iterations": 0}, {"reinit_fraction": 2}]
    )
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            SwarmParams(**kw)

    def test_defaults(self):
        p = SwarmParams()
        assert (p.inertia, p.cognitive, p.social) == (0.729, 1.49445, 1.49445)


class TestMultiSwarm:
    def test_positions_stay_in_box(self):
        rng = create_rng(1)
        ms = MultiSwarm(4, SwarmParams(), -50, 50, rng)
        for _ in range(50):
            X = ms.propose(rng)
            assert np.all((X >= -50) & (X <= 50)) and np.all(np.isfinite(X))
            ms.absorb(-np.sum(X**2, axis=1))

    def test_exclusion_restarts_one(self):
        rng = create_rng(2)
        ms = MultiSwarm(2, SwarmParams(swarm_count=2, population=3), -50, 50, rng)
        ms.pbest[:] = 0.0
        ms.pbest_score[0] = 1.0
        ms.pbest_score[1] = 2.0
        ms.fresh[:] = False
        ms.diversify(rng)
        assert ms.fresh.tolist() == [True, False]

    def test_converged_restarts_worst(self):
        rng = create_rng(3)
        ms = MultiSwarm(1, SwarmParams(swarm_count=2, population=3), -50, 50, rng)
        ms.pbest[0] = -40.0
        ms.pbest[1] = 40.0
        ms.pbest_score[0] = 5.0
        ms.pbest_score[1] = 1.0
        ms.fresh[:] = False
        ms.diversify(rng)
        assert ms.fresh.tolist() == [False, True]


class TestBudget:
    @pytest.mark.parametrize("runner", ["random", "mpso", "cc-oracle", "cc-separable"])
    def test_consumes_exact_budget(self, runner):
        s, rng = short_session(period=333, envs=3)
        if runner == "random":
            res = run_random_search(s, rng)
        elif runner == "mpso":
            res = run_mpso(s, rng=rng)
        else:
            res = run_cc_mpso(s, grouping_for(s, runner[3:]), rng=rng)
        assert s.finished and s.evaluations_used == s.budget == 999
        assert len(res.records) == 3
        assert np.isfinite(res.e_bbc) and res.e_bbc >= 0

    def test_max_iterations_stops_early(self):
        s, rng = short_session(period=1000, envs=3)
        run_mpso(s, SwarmParams(max_iterations=2), rng)
        assert 0 < s.evaluations_used < s.budget

    def test_signal_changes_mode(self):
        s, rng = short_session(period=300, envs=3, signal=True)
        res = run_mpso(s, rng=rng)
        assert res.signal_changes and s.finished


class TestDeterminism:
    @pytest.mark.parametrize("name", ["random", "mpso", "ccmpso"])
    def test_replay(self, name):
        values = []
        for _ in range(2):
            s, rng = short_session(sid=4, period=300, envs=2, seed=9)
            if name == "random":
                res = run_random_search(s, rng)
            elif name == "mpso":
                res = run_mpso(s, rng=rng)
            else:
                res = run_cc_mpso(s, grouping_for(s, "oracle"), rng=rng)
            values.append([(r.best_fitness, r.optimum_fitness) for r in res.records])
        assert values[0] == values[1]


class TestCooperative:
    def test_single_group_is_mpso(self):
        a, ra = short_session(period=300, envs=2, seed=4)
        b, rb = short_session(period=300, envs=2, seed=4)
        res_a = run_mpso(a, SwarmParams(), ra)
        res_b = run_cc_mpso(b, [list(range(50))], SwarmParams(), rb)
        assert [r.best_fitness for r in res_a.records] == [r.best_fitness for r in res_b.records]

    def test_splice_touches_only_group(self):
        s, rng = short_session()
        groups = [np.asarray(g) for g in grouping_for(s, "oracle")]
        coop = _Cooperative(s, groups, CC_DEFAULTS, rng)
        rows = rng.uniform_array(-50, 50, (4, len(groups[0])))
        full = coop._splice(0, rows)
        others = np.setdiff1d(np.arange(50), groups[0])
        assert np.array_equal(full[:, others], np.repeat(coop.context[None, others], 4, axis=0))
        assert np.array_equal(full[:, groups[0]], rows)

    def test_context_fitness_tracks_landscape(self):
        s, rng = short_session(period=5000, envs=2)
        coop = _Cooperative(s, [np.asarray(g) for g in grouping_for(s, "oracle")], CC_DEFAULTS, rng)
        for _ in range(5):
            coop.step()
            x, f = coop.reference
            assert f == evaluate_problem(x, s.problem) or abs(f - evaluate_problem(x, s.problem)) < 1e-9
            if coop.context_known:
                assert coop.context_fitness == pytest.approx(evaluate_problem(coop.context, s.problem), rel=1e-12)

    @pytest.mark.parametrize("bad", [[[0, 1]], [[0, 0], list(range(1, 50))], [[], list(range(50))]])
    def test_partition_required(self, bad):
        s, rng = short_session()
        with pytest.raises(ValueError):
            run_cc_mpso(s, bad, rng=rng)

    @pytest.mark.parametrize("sid", [4, 9, 14])
    def test_identity_grouping_on_separable(self, sid):
        s, rng = short_session(sid=sid, period=400, envs=2)
        res = run_cc_mpso(s, grouping_for(s, "separable"), rng=rng)
        assert s.finished and np.isfinite(res.e_bbc)

    def test_unknown_grouping(self):
        s, _ = short_session()
        with pytest.raises(ValueError):
            grouping_for(s, "dg2")


def test_change_detection_without_signal():
    """The sentinel re-evaluation must notice each change and re-score memory."""
    s, rng = short_session(period=400, envs=3)
    coop = _Cooperative(s, [np.arange(50)], SwarmParams(), rng)
    seen = []
    while not s.finished:
        before = coop.environment_seen
        coop.step()
        if coop.environment_seen != before:
            seen.append(coop.environment_seen)
    assert seen == [1, 2]
