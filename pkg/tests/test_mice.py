"""Mouse strategies: spider evader stage machine, branch lookahead, baselines."""

import pytest

from catmouse.cats import (
    BallCoverCat,
    ScriptedCat,
    SeededRandomCat,
    StayCat,
    SweepCat,
)
from catmouse.engine import run_game
from catmouse.graphs import (
    DistanceOracle,
    GraphError,
    SpiderSpec,
    gen_grid,
    gen_path,
    gen_spider,
    scattered_cover,
)
from catmouse.mice import (
    DepthPlan,
    GreedyAwayMouse,
    RandomWalkMouse,
    ScriptedMouse,
    SpiderMouse,
    StationaryMouse,
    find_safe_branch,
    parse_mouse_spec,
)

T = 12
SPIDER = SpiderSpec(T, 0)
GS = gen_spider(SPIDER)
ORACLE = DistanceOracle(GS)


def spider_run(cat, horizon=120, t=T, extra=0, track=True):
    spec = SpiderSpec(t, extra)
    g = gen_spider(spec)
    oracle = DistanceOracle(g)
    mouse = SpiderMouse(t)
    tr = run_game(g, cat(g, oracle), mouse, horizon, track_belief=track, oracle=oracle)
    return spec, g, oracle, mouse, tr


class TestFindSafeBranch:
    def test_sweep_at_time_zero(self):
        # Sweep touches the center then branch 1's low ids during an 8-step
        # window, so branch 2 is the lowest untouched one under the
        # contiguous id layout.
        cat = SweepCat(GS)
        assert find_safe_branch(SPIDER, cat, (), window=8) == 2

    def test_stay_cat_blocks_nothing(self):
        assert find_safe_branch(SPIDER, StayCat(GS), (), window=8) == 1

    def test_window_zero(self):
        assert find_safe_branch(SPIDER, SweepCat(GS), (), window=0) == 1
        assert find_safe_branch(SPIDER, SweepCat(GS), (), window=0, excluded={1}) == 2

    def test_excluded_branches_skipped(self):
        cat = StayCat(GS)
        assert find_safe_branch(SPIDER, cat, (), window=4, excluded={1, 2, 3}) == 4

    def test_simulation_does_not_mutate_the_cat(self):
        cat = SweepCat(GS)
        find_safe_branch(SPIDER, cat, (), window=8)
        assert cat.first_query() == 0

    def test_window_preconditions(self):
        with pytest.raises(GraphError):
            find_safe_branch(SPIDER, StayCat(GS), (), window=12)
        with pytest.raises(GraphError):
            find_safe_branch(SPIDER, StayCat(GS), (), window=8, excluded=set(range(1, 5)))

    def test_mid_game_resume_from_bit_record(self):
        # Replaying two delivered bits positions the clone after its third
        # query, so an 8-query window covers sweep's ids 3..10 (branch 1).
        plan = DepthPlan(T)
        for dc in (0, 1, 2):
            plan.advance(dc)
        branch = find_safe_branch(SPIDER, SweepCat(GS), (1, 1), window=8, plan=plan)
        assert branch == 2


class TestSpiderMouseStageArithmetic:
    def test_all_closer_queries_reach_center_quickly(self):
        # A cat that always keeps d(c, center) non-increasing makes the
        # evader walk in every drift step: depth t/4 - t/6 = t/12 when the
        # dash starts, so the center is reached at step 1 + t/6 + t/12.
        spec, g, oracle, mouse, tr = spider_run(lambda g, o: StayCat(g))
        assert mouse.plan.d_snapshot == T // 12
        arrival = 1 + T // 6 + T // 12
        assert tr.m[arrival] == 0
        assert all(tr.m[i] != 0 for i in range(1, arrival))
        # the shadow held its depth through the drift stage
        first_events = [e for e in mouse.stage_events if e[1] == "s2_end"][0]
        w_at_s2_end = mouse.shadow_trace[first_events[0]]
        assert spec.depth_of(w_at_s2_end) == T // 4

    def test_initial_positions(self):
        spec, g, oracle, mouse, tr = spider_run(lambda g, o: SweepCat(g))
        assert spec.depth_of(tr.m[1]) == T // 4
        assert spec.depth_of(mouse.shadow_trace[1]) == T // 4
        assert spec.branch_of(tr.m[1]) != spec.branch_of(mouse.shadow_trace[1])

    def test_stage2_window_bounds(self):
        # At the end of every drift stage: t/3 <= d(m, w) <= 2t/3.
        for cat in (lambda g, o: SweepCat(g), lambda g, o: SeededRandomCat(g, 5)):
            spec, g, oracle, mouse, tr = spider_run(cat, horizon=100)
            ends = [step for step, label in mouse.stage_events if label == "s2_end"]
            assert ends
            for step in ends:
                sep = oracle.distance(tr.m[step], mouse.shadow_trace[step])
                assert T // 3 <= sep <= 2 * T // 3

    def test_cycle_period(self):
        # Against the stay cat d = t/12 every cycle, so the cycle length is
        # t/6 + t/12 + t/4 steps.
        spec, g, oracle, mouse, tr = spider_run(lambda g, o: StayCat(g), horizon=100)
        ends = [step for step, label in mouse.stage_events if label == "cycle_end"]
        period = T // 6 + T // 12 + T // 4
        assert ends[0] == 1 + period
        assert all(b - a == period for a, b in zip(ends, ends[1:]))


class TestSpiderMouseInvariants:
    CATS = [
        lambda g, o: SweepCat(g),
        lambda g, o: StayCat(g),
        lambda g, o: SeededRandomCat(g, 3),
        lambda g, o: BallCoverCat(g, scattered_cover(g, 6, o), o),
    ]

    @pytest.mark.parametrize("cat", CATS)
    def test_shadow_stays_in_belief(self, cat):
        spec, g, oracle, mouse, tr = spider_run(cat)
        for i in range(1, tr.horizon + 1):
            assert mouse.shadow_trace[i] in tr.belief_set(i)

    @pytest.mark.parametrize("cat", CATS)
    def test_separation_keeps_radius_above_t_over_12(self, cat):
        spec, g, oracle, mouse, tr = spider_run(cat)
        for i in range(1, tr.horizon + 1):
            sep = oracle.distance(tr.m[i], mouse.shadow_trace[i])
            assert sep >= T // 6
            assert tr.belief_radius[i] > T // 12

    @pytest.mark.parametrize("cat", CATS)
    def test_cat_never_queries_occupied_branches(self, cat):
        spec, g, oracle, mouse, tr = spider_run(cat)
        for i in range(1, tr.horizon + 1):
            qb = spec.branch_of(tr.c[i])
            if tr.m[i] != 0:
                assert qb != spec.branch_of(tr.m[i])
            assert qb != spec.branch_of(mouse.shadow_trace[i])

    def test_padding_branch_never_entered(self):
        spec, g, oracle, mouse, tr = spider_run(
            lambda g, o: SweepCat(g), extra=7, horizon=160
        )
        pad = spec.t + 1
        for i in range(1, tr.horizon + 1):
            assert spec.branch_of(tr.m[i]) != pad
            assert spec.branch_of(mouse.shadow_trace[i]) != pad

    def test_cat_camped_on_padding_branch(self):
        # Queries on the padding branch read like any off-branch query; the
        # evader keeps its guarantees and never runs out of safe branches.
        spec = SpiderSpec(T, 7)
        g = gen_spider(spec)
        oracle = DistanceOracle(g)
        pad_ids = [spec.t * spec.t + 1 + k for k in range(7)]
        cat = ScriptedCat(pad_ids * 20)
        mouse = SpiderMouse(T)
        tr = run_game(g, cat, mouse, 80, track_belief=True, oracle=oracle)
        for i in range(1, 81):
            assert tr.belief_radius[i] > T // 12
            assert mouse.shadow_trace[i] in tr.belief_set(i)

    def test_t24_spider(self):
        spec, g, oracle, mouse, tr = spider_run(
            lambda g, o: SeededRandomCat(g, 9), t=24, horizon=100
        )
        for i in range(1, tr.horizon + 1):
            assert tr.belief_radius[i] > 2
            assert mouse.shadow_trace[i] in tr.belief_set(i)

    def test_sqrt_cat_never_localizes_to_t_over_12(self):
        from catmouse.cats import sqrt_cat
        from catmouse.engine import localization_report

        spec, g, oracle, mouse, tr = spider_run(lambda g, o: sqrt_cat(g, o))
        assert localization_report(tr, T // 12).first_success_step is None


class TestSpiderMouseValidation:
    def test_requires_multiple_of_twelve(self):
        for t in (0, 6, 13):
            with pytest.raises(GraphError):
                SpiderMouse(t)

    def test_rejects_wrong_graph(self):
        mouse = SpiderMouse(12)
        g = gen_path(145)
        with pytest.raises(GraphError, match="not a spider"):
            run_game(g, StayCat(g), mouse, 3)

    def test_rejects_wrong_parameter(self):
        mouse = SpiderMouse(24)
        with pytest.raises(GraphError, match="not a spider"):
            run_game(GS, StayCat(GS), mouse, 3)


class TestDepthPlan:
    def test_placement_step_produces_no_bit(self):
        plan = DepthPlan(12)
        assert plan.advance(3) is None
        assert plan.m_depth == 3  # t/4

    def test_drift_tie_goes_inward(self):
        plan = DepthPlan(12)
        plan.advance(5)
        bit = plan.advance(5)  # equal distance: move in, bit 1
        assert plan.m_depth == 2 and bit == 1

    def test_drift_away_holds_still(self):
        plan = DepthPlan(12)
        plan.advance(0)
        bit = plan.advance(4)  # cat moved out: hold, bit 0
        assert plan.m_depth == 3 and bit == 0 and plan.w_action == "out"


class TestBaselineMice:
    def test_stationary_holds_seeded_vertex(self):
        g = gen_grid(3, 3)
        tr = run_game(g, SweepCat(g), StationaryMouse(13), 5)
        assert all(m == 13 % 9 for m in tr.m[1:])

    def test_random_walk_deterministic(self):
        g = gen_grid(4, 4)
        a = run_game(g, SweepCat(g), RandomWalkMouse(3), 12)
        b = run_game(g, SweepCat(g), RandomWalkMouse(3), 12)
        assert a.m == b.m

    def test_greedy_away_maximizes_distance(self):
        g = gen_path(5)
        # cat sits on 0; mouse starts at 2 and must step to 3
        tr = run_game(g, StayCat(g), GreedyAwayMouse(2), 2)
        assert tr.m[1:] == [2, 3]

    def test_greedy_tie_breaks_low(self):
        g = gen_grid(3, 3)
        oracle = DistanceOracle(g)
        tr = run_game(g, ScriptedCat([4, 4, 4]), GreedyAwayMouse(0), 2, oracle=oracle)
        choices = (0, *g.adjacency[0])
        best = max(oracle.distance(v, 4) for v in choices)
        expected = min(v for v in choices if oracle.distance(v, 4) == best)
        assert tr.m[2] == expected

    def test_scripted_mouse_rejects_empty(self):
        with pytest.raises(GraphError):
            ScriptedMouse([])


class TestFactories:
    def test_spider_and_baseline(self):
        from catmouse.mice import baseline_mouse, spider_mouse

        assert spider_mouse(12).t == 12
        assert baseline_mouse("stationary", 3).seed == 3
        assert baseline_mouse("random_walk", 4).seed == 4
        assert baseline_mouse("greedy_away").seed == 0
        with pytest.raises(GraphError):
            baseline_mouse("telepath")


class TestParseMouseSpec:
    def test_known_specs(self):
        assert parse_mouse_spec("spider:t=12").t == 12
        assert parse_mouse_spec("stationary:seed=1").seed == 1
        assert parse_mouse_spec("rw:seed=2").seed == 2
        assert parse_mouse_spec("greedy").seed == 0
        assert parse_mouse_spec("greedy:seed=3").seed == 3

    def test_default_seed(self):
        assert parse_mouse_spec("rw", default_seed=17).seed == 17

    def test_bad_specs(self):
        for spec in ("spider", "spider:x=1", "sloth", "rw:k=2"):
            with pytest.raises(GraphError):
                parse_mouse_spec(spec)
