import itertools
import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mts_oracle.caching import (
    LRU,
    NO_EVICTION,
    CacheSchedule,
    CachingInstance,
    FollowPrediction,
    LazyWrapper,
    Marker,
    MinDetCache,
    MinRandCache,
    ScheduleFollower,
    belady_faults,
    belady_offline,
    brute_force_opt,
    config_distance,
    phase_partition,
    robust_ftp_cache,
    run_caching,
    schedule_error,
    split_phases,
)
from mts_oracle.errors import SizeMismatch, TooLarge
from mts_oracle.predictors import random_lazy_predictor

a, b, c, d = 0, 1, 2, 3

requests_st = st.lists(st.integers(0, 7), min_size=1, max_size=60)


class TestPhases:
    def test_two_phases(self):
        assert split_phases([a, b, a, c, b], 2) == [[a, b, a], [c, b]]

    def test_single_phase(self):
        assert phase_partition([a, b, a, b], 3) == [0]

    def test_k1(self):
        assert split_phases([a, b, a], 1) == [[a], [b], [a]]

    @given(requests_st, st.integers(1, 5))
    def test_each_phase_has_at_most_k_distinct(self, reqs, k):
        phases = split_phases(reqs, k)
        assert sum(map(len, phases)) == len(reqs)
        assert all(len(set(p)) <= k for p in phases)
        assert all(len(set(p)) == k for p in phases[:-1])
        for p, q in zip(phases, phases[1:]):
            assert q[0] not in p


class TestConfigDistance:
    def test_equal(self):
        assert config_distance({a, b}, {a, b}) == 0

    def test_one(self):
        assert config_distance({a, b, c}, {a, b, d}) == 1

    def test_disjoint(self):
        assert config_distance({a, b}, {c, d}) == 2

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            config_distance({a}, {a, b})


class TestBelady:
    def test_example(self):
        inst = CachingInstance(2, (a, b, c, b, a))
        sched = belady_offline(inst)
        assert sched.faults == 4
        configs = list(sched.configs())
        assert configs[2] == {b, c}
        assert brute_force_opt(inst) == 4

    def test_few_pages(self):
        assert belady_faults(CachingInstance(3, (a, b, a, c, b, a))) == 3

    def test_two_pages(self):
        assert belady_faults(CachingInstance(2, (a, b, a, b))) == 2

    def test_brute_force_guard(self):
        with pytest.raises(TooLarge):
            brute_force_opt(CachingInstance(2, tuple(range(7))))

    def test_brute_force_single_page(self):
        assert brute_force_opt(CachingInstance(1, (a,))) == 1

    def test_brute_force_distinct(self):
        assert brute_force_opt(CachingInstance(3, (a, b, c))) == 3

    @given(st.lists(st.integers(0, 5), min_size=1, max_size=14), st.integers(1, 4))
    def test_belady_equals_brute_force(self, reqs, k):
        inst = CachingInstance(k, tuple(reqs))
        assert belady_faults(inst) == brute_force_opt(inst)

    @given(requests_st, st.integers(1, 5))
    def test_schedule_is_lazy_and_lower_bound(self, reqs, k):
        inst = CachingInstance(k, tuple(reqs))
        sched = belady_offline(inst)
        assert sched.is_lazy()
        assert sched.faults >= max(0, len(set(reqs)) - k)
        assert sched.faults == belady_faults(inst)


class TestSchedules:
    def test_from_configs_roundtrip(self):
        sched = belady_offline(CachingInstance(2, (a, b, c, b, a, d)))
        again = CacheSchedule.from_configs(2, sched.requests, list(sched.configs()))
        assert again == sched

    def test_non_lazy_rejected(self):
        with pytest.raises(ValueError):
            CacheSchedule.from_configs(2, (a, b), [{a, c}, {a, b}])

    @given(requests_st, st.integers(1, 4), st.integers(0, 1000))
    def test_schedule_error_matches_configs(self, reqs, k, seed):
        p = random_lazy_predictor(reqs, k, seed)
        o = random_lazy_predictor(reqs, k, seed + 1)
        expect = sum(config_distance(x, y) for x, y in zip(p.configs(), o.configs()))
        assert schedule_error(p, o) == expect


class TestPolicies:
    def test_lru_example(self):
        inst = CachingInstance(2, (a, b, a, c))
        run = run_caching(LRU(), inst, record=True)
        assert run.faults == 3
        assert run.configs[-1] == {a, c}

    def test_marker_random_eviction(self):
        inst = CachingInstance(2, (a, b, c))
        left = Counter()
        for seed in range(400):
            run = run_caching(Marker(), inst, seed=seed, record=True)
            assert run.faults == 3
            left[min(run.configs[-1] - {c})] += 1
        assert set(left) == {a, b}
        assert abs(left[a] - 200) < 60

    @pytest.mark.parametrize("policy", [LRU, Marker])
    def test_repeated_page(self, policy):
        assert run_caching(policy(), CachingInstance(3, (a,) * 20)).faults == 1

    @given(requests_st, st.integers(1, 5), st.integers(0, 100))
    def test_lazy_policies_never_beat_opt(self, reqs, k, seed):
        inst = CachingInstance(k, tuple(reqs))
        opt = belady_faults(inst)
        pred = random_lazy_predictor(reqs, k, seed)
        for pol in (LRU(), Marker(), FollowPrediction(), robust_ftp_cache(), MinDetCache([LRU(), Marker()])):
            run = run_caching(pol, inst, pred if pol.needs_prediction else None, seed=seed, record=True)
            assert run.faults >= opt
            assert all(len(cfg) <= k and r in cfg for r, cfg in zip(reqs, run.configs))

    def test_ftp_with_belady_predictions_is_optimal(self):
        rng = random.Random(0)
        for _ in range(100):
            inst = CachingInstance(rng.randint(1, 5), tuple(rng.randrange(8) for _ in range(80)))
            sched = belady_offline(inst)
            assert run_caching(FollowPrediction(), inst, sched).faults == sched.faults


class TestLazyWrapper:
    def test_wrapping_lazy_policy_is_identity(self):
        rng = random.Random(1)
        for _ in range(50):
            inst = CachingInstance(rng.randint(1, 4), tuple(rng.randrange(7) for _ in range(60)))
            plain = run_caching(LRU(), inst, record=True)
            wrapped = run_caching(LazyWrapper(LRU()), inst, record=True)
            assert plain.faults == wrapped.faults and plain.configs == wrapped.configs

    def test_wrapping_belady(self):
        rng = random.Random(2)
        for _ in range(50):
            inst = CachingInstance(rng.randint(1, 4), tuple(rng.randrange(7) for _ in range(60)))
            sched = belady_offline(inst)
            assert run_caching(LazyWrapper(ScheduleFollower(sched)), inst).faults == sched.faults


class TestCombiners:
    def test_identical_policies(self):
        inst = CachingInstance(3, tuple(random.Random(3).randrange(6) for _ in range(200)))
        lru = run_caching(LRU(), inst).faults
        assert run_caching(MinDetCache([LRU(), LRU()]), inst).faults == lru
        assert run_caching(MinRandCache([LRU(), LRU()]), inst).faults == lru

    def test_min_det_bound(self):
        rng = random.Random(4)
        for i in range(100):
            inst = CachingInstance(rng.randint(2, 5), tuple(rng.randrange(9) for _ in range(150)))
            pred = random_lazy_predictor(inst.requests, inst.k, i)
            lru = run_caching(LRU(), inst).faults
            ftp = run_caching(FollowPrediction(), inst, pred).faults
            comb = run_caching(MinDetCache([FollowPrediction(), LRU()], gamma=2), inst, pred).faults
            # both caches start empty, so a switch costs at most the summed loads
            assert comb <= 9 * min(lru, ftp)

    def test_robust_ftp_perfect_predictions(self):
        inst = CachingInstance(5, tuple(random.Random(5).randrange(12) for _ in range(3000)))
        sched = belady_offline(inst)
        res = run_caching(robust_ftp_cache(0.01), inst, sched)
        assert res.faults <= 1.02 * sched.faults + (10 * inst.k / 0.01) * 0.7


def test_no_eviction_marker_in_warmup():
    sched = belady_offline(CachingInstance(3, (a, b, c, a)))
    assert sched.evictions[:3] == (NO_EVICTION,) * 3
