import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mts_oracle.combine import (
    CombinerConfigDet,
    CombinerConfigRand,
    DetSchedule,
    FtpPolicy,
    emd_distance,
    emd_transfer,
    ftp_step,
    min_det_run,
    min_rand_run,
    robust_ftp,
    wmr_update,
)
from mts_oracle.core import (
    INF,
    GreedyPolicy,
    MtsInstance,
    Policy,
    PredictionTrace,
    StayPolicy,
    Task,
    derive_seed,
    UniformMetric,
    offline_optimum,
    prediction_error,
    run_online,
    trajectory_cost,
)
from mts_oracle.errors import NotADistribution, Unserviceable

A, B = 0, 1
TWO = UniformMetric(2)


class TestFtpStep:
    def test_moves_away(self):
        assert ftp_step(A, Task((5, 1)), A, TWO) == B

    def test_stays_on_prediction(self):
        assert ftp_step(A, Task((1, 0)), A, TWO) == A

    def test_tie_prefers_prediction(self):
        assert ftp_step(B, Task((2, 0)), A, TWO) == A

    def test_unserviceable_prediction_skipped(self):
        assert ftp_step(A, Task((INF, 3)), A, TWO) == B

    def test_tie_lowest_index_when_prediction_worse(self):
        space = UniformMetric(3)
        assert ftp_step(0, Task((5, 1, 1)), 0, space) == 1


class TestDetSchedule:
    def test_coefficient_nine(self):
        assert CombinerConfigDet(2).gamma == 2
        assert CombinerConfigDet(2).coefficient == 9

    def test_coefficient_three_halves(self):
        c = CombinerConfigDet(3, 1.5).coefficient
        assert c == pytest.approx(14.5)
        assert c <= 2 * math.e * 3

    def test_gamma_exact(self):
        assert DetSchedule(2, 1.01).gamma == Fraction(101, 100)

    def test_gamma_range(self):
        with pytest.raises(ValueError):
            CombinerConfigDet(2, 2.5)
        with pytest.raises(ValueError):
            CombinerConfigDet(2, 1)

    def test_thresholds_alternate(self):
        s = DetSchedule(2, 2)
        # both algorithms pay 1 per step: switches happen past 1, 2, 4, 8
        followed = []
        for t in range(1, 17):
            followed.append(s.choose([t, t]))
        assert followed[:2] == [0, 1]
        assert s.threshold == 16
        assert followed[15] == s.level % 2

    def test_zero_cost_algorithm_is_kept(self):
        s = DetSchedule(2, 2)
        for t in range(1, 100):
            assert s.choose([t, 0]) == (0 if t <= 1 else 1)


class TestWmr:
    def test_single_expensive(self):
        cfg = wmr_update(CombinerConfigRand.initial(2, 0.01, 3.0), (3.0, 0))
        assert cfg.weights == pytest.approx((0.995, 1.0))
        assert cfg.distribution == pytest.approx((0.995 / 1.995, 1 / 1.995))
        assert cfg.distribution[0] == pytest.approx(0.49875, abs=1e-5)

    def test_zero_costs_identity(self):
        cfg = CombinerConfigRand.initial(2, 0.01, 1.0)
        assert wmr_update(cfg, (0, 0)).distribution == cfg.distribution

    def test_uniform_preserved(self):
        cfg = wmr_update(CombinerConfigRand.initial(3, 0.01, 2.0), (2.0, 2.0, 2.0))
        assert cfg.distribution == pytest.approx((1 / 3,) * 3)

    @given(st.lists(st.lists(st.floats(0, 10), min_size=3, max_size=3), max_size=30))
    def test_weights_positive_nonincreasing(self, rounds):
        cfg = CombinerConfigRand.initial(3, 0.1, 5.0)
        for costs in rounds:
            new = wmr_update(cfg, costs)
            assert all(0 < b <= a for a, b in zip(cfg.weights, new.weights))
            assert sum(new.distribution) == pytest.approx(1)
            cfg = new


class TestEmd:
    def test_small_shift(self):
        tau = emd_transfer((0.6, 0.4), (0.5, 0.5))
        assert tau[0][1] == pytest.approx(0.1)
        assert tau[0][0] == pytest.approx(0.5)
        assert tau[0][1] / 0.6 == pytest.approx(1 / 6)

    def test_identity(self):
        tau = emd_transfer((0.2, 0.3, 0.5), (0.2, 0.3, 0.5))
        assert emd_distance(tau) == 0

    def test_full_move(self):
        tau = emd_transfer((1, 0), (0, 1))
        assert tau[0][1] == 1 and emd_distance(tau) == 1

    def test_not_a_distribution(self):
        with pytest.raises(NotADistribution):
            emd_transfer((0.5, 0.4), (0.5, 0.5))

    @given(st.integers(1, 6).flatmap(lambda m: st.tuples(
        st.lists(st.floats(0.01, 1), min_size=m, max_size=m),
        st.lists(st.floats(0.01, 1), min_size=m, max_size=m))))
    def test_marginals_and_distance(self, pair):
        a, b = pair
        p = [x / sum(a) for x in a]
        q = [x / sum(b) for x in b]
        tau = emd_transfer(p, q)
        m = len(p)
        for i in range(m):
            assert sum(tau[i]) == pytest.approx(p[i], abs=1e-12)
            assert sum(tau[j][i] for j in range(m)) == pytest.approx(q[i], abs=1e-12)
            assert all(x >= 0 for x in tau[i])
        assert emd_distance(tau) == pytest.approx(sum(max(0, x - y) for x, y in zip(p, q)), abs=1e-12)


def random_instance(rng, n, T, inf_prob=0.1, max_cost=4):
    tasks = []
    for _ in range(T):
        costs = [INF if rng.random() < inf_prob else rng.randint(0, max_cost) for _ in range(n)]
        if all(c == INF for c in costs):
            costs[rng.randrange(n)] = rng.randint(0, max_cost)
        tasks.append(Task(tuple(costs)))
    return MtsInstance(UniformMetric(n), rng.randrange(n), tuple(tasks))


def random_valid_trajectory(rng, inst):
    return [rng.choice([x for x in range(inst.space.point_count) if t.cost(x) < INF]) for t in inst.tasks]


@given(st.integers(0, 10**9))
def test_ftp_inequality_property(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, rng.randint(1, 6), rng.randint(1, 20))
    ref = random_valid_trajectory(rng, inst)
    preds = [rng.randrange(inst.space.point_count) for _ in inst.tasks]
    off = trajectory_cost(inst, ref).total
    eta = prediction_error(preds, ref, inst.space)
    assert run_online(FtpPolicy(), inst, PredictionTrace(tuple(preds))).cost <= off + 4 * eta


class RandomPolicy(Policy):
    name = "random"

    def step(self, prev, task, prediction, rng):
        return rng.choice([x for x in range(len(task)) if task.cost(x) < INF])


@given(st.integers(0, 10**9), st.sampled_from([2, 3]), st.booleans())
def test_min_det_bound_property(seed, m, default_gamma):
    rng = random.Random(seed)
    inst = random_instance(rng, rng.randint(2, 5), rng.randint(5, 30))
    if offline_optimum(inst).total < 1:
        return
    gamma = None if default_gamma else 1.5
    algs = [GreedyPolicy(), StayPolicy(), RandomPolicy()][:m]
    res = min_det_run(algs, inst, gamma=gamma, seed=seed)
    # the combiner seeds its simulated copies with derive_seed(seed, i)
    costs = [run_online(a, inst, seed=derive_seed(seed, i)).cost for i, a in enumerate(algs)]
    coeff = CombinerConfigDet(m, gamma).coefficient
    assert res.cost <= coeff * min(costs) + 1e-9


def test_min_det_identical_policies():
    rng = random.Random(2)
    inst = random_instance(rng, 4, 40)
    a = run_online(GreedyPolicy(), inst)
    b = min_det_run([GreedyPolicy(), GreedyPolicy()], inst)
    assert b.trajectory.states == a.trajectory.states


class TestMinRand:
    def test_single_algorithm(self):
        inst = random_instance(random.Random(3), 4, 30)
        assert min_rand_run([GreedyPolicy()], inst).trajectory == run_online(GreedyPolicy(), inst).trajectory

    def test_identical_algorithms(self):
        inst = random_instance(random.Random(4), 4, 30)
        res = min_rand_run([GreedyPolicy(), GreedyPolicy()], inst, seed=9)
        assert res.trajectory.states == run_online(GreedyPolicy(), inst).trajectory.states

    def test_seed_reproducible(self):
        inst = random_instance(random.Random(5), 3, 50)
        r1 = min_rand_run([GreedyPolicy(), StayPolicy()], inst, 0.1, seed=4)
        r2 = min_rand_run([GreedyPolicy(), StayPolicy()], inst, 0.1, seed=4)
        assert r1 == r2


class TestRobustFtp:
    def test_perfect_predictions(self):
        rng = random.Random(6)
        eps = 0.1
        for i in range(20):
            inst = random_instance(rng, 3, 40, inf_prob=0.0)
            opt = offline_optimum(inst)
            res = robust_ftp(StayPolicy(), inst, PredictionTrace(opt.states), eps, seed=i)
            assert res.cost <= (1 + eps) * opt.total + (10 / eps) * math.log(2) * inst.space.diameter

    def test_identical_policies(self):
        inst = random_instance(random.Random(7), 3, 30)
        preds = PredictionTrace(tuple(random.Random(8).randrange(3) for _ in range(30)))
        ftp = run_online(FtpPolicy(), inst, preds)
        res = min_rand_run([FtpPolicy(), FtpPolicy()], inst, 0.01, None, preds, seed=1)
        assert res.cost == ftp.cost

    def test_wrong_predictions_bounded_by_baseline(self):
        rng = random.Random(9)
        eps = 0.1
        for i in range(20):
            inst = random_instance(rng, 3, 60, inf_prob=0.0)
            opt = offline_optimum(inst)
            wrong = PredictionTrace(tuple((x + 1) % 3 for x in opt.states))
            base = run_online(GreedyPolicy(), inst).cost
            res = robust_ftp(GreedyPolicy(), inst, wrong, eps, seed=i)
            assert res.cost <= (1 + 2 * eps) * base + (10 / eps) * math.log(2) + 1


def test_unserviceable_task_rejected():
    with pytest.raises(Unserviceable):
        Task((INF, INF))
