"""Experiment execution: instance loading, per-cell trials, aggregation.

Each cell is an (algorithm, predictor, parameter) triple.  One trial runs
the cell on every instance and reports total cost over total optimum.
Predictions for a (trial, instance, predictor, parameter) coordinate come
from the same derived seed for every algorithm, so cells are paired.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import datasets
from ..caching import (
    LRU,
    FollowPrediction,
    Marker,
    MinDetCache,
    ScheduleFollower,
    belady_faults,
    robust_ftp_cache,
    run_caching,
    trust_doubt,
)
from ..combine import FtpPolicy, min_det_run, min_rand_run
from ..core import (
    GreedyPolicy,
    PredictionTrace,
    StayPolicy,
    derive_seed,
    offline_optimum,
    run_online,
)
from ..errors import InsufficientData, SpecError
from ..icecream import WorkFunctionPolicy, icecream_opt, noisy_opt_predictor, random_instance, to_mts
from ..matching import (
    FtpMatcher,
    PermutationMatcher,
    min_det_matching,
    offline_matching,
    parse_matching_file,
    prefix_predictions,
    run_matcher,
)
from ..predictors import (
    blind_oracle_convert,
    lru_predictor,
    pleco_predictor,
    popu_predictor,
    random_lazy_predictor,
    synthetic_predictor,
)
from .generators import (
    gen_coupon_collector_caching,
    gen_uniform_mts_adversary,
    random_caching_instance,
    random_line_matching,
    random_uniform_mts,
)
from .spec import NEEDS_PREDICTION, ExperimentSpec


@dataclass(frozen=True)
class ResultRow:
    problem: str
    algorithm: str
    predictor: str
    param: float | None
    mean_ratio: float
    std_ratio: float
    trials: int
    seed: int


@dataclass(frozen=True)
class Cell:
    algorithm: str
    predictor: str
    param: float | None
    pred_index: int
    value_index: int


def cells_of(spec: ExperimentSpec) -> list:
    out = []
    for a in spec.algorithms:
        if a not in NEEDS_PREDICTION:
            out.append(Cell(a, "none", None, -1, -1))
            continue
        for pi, p in enumerate(spec.predictors):
            for vi, v in enumerate(p.values):
                out.append(Cell(a, p.name, v, pi, vi))
    return out


# -- instance loading ------------------------------------------------------------


def _path(source, key):
    if key not in source:
        return None
    return Path(source[key])


def load_instances(spec: ExperimentSpec) -> list:
    """Instances for the spec's source; each item is ``(instance, extra)``."""
    src = spec.source
    kind = src["kind"]
    seed = int(src.get("seed", spec.seed))
    count = int(src.get("count", 10))
    if spec.problem == "caching":
        if kind == "random":
            k, length, pages = int(src.get("k", 10)), int(src.get("length", 500)), int(src.get("pages", 30))
            return [(random_caching_instance(k, length, pages, derive_seed(seed, i)), None) for i in range(count)]
        if kind == "coupon":
            k, length = int(src.get("k", 32)), int(src.get("length", 100_000))
            return [(gen_coupon_collector_caching(k, length, derive_seed(seed, i)), None) for i in range(count)]
        if kind == "brightkite":
            return [(inst, None) for _, _, inst in _bk_users(src)]
        if kind == "citi":
            paths = [Path(p) for p in src.get("paths", ())] or datasets.find_citi(_path(src, "dir"))
            if not paths:
                raise InsufficientData("no Citi Bike files found")
            trips = (t for p in paths for t in datasets.parse_citi(p))
            insts = datasets.extract_citi_instances(
                trips, k=int(src.get("k", 100)), length=int(src.get("length", 25000)), strict=bool(src.get("strict", True))
            )
            return [(i, None) for i in insts.values()]
    if spec.problem == "icecream":
        if kind == "random":
            length = int(src.get("length", 100))
            return [(random_instance(length, derive_seed(seed, i)), None) for i in range(count)]
        if kind == "brightkite":
            # the users selected for the caching experiments
            rule = src.get("split", "midpoint")
            out = []
            for _, recs, _ in _bk_users(src):
                try:
                    out.append((datasets.geo_split_icecream(recs, rule), None))
                except datasets.DegenerateGeo:
                    continue
            return out
    if spec.problem == "matching":
        if kind == "random":
            n, span = int(src.get("n", 8)), int(src.get("span", 100))
            return [(random_line_matching(n, derive_seed(seed, i), span), None) for i in range(count)]
        if kind == "file":
            paths = src.get("paths") or [src.get("path")]
            return [parse_matching_file(Path(p).read_text()) for p in paths if p]
    if spec.problem == "uniform-mts":
        if kind == "adversary":
            n, eta_bar, rounds = int(src.get("n", 5)), float(src.get("eta_bar", 1)), int(src.get("rounds", 50))
            adv = gen_uniform_mts_adversary(n, eta_bar, rounds, FtpPolicy())
            return [(adv.instance, adv.predictions)]
        if kind == "random":
            n, length = int(src.get("n", 5)), int(src.get("length", 30))
            return [(random_uniform_mts(n, length, derive_seed(seed, i)), None) for i in range(count)]
    raise SpecError(f"unsupported source {kind!r} for {spec.problem}")


def _bk_users(src):
    path = _path(src, "path") or datasets.find_brightkite()
    if path is None or not Path(path).exists():
        raise InsufficientData("BrightKite file not found")
    return datasets.select_bk_users(
        datasets.parse_brightkite(path),
        k=int(src.get("k", 10)),
        length=int(src.get("length", 2100)),
        min_evictions=int(src.get("min_evictions", 50)),
        limit=int(src.get("limit", 100)),
        count_compulsory=bool(src.get("count_compulsory", False)),
        strict=bool(src.get("strict", True)),
    )


def optimum(problem: str, instance) -> float:
    if problem == "caching":
        return belady_faults(instance)
    if problem == "icecream":
        return icecream_opt(instance)[0]
    if problem == "matching":
        return offline_matching(instance)[0]
    return offline_optimum(instance).total


# -- predictions -------------------------------------------------------------------


def make_predictions(problem, name, value, instance, extra, seed):
    if problem == "caching":
        reqs, k = instance.requests, instance.k
        if name == "random":
            return random_lazy_predictor(reqs, k, seed)
        arrivals = {
            "synthetic": lambda: synthetic_predictor(reqs, value, seed),
            "pleco": lambda: pleco_predictor(reqs),
            "popu": lambda: popu_predictor(reqs),
            "lru": lambda: lru_predictor(reqs),
        }[name]()
        return blind_oracle_convert(reqs, arrivals, k)
    if problem == "icecream":
        return noisy_opt_predictor(instance, value, seed)
    if problem == "matching":
        _, assign = offline_matching(instance)
        rng = random.Random(seed)
        assign = list(assign)
        for i in range(len(assign)):
            if rng.random() < value:
                j = rng.randrange(len(assign))
                assign[i], assign[j] = assign[j], assign[i]
        return prefix_predictions(assign)
    # uniform-mts
    if name == "emitted":
        if extra is None:
            raise SpecError("the emitted predictor needs an adversary source")
        return extra
    states = offline_optimum(instance).states
    rng = random.Random(seed)
    n = instance.space.point_count
    noisy = [rng.choice([y for y in range(n) if y != x]) if rng.random() < value else x for x in states]
    return PredictionTrace(tuple(noisy))


# -- one algorithm run ---------------------------------------------------------------


def run_algorithm(spec: ExperimentSpec, algorithm, instance, predictions, seed) -> float:
    problem = spec.problem
    if problem == "caching":
        policy = {
            "lru": LRU,
            "marker": Marker,
            "ftp": FollowPrediction,
            "blind_oracle": lambda: ScheduleFollower(predictions, "blind_oracle"),
            "robust_ftp": lambda: robust_ftp_cache(spec.epsilon),
            "trust_doubt": trust_doubt,
            "min_det": lambda: MinDetCache([FollowPrediction(), Marker()], spec.gamma),
        }[algorithm]()
        return run_caching(policy, instance, predictions if policy.needs_prediction else None, seed).faults
    if problem == "matching":
        if algorithm == "permutation":
            return run_matcher(PermutationMatcher(instance), instance).cost
        if algorithm == "ftp":
            return run_matcher(FtpMatcher(instance), instance, predictions).cost
        return min_det_matching(instance, predictions, spec.gamma).cost
    mts = to_mts(instance) if problem == "icecream" else instance
    base = {"work_function": WorkFunctionPolicy, "ftp": FtpPolicy, "greedy": GreedyPolicy, "stay": StayPolicy}
    if algorithm in base:
        return run_online(base[algorithm](), mts, predictions if algorithm == "ftp" else None, seed).cost
    pair = [WorkFunctionPolicy(), FtpPolicy()]
    if algorithm == "min_det":
        return min_det_run(pair, mts, spec.gamma, predictions, seed).cost
    return min_rand_run(pair, mts, spec.epsilon, None, predictions, seed).cost


# -- orchestration --------------------------------------------------------------------

_STATE: dict = {}


def _init(spec, instances, cells):
    _STATE.update(spec=spec, instances=instances, cells=cells)


def _trial(job):
    ci, trial = job
    spec, instances, cells = _STATE["spec"], _STATE["instances"], _STATE["cells"]
    cell = cells[ci]
    ai = spec.algorithms.index(cell.algorithm)
    total = 0.0
    for ii, (inst, extra) in enumerate(instances):
        preds = None
        if cell.pred_index >= 0:
            pseed = derive_seed(spec.seed, trial, ii, 1, cell.pred_index, cell.value_index)
            preds = make_predictions(spec.problem, cell.predictor, cell.param, inst, extra, pseed)
        total += run_algorithm(spec, cell.algorithm, inst, preds, derive_seed(spec.seed, trial, ii, 2, ai))
    return ci, trial, total


def run_experiment(spec: ExperimentSpec, instances=None, progress=None) -> list:
    """Mean and standard deviation (over trials) of total cost / total optimum per cell."""
    if instances is None:
        instances = load_instances(spec)
    if not instances:
        raise InsufficientData("no instances")
    total_opt = sum(optimum(spec.problem, inst) for inst, _ in instances)
    if total_opt == 0:
        raise InsufficientData("total optimum cost is zero")
    cells = cells_of(spec)
    jobs = [(ci, t) for ci in range(len(cells)) for t in range(spec.trials)]
    totals = np.zeros((len(cells), spec.trials))
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers, initializer=_init, initargs=(spec, instances, cells)) as ex:
            for ci, t, tot in ex.map(_trial, jobs, chunksize=max(1, len(jobs) // (4 * spec.workers))):
                totals[ci, t] = tot
                if progress:
                    progress(ci, t)
    else:
        _init(spec, instances, cells)
        for job in jobs:
            ci, t, tot = _trial(job)
            totals[ci, t] = tot
            if progress:
                progress(ci, t)
    ratios = totals / total_opt
    return [
        ResultRow(
            spec.problem,
            c.algorithm,
            c.predictor,
            c.param,
            float(ratios[ci].mean()),
            float(ratios[ci].std()),
            spec.trials,
            spec.seed,
        )
        for ci, c in enumerate(cells)
    ]
