"""Experiment specification files.

A spec is a TOML document::

    problem = "caching"          # caching | icecream | matching | uniform-mts
    algorithms = ["lru", "marker", "ftp", "trust_doubt"]
    trials = 10
    seed = 0

    [source]                     # where instances come from
    kind = "random"              # see SOURCES
    k = 10

    [combiner]
    gamma = 1.01
    epsilon = 0.01

    [[predictors]]
    name = "synthetic"
    param = "sigma"
    values = [0, 0.5, 1, 2, 5, 10, 50]

Algorithms that take no predictions run once per trial under predictor
``none``.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import SpecError

PROBLEMS = ("caching", "icecream", "matching", "uniform-mts")

SOURCES = {
    "caching": ("random", "coupon", "brightkite", "citi"),
    "icecream": ("random", "brightkite"),
    "matching": ("random", "file"),
    "uniform-mts": ("adversary", "random"),
}

ALGORITHMS = {
    "caching": ("lru", "marker", "ftp", "blind_oracle", "robust_ftp", "trust_doubt", "min_det"),
    "icecream": ("work_function", "ftp", "min_det", "min_rand"),
    "matching": ("permutation", "ftp", "min_det"),
    "uniform-mts": ("ftp", "greedy", "stay", "work_function", "min_det", "min_rand"),
}

PREDICTORS = {
    "caching": {"synthetic": "sigma", "pleco": None, "popu": None, "lru": None, "random": None},
    "icecream": {"noisy_opt": "p"},
    "matching": {"noisy_opt": "p"},
    "uniform-mts": {"emitted": None, "noisy_opt": "p"},
}

NEEDS_PREDICTION = {"ftp", "blind_oracle", "robust_ftp", "trust_doubt", "min_det", "min_rand"}

DEFAULT_SIGMAS = (0, 0.5, 1, 2, 5, 10, 50)


@dataclass(frozen=True)
class PredictorSpec:
    name: str
    param: str | None = None
    values: tuple = (None,)


@dataclass(frozen=True)
class ExperimentSpec:
    problem: str
    algorithms: tuple
    source: dict = field(default_factory=dict)
    predictors: tuple = ()
    trials: int = 10
    seed: int = 0
    gamma: float = 1.01
    epsilon: float = 0.01
    workers: int = 1

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise SpecError(f"unknown problem {self.problem!r}")
        if self.trials < 1:
            raise SpecError("trials must be at least 1")
        if not self.algorithms:
            raise SpecError("no algorithms listed")
        for a in self.algorithms:
            if a not in ALGORITHMS[self.problem]:
                raise SpecError(f"unknown {self.problem} algorithm {a!r}")
        kind = self.source.get("kind")
        if kind not in SOURCES[self.problem]:
            raise SpecError(f"unknown {self.problem} source {kind!r}")
        known = PREDICTORS[self.problem]
        for p in self.predictors:
            if p.name not in known:
                raise SpecError(f"unknown {self.problem} predictor {p.name!r}")
        if any(a in NEEDS_PREDICTION for a in self.algorithms) and not self.predictors:
            raise SpecError("prediction-based algorithms listed without predictors")
        if not 1 < self.gamma <= 2:
            raise SpecError("gamma must lie in (1, 2]")
        if not 0 < self.epsilon < 0.5:
            raise SpecError("epsilon must lie in (0, 1/2)")


def _predictor(problem, raw) -> PredictorSpec:
    if isinstance(raw, str):
        raw = {"name": raw}
    if not isinstance(raw, dict) or "name" not in raw:
        raise SpecError(f"bad predictor entry {raw!r}")
    name = raw["name"]
    param = raw.get("param", PREDICTORS.get(problem, {}).get(name))
    if param is None:
        return PredictorSpec(name)
    values = raw.get("values")
    if values is None:
        values = DEFAULT_SIGMAS if param == "sigma" else (0.0,)
    if not isinstance(values, list | tuple) or not values:
        raise SpecError(f"predictor {name}: values must be a non-empty list")
    values = tuple(sorted(float(v) for v in values))
    if param == "sigma" and values[0] < 0:
        raise SpecError("sigma values must be nonnegative")
    if param == "p" and not (0 <= values[0] and values[-1] <= 1):
        raise SpecError("p values must lie in [0, 1]")
    return PredictorSpec(name, param, values)


def spec_from_dict(d: dict, **overrides) -> ExperimentSpec:
    d = {**d, **{k: v for k, v in overrides.items() if v is not None}}
    try:
        problem = d["problem"]
        algorithms = tuple(d["algorithms"])
    except KeyError as e:
        raise SpecError(f"missing key {e.args[0]!r}") from None
    combiner = d.get("combiner", {})
    preds = tuple(_predictor(problem, p) for p in d.get("predictors", ()))
    try:
        return ExperimentSpec(
            problem=problem,
            algorithms=algorithms,
            source=dict(d.get("source", {})),
            predictors=preds,
            trials=int(d.get("trials", 10)),
            seed=int(d.get("seed", 0)),
            gamma=float(combiner.get("gamma", 1.01)),
            epsilon=float(combiner.get("epsilon", 0.01)),
            workers=int(d.get("workers", 1)),
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, SpecError):
            raise
        raise SpecError(str(e)) from None


def load_spec(path, **overrides) -> ExperimentSpec:
    try:
        with open(path, "rb") as fh:
            d = tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        raise SpecError(f"{path}: {e}") from None
    except OSError as e:
        raise SpecError(f"{path}: {e.strerror}") from None
    return spec_from_dict(d, **overrides)
