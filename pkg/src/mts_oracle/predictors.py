"""Next-arrival predictors and their conversion to configuration predictions.

All arrival times are 1-indexed: the request at position ``t`` (0-based)
happens at time ``t + 1``.  A page that never reappears has true next
arrival ``T + 1``.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .caching.model import CacheSchedule
from .caching.offline import densify, furthest_key_schedule

PLECO_CONVENTIONS = ("lag0", "next-step")


def true_next_arrivals(requests) -> np.ndarray:
    dense, _ = densify(requests)
    return kernels.next_arrivals(dense)


def synthetic_predictor(requests, sigma: float, seed: int = 0) -> np.ndarray:
    """True next arrival plus lognormal(0, sigma) noise."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    truth = true_next_arrivals(requests).astype(float)
    return truth + rng.lognormal(mean=0.0, sigma=sigma, size=len(truth))


def pleco_predictor(requests, convention: str = "lag0") -> np.ndarray:
    """Recency-weighted re-request probability ``p``; predicts ``t + 1/p``.

    The weight of an occurrence ``x`` steps back is
    ``(x + 10) ** -1.8 * exp(-x / 670)``, normalized over all positions so
    far.  ``"lag0"`` counts the current request at lag 0; ``"next-step"``
    measures lags from the step being predicted, so the current request
    sits at lag 1.
    """
    if convention not in PLECO_CONVENTIONS:
        raise ValueError(f"unknown PLECO convention {convention!r}")
    dense, _ = densify(requests)
    return kernels.pleco_predictions(dense, 0 if convention == "lag0" else 1)


def popu_predictor(requests) -> np.ndarray:
    """Predicts ``t + 1/p`` with ``p`` the page's share of requests so far (current included)."""
    dense, _ = densify(requests)
    return kernels.popu_predictions(dense)


def lru_predictor(requests) -> np.ndarray:
    return -np.arange(1, len(requests) + 1, dtype=float)


def blind_oracle_convert(requests, arrivals, k: int) -> CacheSchedule:
    """Configurations of the lazy policy evicting the page predicted furthest away.

    Each page keeps the prediction made at its most recent request; ties go
    to the lowest page id.
    """
    if len(arrivals) != len(requests):
        raise ValueError("one prediction per request expected")
    return furthest_key_schedule(requests, arrivals, k)


def random_lazy_predictor(requests, k: int, seed: int = 0) -> CacheSchedule:
    """Lazy configuration predictions that evict a uniformly random page."""
    rng = np.random.default_rng(seed)
    return blind_oracle_convert(requests, rng.random(len(requests)), k)


PREDICTORS = {
    "synthetic": synthetic_predictor,
    "pleco": pleco_predictor,
    "popu": popu_predictor,
    "lru": lru_predictor,
}
