"""Caching as a metrical task system: policies, offline optima, Trust&Doubt."""

from .combine import MinDetCache, MinRandCache, robust_ftp_cache
from .model import (
    NO_EVICTION,
    CacheSchedule,
    CachingInstance,
    PredictedCache,
    config_distance,
    phase_partition,
    schedule_error,
    split_phases,
)
from .offline import belady_faults, belady_offline, brute_force_opt, furthest_key_schedule
from .policies import (
    LRU,
    CachePolicy,
    CachingRun,
    FollowPrediction,
    LazyWrapper,
    Marker,
    ScheduleFollower,
    run_caching,
)
from .trustdoubt import TrustDoubt, trust_doubt

__all__ = [
    "NO_EVICTION",
    "CacheSchedule",
    "CachingInstance",
    "PredictedCache",
    "config_distance",
    "phase_partition",
    "schedule_error",
    "split_phases",
    "belady_faults",
    "belady_offline",
    "brute_force_opt",
    "furthest_key_schedule",
    "LRU",
    "CachePolicy",
    "CachingRun",
    "FollowPrediction",
    "LazyWrapper",
    "Marker",
    "ScheduleFollower",
    "run_caching",
    "TrustDoubt",
    "trust_doubt",
    "MinDetCache",
    "MinRandCache",
    "robust_ftp_cache",
]
