import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mts_oracle import _kernels_py, kernels

compiled = pytest.mark.skipif(not kernels.COMPILED, reason="compiled kernels not built")

seq_st = st.lists(st.integers(0, 12), min_size=1, max_size=300)


@compiled
@given(seq_st, st.integers(1, 6), st.integers(0, 2**31))
def test_furthest_schedule_parity(reqs, k, seed):
    from mts_oracle import _ckernels

    keys = np.random.default_rng(seed).integers(0, 5, len(reqs)).astype(float)
    assert list(_ckernels.furthest_schedule(reqs, keys, k)[0]) == list(_kernels_py.furthest_schedule(reqs, keys, k)[0])
    assert _ckernels.furthest_schedule(reqs, keys, k)[1] == _kernels_py.furthest_schedule(reqs, keys, k)[1]


@compiled
@given(seq_st, st.integers(1, 6))
def test_lru_schedule_parity(reqs, k):
    from mts_oracle import _ckernels

    c, p = _ckernels.lru_schedule(reqs, k), _kernels_py.lru_schedule(reqs, k)
    assert list(c[0]) == list(p[0]) and c[1] == p[1]


@compiled
@given(seq_st, st.sampled_from([0, 1]))
def test_pleco_parity(reqs, lag):
    from mts_oracle import _ckernels

    np.testing.assert_allclose(
        _ckernels.pleco_predictions(reqs, lag), _kernels_py.pleco_predictions(reqs, lag), rtol=1e-12
    )


@compiled
def test_batch_parity():
    from mts_oracle import _ckernels

    seqs = np.random.default_rng(0).integers(0, 6, size=(500, 12))
    for k in (1, 2, 3):
        assert list(_ckernels.belady_faults_batch(seqs, k)) == list(_kernels_py.belady_faults_batch(seqs, k))


def test_pure_fallback_selected_by_env():
    env = dict(os.environ, MTS_ORACLE_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "from mts_oracle import kernels; print(kernels.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


def test_next_arrivals():
    assert list(kernels.next_arrivals([0, 1, 0])) == [3, 4, 4]
    assert list(kernels.next_arrivals([0, 1, 2])) == [4, 4, 4]
    assert list(kernels.next_arrivals([0, 0])) == [2, 3]
