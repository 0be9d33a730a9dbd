"""Slice profiles, request sampling, and session dynamics."""

import numpy as np
import pytest

from oranplace.traffic import (
    DEFAULT_SLICE_PROFILES,
    SessionConfig,
    SliceProfile,
    SliceType,
    advance_sessions,
    initial_requests,
    sample_request,
)


def test_default_profiles():
    embb = DEFAULT_SLICE_PROFILES[SliceType.EMBB]
    mmtc = DEFAULT_SLICE_PROFILES[SliceType.MMTC]
    urllc = DEFAULT_SLICE_PROFILES[SliceType.URLLC]
    assert embb.load_mbps == (250.0, 300.0) and embb.latency_ms == (15.0, 20.0)
    assert mmtc.load_mbps == (150.0, 200.0) and mmtc.latency_ms == (180.0, 200.0)
    assert urllc.load_mbps == (20.0, 40.0) and urllc.latency_ms == (2.0, 4.0)


def test_sample_request_within_ranges():
    rng = np.random.default_rng(0)
    for _ in range(200):
        q = sample_request(3, SliceType.URLLC, rng)
        assert q.rh == 3 and q.slice is SliceType.URLLC
        assert 20.0 <= q.load_mbps <= 40.0
        assert 2.0 <= q.latency_ms <= 4.0


def test_sampling_is_deterministic():
    a = sample_request(0, SliceType.EMBB, np.random.default_rng(7))
    b = sample_request(0, SliceType.EMBB, np.random.default_rng(7))
    assert a == b


def test_initial_requests_order():
    reqs = initial_requests(5, SessionConfig(), np.random.default_rng(1))
    assert [q.rh for q in reqs] == list(range(5))


def test_slice_mix_is_respected():
    cfg = SessionConfig(slice_mix={SliceType.EMBB: 1.0, SliceType.MMTC: 0.0, SliceType.URLLC: 0.0})
    reqs = initial_requests(20, cfg, np.random.default_rng(2))
    assert all(q.slice is SliceType.EMBB for q in reqs)


def test_advance_keeps_sessions_at_zero_release():
    rng = np.random.default_rng(3)
    cfg = SessionConfig(release_ratio=0.0)
    reqs = initial_requests(4, cfg, rng)
    assert advance_sessions(reqs, cfg, rng) == reqs


def test_advance_resamples_all_at_full_release():
    rng = np.random.default_rng(4)
    cfg = SessionConfig(release_ratio=1.0)
    reqs = initial_requests(4, cfg, rng)
    nxt = advance_sessions(reqs, cfg, rng)
    assert [q.rh for q in nxt] == [0, 1, 2, 3]
    assert all(a.load_mbps != b.load_mbps for a, b in zip(reqs, nxt))


def test_advance_release_fraction_is_about_half():
    rng = np.random.default_rng(5)
    cfg = SessionConfig()
    reqs = initial_requests(8, cfg, rng)
    changed = kept = 0
    for _ in range(1000):
        nxt = advance_sessions(reqs, cfg, rng)
        for a, b in zip(reqs, nxt):
            if a is b:
                kept += 1
            else:
                changed += 1
        reqs = nxt
    frac = changed / (changed + kept)
    assert 0.45 < frac < 0.55


def test_advance_rejects_misordered_input():
    rng = np.random.default_rng(6)
    reqs = initial_requests(3, SessionConfig(), rng)
    with pytest.raises(ValueError, match="one request per RH"):
        advance_sessions(list(reversed(reqs)), SessionConfig(), rng)


def test_session_config_validation():
    with pytest.raises(ValueError, match="release_ratio"):
        SessionConfig(release_ratio=1.2).validate()
    with pytest.raises(ValueError, match="episode_length"):
        SessionConfig(episode_length=0).validate()
    with pytest.raises(ValueError, match="every slice type"):
        SessionConfig(slice_mix={SliceType.EMBB: 1.0}).validate()
    bad = {SliceType.EMBB: 0.5, SliceType.MMTC: 0.2, SliceType.URLLC: 0.2}
    with pytest.raises(ValueError, match="sum to 1"):
        SessionConfig(slice_mix=bad).validate()


def test_profile_validation():
    with pytest.raises(ValueError, match="load_mbps"):
        SliceProfile((10.0, 5.0), (1.0, 2.0)).validate()
