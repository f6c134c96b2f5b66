import itertools
from collections import Counter

import pytest

from seatok import Phase, SampleError, SamplingSchedule, sample_stream
from seatok.sampling import schedule_from_obj


def _repeat_streams(names):
    return {name: itertools.repeat(name) for name in names}


def test_single_stream_emits_in_order():
    streams = {"a": iter([1, 2, 3])}
    schedule = SamplingSchedule([Phase({"a": 1.0}, 3)])
    assert list(sample_stream(streams, schedule, seed=0)) == [1, 2, 3]


def test_even_weights_are_roughly_even():
    schedule = SamplingSchedule([Phase({"a": 0.5, "b": 0.5}, 10_000)])
    counts = Counter(sample_stream(_repeat_streams("ab"), schedule, seed=42))
    assert 4800 <= counts["a"] <= 5200
    assert counts["a"] + counts["b"] == 10_000


def test_phase_boundaries_are_exact():
    schedule = SamplingSchedule([
        Phase({"a": 1.0, "b": 0.0}, 100),
        Phase({"b": 1.0}, 50),
    ])
    out = list(sample_stream(_repeat_streams("ab"), schedule, seed=1))
    assert out[:100] == ["a"] * 100
    assert out[100:] == ["b"] * 50


def test_exhausted_stream_renormalized_out():
    streams = {"a": iter(["a"] * 3), "b": itertools.repeat("b")}
    schedule = SamplingSchedule([Phase({"a": 0.5, "b": 0.5}, 50)])
    out = list(sample_stream(streams, schedule, seed=5))
    assert len(out) == 50
    assert out.count("a") == 3


def test_exhausted_stream_error_policy():
    streams = {"a": iter(["a"]), "b": itertools.repeat("b")}
    schedule = SamplingSchedule([Phase({"a": 1.0, "b": 0.0}, 5)])
    with pytest.raises(SampleError, match="exhausted"):
        list(sample_stream(streams, schedule, seed=0, on_exhausted="error"))


def test_all_streams_exhausted_raises():
    streams = {"a": iter(["a", "a"])}
    schedule = SamplingSchedule([Phase({"a": 1.0}, 10)])
    with pytest.raises(SampleError, match="all streams exhausted"):
        list(sample_stream(streams, schedule, seed=0))


def test_unknown_stream_in_phase():
    schedule = SamplingSchedule([Phase({"ghost": 1.0}, 1)])
    with pytest.raises(SampleError, match="unknown streams"):
        list(sample_stream({"a": iter([1])}, schedule, seed=0))


def test_schedule_validation():
    with pytest.raises(SampleError, match="no phases"):
        SamplingSchedule([])
    with pytest.raises(SampleError, match="length"):
        SamplingSchedule([Phase({"a": 1.0}, 0)])
    with pytest.raises(SampleError, match="negative"):
        SamplingSchedule([Phase({"a": -0.5, "b": 1.0}, 1)])
    with pytest.raises(SampleError, match="positive"):
        SamplingSchedule([Phase({"a": 0.0}, 1)])


def test_schedule_from_obj():
    schedule = schedule_from_obj(
        {"phases": [{"weights": {"a": 0.7, "b": 0.3}, "length": 10}]}
    )
    assert schedule.phases[0].weights == {"a": 0.7, "b": 0.3}
    assert schedule.phases[0].length == 10
    with pytest.raises(SampleError, match="malformed"):
        schedule_from_obj({"nope": []})


def test_same_seed_reproduces_same_stream():
    schedule = SamplingSchedule([Phase({"a": 0.6, "b": 0.4}, 200)])
    first = list(sample_stream(_repeat_streams("ab"), schedule, seed=9))
    second = list(sample_stream(_repeat_streams("ab"), schedule, seed=9))
    third = list(sample_stream(_repeat_streams("ab"), schedule, seed=10))
    assert first == second
    assert first != third


def test_bad_exhaustion_policy():
    schedule = SamplingSchedule([Phase({"a": 1.0}, 1)])
    with pytest.raises(SampleError, match="policy"):
        list(sample_stream({"a": iter([1])}, schedule, seed=0, on_exhausted="wat"))
