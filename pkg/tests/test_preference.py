import sys

import pytest

from seatok import (
    AlwaysFirstJudge,
    JudgeError,
    LexicographicJudge,
    LongerWinsJudge,
    SubprocessJudge,
    build_preference_dataset,
    export_dpo,
    judge_pair,
    load_dpo,
    load_records,
)
from seatok.preference import save_dropped, save_records


class CountingJudge:
    judge_id = "mock:counting"
    criteria = "count calls"

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    def judge(self, prompt, first, second):
        self.calls += 1
        return self.inner.judge(prompt, first, second)


PAIRS = [
    ("q1", "short", "a longer response"),
    ("q2", "another long answer", "tiny"),
    ("q3", "same", "same"),
    ("q4", "abcde", "vwxyz"),  # equal lengths, different content
]


def test_longer_wins_keeps_all_non_ties():
    records, dropped = build_preference_dataset(PAIRS, LongerWinsJudge())
    assert len(records) + len(dropped) == len(PAIRS)
    assert [r.prompt for r in records] == ["q1", "q2"]
    for r in records:
        assert len(r.chosen) > len(r.rejected)
    assert sorted(d.reason for d in dropped) == ["tie", "tie"]


def test_always_first_judge_emits_nothing():
    records, dropped = build_preference_dataset(PAIRS, AlwaysFirstJudge())
    assert records == []
    reasons = {d.prompt: d.reason for d in dropped}
    assert reasons["q1"] == "inconsistent"
    assert reasons["q3"] == "tie"  # identical pair short-circuits


def test_identical_pair_never_queries_the_judge():
    judge = CountingJudge(LongerWinsJudge())
    records, dropped = build_preference_dataset([("q", "x", "x")], judge)
    assert judge.calls == 0
    assert dropped[0].reason == "tie"


def test_two_queries_per_judged_pair():
    judge = CountingJudge(LongerWinsJudge())
    build_preference_dataset([("q", "aa", "b")], judge)
    assert judge.calls == 2


def test_lexicographic_judge_consistent():
    records, dropped = build_preference_dataset([("q", "b", "a")], LexicographicJudge())
    assert len(records) == 1
    assert records[0].chosen == "a"
    assert records[0].forward_verdict == "second"
    assert records[0].reverse_verdict == "first"


class FailingJudge:
    judge_id = "mock:failing"
    criteria = ""

    def judge(self, prompt, first, second):
        raise JudgeError("boom", payload="raw")


class GarbageJudge:
    judge_id = "mock:garbage"
    criteria = ""

    def judge(self, prompt, first, second):
        return "banana"


def test_judge_errors_become_dropped_reason():
    records, dropped = build_preference_dataset([("q", "a", "bb")], FailingJudge())
    assert records == []
    assert dropped[0].reason == "judge_error"
    assert "boom" in dropped[0].detail


def test_unknown_verdict_is_protocol_error():
    with pytest.raises(JudgeError, match="banana"):
        judge_pair(GarbageJudge(), "q", "a", "bb")
    records, dropped = build_preference_dataset([("q", "a", "bb")], GarbageJudge())
    assert dropped[0].reason == "judge_error"


def test_empty_response_rejected():
    with pytest.raises(JudgeError, match="non-empty"):
        judge_pair(LongerWinsJudge(), "q", "", "x")


def test_parallel_matches_sequential():
    seq = build_preference_dataset(PAIRS, LongerWinsJudge())
    par = build_preference_dataset(PAIRS, LongerWinsJudge(), max_workers=4)
    assert seq == par


def test_order_preserved():
    records, dropped = build_preference_dataset(PAIRS, LongerWinsJudge())
    assert [d.index for d in dropped] == sorted(d.index for d in dropped)


def test_export_dpo_round_trip(tmp_path):
    records, _ = build_preference_dataset(PAIRS, LongerWinsJudge())
    path = tmp_path / "dpo.jsonl"
    export_dpo(records, path)
    loaded = load_dpo(path)
    assert loaded == [
        {"prompt": r.prompt, "chosen": r.chosen, "rejected": r.rejected}
        for r in records
    ]


def test_export_empty(tmp_path):
    path = tmp_path / "dpo.jsonl"
    export_dpo([], path)
    assert path.read_bytes() == b""
    assert load_dpo(path) == []


def test_records_round_trip_and_rerun_identical(tmp_path):
    records, dropped = build_preference_dataset(PAIRS, LongerWinsJudge(), seed=1)
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    save_records(records, a)
    records2, dropped2 = build_preference_dataset(PAIRS, LongerWinsJudge(), seed=1)
    save_records(records2, b)
    assert a.read_bytes() == b.read_bytes()
    assert load_records(a) == records
    save_dropped(dropped, a)
    save_dropped(dropped2, b)
    assert a.read_bytes() == b.read_bytes()


_LONGER_CHILD = (
    "import sys, json\n"
    "for line in sys.stdin:\n"
    "    q = json.loads(line)\n"
    "    a, b = q['first'], q['second']\n"
    "    v = 'first' if len(a) > len(b) else 'second' if len(b) > len(a) else 'tie'\n"
    "    print(json.dumps({'verdict': v}), flush=True)\n"
)


def test_subprocess_judge_end_to_end():
    with SubprocessJudge([sys.executable, "-c", _LONGER_CHILD]) as judge:
        records, dropped = build_preference_dataset(PAIRS, judge)
    assert [r.prompt for r in records] == ["q1", "q2"]
    assert records[0].judge_id.startswith("subprocess:")


def test_subprocess_judge_malformed_reply():
    child = "import sys\nsys.stdin.readline()\nprint('nope', flush=True)\n"
    with SubprocessJudge([sys.executable, "-c", child]) as judge:
        with pytest.raises(JudgeError, match="malformed"):
            judge.judge("q", "a", "bb")


def test_subprocess_judge_timeout():
    child = "import time,sys\nsys.stdin.readline()\ntime.sleep(5)\n"
    with SubprocessJudge([sys.executable, "-c", child], timeout=0.2) as judge:
        with pytest.raises(JudgeError, match="timed out"):
            judge.judge("q", "a", "bb")


def test_subprocess_judge_queries_carry_criteria():
    child = (
        "import sys, json\n"
        "for line in sys.stdin:\n"
        "    q = json.loads(line)\n"
        "    v = 'first' if q['criteria'] == 'be kind' else 'tie'\n"
        "    print(json.dumps({'verdict': v}), flush=True)\n"
    )
    with SubprocessJudge([sys.executable, "-c", child], criteria="be kind") as judge:
        assert judge.judge("q", "a", "b") == "first"
