"""Preference-pair dataset construction with order-swap consistency filtering.

A judge is queried on every response pair twice, once in each presentation
order. A pair survives only when the two verdicts pick the same underlying
response; position-dependent or tied judgments are dropped with a recorded
reason. This neutralizes position bias by construction.
"""

from __future__ import annotations

import json
import select
import subprocess
import threading
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

VERDICT_FIRST = "first"
VERDICT_SECOND = "second"
VERDICT_TIE = "tie"
_VERDICTS = (VERDICT_FIRST, VERDICT_SECOND, VERDICT_TIE)

DROP_INCONSISTENT = "inconsistent"
DROP_TIE = "tie"
DROP_JUDGE_ERROR = "judge_error"

DEFAULT_CRITERIA = "Prefer the response that is more helpful, correct, and complete."


class JudgeError(Exception):
    """Transport failure or protocol violation; carries the raw payload."""

    def __init__(self, message: str, payload: str = ""):
        super().__init__(message)
        self.payload = payload


@dataclass
class PreferenceRecord:
    prompt: str
    chosen: str
    rejected: str
    judge_id: str
    forward_verdict: str
    reverse_verdict: str


@dataclass
class DroppedPair:
    index: int
    prompt: str
    first: str
    second: str
    reason: str
    detail: str = ""


class LongerWinsJudge:
    """Order-invariant mock: longer response wins, equal lengths tie."""

    judge_id = "mock:longer-wins"

    def __init__(self, criteria: str = DEFAULT_CRITERIA):
        self.criteria = criteria

    def judge(self, prompt: str, first: str, second: str) -> str:
        if len(first) > len(second):
            return VERDICT_FIRST
        if len(second) > len(first):
            return VERDICT_SECOND
        return VERDICT_TIE


class LexicographicJudge:
    """Order-invariant mock: lexicographically smaller response wins."""

    judge_id = "mock:lexicographic"

    def __init__(self, criteria: str = DEFAULT_CRITERIA):
        self.criteria = criteria

    def judge(self, prompt: str, first: str, second: str) -> str:
        if first == second:
            return VERDICT_TIE
        return VERDICT_FIRST if first < second else VERDICT_SECOND


class AlwaysFirstJudge:
    """Purely position-biased mock; every pair it sees must be filtered out."""

    judge_id = "mock:always-first"

    def __init__(self, criteria: str = DEFAULT_CRITERIA):
        self.criteria = criteria

    def judge(self, prompt: str, first: str, second: str) -> str:
        return VERDICT_FIRST


class SubprocessJudge:
    """Judge behind a line protocol child process.

    One query per line on stdin: {"prompt","first","second","criteria"};
    one reply per line on stdout: {"verdict":"first"|"second"|"tie"}.
    Access is serialized; the child is a single conversation.
    """

    def __init__(self, argv: list[str], criteria: str = DEFAULT_CRITERIA,
                 timeout: float = 30.0):
        self.argv = argv
        self.criteria = criteria
        self.timeout = timeout
        self.judge_id = f"subprocess:{argv[0]}"
        self._lock = threading.Lock()
        self._proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            text=True, encoding="utf-8",
        )

    def judge(self, prompt: str, first: str, second: str) -> str:
        query = json.dumps(
            {"prompt": prompt, "first": first, "second": second,
             "criteria": self.criteria},
            ensure_ascii=False,
        )
        with self._lock:
            proc = self._proc
            if proc.poll() is not None:
                raise JudgeError(f"judge process exited with {proc.returncode}")
            try:
                proc.stdin.write(query + "\n")
                proc.stdin.flush()
            except (BrokenPipeError, OSError) as e:
                raise JudgeError(f"judge process unreachable: {e}") from e
            ready, _, _ = select.select([proc.stdout], [], [], self.timeout)
            if not ready:
                raise JudgeError(f"judge timed out after {self.timeout}s", payload=query)
            line = proc.stdout.readline()
        if not line:
            raise JudgeError("judge closed its output stream", payload=query)
        return _parse_verdict(line)

    def close(self) -> None:
        if self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=10)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class HttpJudge:
    """Judge behind a single-request/response JSON endpoint."""

    def __init__(self, url: str, criteria: str = DEFAULT_CRITERIA,
                 timeout: float = 30.0):
        self.url = url
        self.criteria = criteria
        self.timeout = timeout
        self.judge_id = f"http:{url}"

    def judge(self, prompt: str, first: str, second: str) -> str:
        body = json.dumps(
            {"prompt": prompt, "first": first, "second": second,
             "criteria": self.criteria},
            ensure_ascii=False,
        ).encode("utf-8")
        req = urllib.request.Request(
            self.url, data=body, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return _parse_verdict(resp.read().decode("utf-8"))
        except OSError as e:
            raise JudgeError(f"judge endpoint unreachable: {e}") from e


def _parse_verdict(raw: str) -> str:
    try:
        obj = json.loads(raw)
        verdict = obj["verdict"]
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise JudgeError(f"malformed judge reply: {e}", payload=raw) from e
    if verdict not in _VERDICTS:
        raise JudgeError(f"unknown verdict {verdict!r}", payload=raw)
    return verdict


def judge_pair(adapter, prompt: str, first: str, second: str) -> str:
    """Single-order query; the swap protocol lives in build_preference_dataset."""
    if not first or not second:
        raise JudgeError("responses must be non-empty")
    return _parse_check(adapter.judge(prompt, first, second))


def _parse_check(verdict: str) -> str:
    if verdict not in _VERDICTS:
        raise JudgeError(f"adapter produced unknown verdict {verdict!r}", payload=str(verdict))
    return verdict


def _judge_one(index, prompt, first, second, adapter):
    if first == second:
        return DroppedPair(index, prompt, first, second, DROP_TIE,
                           "identical responses")
    try:
        forward = judge_pair(adapter, prompt, first, second)
        reverse = judge_pair(adapter, prompt, second, first)
    except JudgeError as e:
        return DroppedPair(index, prompt, first, second, DROP_JUDGE_ERROR, str(e))
    if VERDICT_TIE in (forward, reverse):
        return DroppedPair(index, prompt, first, second, DROP_TIE,
                           f"verdicts {forward}/{reverse}")
    if forward == VERDICT_FIRST and reverse == VERDICT_SECOND:
        return PreferenceRecord(prompt, first, second, adapter.judge_id,
                                forward, reverse)
    if forward == VERDICT_SECOND and reverse == VERDICT_FIRST:
        return PreferenceRecord(prompt, second, first, adapter.judge_id,
                                forward, reverse)
    return DroppedPair(index, prompt, first, second, DROP_INCONSISTENT,
                       f"verdicts {forward}/{reverse}")


def build_preference_dataset(pairs, adapter, seed: int | None = None,
                             max_workers: int = 1):
    """Judge (prompt, a, b) pairs in both orders; keep only consistent wins.

    Returns (records, dropped) with input order preserved in both lists and
    len(records) + len(dropped) == len(pairs). Judging may run concurrently;
    the result is independent of scheduling. The seed is accepted for
    adapters with caller-supplied randomness and is unused by the built-ins.
    """
    del seed
    indexed = list(enumerate(pairs))
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(
                lambda item: _judge_one(item[0], *item[1], adapter), indexed
            ))
    else:
        results = [_judge_one(i, *pair, adapter) for i, pair in indexed]
    records = [r for r in results if isinstance(r, PreferenceRecord)]
    dropped = [r for r in results if isinstance(r, DroppedPair)]
    return records, dropped


def export_dpo(records, path) -> None:
    """Write {"prompt","chosen","rejected"} JSONL consumable by DPO trainers."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in records:
            f.write(json.dumps(
                {"prompt": r.prompt, "chosen": r.chosen, "rejected": r.rejected},
                ensure_ascii=False,
            ))
            f.write("\n")


def load_dpo(path) -> list[dict]:
    out: list[dict] = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def save_records(records, path) -> None:
    """Full record export including verdicts, for auditability."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in records:
            f.write(json.dumps(r.__dict__, ensure_ascii=False))
            f.write("\n")


def load_records(path) -> list[PreferenceRecord]:
    out: list[PreferenceRecord] = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(PreferenceRecord(**json.loads(line)))
    return out


def save_dropped(dropped, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for d in dropped:
            f.write(json.dumps(d.__dict__, ensure_ascii=False))
            f.write("\n")
