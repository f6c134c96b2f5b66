"""Character n-gram language identification and corpus filtering.

The built-in detector is the classic rank-profile method: each language gets
an ordered list of its most frequent character n-grams, and classification
picks the profile with the smallest out-of-place distance. External
classifiers plug in through a line-oriented JSON subprocess adapter.
"""

from __future__ import annotations

import json
import subprocess
from collections import Counter
from dataclasses import dataclass

PROFILE_FORMAT_VERSION = 1
DEFAULT_MAX_N = 3
DEFAULT_TOP_K = 300

UNKNOWN_LANG = "unknown"


class LangIdError(ValueError):
    pass


def _ngram_counts(text: str, max_n: int) -> Counter:
    # Whitespace runs collapse to single spaces and the text is padded, so
    # word-boundary grams are represented without depending on layout.
    normalized = " ".join(text.lower().split())
    if not normalized:
        return Counter()
    padded = f" {normalized} "
    counts: Counter = Counter()
    for n in range(1, max_n + 1):
        for i in range(len(padded) - n + 1):
            counts[padded[i : i + n]] += 1
    return counts


def _rank_profile(counts: Counter, top_k: int) -> dict[str, int]:
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
    return {gram: rank for rank, (gram, _) in enumerate(ranked)}


@dataclass
class LanguageProfile:
    lang: str
    ranks: dict[str, int]  # gram -> rank, 0 is most frequent
    top_k: int
    max_n: int


def train_profiles(seed_texts: dict[str, str], max_n: int = DEFAULT_MAX_N,
                   top_k: int = DEFAULT_TOP_K) -> dict[str, LanguageProfile]:
    """Build one rank profile per language from labeled seed text."""
    profiles: dict[str, LanguageProfile] = {}
    for lang, text in seed_texts.items():
        counts = _ngram_counts(text, max_n)
        if not counts:
            raise LangIdError(f"seed text for {lang!r} has no usable characters")
        profiles[lang] = LanguageProfile(lang, _rank_profile(counts, top_k), top_k, max_n)
    return profiles


def detect_language(text: str, profiles: dict[str, LanguageProfile]):
    """Best-matching language and a confidence in [0,1].

    Distance is the sum of rank displacements of the text's grams in each
    profile, with a max penalty for grams the profile lacks; confidence is
    one minus the normalized distance. Ties go to the lexicographically
    smallest language code. Empty or whitespace-only text is (unknown, 0.0).
    """
    if not profiles:
        raise LangIdError("no trained language profiles")
    first = next(iter(profiles.values()))
    doc_ranks = _rank_profile(_ngram_counts(text, first.max_n), first.top_k)
    if not doc_ranks:
        return UNKNOWN_LANG, 0.0
    best_lang, best_dist = None, None
    for lang in sorted(profiles):
        prof = profiles[lang]
        penalty = prof.top_k
        dist = sum(
            abs(rank - prof.ranks[gram]) if gram in prof.ranks else penalty
            for gram, rank in doc_ranks.items()
        )
        if best_dist is None or dist < best_dist:
            best_lang, best_dist = lang, dist
    max_dist = first.top_k * len(doc_ranks)
    confidence = 1.0 - best_dist / max_dist if max_dist else 0.0
    return best_lang, max(0.0, min(1.0, confidence))


def save_profiles(profiles: dict[str, LanguageProfile], path) -> None:
    if not profiles:
        raise LangIdError("no trained language profiles")
    first = next(iter(profiles.values()))
    doc = {
        "version": PROFILE_FORMAT_VERSION,
        "top_k": first.top_k,
        "max_n": first.max_n,
        # rank order is the list order
        "profiles": {
            lang: [g for g, _ in sorted(p.ranks.items(), key=lambda kv: kv[1])]
            for lang, p in sorted(profiles.items())
        },
    }
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(doc, f, ensure_ascii=False, indent=2)
        f.write("\n")


def load_profiles(path) -> dict[str, LanguageProfile]:
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    if not isinstance(doc, dict) or doc.get("version") != PROFILE_FORMAT_VERSION:
        raise LangIdError(f"unsupported profile file: {path}")
    top_k, max_n = doc["top_k"], doc["max_n"]
    return {
        lang: LanguageProfile(lang, {g: i for i, g in enumerate(grams)}, top_k, max_n)
        for lang, grams in doc["profiles"].items()
    }


class SubprocessLanguageDetector:
    """External classifier behind a line protocol: {"text":...} -> {"lang":...,"confidence":...}."""

    def __init__(self, argv: list[str]):
        self.argv = argv
        self._proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            text=True, encoding="utf-8",
        )

    def __call__(self, text: str):
        return self.detect(text)

    def detect(self, text: str):
        proc = self._proc
        if proc.poll() is not None:
            raise LangIdError(f"language detector exited with {proc.returncode}")
        proc.stdin.write(json.dumps({"text": text}, ensure_ascii=False) + "\n")
        proc.stdin.flush()
        line = proc.stdout.readline()
        if not line:
            raise LangIdError("language detector closed its output stream")
        try:
            obj = json.loads(line)
            return obj["lang"], float(obj["confidence"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise LangIdError(f"malformed detector reply: {line!r}") from e

    def close(self) -> None:
        if self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=10)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def filter_corpus(corpus, allowed: set[str], threshold: float, detector):
    """Keep documents whose detected language is allowed with enough confidence.

    `detector` is any callable text -> (lang, confidence). Returns the kept
    documents in input order and discard counts keyed by reason
    ("language" or "confidence").
    """
    if not 0.0 <= threshold <= 1.0:
        raise LangIdError(f"threshold must be in [0,1], got {threshold}")
    kept = []
    discarded = {"language": 0, "confidence": 0}
    for doc in corpus:
        text = doc.content() if hasattr(doc, "content") else doc
        lang, confidence = detector(text)
        if lang not in allowed:
            discarded["language"] += 1
        elif confidence < threshold:
            discarded["confidence"] += 1
        else:
            kept.append(doc)
    return kept, discarded
