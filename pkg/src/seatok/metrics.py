"""Encoding-efficiency metrics: per-language compression ratios and token stats.

The headline number per language is the mean over sentence pairs of
len(subject tokens of the language text) / len(baseline tokens of the English
equivalent). The totals-based ratio (sum over sums) is reported alongside for
transparency; the two differ whenever pair lengths vary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .vocab import TOKEN_BYTE_FALLBACK, Vocabulary, tokenize


class MetricsError(ValueError):
    pass


@dataclass
class ParallelPair:
    lang_text: str
    english_text: str
    lang: str


@dataclass
class ParallelCorpus:
    pairs: list[ParallelPair]

    def __post_init__(self):
        for i, p in enumerate(self.pairs):
            if not p.lang_text or not p.english_text:
                raise MetricsError(f"pair {i}: both sides must be non-empty")
            if not p.lang:
                raise MetricsError(f"pair {i}: missing language code")


def load_parallel_corpus(path) -> ParallelCorpus:
    pairs: list[ParallelPair] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise MetricsError(f"{path}:{lineno}: {e}") from e
            for key in ("lang", "text", "english"):
                if key not in obj:
                    raise MetricsError(f"{path}:{lineno}: missing field {key!r}")
            pairs.append(ParallelPair(obj["text"], obj["english"], obj["lang"]))
    return ParallelCorpus(pairs)


@dataclass
class LanguageCompression:
    mean_ratio: float
    total_ratio: float
    lang_tokens: int
    baseline_tokens: int
    pair_count: int
    skipped: int


@dataclass
class CompressionReport:
    per_language: dict[str, LanguageCompression] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)


def compression_ratio(subject: Vocabulary, baseline: Vocabulary,
                      corpus: ParallelCorpus) -> CompressionReport:
    """Per-language mean of per-pair token-count ratios against the baseline.

    Pairs whose English side encodes to zero tokens are skipped; a language
    whose every pair is skipped lands in the report's errors map.
    """
    if not corpus.pairs:
        raise MetricsError("parallel corpus is empty")
    acc: dict[str, dict] = {}
    for p in corpus.pairs:
        a = acc.setdefault(p.lang, {"ratios": [], "lang": 0, "base": 0, "skipped": 0})
        n_lang = len(tokenize(subject, p.lang_text))
        n_base = len(tokenize(baseline, p.english_text))
        if n_base == 0:
            a["skipped"] += 1
            continue
        a["ratios"].append(n_lang / n_base)
        a["lang"] += n_lang
        a["base"] += n_base
    report = CompressionReport()
    for lang in acc:
        a = acc[lang]
        if not a["ratios"]:
            report.errors[lang] = "all pairs skipped (baseline encoded to zero tokens)"
            continue
        report.per_language[lang] = LanguageCompression(
            mean_ratio=sum(a["ratios"]) / len(a["ratios"]),
            total_ratio=a["lang"] / a["base"],
            lang_tokens=a["lang"],
            baseline_tokens=a["base"],
            pair_count=len(a["ratios"]),
            skipped=a["skipped"],
        )
    return report


def report_to_obj(report: CompressionReport) -> dict:
    return {
        "per_language": {
            lang: {
                "mean_ratio": lc.mean_ratio,
                "total_ratio": lc.total_ratio,
                "lang_tokens": lc.lang_tokens,
                "baseline_tokens": lc.baseline_tokens,
                "pair_count": lc.pair_count,
                "skipped": lc.skipped,
            }
            for lang, lc in sorted(report.per_language.items())
        },
        "errors": dict(sorted(report.errors.items())),
    }


def save_compression_report(report: CompressionReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(report_to_obj(report), f, ensure_ascii=False, indent=2)
        f.write("\n")


def format_table(report: CompressionReport) -> str:
    """Aligned plain-text view: language rows, ratio columns."""
    header = ("lang", "mean_ratio", "total_ratio", "pairs", "skipped")
    rows = [header]
    for lang, lc in sorted(report.per_language.items()):
        rows.append((lang, f"{lc.mean_ratio:.2f}", f"{lc.total_ratio:.2f}",
                     str(lc.pair_count), str(lc.skipped)))
    for lang, msg in sorted(report.errors.items()):
        rows.append((lang, "error", msg, "", ""))
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
             for row in rows]
    return "\n".join(lines) + "\n"


@dataclass
class TokenStats:
    docs: int
    tokens: int
    chars: int
    fallback_tokens: int

    @property
    def tokens_per_char(self) -> float:
        return self.tokens / self.chars if self.chars else 0.0

    @property
    def byte_fallback_fraction(self) -> float:
        return self.fallback_tokens / self.tokens if self.tokens else 0.0


def corpus_token_stats(tokenizer: Vocabulary, corpus) -> dict[str, TokenStats]:
    """Exact per-language token counts over a document corpus."""
    out: dict[str, TokenStats] = {}
    for doc in corpus:
        text = doc.content() if hasattr(doc, "content") else doc
        lang = getattr(doc, "lang", "unknown")
        ids = tokenize(tokenizer, text)
        fallback = sum(
            1 for i in ids if tokenizer.tokens[i].kind == TOKEN_BYTE_FALLBACK
        )
        st = out.get(lang)
        if st is None:
            out[lang] = TokenStats(1, len(ids), len(text), fallback)
        else:
            st.docs += 1
            st.tokens += len(ids)
            st.chars += len(text)
            st.fallback_tokens += fallback
    return out


def stats_to_obj(stats: dict[str, TokenStats]) -> dict:
    return {
        lang: {
            "docs": st.docs,
            "tokens": st.tokens,
            "tokens_per_char": st.tokens_per_char,
            "byte_fallback_fraction": st.byte_fallback_fraction,
        }
        for lang, st in sorted(stats.items())
    }
