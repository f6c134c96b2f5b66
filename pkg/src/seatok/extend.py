"""Vocabulary extension by exhaustive pair merging against a target vocabulary.

The driver tokenizes each document with a working vocabulary that grows as
candidates are discovered, merges adjacent pieces whenever their concatenation
exists in the target vocabulary, counts candidate occurrences, and finally
prunes candidates below a frequency threshold. Corpus order is semantically
significant: later documents tokenize directly to earlier discoveries.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field

from .vocab import (
    GreedyMatcher,
    Vocabulary,
    append_extension,
    byte_token_text,
    TOKEN_NORMAL,
)


class ExtendError(ValueError):
    pass


@dataclass
class MergeResult:
    merged: list[str]
    new_tokens: list[str]  # duplicate-free, in first-merge order
    merge_count: int


def exhaustive_merge(current_vocab, target_vocab, seq) -> MergeResult:
    """Merge adjacent pieces of `seq` whenever their concatenation is a target token.

    Scans pairs left to right; each merge conceptually restarts the scan from
    the beginning, and the loop ends only when a full pass performs no merge.
    Merging a pair can only create one new mergeable pair, at the position
    just before it, so the implementation resumes there instead of at zero;
    the leftmost matching pair is still always the one merged, which keeps the
    merge sequence identical to the restart-from-zero reading.

    `current_vocab` is the vocabulary the pieces came from; membership tests
    use only `target_vocab` (a Vocabulary or a set of token texts).
    """
    del current_vocab  # provenance of seq; merging consults the target only
    target = target_vocab.index if isinstance(target_vocab, Vocabulary) else target_vocab
    out = list(seq)
    new_tokens: list[str] = []
    seen: set[str] = set()
    merges = 0
    p = 0
    while p + 1 < len(out):
        merged = out[p] + out[p + 1]
        if merged in target:
            out[p : p + 2] = [merged]
            merges += 1
            if merged not in seen:
                seen.add(merged)
                new_tokens.append(merged)
            if p:
                p -= 1
        else:
            p += 1
    return MergeResult(out, new_tokens, merges)


@dataclass
class FrequencyTable:
    """Occurrence counts for extension candidates; entries exist only once seen."""

    counts: dict[str, int] = field(default_factory=dict)
    min_freq: int = 1

    def add_occurrences(self, seq, candidates: set[str]) -> None:
        for piece in seq:
            if piece in candidates:
                self.counts[piece] = self.counts.get(piece, 0) + 1

    def get(self, token: str) -> int:
        return self.counts.get(token, 0)


@dataclass
class ExtensionReport:
    candidates: list[str]        # every discovered candidate, first-discovery order
    kept: list[str]
    pruned: list[str]
    frequencies: FrequencyTable
    new_per_doc: list[list[str]]
    merges_per_doc: list[int]
    final_vocab: Vocabulary


def _doc_text(doc) -> str:
    return doc.text if hasattr(doc, "text") else doc


def _segment_to_texts(matcher: GreedyMatcher, text: str) -> list[str]:
    # Working-vocabulary tokenization, expressed as token texts: unmatched
    # characters become their byte-fallback surface forms.
    pieces: list[str] = []
    for piece, matched in matcher.segment(text):
        if matched:
            pieces.append(piece)
        else:
            pieces.extend(byte_token_text(b) for b in piece.encode("utf-8"))
    return pieces


def vocab_extend(base_vocab: Vocabulary, target_vocab: Vocabulary, corpus,
                 min_freq: int) -> ExtensionReport:
    """Grow `base_vocab` with target-vocabulary tokens observed in `corpus`.

    Documents are processed in order. Each one is tokenized with the current
    working vocabulary, exhaustively merged against the target, and every
    candidate occurrence in the merged sequence counts toward its frequency.
    Candidates below `min_freq` are pruned; survivors are appended after the
    base in first-discovery order.
    """
    if min_freq < 1:
        raise ExtendError(f"min_freq must be >= 1, got {min_freq}")
    if base_vocab.marker != target_vocab.marker:
        raise ExtendError(
            f"marker mismatch: base uses {base_vocab.marker!r}, "
            f"target uses {target_vocab.marker!r}"
        )

    matcher = GreedyMatcher(
        (t.text for t in base_vocab.tokens if t.kind == TOKEN_NORMAL), base_vocab.marker
    )
    base_texts = set(base_vocab.index)
    candidates: list[str] = []
    candidate_set: set[str] = set()
    freq = FrequencyTable(min_freq=min_freq)
    new_per_doc: list[list[str]] = []
    merges_per_doc: list[int] = []

    for doc in corpus:
        seq = _segment_to_texts(matcher, _doc_text(doc))
        result = exhaustive_merge(base_vocab, target_vocab, seq)
        new_per_doc.append(result.new_tokens)
        merges_per_doc.append(result.merge_count)
        for tok in result.new_tokens:
            if tok not in candidate_set:
                candidate_set.add(tok)
                candidates.append(tok)
                if tok not in base_texts:
                    matcher.add(tok)
        freq.add_occurrences(result.merged, candidate_set)

    # A candidate can be consumed by a later merge in the same document and
    # end up with no occurrence entry at all; it prunes like any rare token.
    kept = [c for c in candidates if freq.get(c) >= min_freq]
    pruned = [c for c in candidates if freq.get(c) < min_freq]
    extension = [c for c in kept if c not in base_texts]
    final_vocab = append_extension(base_vocab, extension)
    return ExtensionReport(
        candidates=candidates,
        kept=kept,
        pruned=pruned,
        frequencies=freq,
        new_per_doc=new_per_doc,
        merges_per_doc=merges_per_doc,
        final_vocab=final_vocab,
    )


def prune_candidates(candidates, freq: FrequencyTable, min_freq: int):
    """Split candidates into (kept, pruned) by the frequency threshold."""
    kept, pruned = [], []
    for c in candidates:
        if c not in freq.counts:
            raise ExtendError(f"candidate has no frequency entry: {c!r}")
        (kept if freq.counts[c] >= min_freq else pruned).append(c)
    return kept, pruned


@dataclass
class FilterConfig:
    max_token_chars: int | None = None
    require_single_script: bool = False
    forbid_digits: bool = False
    forbid_punctuation: bool = False


def _char_script(ch: str) -> str:
    cat = unicodedata.category(ch)
    if cat.startswith(("P", "S", "Z", "N")):
        return "common"
    if cat in ("Mn", "Mc", "Me"):
        return "inherited"
    try:
        name = unicodedata.name(ch)
    except ValueError:
        return "unknown"
    return name.split()[0]


def quality_filter(candidates, rules: FilterConfig, marker: str = "▁"):
    """Apply surface-quality predicates; returns (kept, rejected_with_rule).

    The marker character is exempt from every per-character rule. Script
    purity treats punctuation, symbols, digits, and combining marks as
    script-neutral.
    """
    kept: list[str] = []
    rejected: dict[str, str] = {}
    for tok in candidates:
        body = tok.replace(marker, "")
        rule = None
        if rules.max_token_chars is not None and len(tok) > rules.max_token_chars:
            rule = "max_length"
        elif rules.require_single_script:
            scripts = {_char_script(c) for c in body} - {"common", "inherited"}
            if len(scripts) > 1:
                rule = "script_purity"
        if rule is None and rules.forbid_digits:
            if any(unicodedata.category(c).startswith("N") for c in body):
                rule = "digits"
        if rule is None and rules.forbid_punctuation:
            if any(unicodedata.category(c).startswith("P") for c in body):
                rule = "punctuation"
        if rule is None:
            kept.append(tok)
        else:
            rejected[tok] = rule
    return kept, rejected


def save_frequencies(freq: FrequencyTable, path) -> None:
    """Write `token<TAB>count` lines, descending count then token text."""
    rows = sorted(freq.counts.items(), key=lambda kv: (-kv[1], kv[0]))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for token, count in rows:
            if "\n" in token or "\t" in token:
                raise ExtendError(f"token not representable in TSV: {token!r}")
            f.write(f"{token}\t{count}\n")


def load_frequencies(path, min_freq: int = 1) -> FrequencyTable:
    counts: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            token, _, count = line.rpartition("\t")
            counts[token] = int(count)
    return FrequencyTable(counts=counts, min_freq=min_freq)


def save_report(report: ExtensionReport, path) -> None:
    doc = {
        "base_size": report.final_vocab.base_size,
        "final_size": len(report.final_vocab),
        "min_freq": report.frequencies.min_freq,
        "candidates": report.candidates,
        "kept": report.kept,
        "pruned": report.pruned,
        "frequencies": {c: report.frequencies.get(c) for c in report.candidates},
        "new_per_doc": report.new_per_doc,
        "merges_per_doc": report.merges_per_doc,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(doc, f, ensure_ascii=False, indent=2)
        f.write("\n")
