#!/usr/bin/env python3
"""Generate the deterministic test fixtures under tests/fixtures/.

The synthetic language is agglutinative on purpose: words are 2-3 syllables
over a small Thai-script alphabet, so a character-level tokenizer needs many
tokens per word while the extended tokenizer covers whole words. Expected
values (compression ratios, extension contents, frequencies) are computed
with the independent oracle implementations from tests/oracles.py and frozen
into expected.json; the test suite compares the production code against them.

Output is fully determined by SEED. Re-running must be a no-op diff.
"""

from __future__ import annotations

import json
import pathlib
import random
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))
sys.path.insert(0, str(ROOT / "src"))

from oracles import oracle_segment, oracle_token_count, oracle_vocab_extend  # noqa: E402
from seatok import Document, build_vocabulary, save_corpus, save_vocab  # noqa: E402

SEED = 20250811
MARKER = "▁"
MIN_FREQ = 2

FIXTURES = ROOT / "tests" / "fixtures"

# Two disjoint Thai letter sets; a syllable is one from each.
ONSETS = list("กขคงจ")      # ก ข ค ง จ
CODAS = list("นมรลอ")       # น ม ร ล อ
ALPHABET = ONSETS + CODAS

ENGLISH = ["the", "cat", "sat", "on", "mat", "dog", "ran", "far"]


def make_words(rng: random.Random) -> list[str]:
    words: list[str] = []
    while len(words) < len(ENGLISH):
        n_syllables = rng.choice([2, 2, 3])
        word = "".join(
            rng.choice(ONSETS) + rng.choice(CODAS) for _ in range(n_syllables)
        )
        # no word may be a prefix of another, or expectations get murky
        if any(w.startswith(word) or word.startswith(w) for w in words):
            continue
        words.append(word)
    return words


def make_sentences(rng: random.Random, words: list[str]) -> list[list[str]]:
    # every word leads exactly three sentences, so its unmarked form is
    # discovered and clears the frequency threshold
    sentences = []
    for lead in words:
        for _ in range(3):
            rest = [rng.choice(words) for _ in range(rng.randint(2, 4))]
            sentences.append([lead] + rest)
    rng.shuffle(sentences)
    return sentences


def prefixes(word: str) -> list[str]:
    return [word[:k] for k in range(2, len(word) + 1)]


def main() -> None:
    rng = random.Random(SEED)
    FIXTURES.mkdir(parents=True, exist_ok=True)

    words = make_words(rng)
    eng_of = dict(zip(words, ENGLISH))
    sentences = make_sentences(rng, words)

    base_texts = [MARKER] + ALPHABET
    target_texts: list[str] = []
    for w in words:
        for p in prefixes(MARKER + w) + prefixes(w):
            if p not in target_texts:
                target_texts.append(p)
    # a handful of target tokens the corpus never justifies keeping
    for w in words[:3]:
        decoy = w[::-1]
        if decoy not in target_texts and not any(x.startswith(decoy) for x in target_texts):
            target_texts.append(decoy)

    baseline_texts = [MARKER + e for e in ENGLISH] + list(ENGLISH)

    base = build_vocabulary(base_texts, specials=["<pad>", "<sep>"])
    target = build_vocabulary(target_texts, byte_fallback=False)
    baseline = build_vocabulary(baseline_texts, specials=["<pad>", "<sep>"])
    save_vocab(base, FIXTURES / "base_vocab.json")
    save_vocab(target, FIXTURES / "target_vocab.json")
    save_vocab(baseline, FIXTURES / "baseline_vocab.json")

    agg_texts = [" ".join(s) for s in sentences]
    eng_texts = [" ".join(eng_of[w] for w in s) for s in sentences]

    docs = [
        Document(text=t, lang="agg",
                 quality="high" if i % 3 == 0 else "standard")
        for i, t in enumerate(agg_texts)
    ]
    save_corpus(docs, FIXTURES / "corpus.jsonl")

    with open(FIXTURES / "parallel.jsonl", "w", encoding="utf-8", newline="\n") as f:
        for agg_text, eng_text in zip(agg_texts, eng_texts):
            f.write(json.dumps(
                {"lang": "agg", "text": agg_text, "english": eng_text},
                ensure_ascii=False,
            ) + "\n")

    # oracle-computed extension and ratios, frozen for the acceptance suite
    extension, candidates, freqs = oracle_vocab_extend(
        base_texts, set(target_texts), agg_texts, MIN_FREQ, MARKER
    )
    extended_texts = base_texts + extension

    def mean_ratio(subject_texts) -> float:
        ratios = [
            oracle_token_count(a, subject_texts, MARKER)
            / oracle_token_count(e, baseline_texts, MARKER)
            for a, e in zip(agg_texts, eng_texts)
        ]
        return sum(ratios) / len(ratios)

    before = mean_ratio(base_texts)
    after = mean_ratio(extended_texts)
    sample_segmentation = oracle_segment(agg_texts[0], extended_texts, MARKER)

    expected = {
        "min_freq": MIN_FREQ,
        "words": words,
        "before_mean_ratio": before,
        "after_mean_ratio": after,
        "extension_texts": extension,
        "candidates": candidates,
        "frequencies": {t: freqs.get(t, 0) for t in candidates},
        "first_doc_segmentation": sample_segmentation,
        "corpus_docs": len(agg_texts),
    }
    with open(FIXTURES / "expected.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(expected, f, ensure_ascii=False, indent=2)
        f.write("\n")

    # sft corpus: instruction-style pairs over the same vocabulary
    sft_docs = []
    for i in range(16):
        k = rng.randint(1, 3)
        prompt = " ".join(rng.choice(ENGLISH) for _ in range(rng.randint(2, 5)))
        response = " ".join(rng.choice(ENGLISH) for _ in range(rng.randint(2, 8)))
        sft_docs.append(Document(kind="sft", prompt=prompt, response=response,
                                 lang="eng", quality="high" if k == 1 else "standard"))
    save_corpus(sft_docs, FIXTURES / "sft.jsonl")

    # language-id seeds and a mixed corpus for the filter subcommand
    with open(FIXTURES / "langid_seeds.jsonl", "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps({"lang": "agg", "text": " ".join(agg_texts[:8])},
                           ensure_ascii=False) + "\n")
        f.write(json.dumps({"lang": "eng", "text": " ".join(eng_texts[:8])},
                           ensure_ascii=False) + "\n")
    mixed = []
    for i in range(10):
        if i % 2 == 0:
            mixed.append(Document(text=agg_texts[i], lang="unknown"))
        else:
            mixed.append(Document(text=eng_texts[i], lang="unknown"))
    save_corpus(mixed, FIXTURES / "mixed_corpus.jsonl")

    # per-language streams and a two-phase schedule for the sampler
    save_corpus([Document(text=t, lang="agg") for t in agg_texts],
                FIXTURES / "stream_agg.jsonl")
    save_corpus([Document(text=t, lang="eng") for t in eng_texts],
                FIXTURES / "stream_eng.jsonl")
    with open(FIXTURES / "schedule.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump({"phases": [
            {"weights": {"agg": 0.7, "eng": 0.3}, "length": 15},
            {"weights": {"agg": 1.0}, "length": 5},
        ]}, f, indent=2)
        f.write("\n")

    # preference pairs with deliberate ties
    with open(FIXTURES / "pairs.jsonl", "w", encoding="utf-8", newline="\n") as f:
        for i in range(10):
            prompt = f"explain {ENGLISH[i % len(ENGLISH)]}"
            if i % 5 == 4:
                first = second = "same answer"
            else:
                first = " ".join(rng.choice(ENGLISH) for _ in range(rng.randint(1, 6)))
                second = " ".join(rng.choice(ENGLISH) for _ in range(rng.randint(1, 6)))
            f.write(json.dumps({"prompt": prompt, "first": first, "second": second},
                               ensure_ascii=False) + "\n")

    print(f"words: {['/'.join((w, eng_of[w])) for w in words]}")
    print(f"before_mean_ratio: {before:.3f} (need >= 3.0)")
    print(f"after_mean_ratio:  {after:.3f} (need <= 1.5)")
    print(f"extension: {len(extension)} tokens, candidates: {len(candidates)}")
    assert before >= 3.0, "fixture construction failed the before-ratio bound"
    assert after <= 1.5, "fixture construction failed the after-ratio bound"


if __name__ == "__main__":
    main()
