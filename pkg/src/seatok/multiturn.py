"""Joining single-turn instruction examples into multi-turn conversations."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .vocab import Vocabulary, tokenize

TURN_USER = "<user>"
TURN_ASSISTANT = "<assistant>"


class MultiturnError(ValueError):
    pass


@dataclass
class Conversation:
    turns: list[tuple[str, str]]  # (prompt, response), in order
    lang: str = "unknown"


def _validate_distribution(turns_distribution: dict[int, float]) -> list[tuple[int, float]]:
    if not turns_distribution:
        raise MultiturnError("turns distribution is empty")
    items = sorted(turns_distribution.items())
    for k, p in items:
        if not isinstance(k, int) or k < 1:
            raise MultiturnError(f"turn count must be an integer >= 1, got {k!r}")
        if p < 0:
            raise MultiturnError(f"negative probability for k={k}")
    total = sum(p for _, p in items)
    if abs(total - 1.0) > 1e-9:
        raise MultiturnError(f"turn probabilities sum to {total}, expected 1")
    return items


def join_multiturn(sft_docs, turns_distribution: dict[int, float],
                   seed: int) -> list[Conversation]:
    """Group shuffled single-turn examples into conversations of sampled sizes.

    The turn count k is drawn per conversation; consecutive runs of k shuffled
    examples become one conversation, and whatever remains at the end forms a
    final shorter one.
    """
    items = _validate_distribution(turns_distribution)
    docs = list(sft_docs)
    rng = random.Random(seed)
    rng.shuffle(docs)
    out: list[Conversation] = []
    i = 0
    while i < len(docs):
        r = rng.random()
        acc = 0.0
        k = items[-1][0]
        for size, p in items:
            acc += p
            if r < acc:
                k = size
                break
        group = docs[i : i + k]
        out.append(Conversation(
            turns=[(d.prompt, d.response) for d in group],
            lang=group[0].lang,
        ))
        i += k
    return out


def render_conversation(conv: Conversation, user_marker: str = TURN_USER,
                        assistant_marker: str = TURN_ASSISTANT) -> str:
    """Plain-text serialization with turn markers, for inspection and export."""
    return "".join(
        f"{user_marker}{prompt}{assistant_marker}{response}"
        for prompt, response in conv.turns
    )


def encode_conversation(vocab: Vocabulary, conv: Conversation, user_id: int,
                        assistant_id: int) -> tuple[list[int], list[int]]:
    """Token ids with loss mask: markers and prompts 0, responses 1.

    Special tokens never match from raw text, so the turn structure is built
    at the id level rather than by tokenizing rendered text.
    """
    ids: list[int] = []
    mask: list[int] = []
    for prompt, response in conv.turns:
        prompt_ids = tokenize(vocab, prompt)
        response_ids = tokenize(vocab, response)
        ids.append(user_id)
        ids.extend(prompt_ids)
        ids.append(assistant_id)
        ids.extend(response_ids)
        mask.extend([0] * (len(prompt_ids) + 2))
        mask.extend([1] * len(response_ids))
    return ids, mask


def save_conversations(conversations, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for conv in conversations:
            obj = {"turns": [[p, r] for p, r in conv.turns], "lang": conv.lang}
            f.write(json.dumps(obj, ensure_ascii=False))
            f.write("\n")


def load_conversations(path) -> list[Conversation]:
    out: list[Conversation] = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            out.append(Conversation(
                turns=[tuple(t) for t in obj["turns"]],
                lang=obj.get("lang", "unknown"),
            ))
    return out
