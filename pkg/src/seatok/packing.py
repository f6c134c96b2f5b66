"""Document packing into fixed-length training sequences with loss masks.

Documents are tokenized, split into chunks no longer than max_len - 1, and
greedily packed left to right; every chunk is followed by one separator token
so document boundaries are recoverable from the ids alone. Masks carry the
loss discipline: pads are 0, sft prompt positions are 0, everything else
(content and separators, including the separator closing an sft response)
is 1.
"""

from __future__ import annotations

import json
import random
import struct
from dataclasses import dataclass

from .corpus import KIND_SFT
from .vocab import TOKEN_SPECIAL, Vocabulary, tokenize


class PackError(ValueError):
    pass


@dataclass
class PackedSequence:
    ids: list[int]
    mask: list[int]
    boundaries: list[tuple[int, int, int]]  # (start, end exclusive, doc id)


def _check_special(vocab: Vocabulary, token_id: int, role: str) -> None:
    if not isinstance(token_id, int) or not 0 <= token_id < len(vocab):
        raise PackError(f"{role} id {token_id} out of range")
    if vocab.tokens[token_id].kind != TOKEN_SPECIAL:
        raise PackError(f"{role} id {token_id} is not a special token")


def _encode_doc(doc, vocab: Vocabulary) -> tuple[list[int], list[int]]:
    if isinstance(doc, str):
        ids = tokenize(vocab, doc)
        return ids, [1] * len(ids)
    if doc.kind == KIND_SFT:
        prompt_ids = tokenize(vocab, doc.prompt)
        response_ids = tokenize(vocab, doc.response)
        return prompt_ids + response_ids, [0] * len(prompt_ids) + [1] * len(response_ids)
    ids = tokenize(vocab, doc.text)
    return ids, [1] * len(ids)


def _pack_encoded(encoded, max_len: int, sep_id: int, pad_id: int) -> list[PackedSequence]:
    # encoded: iterable of (doc_id, ids, mask); chunks of one document share
    # its doc id across sequences.
    sequences: list[PackedSequence] = []
    cur_ids: list[int] = []
    cur_mask: list[int] = []
    cur_bounds: list[tuple[int, int, int]] = []
    chunk_cap = max_len - 1

    def flush():
        nonlocal cur_ids, cur_mask, cur_bounds
        if not cur_ids:
            return
        pad = max_len - len(cur_ids)
        sequences.append(PackedSequence(
            cur_ids + [pad_id] * pad, cur_mask + [0] * pad, cur_bounds
        ))
        cur_ids, cur_mask, cur_bounds = [], [], []

    for doc_id, ids, mask in encoded:
        for off in range(0, len(ids), chunk_cap):
            chunk = ids[off : off + chunk_cap]
            chunk_mask = mask[off : off + chunk_cap]
            if len(cur_ids) + len(chunk) + 1 > max_len:
                flush()
            start = len(cur_ids)
            cur_bounds.append((start, start + len(chunk), doc_id))
            cur_ids.extend(chunk)
            cur_ids.append(sep_id)
            cur_mask.extend(chunk_mask)
            cur_mask.append(1)
    flush()
    return sequences


def pack_documents(docs, tokenizer: Vocabulary, max_len: int, sep_id: int,
                   pad_id: int) -> list[PackedSequence]:
    """Greedily pack tokenized documents into sequences of exactly max_len."""
    if max_len < 2:
        raise PackError(f"max_len must be >= 2 (one token plus separator), got {max_len}")
    _check_special(tokenizer, sep_id, "separator")
    _check_special(tokenizer, pad_id, "pad")

    def encoded():
        for doc_id, doc in enumerate(docs):
            ids, mask = _encode_doc(doc, tokenizer)
            if ids:
                yield doc_id, ids, mask

    return _pack_encoded(encoded(), max_len, sep_id, pad_id)


def pack_hybrid(pretrain_docs, sft_docs, mix_ratio: float, tokenizer: Vocabulary,
                max_len: int, seed: int, sep_id: int, pad_id: int) -> list[PackedSequence]:
    """Pack a seeded Bernoulli interleave of pretraining and sft documents.

    Each position draws sft with probability mix_ratio. Ratios 0 and 1 use
    one source exclusively; otherwise, when a source runs out, the other is
    drained so no document is lost. Doc ids number the interleaved order.
    """
    if not 0.0 <= mix_ratio <= 1.0:
        raise PackError(f"mix_ratio must be in [0,1], got {mix_ratio}")
    pretrain = list(pretrain_docs)
    sft = list(sft_docs)
    if mix_ratio == 0.0:
        interleaved = pretrain
    elif mix_ratio == 1.0:
        interleaved = sft
    else:
        rng = random.Random(seed)
        interleaved = []
        pi = si = 0
        while pi < len(pretrain) and si < len(sft):
            if rng.random() < mix_ratio:
                interleaved.append(sft[si])
                si += 1
            else:
                interleaved.append(pretrain[pi])
                pi += 1
        interleaved.extend(pretrain[pi:])
        interleaved.extend(sft[si:])
    return pack_documents(interleaved, tokenizer, max_len, sep_id, pad_id)


def save_packed_jsonl(sequences, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for seq in sequences:
            obj = {"ids": seq.ids, "mask": seq.mask,
                   "boundaries": [list(b) for b in seq.boundaries]}
            f.write(json.dumps(obj, separators=(",", ":")))
            f.write("\n")


def load_packed_jsonl(path) -> list[PackedSequence]:
    out: list[PackedSequence] = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            out.append(PackedSequence(
                obj["ids"], obj["mask"], [tuple(b) for b in obj["boundaries"]]
            ))
    return out


def save_packed_binary(sequences, path) -> None:
    """Flat id stream: per sequence, a little-endian u32 count then the ids."""
    with open(path, "wb") as f:
        for seq in sequences:
            f.write(struct.pack("<I", len(seq.ids)))
            f.write(struct.pack(f"<{len(seq.ids)}I", *seq.ids))


def load_packed_binary(path) -> list[list[int]]:
    out: list[list[int]] = []
    with open(path, "rb") as f:
        while True:
            head = f.read(4)
            if not head:
                return out
            if len(head) != 4:
                raise PackError("truncated record header")
            (n,) = struct.unpack("<I", head)
            body = f.read(4 * n)
            if len(body) != 4 * n:
                raise PackError("truncated record body")
            out.append(list(struct.unpack(f"<{n}I", body)))
