"""Immutable subword vocabularies and greedy longest-match text <-> id conversion.

A vocabulary is an ordered token list with dense ids. Tokens come in three
kinds: ``normal`` pieces that participate in text matching, ``byte_fallback``
tokens with the reserved surface form ``<0xNN>`` that encode raw bytes, and
``special`` control tokens (pad, separators, turn markers) that are never
produced by encoding plain text.

Word boundaries use the sentencepiece-style marker convention: a space in the
input matches the marker character at the start of a token, and the marker in
a decoded normal token maps back to a space. A literal marker character in the
input (or a space no token covers) goes through byte fallback, which keeps
encode/decode a strict round trip for every valid Unicode string.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

DEFAULT_MARKER = "▁"  # LOWER FIVE EIGHTHS BLOCK, the usual word-boundary marker
VOCAB_FORMAT_VERSION = 1

_BYTE_TOKEN_RE = re.compile(r"<0x([0-9A-Fa-f]{2})>\Z")

TOKEN_NORMAL = "normal"
TOKEN_BYTE_FALLBACK = "byte_fallback"
TOKEN_SPECIAL = "special"


class VocabError(ValueError):
    """Base class for vocabulary construction and codec errors."""


class DuplicateTokenError(VocabError):
    def __init__(self, text: str):
        super().__init__(f"duplicate token text: {text!r}")
        self.text = text


class UnencodableTextError(VocabError):
    """Raised when byte fallback is disabled and a byte has no covering token."""

    def __init__(self, char: str, byte_offset: int):
        super().__init__(
            f"no token covers {char!r} at byte offset {byte_offset} "
            "and byte fallback is disabled"
        )
        self.char = char
        self.byte_offset = byte_offset


class InvalidTokenIdError(VocabError):
    def __init__(self, token_id: int, vocab_size: int):
        super().__init__(f"token id {token_id} out of range for vocabulary of size {vocab_size}")
        self.token_id = token_id


class VocabFormatError(VocabError):
    """Malformed or version-incompatible vocabulary file."""


def byte_token_text(byte: int) -> str:
    """Surface form of the byte-fallback token for a byte value 0..255."""
    return f"<0x{byte:02X}>"


def parse_byte_token(text: str) -> int | None:
    """Byte value if `text` is a byte-fallback surface form, else None."""
    m = _BYTE_TOKEN_RE.match(text)
    return int(m.group(1), 16) if m else None


@dataclass(frozen=True)
class Token:
    text: str
    kind: str = TOKEN_NORMAL


class GreedyMatcher:
    """Greedy longest-match segmenter over a growable set of normal-token texts.

    Matching happens on a view of the input where every space is replaced by
    the marker, so marker-initial tokens match at word starts. Literal marker
    characters in the input never match any token; spans containing them are
    excluded so they fall through to byte fallback.
    """

    def __init__(self, texts, marker: str):
        self.marker = marker
        self._by_len: dict[int, set[str]] = {}
        self._lengths: list[int] = []  # descending
        for t in texts:
            self.add(t)

    def add(self, text: str) -> None:
        n = len(text)
        bucket = self._by_len.get(n)
        if bucket is None:
            self._by_len[n] = {text}
            self._lengths = sorted(self._by_len, reverse=True)
        else:
            bucket.add(text)

    def segment(self, text: str) -> list[tuple[str, bool]]:
        """Split `text` into (piece, matched) pairs.

        Matched pieces are token texts (marker view); unmatched pieces are
        single original characters left for the caller to byte-encode.
        """
        if not text:
            return []
        marker = self.marker
        view = text.replace(" ", marker)
        n = len(text)
        # Spans crossing a literal marker can never match: the token would
        # need a marker there, which only spaces are allowed to satisfy.
        literal_positions = (
            [i for i, ch in enumerate(text) if ch == marker] if marker in text else []
        )
        literal_positions.append(n)
        next_literal = 0

        out: list[tuple[str, bool]] = []
        by_len = self._by_len
        i = 0
        while i < n:
            if text[i] == marker:
                out.append((marker, False))
                i += 1
                continue
            while literal_positions[next_literal] < i:
                next_literal += 1
            limit = literal_positions[next_literal] - i
            matched = False
            for length in self._lengths:
                if length > limit:
                    continue
                candidate = view[i : i + length]
                if candidate in by_len[length]:
                    out.append((candidate, True))
                    i += length
                    matched = True
                    break
            if not matched:
                out.append((text[i], False))
                i += 1
        return out


class Vocabulary:
    """Ordered token list with a dense text -> id index. Immutable once built."""

    def __init__(self, tokens: list[Token], base_size: int, marker: str,
                 byte_fallback_enabled: bool):
        index: dict[str, int] = {}
        for i, tok in enumerate(tokens):
            if not tok.text:
                raise VocabError("token text must be non-empty")
            if tok.text in index:
                raise DuplicateTokenError(tok.text)
            index[tok.text] = i
        if not 0 <= base_size <= len(tokens):
            raise VocabError(f"base_size {base_size} out of range for {len(tokens)} tokens")
        if len(marker) != 1:
            raise VocabError(f"marker must be a single character, got {marker!r}")
        self.tokens: tuple[Token, ...] = tuple(tokens)
        self.index = index
        self.base_size = base_size
        self.marker = marker
        self.byte_fallback_enabled = byte_fallback_enabled
        self._fallback_ids = {
            parse_byte_token(t.text): i
            for i, t in enumerate(self.tokens)
            if t.kind == TOKEN_BYTE_FALLBACK
        }
        self._matcher: GreedyMatcher | None = None

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return (
            self.tokens == other.tokens
            and self.base_size == other.base_size
            and self.marker == other.marker
            and self.byte_fallback_enabled == other.byte_fallback_enabled
        )

    def token_texts(self) -> list[str]:
        return [t.text for t in self.tokens]

    def special_texts(self) -> list[str]:
        return [t.text for t in self.tokens if t.kind == TOKEN_SPECIAL]

    def extension_texts(self) -> list[str]:
        return [t.text for t in self.tokens[self.base_size :]]

    @property
    def matcher(self) -> GreedyMatcher:
        if self._matcher is None:
            self._matcher = GreedyMatcher(
                (t.text for t in self.tokens if t.kind == TOKEN_NORMAL), self.marker
            )
        return self._matcher

    def fallback_id(self, byte: int) -> int:
        return self._fallback_ids[byte]


def _classify(text: str, specials: set[str]) -> Token:
    if text in specials:
        return Token(text, TOKEN_SPECIAL)
    if parse_byte_token(text) is not None:
        return Token(text, TOKEN_BYTE_FALLBACK)
    return Token(text, TOKEN_NORMAL)


def build_vocabulary(tokens, marker: str = DEFAULT_MARKER, byte_fallback: bool = True,
                     specials=()) -> Vocabulary:
    """Build a vocabulary from token texts, specials, and optional byte fallback.

    Ids are assigned densely in the order: `tokens`, then `specials`, then any
    of the 256 ``<0xNN>`` byte tokens not already present (only when
    `byte_fallback` is on). Texts matching the ``<0xNN>`` pattern are always
    classified as byte-fallback tokens. The resulting base_size covers
    everything present at build time.
    """
    specials = list(specials)
    special_set = set(specials)
    toks = [_classify(t, special_set) for t in tokens]
    seen = {t.text for t in toks}
    for s in specials:
        if parse_byte_token(s) is not None:
            raise VocabError(f"special token {s!r} collides with the byte-fallback form")
        toks.append(Token(s, TOKEN_SPECIAL))
    if byte_fallback:
        for b in range(256):
            t = byte_token_text(b)
            if t not in seen:
                toks.append(Token(t, TOKEN_BYTE_FALLBACK))
    return Vocabulary(toks, base_size=len(toks), marker=marker,
                      byte_fallback_enabled=byte_fallback)


def append_extension(base: Vocabulary, texts) -> Vocabulary:
    """New vocabulary with `texts` appended as normal tokens after the base.

    The entire input vocabulary becomes the base partition of the result, so
    base ids are stable and base_size equals len(base).
    """
    toks = list(base.tokens) + [Token(t, TOKEN_NORMAL) for t in texts]
    return Vocabulary(toks, base_size=len(base.tokens), marker=base.marker,
                      byte_fallback_enabled=base.byte_fallback_enabled)


def tokenize(vocab: Vocabulary, text: str) -> list[int]:
    """Encode text as token ids via greedy longest match plus byte fallback.

    Deterministic and pure: at every position the longest matching normal
    token wins; characters no token covers are emitted as the byte-fallback
    tokens of their UTF-8 bytes.
    """
    ids: list[int] = []
    index = vocab.index
    char_pos = 0
    for piece, matched in vocab.matcher.segment(text):
        if matched:
            ids.append(index[piece])
            char_pos += len(piece)
            continue
        if not vocab.byte_fallback_enabled:
            raise UnencodableTextError(piece, len(text[:char_pos].encode("utf-8")))
        try:
            raw = piece.encode("utf-8")
        except UnicodeEncodeError as e:
            raise UnencodableTextError(piece, len(text[:char_pos].encode("utf-8", "replace"))) from e
        for b in raw:
            ids.append(vocab.fallback_id(b))
        char_pos += 1
    return ids


def detokenize(vocab: Vocabulary, ids, marker_to_space: bool = True) -> str:
    """Decode token ids back to text; exact inverse of tokenize.

    Byte-fallback runs are decoded as UTF-8 verbatim. Markers inside normal
    tokens map back to spaces unless `marker_to_space` is off.
    """
    parts: list[str] = []
    pending = bytearray()
    size = len(vocab.tokens)
    marker = vocab.marker

    def flush():
        if pending:
            try:
                parts.append(pending.decode("utf-8"))
            except UnicodeDecodeError as e:
                raise VocabError(f"byte-fallback run is not valid UTF-8: {bytes(pending)!r}") from e
            pending.clear()

    for token_id in ids:
        if not isinstance(token_id, int) or not 0 <= token_id < size:
            raise InvalidTokenIdError(token_id, size)
        tok = vocab.tokens[token_id]
        if tok.kind == TOKEN_BYTE_FALLBACK:
            pending.append(parse_byte_token(tok.text))
            continue
        flush()
        if tok.kind == TOKEN_NORMAL and marker_to_space:
            parts.append(tok.text.replace(marker, " "))
        else:
            parts.append(tok.text)
    flush()
    return "".join(parts)


def save_vocab(vocab: Vocabulary, path) -> None:
    doc = {
        "version": VOCAB_FORMAT_VERSION,
        "base_size": vocab.base_size,
        "marker": vocab.marker,
        "byte_fallback": vocab.byte_fallback_enabled,
        "specials": vocab.special_texts(),
        "tokens": vocab.token_texts(),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(doc, f, ensure_ascii=False, indent=2)
        f.write("\n")


def _require_field(doc: dict, name: str, kind) -> object:
    if name not in doc:
        raise VocabFormatError(f"vocabulary file is missing field: {name}")
    value = doc[name]
    if not isinstance(value, kind):
        raise VocabFormatError(f"vocabulary field {name} has the wrong type")
    return value


def load_vocab(path) -> Vocabulary:
    """Load a vocabulary file; load(save(v)) reproduces v exactly."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise VocabFormatError(f"not a valid vocabulary file: {e}") from e
    if not isinstance(doc, dict):
        raise VocabFormatError("vocabulary file must contain a JSON object")
    version = _require_field(doc, "version", int)
    if version != VOCAB_FORMAT_VERSION:
        raise VocabFormatError(
            f"unsupported vocabulary version {version} (expected {VOCAB_FORMAT_VERSION})"
        )
    base_size = _require_field(doc, "base_size", int)
    marker = _require_field(doc, "marker", str)
    byte_fallback = _require_field(doc, "byte_fallback", bool)
    specials = _require_field(doc, "specials", list)
    texts = _require_field(doc, "tokens", list)
    special_set = set(specials)
    missing = special_set - set(texts)
    if missing:
        raise VocabFormatError(f"specials not present in token list: {sorted(missing)}")
    toks = [_classify(t, special_set) for t in texts]
    try:
        return Vocabulary(toks, base_size=base_size, marker=marker,
                          byte_fallback_enabled=byte_fallback)
    except VocabError as e:
        raise VocabFormatError(str(e)) from e


FORMAT_PLAIN_LIST = "plain_list"
FORMAT_TSV_WITH_SCORES = "tsv_with_scores"


def import_external_vocab(path, format: str = FORMAT_PLAIN_LIST,
                          marker: str = DEFAULT_MARKER,
                          byte_fallback: bool = False) -> Vocabulary:
    """Import a token list exported from another tokenizer.

    ``plain_list`` is one token per line; ``tsv_with_scores`` is
    ``token<TAB>score`` with the score ignored. Order is preserved.
    """
    if format not in (FORMAT_PLAIN_LIST, FORMAT_TSV_WITH_SCORES):
        raise VocabFormatError(f"unknown import format: {format}")
    texts: list[str] = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\r\n")
            if not line:
                continue
            if format == FORMAT_TSV_WITH_SCORES:
                line = line.split("\t", 1)[0]
            texts.append(line)
    if not texts:
        raise VocabFormatError(f"no tokens found in {path}")
    return build_vocabulary(texts, marker=marker, byte_fallback=byte_fallback)
