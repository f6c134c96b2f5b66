"""Corpus documents and their JSONL on-disk form.

A document is either a pretraining text or an sft prompt/response example.
Lines are UTF-8 JSON objects: pretrain lines carry ``text``, sft lines carry
``prompt`` and ``response``; both carry ``lang``, ``kind``, and a quality tier.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

KIND_PRETRAIN = "pretrain"
KIND_SFT = "sft"
QUALITY_HIGH = "high"
QUALITY_STANDARD = "standard"


class CorpusError(ValueError):
    pass


@dataclass
class Document:
    kind: str = KIND_PRETRAIN
    text: str = ""
    prompt: str = ""
    response: str = ""
    lang: str = "unknown"
    quality: str = QUALITY_STANDARD

    def __post_init__(self):
        if self.kind not in (KIND_PRETRAIN, KIND_SFT):
            raise CorpusError(f"unknown document kind: {self.kind!r}")
        if self.quality not in (QUALITY_HIGH, QUALITY_STANDARD):
            raise CorpusError(f"unknown quality tier: {self.quality!r}")
        if self.kind == KIND_PRETRAIN and not self.text:
            raise CorpusError("pretrain document must have non-empty text")
        if self.kind == KIND_SFT and (not self.prompt or not self.response):
            raise CorpusError("sft document must have non-empty prompt and response")

    def content(self) -> str:
        """The document's trainable text: prompt plus response for sft."""
        return self.text if self.kind == KIND_PRETRAIN else self.prompt + self.response


def document_from_obj(obj: dict) -> Document:
    if not isinstance(obj, dict):
        raise CorpusError("corpus line must be a JSON object")
    kind = obj.get("kind", KIND_PRETRAIN)
    return Document(
        kind=kind,
        text=obj.get("text", ""),
        prompt=obj.get("prompt", ""),
        response=obj.get("response", ""),
        lang=obj.get("lang", "unknown"),
        quality=obj.get("quality", QUALITY_STANDARD),
    )


def document_to_obj(doc: Document) -> dict:
    if doc.kind == KIND_PRETRAIN:
        return {"text": doc.text, "lang": doc.lang, "quality": doc.quality,
                "kind": doc.kind}
    obj = {"kind": doc.kind, "prompt": doc.prompt, "response": doc.response,
           "lang": doc.lang}
    if doc.quality != QUALITY_STANDARD:
        obj["quality"] = doc.quality
    return obj


def load_corpus(path) -> list[Document]:
    docs: list[Document] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                docs.append(document_from_obj(obj))
            except (json.JSONDecodeError, CorpusError) as e:
                raise CorpusError(f"{path}:{lineno}: {e}") from e
    return docs


def save_corpus(docs, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for doc in docs:
            f.write(json.dumps(document_to_obj(doc), ensure_ascii=False))
            f.write("\n")
