"""N-gram index over the target document collection.

Only answers "does this phrase occur verbatim in some document"; ranking is
left to the retrieval engine that consumes the expanded query.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Union

from qexpand.errors import CapacityError, IntegrityError, ParseError
from qexpand.text import Phrase, as_phrase, tokenize

logger = logging.getLogger(__name__)

DEFAULT_MAX_N = 6


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    tokens: Phrase = ()


@dataclass
class CorpusIndex:
    documents: tuple[Document, ...] = ()
    max_n: int = DEFAULT_MAX_N
    ngrams: dict[Phrase, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.documents)

    def phrase_exists(self, phrase: Phrase | str) -> bool:
        """True iff ``phrase`` occurs as a contiguous token run in at least one document."""
        return self.frequency(phrase) > 0

    def frequency(self, phrase: Phrase | str) -> int:
        """Number of documents containing ``phrase``."""
        p = as_phrase(phrase)
        if len(p) > self.max_n:
            raise CapacityError(
                f"phrase of {len(p)} terms exceeds indexed n-gram size {self.max_n}"
            )
        if not p:
            return 0
        return self.ngrams.get(p, 0)


def document_ngrams(tokens: Phrase, max_n: int) -> set[Phrase]:
    grams = set()
    for n in range(1, max_n + 1):
        for i in range(len(tokens) - n + 1):
            grams.add(tokens[i : i + n])
    return grams


def build_index(
    docs_source: Union[IO[bytes], IO[str], Iterable[str], Iterable[bytes]],
    max_n: int = DEFAULT_MAX_N,
    name: str = "corpus",
) -> CorpusIndex:
    """Index a JSON-lines corpus (``{"doc_id": ..., "text": ...}`` per line)."""
    if max_n < 2:
        raise ValueError("max_n must be >= 2")
    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(docs_source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", lineno, name) from None
        if not isinstance(record, dict):
            raise ParseError("record is not a JSON object", lineno, name)
        doc_id, text = record.get("doc_id"), record.get("text")
        if not isinstance(doc_id, str) or not isinstance(text, str):
            raise ParseError("record needs string fields 'doc_id' and 'text'", lineno, name)
        if doc_id in seen:
            raise IntegrityError(f"duplicate doc_id {doc_id!r} on line {lineno}")
        seen.add(doc_id)
        docs.append(Document(doc_id=doc_id, text=text, tokens=tokenize(text)))

    counts: Counter[Phrase] = Counter()
    for doc in docs:
        counts.update(document_ngrams(doc.tokens, max_n))
    logger.debug("indexed %d documents, %d distinct n-grams", len(docs), len(counts))
    return CorpusIndex(documents=tuple(docs), max_n=max_n, ngrams=dict(counts))
