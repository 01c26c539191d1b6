"""Term normalization and tokenization shared by titles, documents and queries."""

from __future__ import annotations

import re
import unicodedata
from typing import Iterable, Tuple

Term = str
Phrase = Tuple[str, ...]

_TOKEN_RE = re.compile(r"[^\W_]+")


def normalize(text: str) -> str:
    """Lowercase, NFC-compose and strip ``text``; internal whitespace runs collapse to one space."""
    text = unicodedata.normalize("NFC", text.lower())
    return " ".join(text.split())


def tokenize(text: str) -> Phrase:
    # Whitespace and punctuation both separate tokens; only alphanumerics survive.
    return tuple(_TOKEN_RE.findall(normalize(text)))


def phrase_text(phrase: Iterable[str]) -> str:
    return " ".join(phrase)


def as_phrase(value: str | Iterable[str]) -> Phrase:
    """Accept either raw text or an iterable of terms and return a normalized phrase."""
    if isinstance(value, str):
        return tokenize(value)
    return tokenize(" ".join(value))


def bigrams(phrase: Phrase) -> list[Phrase]:
    return [phrase[i : i + 2] for i in range(len(phrase) - 1)]


def contains_subsequence(haystack: Phrase, needle: Phrase) -> bool:
    n = len(needle)
    if n == 0:
        return True
    return any(haystack[i : i + n] == needle for i in range(len(haystack) - n + 1))


def filter_stopwords(phrase: Phrase, *stopword_sets: Iterable[str]) -> Phrase:
    stop: set[str] = set()
    for s in stopword_sets:
        stop.update(s)
    return tuple(t for t in phrase if t not in stop)
