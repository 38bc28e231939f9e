"""Text normalization and the sliding conversation window.

Documents and conversation turns go through the same pipeline: lowercase
tokenization, stopword removal, numeric-token removal and Porter stemming.
The conversation is an append-only stream of speaker-tagged exchanges from
which a bounded token window is recomputed after every addition.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from relsnip.stem import stem

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)
_SENTENCE_RE = re.compile(r"(?<=[.?!])\s+")

DEFAULT_WINDOW_TOKENS = 60

SPEAKER_ROLES = ("analyst", "stakeholder")


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens, split on whitespace and punctuation."""
    return _TOKEN_RE.findall(text.lower())


def load_stoplist(path=None) -> frozenset[str]:
    """Load a stoplist file (one token per line, `#` comments).

    Without a path, the bundled English list is used.  Project-specific
    "contextual" stopwords can be appended by passing extra files to
    :func:`merge_stoplists`.
    """
    if path is None:
        text = resources.files("relsnip.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    words = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            words.add(line)
    return frozenset(words)


def merge_stoplists(*lists) -> frozenset[str]:
    merged = set()
    for lst in lists:
        merged.update(lst)
    return frozenset(merged)


def normalize(tokens, stoplist) -> list[str]:
    """Drop stopwords and numeric tokens, stem the rest.

    Stopword membership is checked both before and after stemming, so the
    output never contains a stoplist member and the operation is idempotent.
    """
    out = []
    for tok in tokens:
        if tok in stoplist or tok.isdigit():
            continue
        s = stem(tok)
        if s and s not in stoplist:
            out.append(s)
    return out


def split_sentences(text: str) -> list[str]:
    """Split on `.?!` followed by whitespace; no abbreviation handling."""
    parts = [p.strip() for p in _SENTENCE_RE.split(text)]
    return [p for p in parts if p]


@dataclass
class Document:
    """A repository document with raw and normalized sentence views."""

    id: str
    title: str
    raw_text: str
    raw_sentences: list[str] = field(default_factory=list)
    sentences: list[list[str]] = field(default_factory=list)

    @classmethod
    def from_text(cls, doc_id: str, raw_text: str, stoplist, title: str | None = None) -> "Document":
        raw_sentences = split_sentences(raw_text)
        sentences = [normalize(tokenize(s), stoplist) for s in raw_sentences]
        return cls(id=doc_id, title=title or doc_id, raw_text=raw_text,
                   raw_sentences=raw_sentences, sentences=sentences)


@dataclass(frozen=True)
class Exchange:
    """One conversation turn: who said it, raw text, normalized tokens."""

    index: int
    speaker: str
    text: str
    tokens: tuple[str, ...]
    timestamp: float

    def __post_init__(self):
        if self.speaker not in SPEAKER_ROLES:
            raise ValueError(f"speaker must be one of {SPEAKER_ROLES}, got {self.speaker!r}")


class SourceStream:
    """Append-only conversation stream with a bounded most-recent window.

    Analyst and stakeholder turns contribute to the window equally.
    """

    def __init__(self, window_size_tokens: int = DEFAULT_WINDOW_TOKENS):
        if window_size_tokens < 1:
            raise ValueError("window_size_tokens must be positive")
        self.window_size_tokens = window_size_tokens
        self._exchanges: list[Exchange] = []

    def append(self, exchange: Exchange):
        if self._exchanges and exchange.index <= self._exchanges[-1].index:
            raise ValueError("exchange indices must be strictly increasing")
        self._exchanges.append(exchange)

    @property
    def exchanges(self) -> tuple[Exchange, ...]:
        return tuple(self._exchanges)

    def __len__(self) -> int:
        return len(self._exchanges)


def latest_window(stream: SourceStream) -> list[str]:
    """Tokens of the most recent exchanges, left-truncated to the window size."""
    if len(stream) == 0:
        raise ValueError("no conversation yet")
    tokens: list[str] = []
    for ex in stream.exchanges:
        tokens.extend(ex.tokens)
    return tokens[-stream.window_size_tokens:]


def stem_match_offsets(raw_text: str, term: str) -> list[tuple[int, int]]:
    """Character spans of raw words whose stems match a (possibly bigram) term.

    Lets a UI highlight inflected surface forms without doing its own
    stemming.  For a bigram term both member stems must appear on adjacent
    raw words; the span then covers the pair.
    """
    target = term.split(" ")
    matches = [(m.start(), m.end(), stem(m.group().lower())) for m in _TOKEN_RE.finditer(raw_text)]
    spans = []
    for i in range(len(matches) - len(target) + 1):
        if all(matches[i + j][2] == target[j] for j in range(len(target))):
            spans.append((matches[i][0], matches[i + len(target) - 1][1]))
    return spans
