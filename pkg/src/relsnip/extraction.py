"""Term extraction and snippet ranking.

The conversation window becomes a zero-weight token chain, is composed with
the selected repository language model, and the cheapest composed paths are
pooled into ranked terms.  Documents are segmented into overlapping
multi-sentence snippets which are scored by how densely they contain the
ranked terms, weighted by each term's model probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from relsnip.fst import EPSILON, Wfst, compose, linear_chain, n_shortest_paths
from relsnip.ngram import UNK
from relsnip.textproc import Document
from relsnip.tone import SnippetCount, ToneProfile, snippet_count_policy

MODES = ("automatic", "manual")
MANUAL_SNIPPET_COUNT = 5


@dataclass(frozen=True)
class RelevantTerm:
    """A stemmed token or contiguous token pair; lower cost means more relevant."""

    surface: str
    cost: float
    rank: int


@dataclass
class Snippet:
    """A contiguous sentence span of one document, scored against the terms."""

    doc_id: str
    start: int
    end: int
    text: str
    score: float = 0.0
    matched_terms: list[RelevantTerm] = field(default_factory=list)
    tokens: tuple[str, ...] = ()

    @property
    def key(self) -> str:
        return f"{self.doc_id}:{self.start}:{self.end}"


@dataclass
class ExtractionConfig:
    z: int = 5              # max highlighted terms per snippet
    m: int = 5              # n-best paths consumed
    snippet_len: int = 3    # sentences per snippet
    mode: str = "automatic"

    def __post_init__(self):
        if min(self.z, self.m, self.snippet_len) < 1:
            raise ValueError("z, m and snippet_len must all be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


def extract_relevant_terms(lm: Wfst, window, cfg: ExtractionConfig) -> list[RelevantTerm]:
    """Rank the window tokens the repository model finds cheapest.

    Tokens outside the model vocabulary are mapped to the unknown symbol (and
    never surface as terms).  Each of the m cheapest composed paths charges
    every emitted token its word-arc cost plus any backoff hops paid directly
    before it; pooling keeps the minimum cost per surface form.  Adjacent
    window pairs whose members both made the pool are added as bigram terms
    so multiword names can surface.  An empty result means the window has no
    overlap with the repository vocabulary.
    """
    window = list(window)
    if not window:
        raise ValueError("empty window")
    symbols = lm.symbols
    mapped = [tok if tok in symbols else UNK for tok in window]
    chain = linear_chain(mapped, symbols)
    paths = n_shortest_paths(compose(chain, lm), cfg.m)
    unk_label = symbols.id(UNK) if UNK in symbols else None
    pool: dict[str, float] = {}
    for path in paths:
        pending = 0.0
        for _ilabel, olabel, weight in path.arcs:
            if olabel == EPSILON:
                pending += weight
                continue
            cost = pending + weight
            pending = 0.0
            if olabel == unk_label:
                continue
            token = symbols.token(olabel)
            if token not in pool or cost < pool[token]:
                pool[token] = cost
    candidates = dict(pool)
    for left, right in zip(window, window[1:]):
        if left in pool and right in pool:
            surface = f"{left} {right}"
            cost = (pool[left] + pool[right]) / 2.0
            if surface not in candidates or cost < candidates[surface]:
                candidates[surface] = cost
    ranked = sorted(candidates.items(), key=lambda kv: (kv[1], kv[0]))[: cfg.z]
    return [RelevantTerm(surface=s, cost=c, rank=i + 1)
            for i, (s, c) in enumerate(ranked)]


def segment_snippets(doc: Document, cfg: ExtractionConfig) -> list[Snippet]:
    """Sliding sentence windows of snippet_len, stride one.

    A document shorter than snippet_len yields a single partial snippet.
    """
    n = len(doc.raw_sentences)
    length = cfg.snippet_len
    snippets = []
    for start in range(max(1, n - length + 1)):
        end = min(start + length, n)
        span_tokens = tuple(tok for sent in doc.sentences[start:end] for tok in sent)
        snippets.append(Snippet(doc_id=doc.id, start=start, end=end,
                                text=" ".join(doc.raw_sentences[start:end]),
                                tokens=span_tokens))
    return snippets


def _term_occurrences(term: str, tokens) -> int:
    parts = term.split(" ")
    if len(parts) == 1:
        return sum(1 for tok in tokens if tok == term)
    return sum(1 for i in range(len(tokens) - len(parts) + 1)
               if all(tokens[i + j] == parts[j] for j in range(len(parts))))


def score_snippet(snippet: Snippet, terms) -> float:
    """Length-normalized, probability-weighted term density.

    score = sum over terms of occurrences * e^(-cost), divided by the token
    count of the snippet.  Shifting every term cost by a constant rescales
    all scores by a common factor, so the ranking is shift-invariant.
    """
    if not snippet.tokens:
        snippet.score = 0.0
        snippet.matched_terms = []
        return 0.0
    total = 0.0
    matched = []
    for term in terms:
        occurrences = _term_occurrences(term.surface, snippet.tokens)
        if occurrences:
            matched.append(term)
            total += occurrences * math.exp(-term.cost)
    snippet.score = total / len(snippet.tokens)
    snippet.matched_terms = matched
    return snippet.score


def select_snippets(scored, tone: ToneProfile, cfg: ExtractionConfig) -> list[Snippet]:
    """Order scored snippets and cut the list per mode and tone policy.

    Manual mode always offers the top five.  Automatic mode returns one
    snippet, or three when the tone profile signals uncertainty.  Snippets
    that matched nothing are never returned.
    """
    ranked = sorted((s for s in scored if s.score > 0.0),
                    key=lambda s: (-s.score, s.doc_id, s.start))
    if cfg.mode == "manual":
        count = MANUAL_SNIPPET_COUNT
    else:
        count = 1 if snippet_count_policy(tone) is SnippetCount.ONE else 3
    return ranked[:count]
