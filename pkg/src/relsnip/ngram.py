"""Smoothed n-gram language models and their WFST compilation.

Four estimators share one counting pass:

* ``katz`` — backoff with Good-Turing discounting of small counts,
* ``witten_bell`` — interpolation weighted by the distinct-follower mass,
* ``absolute`` — interpolation with a constant discount,
* ``kneser_ney`` — absolute discounting whose lower-order distributions use
  continuation (distinct-left-context) counts.

The three interpolated estimators are stored in backoff form: the cost kept
for a seen n-gram already folds in the interpolated lower-order share, and
the per-history backoff cost carries the leftover mass, so one lookup
recursion serves every method.  Probabilities are natural-log costs
throughout.

Scoring is marker-free: a token window is scored with the history growing
from empty, without sentence boundary symbols, which matches how a sliding
conversation window is used.  Sentence markers still pad the counts so that
document-internal models normalize over the end symbol.
"""

from __future__ import annotations

import gzip
import hashlib
import json
import math
import pickle
from dataclasses import dataclass, field
from pathlib import Path

from relsnip.fst import EPSILON, SymbolTable, Wfst

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

METHODS = ("katz", "witten_bell", "absolute", "kneser_ney")
ORDERS = (1, 2, 3, 4, 5)
MAX_ORDER = 5

DEFAULT_UNK_MASS = 1e-6
# Histories that free no probability mass keep a representable backoff weight
# so every cost in the model stays finite.
MIN_BACKOFF_PROB = 1e-30
# Good-Turing discounting is applied to counts below this; larger counts are
# trusted as-is.
KATZ_TRUST_THRESHOLD = 5

ARCHIVE_FORMAT_VERSION = 1


class NGramCounts:
    """k-gram counts for k = 1..order from one pass over the corpus.

    Each k-gram table is padded independently with k-1 start markers and one
    end marker per sentence (when padding is enabled), so an order-k model
    can read its own and every lower level from the same object.
    """

    def __init__(self, order: int, tables, vocabulary, padded: bool):
        self.order = order
        self.tables = tables  # tables[k]: dict gram-tuple -> count, k = 1..order
        self.vocabulary = vocabulary
        self.padded = padded
        self._followers: dict[int, dict] = {}
        self._continuation: dict[int, dict] = {}

    def followers(self, k: int) -> dict:
        """history -> {word: count} view of the k-gram table, memoized."""
        cached = self._followers.get(k)
        if cached is None:
            cached = {}
            for gram, c in self.tables[k].items():
                hist = gram[:-1]
                slot = cached.get(hist)
                if slot is None:
                    slot = {}
                    cached[hist] = slot
                slot[gram[-1]] = c
            self._followers[k] = cached
        return cached

    def continuation(self, k: int) -> dict:
        """Distinct-left-context counts for k-grams, from the (k+1)-gram table.

        continuation[g] = |{v : (v,)+g was counted}|.  Only defined when the
        counts hold order k+1.
        """
        cached = self._continuation.get(k)
        if cached is None:
            seen: dict[tuple, set] = {}
            for gram in self.tables[k + 1]:
                tail = gram[1:]
                slot = seen.get(tail)
                if slot is None:
                    slot = set()
                    seen[tail] = slot
                slot.add(gram[0])
            cached = {g: len(vs) for g, vs in seen.items()}
            self._continuation[k] = cached
        return cached


def count_ngrams(sentences, n: int, padding: bool = True) -> NGramCounts:
    """Count all k-grams, k = 1..n, over tokenized sentences.

    With padding, each k-gram pass sees k-1 start markers and one end marker
    per sentence; the start marker appears in histories only and is never a
    predicted word.
    """
    if not 1 <= n <= MAX_ORDER:
        raise ValueError(f"order must be between 1 and {MAX_ORDER}")
    sentences = [list(s) for s in sentences]
    if not sentences:
        raise ValueError("empty repository")
    tables: dict[int, dict] = {}
    for k in range(1, n + 1):
        table: dict[tuple, int] = {}
        for sent in sentences:
            seq = ([BOS] * (k - 1) + sent + [EOS]) if padding else sent
            for i in range(len(seq) - k + 1):
                g = tuple(seq[i:i + k])
                table[g] = table.get(g, 0) + 1
        tables[k] = table
    vocab = {tok for sent in sentences for tok in sent}
    vocab.add(UNK)
    if padding:
        vocab.add(BOS)
        vocab.add(EOS)
    return NGramCounts(n, tables, frozenset(vocab), padding)


@dataclass
class NGramModel:
    """One smoothed model: per-gram costs plus per-history backoff costs.

    ``logprob`` maps a gram tuple (history + word) to -ln P(word | history);
    ``backoff_cost`` maps a history to -ln alpha(history).  Unseen grams are
    scored by the backoff recursion in :meth:`conditional_prob`.
    """

    method: str
    order: int
    logprob: dict[tuple, float]
    backoff_cost: dict[tuple, float]
    vocabulary: frozenset[str]
    params: dict = field(default_factory=dict)

    def predicted_vocabulary(self):
        """Every symbol the model can predict (the start marker never is)."""
        return [w for w in sorted(self.vocabulary) if w != BOS]

    def map_token(self, token: str) -> str:
        return token if token in self.vocabulary else UNK

    def conditional_prob(self, history, word: str) -> float:
        """P(word | history) through the full backoff/interpolation recursion."""
        w = self.map_token(word)
        h = tuple(self.map_token(t) for t in history)
        if self.order > 1:
            h = h[-(self.order - 1):]
        else:
            h = ()
        return self._prob(h, w)

    def _prob(self, h: tuple, w: str) -> float:
        cost = self.logprob.get(h + (w,))
        if cost is not None:
            return math.exp(-cost)
        if not h:
            # The unigram level stores every predictable symbol, so this only
            # triggers for symbols outside the closed vocabulary.
            return math.exp(-self.logprob[(UNK,)])
        alpha_cost = self.backoff_cost.get(h)
        scale = math.exp(-alpha_cost) if alpha_cost is not None else 1.0
        return scale * self._prob(h[1:], w)

    def histories(self):
        """All histories the model stores probabilities or backoff weights for."""
        hists = {()}
        hists.update(g[:-1] for g in self.logprob if len(g) > 1)
        hists.update(self.backoff_cost)
        return hists


def _unigram_level(counts: NGramCounts, method: str, order: int, unk_mass: float):
    """Level-1 costs: MLE unigrams, or continuation unigrams for Kneser-Ney.

    The unknown symbol receives a fixed mass and the rest is scaled to keep
    the level an exact distribution.
    """
    if method == "kneser_ney" and order >= 2:
        base = dict(counts.continuation(1))
        # Tokens without any left-context extension (possible when counting
        # without padding) keep their raw counts, as in standard toolkits.
        for gram, c in counts.tables[1].items():
            if gram not in base:
                base[gram] = c
    else:
        base = counts.tables[1]
    total = sum(base.values())
    level = {}
    scale = 1.0 - unk_mass
    for gram, c in base.items():
        level[gram] = -math.log(scale * c / total)
    level[(UNK,)] = -math.log(unk_mass)
    return level


def _good_turing_discounts(table: dict) -> dict[int, float]:
    """Katz discount ratios d_r for r below the trust threshold.

    Invalid estimates (empty count-of-counts, ratios outside (0, 1]) fall
    back to 1.0, i.e. the raw count is trusted.
    """
    n_of = {}
    for c in table.values():
        n_of[c] = n_of.get(c, 0) + 1
    k = KATZ_TRUST_THRESHOLD
    d = {}
    n1 = n_of.get(1, 0)
    top = (k + 1) * n_of.get(k + 1, 0) / n1 if n1 else 0.0
    for r in range(1, k):
        nr = n_of.get(r, 0)
        nr1 = n_of.get(r + 1, 0)
        if nr == 0 or n1 == 0 or top >= 1.0:
            d[r] = 1.0
            continue
        raw = ((r + 1) * nr1 / (r * nr) - top) / (1.0 - top)
        d[r] = raw if 0.0 < raw <= 1.0 else 1.0
    return d


def estimate_discount(counts: NGramCounts) -> float:
    """Absolute-discount constant n1/(n1+2*n2) from bigram count-of-counts."""
    if counts.order < 2:
        return 0.5
    n1 = n2 = 0
    for c in counts.tables[2].values():
        if c == 1:
            n1 += 1
        elif c == 2:
            n2 += 1
    if n1 + 2 * n2 == 0:
        return 0.5
    d = n1 / (n1 + 2 * n2)
    return d if d > 0.0 else 0.5


def estimate(counts: NGramCounts, method: str, order: int,
             discount: float | None = None,
             unk_mass: float = DEFAULT_UNK_MASS) -> NGramModel:
    """Estimate a normalized model of the given method and order."""
    if method not in METHODS:
        raise ValueError(f"unknown smoothing method {method!r}")
    if order > counts.order:
        raise ValueError(f"order {order} exceeds counted order {counts.order}")
    if order < 1:
        raise ValueError("order must be >= 1")
    if method in ("absolute", "kneser_ney"):
        if discount is None:
            discount = estimate_discount(counts)
        if not 0.0 < discount <= 1.0:
            raise ValueError("discount must be in (0, 1]")

    logprob = _unigram_level(counts, method, order, unk_mass)
    backoff_cost: dict[tuple, float] = {}
    params = {"unk_mass": unk_mass}
    if method in ("absolute", "kneser_ney"):
        params["discount"] = discount

    def lower_prob(h: tuple, w: str) -> float:
        cost = logprob.get(h + (w,))
        if cost is not None:
            return math.exp(-cost)
        if not h:
            return math.exp(-logprob[(UNK,)])
        alpha_cost = backoff_cost.get(h)
        scale = math.exp(-alpha_cost) if alpha_cost is not None else 1.0
        return scale * lower_prob(h[1:], w)

    for k in range(2, order + 1):
        followers = counts.followers(k)
        if method == "kneser_ney" and k < order:
            # Mid levels of Kneser-Ney replace raw counts with
            # distinct-left-context counts; histories whose grams never have
            # a left extension (possible with unpadded counts) keep raw counts.
            cont = counts.continuation(k)
            modified = {}
            for hist, words in followers.items():
                mod_words = {w: cont.get(hist + (w,), 0) for w in words}
                if sum(mod_words.values()) == 0:
                    mod_words = dict(words)
                modified[hist] = mod_words
            followers = modified
        if method == "katz":
            gt = _good_turing_discounts(counts.tables[k])
        for hist, words in followers.items():
            total = sum(words.values())
            if total == 0:
                continue
            types = len(words)
            if method == "witten_bell":
                gamma = types / (total + types)
                denom = total + types
                for w, c in words.items():
                    p = c / denom + gamma * lower_prob(hist[1:], w)
                    logprob[hist + (w,)] = -math.log(p)
                backoff_cost[hist] = -math.log(gamma)
            elif method in ("absolute", "kneser_ney"):
                gamma = discount * types / total
                for w, c in words.items():
                    p = max(c - discount, 0.0) / total + gamma * lower_prob(hist[1:], w)
                    logprob[hist + (w,)] = -math.log(p)
                backoff_cost[hist] = -math.log(max(gamma, MIN_BACKOFF_PROB))
            else:  # katz
                seen_mass = 0.0
                lower_mass = 0.0
                for w, c in words.items():
                    d = gt.get(c, 1.0) if c < KATZ_TRUST_THRESHOLD else 1.0
                    p = d * c / total
                    logprob[hist + (w,)] = -math.log(p)
                    seen_mass += p
                    lower_mass += lower_prob(hist[1:], w)
                freed = 1.0 - seen_mass
                lower_left = 1.0 - lower_mass
                if lower_left > 1e-9:
                    alpha = (freed / lower_left if freed > MIN_BACKOFF_PROB
                             else MIN_BACKOFF_PROB)
                else:
                    # The lower model keeps (numerically) no mass for unseen
                    # words, so discounting here would leak probability;
                    # trust the raw counts for this history instead.
                    if freed > MIN_BACKOFF_PROB:
                        for w, c in words.items():
                            logprob[hist + (w,)] = -math.log(c / total)
                    alpha = MIN_BACKOFF_PROB
                backoff_cost[hist] = -math.log(alpha)

    return NGramModel(method=method, order=order, logprob=logprob,
                      backoff_cost=backoff_cost, vocabulary=counts.vocabulary,
                      params=params)


def sequence_logprob(model: NGramModel, tokens) -> float:
    """Total cost (nats) of a marker-free token sequence under the model.

    The history grows from empty (no sentence markers) and out-of-vocabulary
    tokens are mapped to the unknown symbol, which keeps the cost finite for
    any input.
    """
    tokens = [model.map_token(t) for t in tokens]
    cost = 0.0
    for i, w in enumerate(tokens):
        history = tuple(tokens[max(0, i - model.order + 1):i])
        cost -= math.log(model._prob(history, w))
    return cost


def perplexity(model: NGramModel, tokens) -> float:
    """exp of the per-token cost of the sequence."""
    tokens = list(tokens)
    if not tokens:
        raise ValueError("empty evaluation text")
    return math.exp(sequence_logprob(model, tokens) / len(tokens))


def _next_history(hist_set, h: tuple, w: str, order: int) -> tuple:
    """Longest stored suffix of h + (w,) capped at order-1 tokens."""
    nxt = (h + (w,))[-(order - 1):] if order > 1 else ()
    while nxt and nxt not in hist_set:
        nxt = nxt[1:]
    return nxt


def to_wfst(model: NGramModel, symbols: SymbolTable) -> Wfst:
    """Compile the model to the standard n-gram automaton.

    One state per stored history; word arcs carry -ln P(w|h); backoff arcs
    are epsilon transitions to the shortened-history state.  The automaton
    mirrors marker-free scoring: it starts at the empty-history state, every
    state is final with weight zero, and histories containing the start
    marker (unreachable in marker-free scoring) are left out, as are
    end-marker word arcs.

    Using epsilon arcs for backoff is the classic approximation: a path may
    back off even where a full n-gram exists, so the cheapest path cost can
    fall below the exact recursion cost when such a detour is cheaper.
    """
    hist_set = {h for h in model.histories() if BOS not in h}
    states: dict[tuple, int] = {}
    t = Wfst(symbols)
    for h in sorted(hist_set, key=lambda h: (len(h), h)):
        states[h] = t.add_state()
        t.set_final(states[h], 0.0)
    t.set_start(states[()])
    for gram, cost in model.logprob.items():
        h, w = gram[:-1], gram[-1]
        if w in (BOS, EOS) or BOS in h:
            continue
        if h not in states:
            continue
        dst = states[_next_history(hist_set, h, w, model.order)]
        t.add_arc(states[h], symbols.add(w), symbols.add(w), max(cost, 0.0), dst)
    for h in hist_set:
        if not h:
            continue
        cost = model.backoff_cost.get(h, 0.0)
        # Backoff weights above one (possible for Katz) would be negative
        # costs; they are clamped to keep the tropical-cost invariant.
        t.add_arc(states[h], EPSILON, EPSILON, max(cost, 0.0), states[h[1:]])
    t.sort_arcs()
    return t


@dataclass
class ModelGrid:
    """The 4 methods x 5 orders model family built from one corpus."""

    models: dict[tuple[str, int], NGramModel]
    fingerprint: str

    def __post_init__(self):
        expected = {(m, n) for m in METHODS for n in ORDERS}
        if set(self.models) != expected:
            raise ValueError("grid must hold exactly 4 methods x 5 orders")


def corpus_fingerprint(documents) -> str:
    """Content hash of a repository, independent of document order."""
    digests = sorted(hashlib.sha256(doc.raw_text.encode("utf-8")).hexdigest()
                     for doc in documents)
    return hashlib.sha256("\n".join(digests).encode("ascii")).hexdigest()


def build_grid(repository, discount: float | None = None,
               unk_mass: float = DEFAULT_UNK_MASS) -> ModelGrid:
    """Build all 20 models from one shared counting pass over the repository."""
    repository = list(repository)
    if not repository:
        raise ValueError("empty repository")
    sentences = [sent for doc in repository for sent in doc.sentences if sent]
    counts = count_ngrams(sentences, MAX_ORDER, padding=True)
    models = {}
    # Estimators are independent of each other and safe to run concurrently;
    # built sequentially here so results never depend on scheduling.
    for method in METHODS:
        for order in ORDERS:
            models[(method, order)] = estimate(counts, method, order,
                                               discount=discount, unk_mass=unk_mass)
    return ModelGrid(models=models, fingerprint=corpus_fingerprint(repository))


_METHOD_RANK = {m: i for i, m in enumerate(METHODS)}


def grid_perplexities(grid: ModelGrid, window) -> dict[tuple[str, int], float]:
    window = list(window)
    if not window:
        raise ValueError("empty window")
    return {key: perplexity(model, window) for key, model in grid.models.items()}


def select_model(grid: ModelGrid, window) -> tuple[str, int]:
    """The (method, order) pair with minimum perplexity on the window.

    Ties break toward the smaller order, then katz < witten_bell < absolute
    < kneser_ney.
    """
    ppl = grid_perplexities(grid, window)
    return min(ppl, key=lambda k: (ppl[k], k[1], _METHOD_RANK[k[0]]))


# ---------------------------------------------------------------------------
# Model archive: one file per (method, order) plus a manifest.

def save_grid(grid: ModelGrid, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = {}
    for (method, order), model in sorted(grid.models.items()):
        name = f"{method}-{order}.lm.gz"
        with gzip.open(directory / name, "wb") as fh:
            pickle.dump(model, fh, protocol=4)
        entries[f"{method},{order}"] = {"file": name, "params": model.params}
    manifest = {
        "format_version": ARCHIVE_FORMAT_VERSION,
        "corpus_fingerprint": grid.fingerprint,
        "methods": list(METHODS),
        "orders": list(ORDERS),
        "vocabulary_size": len(next(iter(grid.models.values())).vocabulary),
        "models": entries,
    }
    (directory / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_grid(directory, expect_fingerprint: str | None = None) -> ModelGrid:
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text("utf-8"))
    if manifest.get("format_version") != ARCHIVE_FORMAT_VERSION:
        raise ValueError(f"unsupported archive format {manifest.get('format_version')!r}")
    fingerprint = manifest["corpus_fingerprint"]
    if expect_fingerprint is not None and fingerprint != expect_fingerprint:
        raise ValueError(
            f"archive fingerprint {fingerprint} does not match expected {expect_fingerprint}")
    models = {}
    for key, entry in manifest["models"].items():
        method, order = key.split(",")
        with gzip.open(directory / entry["file"], "rb") as fh:
            models[(method, int(order))] = pickle.load(fh)
    return ModelGrid(models=models, fingerprint=fingerprint)
