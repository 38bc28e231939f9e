"""Weighted finite-state transducers over the tropical (min, +) semiring.

Weights are non-negative costs (typically negative log probabilities), so a
cheaper path is a more probable one.  Costs combine along a path by addition
and alternatives combine by taking the minimum.  Machines are immutable once
built by the functions in this module and can be shared freely across
threads.
"""

from __future__ import annotations

import heapq
import math
from bisect import bisect_left, bisect_right
from collections import deque
from dataclasses import dataclass, field

EPSILON = 0
EPSILON_TOKEN = "<eps>"

# Termination guard for n_shortest_paths on cyclic machines: each state may be
# expanded at most n + _CYCLIC_POP_SLACK times.  Acyclic machines are exempt,
# which keeps tie-breaking exact there.
_CYCLIC_POP_SLACK = 32


class SymbolTable:
    """Bijection between token strings and positive integer labels.

    Label 0 is reserved for epsilon.  Tables only ever grow; labels handed
    out stay valid for the lifetime of the table.
    """

    def __init__(self):
        self._token_to_id = {EPSILON_TOKEN: EPSILON}
        self._id_to_token = [EPSILON_TOKEN]

    def add(self, token: str) -> int:
        """Return the label for token, registering it if new."""
        label = self._token_to_id.get(token)
        if label is None:
            label = len(self._id_to_token)
            self._token_to_id[token] = label
            self._id_to_token.append(token)
        return label

    def id(self, token: str) -> int:
        return self._token_to_id[token]

    def token(self, label: int) -> str:
        return self._id_to_token[label]

    def __contains__(self, token: str) -> bool:
        return token in self._token_to_id

    def __len__(self) -> int:
        return len(self._id_to_token)

    def tokens(self):
        return iter(self._id_to_token)


@dataclass(frozen=True, slots=True)
class Arc:
    ilabel: int
    olabel: int
    weight: float
    dst: int


@dataclass(frozen=True, slots=True)
class Path:
    """A successful path: its arc sequence, rendered labels and total cost.

    ``ilabels``/``olabels`` exclude epsilons; ``arcs`` keeps the raw
    (ilabel, olabel, weight) triples so per-arc costs stay recoverable.
    """

    arcs: tuple[tuple[int, int, float], ...]
    final_weight: float
    total_weight: float
    ilabels: tuple[int, ...]
    olabels: tuple[int, ...]

    def itokens(self, symbols: SymbolTable) -> tuple[str, ...]:
        return tuple(symbols.token(l) for l in self.ilabels)

    def otokens(self, symbols: SymbolTable) -> tuple[str, ...]:
        return tuple(symbols.token(l) for l in self.olabels)


def _make_path(arcs, final_weight):
    total = final_weight + sum(a[2] for a in arcs)
    ilabels = tuple(a[0] for a in arcs if a[0] != EPSILON)
    olabels = tuple(a[1] for a in arcs if a[1] != EPSILON)
    return Path(tuple(arcs), final_weight, total, ilabels, olabels)


class Wfst:
    """Mutable while under construction, treated as immutable afterwards."""

    def __init__(self, symbols: SymbolTable):
        self.symbols = symbols
        self.start: int | None = None
        self.finals: dict[int, float] = {}
        self._arcs: list[list[Arc]] = []
        self._ilabel_index: list[list[int]] | None = None

    def add_state(self) -> int:
        self._arcs.append([])
        self._ilabel_index = None
        return len(self._arcs) - 1

    def add_arc(self, src: int, ilabel: int, olabel: int, weight: float, dst: int):
        if not (math.isfinite(weight) and weight >= 0.0):
            raise ValueError(f"arc weight must be a finite non-negative cost, got {weight!r}")
        if not (0 <= dst < len(self._arcs)):
            raise ValueError(f"arc destination {dst} does not exist")
        self._arcs[src].append(Arc(ilabel, olabel, weight, dst))
        self._ilabel_index = None

    def set_start(self, q: int):
        self.start = q

    def set_final(self, q: int, weight: float = 0.0):
        self.finals[q] = weight

    def final_weight(self, q: int) -> float | None:
        return self.finals.get(q)

    def num_states(self) -> int:
        return len(self._arcs)

    def num_arcs(self) -> int:
        return sum(len(a) for a in self._arcs)

    def arcs(self, q: int) -> list[Arc]:
        return self._arcs[q]

    def sort_arcs(self):
        """Sort every adjacency list by (ilabel, olabel, dst) for byte-stable output."""
        for arcs in self._arcs:
            arcs.sort(key=lambda a: (a.ilabel, a.olabel, a.dst, a.weight))
        self._ilabel_index = None

    def arcs_matching(self, q: int, ilabel: int) -> list[Arc]:
        """Arcs of q whose ilabel equals the given label (adjacency must be sorted)."""
        arcs = self._arcs[q]
        if self._ilabel_index is None:
            self._ilabel_index = [[a.ilabel for a in state] for state in self._arcs]
        keys = self._ilabel_index[q]
        lo = bisect_left(keys, ilabel)
        hi = bisect_right(keys, ilabel)
        return arcs[lo:hi]

    def dump(self) -> str:
        """Debug text form: one `src ilabel olabel weight dst` line per arc, then `state weight` finals."""
        sym = self.symbols.token
        lines = []
        for q in range(len(self._arcs)):
            for a in self._arcs[q]:
                lines.append(f"{q} {sym(a.ilabel)} {sym(a.olabel)} {a.weight:.6f} {a.dst}")
        for q in sorted(self.finals):
            lines.append(f"{q} {self.finals[q]:.6f}")
        return "\n".join(lines)


def linear_chain(tokens, symbols: SymbolTable) -> Wfst:
    """Single-path acceptor for a token sequence; all weights zero.

    An empty sequence yields a one-state machine accepting only the empty
    string.
    """
    t = Wfst(symbols)
    q = t.add_state()
    t.set_start(q)
    for token in tokens:
        label = symbols.add(token)
        nxt = t.add_state()
        t.add_arc(q, label, label, 0.0, nxt)
        q = nxt
    t.set_final(q, 0.0)
    t.sort_arcs()
    return t


def compose(t1: Wfst, t2: Wfst) -> Wfst:
    """Compose two transducers sharing one symbol table.

    Epsilon moves are sequenced through a three-state filter so that every
    pair of compatible paths (output string of the first equals input string
    of the second) appears exactly once in the result: between two matched
    moves, all t1-only moves are taken before any t2-only move.

    An empty intersection is not an error; the result then simply has no
    reachable final state.
    """
    if t1.symbols is not t2.symbols:
        raise ValueError("composition requires a shared symbol table")
    if t1.start is None or t2.start is None:
        raise ValueError("composition requires machines with a start state")
    t1.sort_arcs()
    t2.sort_arcs()
    out = Wfst(t1.symbols)
    state_map: dict[tuple[int, int, int], int] = {}
    queue: deque[tuple[int, int, int]] = deque()

    def state_of(q1: int, q2: int, f: int) -> int:
        key = (q1, q2, f)
        q = state_map.get(key)
        if q is None:
            q = out.add_state()
            state_map[key] = q
            w1 = t1.final_weight(q1)
            w2 = t2.final_weight(q2)
            if w1 is not None and w2 is not None:
                out.set_final(q, w1 + w2)
            queue.append(key)
        return q

    out.set_start(state_of(t1.start, t2.start, 0))
    while queue:
        q1, q2, f = queue.popleft()
        src = state_map[(q1, q2, f)]
        # Matched moves: t1 output meets an equal t2 input; resets the filter.
        for a1 in t1.arcs(q1):
            if a1.olabel == EPSILON:
                continue
            for a2 in t2.arcs_matching(q2, a1.olabel):
                out.add_arc(src, a1.ilabel, a2.olabel, a1.weight + a2.weight,
                            state_of(a1.dst, a2.dst, 0))
        # t1-only moves (epsilon output): allowed until a t2-only move happens.
        if f != 2:
            for a1 in t1.arcs(q1):
                if a1.olabel != EPSILON:
                    continue
                out.add_arc(src, a1.ilabel, EPSILON, a1.weight, state_of(a1.dst, q2, 1))
        # t2-only moves (epsilon input): always allowed, close the block.
        for a2 in t2.arcs_matching(q2, EPSILON):
            out.add_arc(src, EPSILON, a2.olabel, a2.weight, state_of(q1, a2.dst, 2))
    out.sort_arcs()
    return out


def _completion_costs(t: Wfst) -> list[float]:
    """Cheapest cost from each state to acceptance (final weight included).

    Dijkstra over reversed arcs; weights are non-negative by construction.
    Unco-accessible states get +inf.
    """
    n = t.num_states()
    rev: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for q in range(n):
        for a in t.arcs(q):
            rev[a.dst].append((q, a.weight))
    dist = [math.inf] * n
    heap = []
    for q, w in t.finals.items():
        if w < dist[q]:
            dist[q] = w
            heapq.heappush(heap, (w, q))
    while heap:
        d, q = heapq.heappop(heap)
        if d > dist[q]:
            continue
        for src, w in rev[q]:
            nd = d + w
            if nd < dist[src]:
                dist[src] = nd
                heapq.heappush(heap, (nd, src))
    return dist


def _is_acyclic(t: Wfst) -> bool:
    n = t.num_states()
    WHITE, GRAY, BLACK = 0, 1, 2
    color = [WHITE] * n
    for root in range(n):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(t.arcs(root)))]
        color[root] = GRAY
        while stack:
            q, it = stack[-1]
            advanced = False
            for a in it:
                if color[a.dst] == GRAY:
                    return False
                if color[a.dst] == WHITE:
                    color[a.dst] = GRAY
                    stack.append((a.dst, iter(t.arcs(a.dst))))
                    advanced = True
                    break
            if not advanced:
                color[q] = BLACK
                stack.pop()
    return True


def n_shortest_paths(t: Wfst, n: int) -> list[Path]:
    """Up to n cheapest successful paths, ties broken by output label sequence.

    A* over partial paths with exact completion costs as the heuristic; the
    priority carries the rendered output labels so completed paths pop in
    (total_weight, olabels) order.  On cyclic machines each state's expansion
    count is capped, which prunes partial paths that can no longer reach the
    n best and guarantees termination even with zero-cost cycles.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if t.start is None:
        return []
    t.sort_arcs()
    phi = _completion_costs(t)
    if phi[t.start] == math.inf:
        return []
    budget = None if _is_acyclic(t) else n + _CYCLIC_POP_SLACK
    DONE = -1
    counter = 0
    # Entries: (priority, olabels, ilabels, tiebreak, state, cost, arc_chain)
    # where arc_chain is a linked (parent, triple) pair, None at the start.
    heap = [(phi[t.start], (), (), 0, t.start, 0.0, None)]
    pops: dict[int, int] = {}
    results: list[Path] = []
    while heap:
        f, olabs, ilabs, _, q, cost, chain = heapq.heappop(heap)
        if q == DONE:
            arcs = []
            node = chain
            while node is not None:
                arcs.append(node[1])
                node = node[0]
            arcs.reverse()
            results.append(_make_path(arcs, f - cost))
            if len(results) == n:
                break
            continue
        if budget is not None:
            seen = pops.get(q, 0) + 1
            if seen > budget:
                continue
            pops[q] = seen
        fw = t.final_weight(q)
        if fw is not None:
            counter += 1
            heapq.heappush(heap, (cost + fw, olabs, ilabs, counter, DONE, cost, chain))
        for a in t.arcs(q):
            if phi[a.dst] == math.inf:
                continue
            c2 = cost + a.weight
            counter += 1
            heapq.heappush(heap, (
                c2 + phi[a.dst],
                olabs if a.olabel == EPSILON else olabs + (a.olabel,),
                ilabs if a.ilabel == EPSILON else ilabs + (a.ilabel,),
                counter,
                a.dst,
                c2,
                (chain, (a.ilabel, a.olabel, a.weight)),
            ))
    return results


def shortest_cost(t: Wfst) -> float | None:
    """Minimum cost over all successful paths, or None if the language is empty."""
    if t.start is None:
        return None
    phi = _completion_costs(t)
    c = phi[t.start]
    return None if c == math.inf else c


def path_weight(t: Wfst, tokens) -> float | None:
    """Minimum cost with which t accepts the token sequence (None if rejected)."""
    chain = linear_chain(tokens, t.symbols)
    return shortest_cost(compose(chain, t))
