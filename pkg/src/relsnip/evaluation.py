"""Offline evaluation: edit distance, Kruskal-Wallis and batch reports.

Extracted term sequences are compared against analyst-authored references by
token-level Levenshtein distance; labeled groups of distances are then tested
for location differences with the rank-based Kruskal-Wallis H (chi-squared
approximation for the p-value).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from scipy.special import gammaincc

DEFAULT_ALPHA = 0.05


def levenshtein(a, b) -> int:
    """Token-level edit distance with unit-cost substitution, insertion and
    deletion.  Pass strings as character lists for a character-level distance."""
    a, b = list(a), list(b)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, start=1):
        current = [i]
        for j, tok_b in enumerate(b, start=1):
            current.append(min(
                previous[j - 1] + (0 if tok_a == tok_b else 1),
                previous[j] + 1,
                current[j - 1] + 1,
            ))
        previous = current
    return previous[len(b)]


def _ranks_with_ties(values):
    """Average ranks (1-based) and the tie-correction term sum(t^3 - t)."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    tie_term = 0
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j + 2) / 2.0  # mean of 1-based positions i+1 .. j+1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        t = j - i + 1
        tie_term += t ** 3 - t
        i = j + 1
    return ranks, tie_term


def kruskal_wallis(groups) -> tuple[float, float]:
    """Rank-based H with tie correction and its chi-squared p-value.

    Requires at least two non-empty groups and three observations in total;
    a sample where every observation is identical has no rank information.
    """
    groups = [list(g) for g in groups]
    if len(groups) < 2:
        raise ValueError("need at least two groups")
    if any(len(g) == 0 for g in groups):
        raise ValueError("groups must be non-empty")
    pooled = [x for g in groups for x in g]
    n = len(pooled)
    if n < 3:
        raise ValueError("need at least three observations in total")
    if len(set(pooled)) == 1:
        raise ValueError("degenerate: all values tied")
    ranks, tie_term = _ranks_with_ties(pooled)
    h = 0.0
    offset = 0
    for g in groups:
        r = sum(ranks[offset:offset + len(g)])
        h += r * r / len(g)
        offset += len(g)
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1)
    correction = 1.0 - tie_term / (n ** 3 - n)
    h /= correction
    h = max(h, 0.0)
    df = len(groups) - 1
    p = float(gammaincc(df / 2.0, h / 2.0))
    return h, p


@dataclass
class ReferenceSet:
    """Analyst-authored reference term sequences keyed by snippet."""

    terms: dict[str, list[str]]

    @classmethod
    def from_file(cls, path) -> "ReferenceSet":
        """Load `snippet-key<TAB>space-separated stems` lines."""
        terms: dict[str, list[str]] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                key, _, stems = line.partition("\t")
                if key in terms:
                    raise ValueError(f"duplicate reference key {key!r}")
                terms[key] = stems.split()
        return cls(terms)


@dataclass
class EvalReport:
    distances: dict[str, int]
    groups: dict[str, list[str]]
    h_stat: float | None
    p_value: float | None
    reject_null: bool | None
    alpha: float
    note: str = ""

    def to_json(self) -> str:
        payload = {
            "alpha": self.alpha,
            "distances": self.distances,
            "groups": self.groups,
            "h_stat": self.h_stat,
            "p_value": self.p_value,
            "reject_null": self.reject_null,
            "note": self.note,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["group", "snippet_key", "distance"])
        for label, keys in self.groups.items():
            for key in keys:
                writer.writerow([label, key, self.distances[key]])
        return buf.getvalue()


def _extracted_terms(snippet):
    return [t.surface for t in snippet.matched_terms]


def evaluate_extraction(extractions, reference: ReferenceSet,
                        alpha: float = DEFAULT_ALPHA) -> EvalReport:
    """Distance every extraction from its reference and test the groups.

    ``extractions`` is either a list of scored snippets (one unlabeled group)
    or a mapping from group label to such lists.  Every snippet key must
    appear in the reference set.
    """
    if not isinstance(extractions, dict):
        extractions = {"all": list(extractions)}
    missing = sorted({s.key for group in extractions.values() for s in group}
                     - set(reference.terms))
    if missing:
        raise KeyError(f"snippet keys missing from reference: {', '.join(missing)}")
    distances: dict[str, int] = {}
    groups: dict[str, list[str]] = {}
    for label, snippets in extractions.items():
        keys = []
        for s in snippets:
            distances[s.key] = levenshtein(_extracted_terms(s), reference.terms[s.key])
            keys.append(s.key)
        groups[label] = keys
    if len(groups) < 2:
        return EvalReport(distances=distances, groups=groups, h_stat=None,
                          p_value=None, reject_null=None, alpha=alpha,
                          note="single group: no hypothesis test")
    try:
        h, p = kruskal_wallis([[distances[k] for k in keys]
                               for keys in groups.values()])
    except ValueError as exc:
        if "tied" in str(exc):
            return EvalReport(distances=distances, groups=groups, h_stat=None,
                              p_value=None, reject_null=None, alpha=alpha,
                              note="no variance")
        raise
    return EvalReport(distances=distances, groups=groups, h_stat=h, p_value=p,
                      reject_null=p < alpha, alpha=alpha)
