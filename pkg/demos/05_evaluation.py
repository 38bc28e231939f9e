"""Offline evaluation: edit distances against references, then Kruskal-Wallis.

Two extraction variants are compared by how far their term lists sit from
analyst references; the rank test says whether the difference is systematic.
"""

from relsnip import evaluate_extraction, kruskal_wallis, levenshtein
from relsnip.evaluation import ReferenceSet
from relsnip.extraction import RelevantTerm, Snippet

print("Token-level edit distance:")
print("  kitten vs sitting (chars):", levenshtein(list("kitten"), list("sitting")))
print("  [ticket queue] vs [ticket route queue]:",
      levenshtein(["ticket", "queue"], ["ticket", "route", "queue"]))

print("\nKruskal-Wallis on three separated groups:")
h, p = kruskal_wallis([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
print(f"  H = {h:.4f}, p = {p:.4f}")


def snippets_with(doc_id, term_lists):
    out = []
    for i, terms in enumerate(term_lists):
        s = Snippet(doc_id=doc_id, start=i, end=i + 1, text="", tokens=("x",))
        s.matched_terms = [RelevantTerm(t, 1.0, r + 1) for r, t in enumerate(terms)]
        out.append(s)
    return out


contextual = snippets_with("ctx", [["ticket", "queue"], ["agent", "queue"],
                                   ["escal", "ticket"], ["priorit", "queue"]])
frequency = snippets_with("frq", [["ticket"], ["page", "frequent"],
                                  ["common", "word"], ["page"]])
reference = ReferenceSet({s.key: ["ticket", "queue"] for s in contextual} |
                         {s.key: ["ticket", "queue"] for s in frequency})

report = evaluate_extraction({"contextual": contextual, "frequency": frequency},
                             reference)
print("\nGrouped comparison against the reference set:")
print(f"  distances: {report.distances}")
print(f"  H = {report.h_stat:.3f}, p = {report.p_value:.4f}, "
      f"reject H0 at alpha={report.alpha}: {report.reject_null}")
print("\nCSV report:")
print(report.to_csv())
