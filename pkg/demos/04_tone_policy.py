"""The tone-driven snippet-count policy and the offline lexicon scorer.

High confidence plus analytical reasoning narrows the evidence to a single
snippet; tentativeness or shaky confidence widens it to three.
"""

from relsnip import analyze_tone, snippet_count_policy
from relsnip.tone import LexiconToneScorer, ToneClientConfig, ToneProfile

cases = [
    {"confident": 0.9, "analytical": 0.82},
    {"tentative": 0.84},
    {"confident": 0.6},
    {"analytical": 0.78},
    {},
]
print("profile -> snippets")
for scores in cases:
    print(f"  {scores or '{}'} -> {snippet_count_policy(ToneProfile(scores)).value}")

print("\nOffline lexicon scoring (deterministic, no network):")
scorer = LexiconToneScorer()
for text in [
    "Maybe we could possibly support that, I guess?",
    "The system must absolutely guarantee delivery, always.",
    "Therefore the evidence implies a structured analysis.",
]:
    profile = scorer.analyze(text)
    top = {k: round(v, 2) for k, v in profile.scores.items() if v}
    print(f"  {text!r}\n    -> {top}")

print("\nanalyze_tone falls back to the lexicon when no endpoint is configured:")
profile = analyze_tone("Perhaps the queue might overflow?", ToneClientConfig())
print("  source:", profile.source, " tentative:", round(profile.score("tentative"), 2))
