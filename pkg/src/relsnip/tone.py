"""Tone scoring for conversation turns and the snippet-count policy.

Scores come from a pluggable external HTTPS/JSON service; a deterministic
lexicon scorer serves as the offline fallback.  Only the analytical,
confident and tentative tones drive the snippet-count policy; joy, sadness
and anger are surfaced for display and follow-up prompts only.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources

from relsnip.textproc import tokenize

TONES = ("analytical", "confident", "tentative", "joy", "sadness", "anger")
# Some services report cheerfulness instead of joy.
_TONE_ALIASES = {"cheer": "joy", "cheerfulness": "joy"}

DOMINANCE_THRESHOLD = 0.5
DECISION_THRESHOLD = 0.75

# Calibration gain of the lexicon scorer: a text where one in five tokens
# hits the lexicon saturates the tone at 1.0.
LEXICON_GAIN = 5.0

SOURCES = ("external", "lexicon", "unavailable")


class SnippetCount(enum.Enum):
    ONE = 1
    THREE = 3


class ToneServiceError(RuntimeError):
    """The external tone service failed or returned garbage."""


@dataclass(frozen=True)
class ToneProfile:
    """Per-tone scores in [0, 1]; missing tones count as zero."""

    scores: dict[str, float] = field(default_factory=dict)
    source: str = "lexicon"

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}")
        for tone, value in self.scores.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"tone {tone!r} score {value} outside [0, 1]")

    def score(self, tone: str) -> float:
        return self.scores.get(tone, 0.0)

    def dominant(self) -> tuple[str, float] | None:
        """Highest-scoring tone at or above the dominance threshold."""
        best = None
        for tone in TONES:
            value = self.score(tone)
            if value >= DOMINANCE_THRESHOLD and (best is None or value > best[1]):
                best = (tone, value)
        return best


@dataclass
class ToneClientConfig:
    endpoint: str | None = None
    credentials: str | None = None
    timeout: float = 5.0
    fallback_enabled: bool = True

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


def parse_tone_payload(data) -> ToneProfile:
    """Parse the service wire format {"tones": {name: score, ...}}."""
    if not isinstance(data, dict) or not isinstance(data.get("tones"), dict):
        raise ToneServiceError(f"malformed tone payload: {data!r}")
    scores = {}
    for name, value in data["tones"].items():
        tone = _TONE_ALIASES.get(name, name)
        if tone not in TONES:
            continue
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ToneServiceError(f"non-numeric tone score for {tone!r}: {value!r}")
        if not 0.0 <= value <= 1.0:
            raise ToneServiceError(f"tone score out of range for {tone!r}: {value}")
        scores[tone] = value
    return ToneProfile(scores=scores, source="external")


class HttpToneClient:
    """Minimal JSON-over-HTTPS client for a hosted tone service."""

    def __init__(self, cfg: ToneClientConfig):
        if not cfg.endpoint:
            raise ValueError("tone client requires an endpoint")
        self.cfg = cfg

    def analyze(self, text: str) -> ToneProfile:
        import httpx

        headers = {}
        if self.cfg.credentials:
            headers["Authorization"] = f"Bearer {self.cfg.credentials}"
        try:
            response = httpx.post(self.cfg.endpoint, json={"text": text},
                                  headers=headers, timeout=self.cfg.timeout)
            response.raise_for_status()
            payload = response.json()
        except ToneServiceError:
            raise
        except Exception as exc:  # timeouts, transport errors, bad JSON
            raise ToneServiceError(str(exc)) from exc
        return parse_tone_payload(payload)


def load_tone_lexicons(directory=None) -> dict[str, frozenset[str]]:
    """One editable word list per tone, one word per line, `#` comments."""
    lexicons = {}
    for tone in TONES:
        if directory is None:
            text = resources.files("relsnip.data.tones").joinpath(f"{tone}.txt").read_text("utf-8")
        else:
            path = f"{directory}/{tone}.txt"
            try:
                with open(path, encoding="utf-8") as fh:
                    text = fh.read()
            except FileNotFoundError:
                lexicons[tone] = frozenset()
                continue
        words = set()
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip().lower()
            if line:
                words.add(line)
        lexicons[tone] = frozenset(words)
    return lexicons


class LexiconToneScorer:
    """Deterministic offline scorer: clipped lexicon hit rate per tone."""

    def __init__(self, lexicons: dict[str, frozenset[str]] | None = None):
        self.lexicons = lexicons if lexicons is not None else load_tone_lexicons()

    def analyze(self, text: str) -> ToneProfile:
        tokens = tokenize(text)
        denom = max(1, len(tokens))
        scores = {}
        for tone in TONES:
            lexicon = self.lexicons.get(tone, frozenset())
            hits = sum(1 for tok in tokens if tok in lexicon)
            scores[tone] = min(1.0, hits / denom * LEXICON_GAIN)
        return ToneProfile(scores=scores, source="lexicon")


class ReplayToneClient:
    """Serves recorded wire responses keyed by exact text; used in replays."""

    def __init__(self, responses: dict[str, dict]):
        self.responses = responses

    @classmethod
    def from_file(cls, path) -> "ReplayToneClient":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def analyze(self, text: str) -> ToneProfile:
        payload = self.responses.get(text)
        if payload is None:
            raise ToneServiceError(f"no recorded tone response for {text!r}")
        return parse_tone_payload(payload)


def analyze_tone(text: str, cfg: ToneClientConfig, client=None,
                 lexicon_scorer: LexiconToneScorer | None = None) -> ToneProfile:
    """Score a turn, falling back to the lexicon when the service fails."""
    if not text:
        raise ValueError("text must be non-empty")
    if client is None and cfg.endpoint:
        client = HttpToneClient(cfg)
    if client is not None:
        try:
            return client.analyze(text)
        except ToneServiceError:
            if not cfg.fallback_enabled:
                raise ToneServiceError("tone service unavailable")
    return (lexicon_scorer or LexiconToneScorer()).analyze(text)


def snippet_count_policy(profile: ToneProfile) -> SnippetCount:
    """How many snippets automatic mode shows for this tone profile.

    One snippet when both confidence and analytical tone are high, or when
    nothing signals uncertainty; three when the turn is tentative or when a
    reported confident tone stays below the decision threshold.
    """
    confident = profile.score("confident")
    analytical = profile.score("analytical")
    tentative = profile.score("tentative")
    if confident >= DECISION_THRESHOLD and analytical >= DECISION_THRESHOLD:
        return SnippetCount.ONE
    if tentative >= DECISION_THRESHOLD:
        return SnippetCount.THREE
    if DOMINANCE_THRESHOLD <= confident < DECISION_THRESHOLD:
        return SnippetCount.THREE
    return SnippetCount.ONE
