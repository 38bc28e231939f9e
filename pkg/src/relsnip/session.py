"""Session engine: repository ingestion, live windows, persistence, export.

One engine holds any number of repositories and sessions.  Repositories are
content-addressed (same document bytes give the same id) and carry the model
grid plus compiled automata; sessions serialize their exchanges so results
arrive in order.  Every append runs the full window pipeline: normalize,
re-window, tone, model selection, term extraction, snippet scoring.
"""

from __future__ import annotations

import csv
import io
import json
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from relsnip.extraction import (ExtractionConfig, RelevantTerm, Snippet,
                                extract_relevant_terms, score_snippet,
                                segment_snippets, select_snippets)
from relsnip.fst import SymbolTable, Wfst
from relsnip.ngram import (ModelGrid, build_grid, corpus_fingerprint,
                           load_grid, save_grid, select_model, to_wfst)
from relsnip.textproc import (DEFAULT_WINDOW_TOKENS, Document, Exchange,
                              SourceStream, latest_window, load_stoplist,
                              normalize, stem_match_offsets, tokenize)
from relsnip.tone import (LexiconToneScorer, ToneClientConfig, ToneProfile,
                          ToneServiceError, analyze_tone)

RATINGS = ("up", "down")

TRANSCRIPT_SPEAKERS = {"A": "analyst", "B": "stakeholder"}


@dataclass
class WindowResult:
    """Everything one window produced, plus the wall-clock latency."""

    index: int
    window_tokens: list[str]
    method: str | None
    order: int | None
    terms: list[RelevantTerm]
    snippets: list[Snippet]
    tones: ToneProfile
    latency_ms: float
    note: str = ""
    highlights: dict[str, list[tuple[int, int]]] = field(default_factory=dict)


@dataclass
class Feedback:
    window: int
    rating: str
    note: str | None = None
    key: str | None = None


class Session:
    def __init__(self, session_id: str, repository_id: str,
                 config: ExtractionConfig, window_size: int):
        self.id = session_id
        self.repository_id = repository_id
        self.config = config
        self.stream = SourceStream(window_size_tokens=window_size)
        self.history: list[WindowResult] = []
        self.feedback: list[Feedback] = []
        self.lock = threading.Lock()
        self.listeners: list = []

    def latest(self) -> WindowResult | None:
        return self.history[-1] if self.history else None


class Repository:
    def __init__(self, repo_id: str, documents: list[Document], grid: ModelGrid):
        self.id = repo_id
        self.documents = documents
        self.grid = grid
        self.symbols = SymbolTable()
        self._wfst_cache: dict[tuple[str, int], Wfst] = {}
        self._segment_cache: dict[int, list[Snippet]] = {}
        self._lock = threading.Lock()

    def wfst(self, method: str, order: int) -> Wfst:
        key = (method, order)
        with self._lock:
            t = self._wfst_cache.get(key)
            if t is None:
                t = to_wfst(self.grid.models[key], self.symbols)
                self._wfst_cache[key] = t
            return t

    def segments(self, snippet_len: int) -> list[Snippet]:
        with self._lock:
            cached = self._segment_cache.get(snippet_len)
            if cached is None:
                cfg = ExtractionConfig(snippet_len=snippet_len)
                cached = [s for doc in self.documents
                          for s in segment_snippets(doc, cfg)]
                self._segment_cache[snippet_len] = cached
            return cached


class Engine:
    """Binds the pipeline together; safe for concurrent sessions."""

    def __init__(self, store_dir=None, tone_client=None,
                 tone_config: ToneClientConfig | None = None,
                 stoplist=None, window_size: int = DEFAULT_WINDOW_TOKENS,
                 clock=time.perf_counter, warm_wfsts: bool = True):
        self.store_dir = Path(store_dir) if store_dir else None
        self.tone_client = tone_client
        self.tone_config = tone_config or ToneClientConfig()
        self.stoplist = stoplist if stoplist is not None else load_stoplist()
        self.window_size = window_size
        self.clock = clock
        self.warm_wfsts = warm_wfsts
        self._lexicon_scorer = LexiconToneScorer()
        self._repositories: dict[str, Repository] = {}
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._session_counter = 0

    # -- repositories --------------------------------------------------------

    def ingest_repository(self, paths=None, documents=None) -> str:
        """Normalize documents, build and archive the model grid.

        Accepts file paths or (title, text) pairs.  The returned id is a
        content hash, so ingesting identical bytes twice is a no-op.
        """
        docs = []
        if paths:
            for p in paths:
                p = Path(p)
                try:
                    text = p.read_text(encoding="utf-8")
                except UnicodeDecodeError as exc:
                    raise ValueError(f"file {p} is not valid UTF-8: {exc}") from exc
                docs.append(Document.from_text(p.name, text, self.stoplist))
        if documents:
            for title, text in documents:
                docs.append(Document.from_text(title, text, self.stoplist))
        if not docs or all(not d.raw_text.strip() for d in docs):
            raise ValueError("empty repository")
        repo_id = corpus_fingerprint(docs)
        with self._lock:
            if repo_id in self._repositories:
                return repo_id
        grid = build_grid(docs)
        repo = Repository(repo_id, docs, grid)
        if self.warm_wfsts:
            for key in grid.models:
                repo.wfst(*key)
        with self._lock:
            self._repositories[repo_id] = repo
        if self.store_dir:
            self._persist_repository(repo)
        return repo_id

    def _repo_dir(self, repo_id: str) -> Path:
        return self.store_dir / "repos" / repo_id

    def _persist_repository(self, repo: Repository):
        persist_repository(repo, self._repo_dir(repo.id))

    def load_repository_dir(self, directory, expect_fingerprint=None) -> str:
        """Register a repository from an archive directory; returns its id."""
        directory = Path(directory)
        grid = load_grid(directory, expect_fingerprint=expect_fingerprint)
        raw = json.loads((directory / "documents.json").read_text("utf-8"))
        docs = [Document.from_text(d["id"], d["text"], self.stoplist, title=d["title"])
                for d in raw]
        repo = Repository(grid.fingerprint, docs, grid)
        if self.warm_wfsts:
            for key in grid.models:
                repo.wfst(*key)
        with self._lock:
            self._repositories[repo.id] = repo
        return repo.id

    def get_repository(self, repo_id: str) -> Repository:
        with self._lock:
            repo = self._repositories.get(repo_id)
        if repo is not None:
            return repo
        if self.store_dir and self._repo_dir(repo_id).exists():
            self.load_repository_dir(self._repo_dir(repo_id), expect_fingerprint=repo_id)
            with self._lock:
                return self._repositories[repo_id]
        raise KeyError(f"unknown repository {repo_id}")

    # -- sessions ------------------------------------------------------------

    def create_session(self, repository_id: str,
                       config: ExtractionConfig | None = None) -> Session:
        self.get_repository(repository_id)  # validate it exists
        with self._lock:
            self._session_counter += 1
            session_id = f"s{self._session_counter:06d}"
            session = Session(session_id, repository_id,
                              config or ExtractionConfig(), self.window_size)
            self._sessions[session_id] = session
        return session

    def get_session(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise KeyError(f"unknown session {session_id}")
        return session

    def append_exchange(self, session: Session, speaker: str, text: str) -> WindowResult:
        """Run the full pipeline for one new turn and append the result."""
        with session.lock:
            started = self.clock()
            repo = self.get_repository(session.repository_id)
            tokens = normalize(tokenize(text), self.stoplist)
            exchange = Exchange(index=len(session.stream), speaker=speaker,
                                text=text, tokens=tuple(tokens),
                                timestamp=time.time())
            session.stream.append(exchange)
            window = latest_window(session.stream)
            notes = []

            try:
                tones = analyze_tone(text, self.tone_config,
                                     client=self.tone_client,
                                     lexicon_scorer=self._lexicon_scorer) \
                    if text.strip() else ToneProfile({}, source="lexicon")
            except ToneServiceError:
                tones = ToneProfile({}, source="unavailable")
                notes.append("tone service unavailable")

            if not window:
                notes.insert(0, "no conversation content")
                result = WindowResult(index=len(session.history),
                                      window_tokens=[], method=None, order=None,
                                      terms=[], snippets=[], tones=tones,
                                      latency_ms=(self.clock() - started) * 1000.0,
                                      note="; ".join(notes))
            else:
                method, order = select_model(repo.grid, window)
                lm = repo.wfst(method, order)
                terms = extract_relevant_terms(lm, window, session.config)
                if not terms:
                    notes.append("no overlap with domain repository")
                    snippets = []
                else:
                    snippets = [replace(s, score=0.0, matched_terms=[])
                                for s in repo.segments(session.config.snippet_len)]
                    for s in snippets:
                        score_snippet(s, terms)
                    snippets = select_snippets(snippets, tones, session.config)
                    if not snippets:
                        notes.append("no relevant snippet")
                highlights = {t.surface: stem_match_offsets(text, t.surface)
                              for t in terms}
                highlights = {k: v for k, v in highlights.items() if v}
                result = WindowResult(index=len(session.history),
                                      window_tokens=list(window),
                                      method=method, order=order, terms=terms,
                                      snippets=snippets, tones=tones,
                                      latency_ms=(self.clock() - started) * 1000.0,
                                      note="; ".join(notes),
                                      highlights=highlights)
            session.history.append(result)
            self._log_event(session, "result", window_result_dict(result))
        for listener in list(session.listeners):
            listener(result)
        return result

    def record_feedback(self, session: Session, window: int, rating: str,
                        note: str | None = None, key: str | None = None) -> Feedback:
        if rating not in RATINGS:
            raise ValueError(f"rating must be one of {RATINGS}")
        if not 0 <= window < len(session.history):
            raise ValueError(f"window {window} out of range")
        with session.lock:
            if key is not None:
                for existing in session.feedback:
                    if existing.key == key:
                        return existing
            fb = Feedback(window=window, rating=rating, note=note, key=key)
            session.feedback.append(fb)
            self._log_event(session, "feedback",
                            {"window": window, "rating": rating, "note": note})
        return fb

    def _log_event(self, session: Session, kind: str, payload: dict):
        if not self.store_dir:
            return
        directory = self.store_dir / "sessions"
        directory.mkdir(parents=True, exist_ok=True)
        line = json.dumps({"kind": kind, "session": session.id, **payload},
                          ensure_ascii=False, sort_keys=True)
        with open(directory / f"{session.id}.jsonl", "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    # -- replay and export ---------------------------------------------------

    def replay(self, repository_id: str, transcript_path,
               config: ExtractionConfig | None = None) -> Session:
        """Feed a speaker-tagged transcript file through a fresh session."""
        session = self.create_session(repository_id, config)
        with open(transcript_path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                tag, sep, text = line.partition("\t")
                if not sep or tag not in TRANSCRIPT_SPEAKERS:
                    raise ValueError(
                        f"{transcript_path}:{lineno}: expected 'A<TAB>text' or 'B<TAB>text'")
                self.append_exchange(session, TRANSCRIPT_SPEAKERS[tag], text)
        return session


def persist_repository(repo: Repository, directory) -> None:
    """Write a repository archive: model grid files plus the raw documents."""
    directory = Path(directory)
    save_grid(repo.grid, directory)
    docs = [{"id": d.id, "title": d.title, "text": d.raw_text}
            for d in repo.documents]
    (directory / "documents.json").write_text(
        json.dumps(docs, ensure_ascii=False), encoding="utf-8")


def term_dict(term: RelevantTerm) -> dict:
    return {"surface": term.surface, "cost": term.cost, "rank": term.rank}


def snippet_dict(snippet: Snippet) -> dict:
    matched = [t if isinstance(t, str) else t.surface for t in snippet.matched_terms]
    return {"doc_id": snippet.doc_id, "start": snippet.start, "end": snippet.end,
            "score": snippet.score, "text": snippet.text, "matched": matched}


def tones_dict(tones: ToneProfile) -> dict:
    from relsnip.tone import TONES
    return {tone: tones.score(tone) for tone in TONES}


def window_result_dict(result: WindowResult) -> dict:
    return {
        "index": result.index,
        "tokens": list(result.window_tokens),
        "model": ({"method": result.method, "order": result.order}
                  if result.method else None),
        "terms": [term_dict(t) for t in result.terms],
        "snippets": [snippet_dict(s) for s in result.snippets],
        "tones": tones_dict(result.tones),
        "latency_ms": result.latency_ms,
        "note": result.note,
        "highlights": {k: [list(span) for span in v]
                       for k, v in result.highlights.items()},
    }


def session_dict(session: Session) -> dict:
    return {
        "id": session.id,
        "repository_id": session.repository_id,
        "config": {"z": session.config.z, "m": session.config.m,
                   "snippet_len": session.config.snippet_len,
                   "mode": session.config.mode},
        "windows": [window_result_dict(r) for r in session.history],
        "feedback": [{"window": f.window, "rating": f.rating, "note": f.note}
                     for f in session.feedback],
    }


def export_session(session: Session, fmt: str = "json") -> str:
    """Serialize a session (JSON schema or flat CSV, one row per window)."""
    if not session.history:
        raise ValueError("session has no results to export")
    if fmt == "json":
        return json.dumps(session_dict(session), indent=2, ensure_ascii=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["window", "model", "top_terms", "snippet_keys",
                         "analytical", "confident", "tentative", "latency_ms"])
        for r in session.history:
            model = f"{r.method}-{r.order}" if r.method else ""
            writer.writerow([
                r.index, model,
                ";".join(t.surface for t in r.terms),
                ";".join(s.key for s in r.snippets),
                r.tones.score("analytical"), r.tones.score("confident"),
                r.tones.score("tentative"), r.latency_ms,
            ])
        return buf.getvalue()
    raise ValueError(f"unsupported export format {fmt!r}")


def import_session(payload: str) -> Session:
    """Rebuild a session object from its JSON export (round-trip safe)."""
    data = json.loads(payload)
    config = ExtractionConfig(**data["config"])
    session = Session(data["id"], data["repository_id"], config,
                      window_size=DEFAULT_WINDOW_TOKENS)
    for w in data["windows"]:
        model = w.get("model") or {}
        terms = [RelevantTerm(t["surface"], t["cost"], t["rank"]) for t in w["terms"]]
        snippets = []
        for s in w["snippets"]:
            snippet = Snippet(doc_id=s["doc_id"], start=s["start"], end=s["end"],
                              text=s["text"], score=s["score"])
            snippet.matched_terms = list(s["matched"])
            snippets.append(snippet)
        tone_scores = {k: v for k, v in w["tones"].items() if v}
        session.history.append(WindowResult(
            index=w["index"], window_tokens=list(w["tokens"]),
            method=model.get("method"), order=model.get("order"),
            terms=terms, snippets=snippets,
            tones=ToneProfile(tone_scores),
            latency_ms=w["latency_ms"], note=w.get("note", ""),
            highlights={k: [tuple(span) for span in v]
                        for k, v in w.get("highlights", {}).items()}))
    for f in data["feedback"]:
        session.feedback.append(Feedback(window=f["window"], rating=f["rating"],
                                         note=f.get("note")))
    return session
