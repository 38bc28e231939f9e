// Session view state. Everything displayed derives from service messages
// plus two local toggles (chart kind, automatic snippets); no extraction
// logic and no stemming happen on the client.

import { toneSeries, ToneSeries } from "./charts";
import {
  ChartKind,
  FeedbackRecord,
  OutboundMessage,
  Rating,
  Speaker,
  TranscriptTurn,
  WindowResult,
} from "./types";

export interface HighlightSegment {
  text: string;
  term: string | null;
}

export interface SessionViewState {
  transcript: TranscriptTurn[];
  latest: WindowResult | null;
  snippetCount: number;
  chartKind: ChartKind;
  autoSnippets: boolean;
  stale: boolean;
  notice: string | null;
  feedback: FeedbackRecord[];
}

export type SendFn = (message: OutboundMessage) => boolean;

let keyCounter = 0;
function freshKey(): string {
  keyCounter += 1;
  return `fb-${keyCounter}`;
}

export class SessionStore {
  private transcript: TranscriptTurn[] = [];
  private latest: WindowResult | null = null;
  private chartKind: ChartKind = "radar";
  private autoSnippets = true;
  private stale = false;
  private feedback: FeedbackRecord[] = [];
  private listeners: Array<(state: SessionViewState) => void> = [];

  constructor(private send: SendFn) {}

  subscribe(listener: (state: SessionViewState) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    const state = this.state();
    for (const listener of this.listeners) listener(state);
  }

  state(): SessionViewState {
    return {
      transcript: [...this.transcript],
      latest: this.latest,
      snippetCount: this.latest ? this.latest.snippets.length : 0,
      chartKind: this.chartKind,
      autoSnippets: this.autoSnippets,
      stale: this.stale,
      notice: this.latest?.note || null,
      feedback: [...this.feedback],
    };
  }

  addTurn(speaker: Speaker, text: string): void {
    this.transcript.push({ speaker, text });
    this.emit();
  }

  /** Apply a streamed window result; out-of-order messages are discarded. */
  applyResult(result: WindowResult): void {
    if (this.latest && result.index <= this.latest.index) return;
    this.latest = result;
    this.stale = false;
    this.emit();
  }

  /** Rebuild from a session export (page reload path). The view after a
   * reload is identical to the live view because nothing is computed
   * client-side. */
  hydrate(windows: WindowResult[]): void {
    this.latest = null;
    for (const w of windows) this.applyResult(w);
  }

  toneSeries(): ToneSeries {
    return toneSeries(this.latest?.tones, this.chartKind);
  }

  setChartKind(kind: ChartKind): void {
    this.chartKind = kind;
    this.emit();
  }

  /** The toggle only issues a config change; the snippet count shown always
   * comes back from the service. */
  setAutoSnippets(on: boolean): void {
    this.autoSnippets = on;
    this.send({ type: "config", auto_snippets: on });
    this.emit();
  }

  markStale(): void {
    this.stale = true;
    this.emit();
  }

  markLive(): void {
    this.stale = false;
    this.emit();
  }

  submitFeedback(window: number, rating: Rating, note?: string): FeedbackRecord {
    const existing = this.feedback.find(
      (f) => f.window === window && f.rating === rating && f.note === note,
    );
    if (existing) return existing; // one stored record per logical action
    const record: FeedbackRecord = {
      window,
      rating,
      note,
      idempotencyKey: freshKey(),
      state: "pending",
    };
    this.feedback.push(record);
    const delivered = this.send({
      type: "feedback",
      window,
      rating,
      note,
      idempotency_key: record.idempotencyKey,
    });
    if (!delivered) record.state = "unsent";
    this.emit();
    return record;
  }

  acknowledgeFeedback(window: number): void {
    for (const f of this.feedback) {
      if (f.window === window && f.state === "pending") f.state = "sent";
    }
    this.emit();
  }

  /** Re-send anything that never made it out (offline submissions). */
  flushUnsent(): void {
    for (const f of this.feedback) {
      if (f.state !== "unsent") continue;
      const delivered = this.send({
        type: "feedback",
        window: f.window,
        rating: f.rating,
        note: f.note,
        idempotency_key: f.idempotencyKey,
      });
      f.state = delivered ? "pending" : "unsent";
    }
    this.emit();
  }

  /** Split the latest turn into plain and highlighted segments using the
   * service-provided stem-match offsets. */
  highlightSegments(): HighlightSegment[] {
    const turn = this.transcript[this.transcript.length - 1];
    if (!turn) return [];
    const spans: Array<{ start: number; end: number; term: string }> = [];
    const highlights = this.latest?.highlights ?? {};
    for (const [term, offsets] of Object.entries(highlights)) {
      for (const [start, end] of offsets) spans.push({ start, end, term });
    }
    spans.sort((a, b) => a.start - b.start || b.end - a.end);
    const segments: HighlightSegment[] = [];
    let cursor = 0;
    for (const span of spans) {
      if (span.start < cursor) continue; // overlapping span, keep the first
      if (span.start > cursor) {
        segments.push({ text: turn.text.slice(cursor, span.start), term: null });
      }
      segments.push({ text: turn.text.slice(span.start, span.end), term: span.term });
      cursor = span.end;
    }
    if (cursor < turn.text.length) {
      segments.push({ text: turn.text.slice(cursor), term: null });
    }
    return segments;
  }
}
