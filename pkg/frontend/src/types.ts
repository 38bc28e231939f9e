// Wire types mirroring the session service JSON schema.

export type ToneName =
  | "analytical"
  | "confident"
  | "tentative"
  | "joy"
  | "sadness"
  | "anger";

export const TONE_NAMES: ToneName[] = [
  "analytical",
  "confident",
  "tentative",
  "joy",
  "sadness",
  "anger",
];

export interface TermOut {
  surface: string;
  cost: number;
  rank: number;
}

export interface SnippetOut {
  doc_id: string;
  start: number;
  end: number;
  score: number;
  text: string;
  matched: string[];
}

export interface WindowResult {
  index: number;
  tokens: string[];
  model: { method: string; order: number } | null;
  terms: TermOut[];
  snippets: SnippetOut[];
  tones: Record<ToneName, number>;
  latency_ms: number;
  note?: string;
  highlights?: Record<string, [number, number][]>;
}

export type Speaker = "analyst" | "stakeholder";

export interface TranscriptTurn {
  speaker: Speaker;
  text: string;
}

export type Rating = "up" | "down";

export type ChartKind = "radar" | "bar" | "donut";

export const CHART_KINDS: ChartKind[] = ["radar", "bar", "donut"];

export interface FeedbackRecord {
  window: number;
  rating: Rating;
  note?: string;
  idempotencyKey: string;
  state: "pending" | "sent" | "unsent";
}

export interface OutboundConfig {
  type: "config";
  auto_snippets: boolean;
}

export interface OutboundFeedback {
  type: "feedback";
  window: number;
  rating: Rating;
  note?: string;
  idempotency_key: string;
}

export type OutboundMessage = OutboundConfig | OutboundFeedback;

export interface InboundAck {
  type: "config_ack" | "feedback_ack" | "error";
  [key: string]: unknown;
}
