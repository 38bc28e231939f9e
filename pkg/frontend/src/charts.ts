// Pure chart-series computation shared by every chart kind.
// The renderer only draws what this module returns, so tests can assert on
// the series without a DOM.

import { CHART_KINDS, ChartKind, TONE_NAMES, ToneName, WindowResult } from "./types";

export interface ToneSeries {
  kind: ChartKind;
  labels: ToneName[];
  values: number[];
  /** Tone with the highest score, i.e. the visual maximum of the chart. */
  maxTone: ToneName | null;
}

export function toneSeries(
  tones: Record<ToneName, number> | undefined,
  kind: ChartKind,
): ToneSeries {
  const labels = [...TONE_NAMES];
  const values = labels.map((name) => tones?.[name] ?? 0);
  let maxTone: ToneName | null = null;
  let best = 0;
  values.forEach((value, i) => {
    if (value > best) {
      best = value;
      maxTone = labels[i];
    }
  });
  return { kind, labels, values, maxTone };
}

export function nextChartKind(kind: ChartKind): ChartKind {
  const i = CHART_KINDS.indexOf(kind);
  return CHART_KINDS[(i + 1) % CHART_KINDS.length];
}

/** Radar is the default, but bar/donut suit short turns with under three
 * reported emotions better. */
export function suggestedChartKind(result: WindowResult | null): ChartKind {
  if (!result) return "radar";
  const reported = TONE_NAMES.filter((t) => (result.tones[t] ?? 0) > 0).length;
  return reported >= 3 ? "radar" : "bar";
}
