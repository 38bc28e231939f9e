// Thin DOM layer: draws whatever the store says. Charts are plain SVG so
// the companion has no runtime dependencies.

import { ToneSeries } from "./charts";
import { HighlightSegment, SessionStore, SessionViewState } from "./store";
import { ChartKind } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";

function clear(node: Element): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

function radarPoints(series: ToneSeries, r: number, cx: number, cy: number): string {
  const n = series.values.length;
  return series.values
    .map((v, i) => {
      const angle = (Math.PI * 2 * i) / n - Math.PI / 2;
      const rad = r * Math.max(0.02, v);
      return `${cx + rad * Math.cos(angle)},${cy + rad * Math.sin(angle)}`;
    })
    .join(" ");
}

export function drawChart(svg: SVGSVGElement, series: ToneSeries): void {
  clear(svg);
  const size = 220;
  svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
  const doc = svg.ownerDocument;
  if (series.kind === "radar") {
    const poly = doc.createElementNS(SVG_NS, "polygon");
    poly.setAttribute("points", radarPoints(series, 90, size / 2, size / 2));
    poly.setAttribute("class", "radar-area");
    svg.appendChild(poly);
  } else if (series.kind === "bar") {
    series.values.forEach((v, i) => {
      const rect = doc.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(10 + i * 34));
      rect.setAttribute("width", "26");
      rect.setAttribute("y", String(size - 20 - v * 180));
      rect.setAttribute("height", String(v * 180));
      rect.setAttribute("class", `bar bar-${series.labels[i]}`);
      svg.appendChild(rect);
    });
  } else {
    const total = series.values.reduce((a, b) => a + b, 0) || 1;
    let angle = -Math.PI / 2;
    series.values.forEach((v, i) => {
      const sweep = (v / total) * Math.PI * 2;
      const path = doc.createElementNS(SVG_NS, "path");
      const [cx, cy, r] = [size / 2, size / 2, 90];
      const x1 = cx + r * Math.cos(angle);
      const y1 = cy + r * Math.sin(angle);
      angle += sweep;
      const x2 = cx + r * Math.cos(angle);
      const y2 = cy + r * Math.sin(angle);
      const large = sweep > Math.PI ? 1 : 0;
      path.setAttribute(
        "d",
        `M ${cx} ${cy} L ${x1} ${y1} A ${r} ${r} 0 ${large} 1 ${x2} ${y2} Z`,
      );
      path.setAttribute("class", `slice slice-${series.labels[i]}`);
      svg.appendChild(path);
    });
  }
  if (series.maxTone) svg.dataset.maxTone = series.maxTone;
  else delete svg.dataset.maxTone;
}

function renderTranscript(root: Element, state: SessionViewState,
                          segments: HighlightSegment[]): void {
  clear(root);
  const doc = root.ownerDocument;
  state.transcript.forEach((turn, i) => {
    const row = doc.createElement("div");
    row.className = `turn turn-${turn.speaker}`;
    const badge = doc.createElement("span");
    badge.className = "badge";
    badge.textContent = turn.speaker === "analyst" ? "A" : "B";
    row.appendChild(badge);
    const body = doc.createElement("span");
    if (i === state.transcript.length - 1 && segments.length) {
      for (const seg of segments) {
        if (seg.term) {
          const mark = doc.createElement("mark");
          mark.textContent = seg.text;
          mark.dataset.term = seg.term;
          body.appendChild(mark);
        } else {
          body.appendChild(doc.createTextNode(seg.text));
        }
      }
    } else {
      body.textContent = turn.text;
    }
    row.appendChild(body);
    root.appendChild(row);
  });
}

function renderSnippets(root: Element, state: SessionViewState): void {
  clear(root);
  const doc = root.ownerDocument;
  if (!state.latest) return;
  if (!state.latest.snippets.length) {
    const empty = doc.createElement("p");
    empty.className = "empty";
    empty.textContent = state.notice || "no domain overlap";
    root.appendChild(empty);
    return;
  }
  for (const snippet of state.latest.snippets) {
    const card = doc.createElement("article");
    card.className = "snippet-card";
    const head = doc.createElement("header");
    head.textContent = `${snippet.doc_id} [${snippet.start}, ${snippet.end}) ` +
      `score ${snippet.score.toFixed(4)}`;
    const body = doc.createElement("p");
    body.textContent = snippet.text;
    const terms = doc.createElement("footer");
    terms.textContent = snippet.matched.join(", ");
    card.append(head, body, terms);
    root.appendChild(card);
  }
}

export interface Panels {
  transcript: Element;
  snippets: Element;
  chart: SVGSVGElement;
  banner: Element;
  chartLabel: Element;
}

export function renderAll(panels: Panels, store: SessionStore): void {
  const state = store.state();
  renderTranscript(panels.transcript, state, store.highlightSegments());
  renderSnippets(panels.snippets, state);
  drawChart(panels.chart, store.toneSeries());
  panels.chartLabel.textContent = state.chartKind;
  panels.banner.textContent = state.stale
    ? "connection lost, showing last known results"
    : "";
  (panels.banner as HTMLElement).dataset.stale = state.stale ? "1" : "0";
}

export function bindChartCycle(button: Element, store: SessionStore,
                               next: (k: ChartKind) => ChartKind): void {
  button.addEventListener("click", () => {
    store.setChartKind(next(store.state().chartKind));
  });
}
