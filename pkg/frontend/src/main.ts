// Browser entry point: wire the socket, store and renderer together for one
// session tab. Expects the service to run on the same origin.

import { nextChartKind } from "./charts";
import { Panels, bindChartCycle, renderAll } from "./render";
import { SessionSocket } from "./socket";
import { SessionStore } from "./store";
import { Rating, WindowResult } from "./types";

function wsUrl(sessionId: string): string {
  const proto = window.location.protocol === "https:" ? "wss:" : "ws:";
  return `${proto}//${window.location.host}/sessions/${sessionId}/stream`;
}

export function mount(sessionId: string, root: Document = document): void {
  const panels: Panels = {
    transcript: root.querySelector("#transcript")!,
    snippets: root.querySelector("#snippets")!,
    chart: root.querySelector("#tone-chart") as unknown as SVGSVGElement,
    banner: root.querySelector("#banner")!,
    chartLabel: root.querySelector("#chart-kind")!,
  };

  const socket = new SessionSocket({
    connect: () => new WebSocket(wsUrl(sessionId)) as unknown as never,
    fetchJson: async (path) => (await fetch(path)).json(),
    sessionId,
    onResult: (result: WindowResult) => store.applyResult(result),
    onAck: (ack) => {
      if (ack.type === "feedback_ack" && typeof ack.window === "number") {
        store.acknowledgeFeedback(ack.window);
      }
    },
    onDown: () => store.markStale(),
    onUp: () => {
      store.markLive();
      store.flushUnsent();
    },
  });

  const store = new SessionStore((message) => socket.send(message));
  store.subscribe(() => renderAll(panels, store));

  bindChartCycle(root.querySelector("#chart-cycle")!, store, nextChartKind);
  root.querySelector("#auto-snippets")!.addEventListener("change", (ev) => {
    store.setAutoSnippets((ev.target as HTMLInputElement).checked);
  });
  root.querySelector("#thumbs-up")!.addEventListener("click", () => {
    submit("up");
  });
  root.querySelector("#thumbs-down")!.addEventListener("click", () => {
    submit("down");
  });

  function submit(rating: Rating): void {
    const latest = store.state().latest;
    if (latest) store.submitFeedback(latest.index, rating);
  }

  const form = root.querySelector("#say") as HTMLFormElement | null;
  form?.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const input = form.querySelector("input[name=text]") as HTMLInputElement;
    const speaker = (form.querySelector("select[name=speaker]") as HTMLSelectElement)
      .value as "analyst" | "stakeholder";
    if (!input.value) return;
    store.addTurn(speaker, input.value);
    void fetch(`/sessions/${sessionId}/exchanges`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ speaker, text: input.value }),
    });
    input.value = "";
  });

  socket.start();
  renderAll(panels, store);
}
