// Reconnecting session stream. One subscription per open session tab;
// window results are forwarded as they arrive and after a reconnect the
// latest result is re-fetched so the view resumes without gaps.  Sending
// while down reports failure to the caller (the store keeps unsent feedback
// and flushes it once the stream is back), so nothing is queued twice.

import { InboundAck, OutboundMessage, WindowResult } from "./types";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onmessage: ((event: { data: string }) => void) | null;
}

export interface SessionSocketOptions {
  /** Creates one WebSocket-ish connection attempt. */
  connect: () => SocketLike;
  /** GET an URL and parse JSON; used to resume from the latest result. */
  fetchJson: (path: string) => Promise<unknown>;
  sessionId: string;
  onResult: (result: WindowResult) => void;
  onAck?: (ack: InboundAck) => void;
  onDown?: () => void;
  onUp?: () => void;
  maxReconnectAttempts?: number;
  reconnectDelayMs?: number;
  setTimeoutFn?: (fn: () => void, ms: number) => void;
}

export class SessionSocket {
  private socket: SocketLike | null = null;
  private open = false;
  private closed = false;
  private attempts = 0;

  constructor(private opts: SessionSocketOptions) {}

  start(): void {
    this.closed = false;
    this.connect();
  }

  stop(): void {
    this.closed = true;
    this.socket?.close();
    this.socket = null;
    this.open = false;
  }

  isOpen(): boolean {
    return this.open;
  }

  /** Returns true when the message went out; false while disconnected. */
  send(message: OutboundMessage): boolean {
    if (this.open && this.socket) {
      this.socket.send(JSON.stringify(message));
      return true;
    }
    return false;
  }

  private connect(): void {
    const socket = this.opts.connect();
    this.socket = socket;
    socket.onopen = () => {
      this.open = true;
      this.attempts = 0;
      this.opts.onUp?.();
      void this.resume();
    };
    socket.onmessage = (event) => {
      const data = JSON.parse(event.data) as Record<string, unknown>;
      if (typeof data.type === "string") {
        this.opts.onAck?.(data as InboundAck);
      } else {
        this.opts.onResult(data as unknown as WindowResult);
      }
    };
    socket.onclose = () => {
      this.open = false;
      if (this.closed) return;
      this.opts.onDown?.();
      this.reconnect();
    };
  }

  private reconnect(): void {
    const max = this.opts.maxReconnectAttempts ?? 10;
    if (this.attempts >= max) return;
    this.attempts += 1;
    const wait = (this.opts.reconnectDelayMs ?? 1000) * this.attempts;
    const later = this.opts.setTimeoutFn ?? ((fn, ms) => setTimeout(fn, ms));
    later(() => {
      if (!this.closed) this.connect();
    }, wait);
  }

  /** Out-of-order protection lives in the store (it discards indexes it has
   * already seen), so re-fetching the latest result is always safe. */
  private async resume(): Promise<void> {
    try {
      const latest = await this.opts.fetchJson(
        `/sessions/${this.opts.sessionId}/results/latest`,
      );
      if (latest && typeof latest === "object") {
        this.opts.onResult(latest as WindowResult);
      }
    } catch {
      // No results yet, or the fetch failed; the stream will fill the gap.
    }
  }
}
