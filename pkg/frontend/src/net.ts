/**
 * WebSocket client with reconnect and a single ordered outbound queue.
 *
 * While disconnected, sends are queued with a timestamp and the UI shows
 * an offline state; on reconnect the queue is flushed in order, but only
 * entries younger than one second. Stale intents are dropped rather than
 * surprising the operator with a late robot motion.
 */

import { ClientMsg, ServerMsg, encodeClientMsg, parseServerMsg } from "./protocol.js";

export interface WsLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export type SocketFactory = (url: string) => WsLike;
export type NetStatus = "connecting" | "online" | "offline";

export interface NetOptions {
  url: string;
  factory: SocketFactory;
  now?: () => number;
  schedule?: (fn: () => void, ms: number) => void;
  reconnectDelayMs?: number;
  queueMaxAgeMs?: number;
}

export const QUEUE_MAX_AGE_MS = 1000;

interface Queued {
  text: string;
  at: number;
}

export class NetClient {
  onMessage: (msg: ServerMsg) => void = () => {};
  onMalformed: (text: string) => void = () => {};
  onStatus: (status: NetStatus) => void = () => {};
  /** every incoming wire line before parsing, for envelope-log recording */
  onRaw: (text: string) => void = () => {};

  private readonly url: string;
  private readonly factory: SocketFactory;
  private readonly now: () => number;
  private readonly schedule: (fn: () => void, ms: number) => void;
  private readonly reconnectDelayMs: number;
  private readonly queueMaxAgeMs: number;

  private socket: WsLike | null = null;
  private open = false;
  private closed = false;
  private queue: Queued[] = [];
  private _status: NetStatus = "offline";
  private _dropped = 0;

  constructor(opts: NetOptions) {
    this.url = opts.url;
    this.factory = opts.factory;
    this.now = opts.now ?? (() => Date.now());
    this.schedule = opts.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.reconnectDelayMs = opts.reconnectDelayMs ?? 500;
    this.queueMaxAgeMs = opts.queueMaxAgeMs ?? QUEUE_MAX_AGE_MS;
  }

  get status(): NetStatus {
    return this._status;
  }

  /** total queued sends dropped as stale */
  get dropped(): number {
    return this._dropped;
  }

  connect(): void {
    if (this.closed) return;
    this.setStatus("connecting");
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      if (socket !== this.socket) return;
      this.open = true;
      this.setStatus("online");
      this.flush();
    };
    socket.onmessage = (ev) => {
      if (socket !== this.socket) return;
      const text = typeof ev.data === "string" ? ev.data : "";
      this.onRaw(text);
      const msg = parseServerMsg(text);
      if (msg === null) {
        this.onMalformed(text);
        return;
      }
      this.onMessage(msg);
    };
    const onGone = () => {
      if (socket !== this.socket) return;
      this.socket = null;
      this.open = false;
      if (this.closed) return;
      this.setStatus("offline");
      this.schedule(() => this.connect(), this.reconnectDelayMs);
    };
    socket.onclose = onGone;
    socket.onerror = onGone;
  }

  close(): void {
    this.closed = true;
    this.open = false;
    if (this.socket !== null) {
      this.socket.close();
      this.socket = null;
    }
    this.setStatus("offline");
  }

  send(msg: ClientMsg): void {
    const text = encodeClientMsg(msg);
    if (this.open && this.socket !== null) {
      this.socket.send(text);
      return;
    }
    this.queue.push({ text, at: this.now() });
  }

  private flush(): void {
    const cutoff = this.now() - this.queueMaxAgeMs;
    const pending = this.queue;
    this.queue = [];
    for (const entry of pending) {
      if (entry.at < cutoff) {
        this._dropped += 1;
        continue;
      }
      if (this.open && this.socket !== null) {
        this.socket.send(entry.text);
      }
    }
  }

  private setStatus(status: NetStatus): void {
    if (status === this._status) return;
    this._status = status;
    this.onStatus(status);
  }
}
