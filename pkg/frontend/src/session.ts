import {
  ControlChange,
  GainsChanged,
  ServerError,
  Telemetry,
  encodeControl,
  encodeForce,
  parseServerMessage,
} from "./protocol.js";

// Minimal structural WebSocket so tests can inject a fake.
export interface WsLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onopen: (() => void) | null;
}

export interface SessionHandlers {
  onTelemetry?: (t: Telemetry) => void;
  onGains?: (g: GainsChanged) => void;
  onError?: (e: ServerError) => void;
  onClose?: () => void;
}

const WS_OPEN = 1;

// Client side of one live session. Control changes (alpha, controller,
// reset) are serialized: at most one is in flight until the server
// acknowledges with gains_changed (or an error), later requests queue.
// Force messages stream freely and are dropped while disconnected.
export class SessionClient {
  private sessionId: string | null = null;
  private pendingControl: ControlChange | null = null;
  private queuedControl: ControlChange | null = null;
  connected = true;
  sendFailures = 0;

  constructor(
    private readonly ws: WsLike,
    private readonly handlers: SessionHandlers = {},
  ) {
    ws.onmessage = (ev) => this.handleMessage(ev.data);
    ws.onclose = () => {
      this.connected = false;
      this.handlers.onClose?.();
    };
  }

  get id(): string | null {
    return this.sessionId;
  }

  get controlInFlight(): boolean {
    return this.pendingControl !== null;
  }

  sendForce(force: number): void {
    if (!this.connected || this.sessionId === null || this.ws.readyState !== WS_OPEN) {
      this.sendFailures++;
      return;
    }
    this.ws.send(encodeForce(this.sessionId, [force]));
  }

  // Returns false when the change was queued behind an in-flight one.
  requestControl(change: ControlChange): boolean {
    if (this.sessionId === null || !this.connected) {
      this.sendFailures++;
      return false;
    }
    if (this.pendingControl !== null) {
      this.queuedControl = change;
      return false;
    }
    this.pendingControl = change;
    this.ws.send(encodeControl(this.sessionId, change));
    return true;
  }

  private settleControl(): void {
    this.pendingControl = null;
    if (this.queuedControl !== null && this.sessionId !== null) {
      const next = this.queuedControl;
      this.queuedControl = null;
      this.pendingControl = next;
      this.ws.send(encodeControl(this.sessionId, next));
    }
  }

  private handleMessage(raw: string): void {
    const msg = parseServerMessage(raw);
    if (msg === null) return;
    switch (msg.type) {
      case "gains_changed":
        this.sessionId = msg.session;
        this.settleControl();
        this.handlers.onGains?.(msg);
        break;
      case "telemetry":
        this.handlers.onTelemetry?.(msg);
        break;
      case "error":
        // An in-flight control change that failed still settles the slot.
        this.settleControl();
        this.handlers.onError?.(msg);
        break;
    }
  }

  close(): void {
    this.connected = false;
    this.ws.close();
  }
}
