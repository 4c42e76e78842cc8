import { renderChart, Trace } from "./charts.js";
import { effortError } from "./errorMetric.js";
import { DEFAULT_GESTURE, ForceGesture } from "./gesture.js";
import type { GainsChanged, Telemetry } from "./protocol.js";
import { TelemetryRing } from "./ringbuffer.js";
import { SessionClient, WsLike } from "./session.js";
import { renderTrack } from "./track.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const ring = new TelemetryRing(10);
let gains: GainsChanged | null = null;
let latest: Telemetry | null = null;
let lost = false;
let lastFrameAt = 0;

const trackCanvas = $<HTMLCanvasElement>("track");
const posCanvas = $<HTMLCanvasElement>("chart-pos");
const effortCanvas = $<HTMLCanvasElement>("chart-effort");
const statusEl = $<HTMLSpanElement>("status");
const errorEl = $<HTMLSpanElement>("effort-error");
const alphaSlider = $<HTMLInputElement>("alpha");
const alphaLabel = $<HTMLSpanElement>("alpha-value");
const controllerSel = $<HTMLSelectElement>("controller");
const showRef = $<HTMLInputElement>("show-ref");
const clampEl = $<HTMLSpanElement>("clamp");
const forceEl = $<HTMLSpanElement>("force-value");
const dragArea = $<HTMLDivElement>("drag-area");

const params = new URLSearchParams(window.location.search);
const scenario = params.get("scenario") ?? "live_reaching";
const wsUrl = `${window.location.protocol === "https:" ? "wss" : "ws"}://${
  window.location.host
}/session?scenario=${encodeURIComponent(scenario)}`;

const client = new SessionClient(new WebSocket(wsUrl) as unknown as WsLike, {
  onGains: (g) => {
    gains = g;
    alphaSlider.value = String(g.alpha);
    alphaLabel.textContent = g.alpha.toFixed(2);
    controllerSel.value = g.controller;
    statusEl.textContent = `session ${g.session} (${g.controller})`;
  },
  onTelemetry: (t) => {
    latest = t;
    ring.push(t);
    lastFrameAt = performance.now();
  },
  onError: (e) => {
    statusEl.textContent = `server error: ${e.message}`;
  },
  onClose: () => {
    lost = true;
    statusEl.textContent = "disconnected";
  },
});

const gesture = new ForceGesture((force) => {
  client.sendForce(force);
  forceEl.textContent = `${force.toFixed(1)} N`;
  clampEl.hidden = !gesture.clamped;
}, DEFAULT_GESTURE);

dragArea.addEventListener("pointerdown", (e) => {
  dragArea.setPointerCapture(e.pointerId);
  gesture.grab(e.clientX);
});
dragArea.addEventListener("pointermove", (e) => gesture.move(e.clientX));
dragArea.addEventListener("pointerup", () => gesture.release());
dragArea.addEventListener("pointercancel", () => gesture.release());

alphaSlider.addEventListener("change", () => {
  // Slider bounds (0.01..0.99) keep requests inside the server's open (0,1).
  const alpha = Math.min(0.99, Math.max(0.01, Number(alphaSlider.value)));
  client.requestControl({ type: "set_alpha", alpha });
});
alphaSlider.addEventListener("input", () => {
  alphaLabel.textContent = Number(alphaSlider.value).toFixed(2);
});
controllerSel.addEventListener("change", () => {
  client.requestControl({
    type: "set_controller",
    controller: controllerSel.value as "cgt" | "lqr" | "ncgt",
  });
});
$<HTMLButtonElement>("reset").addEventListener("click", () => {
  client.requestControl({ type: "reset" });
  ring.clear();
});

const positionTraces: Trace[] = [{ label: "pos", color: "#1a202c", pick: (t) => t.pos[0] }];
const effortTraces: Trace[] = [
  { label: "u_h", color: "#2b6cb0", pick: (t) => t.u_h[0] },
  { label: "u_r", color: "#c53030", pick: (t) => t.u_r[0] },
  { label: "u_h nominal", color: "#805ad5", pick: (t) => t.u_h_nominal[0] },
];

function frame(): void {
  const stale = lost || (latest !== null && performance.now() - lastFrameAt > 500);
  renderTrack(trackCanvas, {
    telemetry: latest,
    gains,
    showAgreedRef: showRef.checked,
    connectionLost: lost,
  });
  renderChart(posCanvas, ring, positionTraces, stale);
  renderChart(effortCanvas, ring, effortTraces, stale);
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);

// Windowed model-fit readout, refreshed once a second over the last 3.5 s.
setInterval(() => {
  const now = latest?.time ?? 0;
  const err = effortError(ring.window(now - 3.5, now));
  errorEl.textContent = err === null ? "n/a" : err.toFixed(3);
}, 1000);
