import type { Telemetry } from "./protocol.js";
import type { TelemetryRing } from "./ringbuffer.js";

// Rolling multi-trace line chart over the telemetry ring. Each trace maps
// one scalar out of a telemetry frame; samples are drawn exactly as
// stored, one vertex per frame.
export interface Trace {
  label: string;
  color: string;
  pick: (t: Telemetry) => number;
}

export function renderChart(
  canvas: HTMLCanvasElement,
  ring: TelemetryRing,
  traces: Trace[],
  stale: boolean,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const samples = ring.all();
  if (samples.length >= 2) {
    const t0 = samples[0].time;
    const t1 = samples[samples.length - 1].time;
    let lo = Infinity;
    let hi = -Infinity;
    for (const trace of traces) {
      for (const s of samples) {
        const v = trace.pick(s);
        if (v < lo) lo = v;
        if (v > hi) hi = v;
      }
    }
    if (hi - lo < 1e-9) {
      hi += 0.5;
      lo -= 0.5;
    }
    const toX = (t: number) => ((t - t0) / Math.max(t1 - t0, 1e-9)) * (width - 10) + 5;
    const toY = (v: number) => height - 5 - ((v - lo) / (hi - lo)) * (height - 24);

    ctx.strokeStyle = "#e2e8f0";
    ctx.lineWidth = 1;
    const zeroY = toY(0);
    if (zeroY >= 0 && zeroY <= height) {
      ctx.beginPath();
      ctx.moveTo(5, zeroY);
      ctx.lineTo(width - 5, zeroY);
      ctx.stroke();
    }
    for (const trace of traces) {
      ctx.strokeStyle = trace.color;
      ctx.lineWidth = 1.5;
      ctx.beginPath();
      samples.forEach((s, i) => {
        const x = toX(s.time);
        const y = toY(trace.pick(s));
        if (i === 0) ctx.moveTo(x, y);
        else ctx.lineTo(x, y);
      });
      ctx.stroke();
    }
  }
  let lx = 8;
  ctx.font = "11px sans-serif";
  for (const trace of traces) {
    ctx.fillStyle = trace.color;
    ctx.fillText(trace.label, lx, 12);
    lx += ctx.measureText(trace.label).width + 14;
  }
  if (stale) {
    ctx.fillStyle = "rgba(113, 128, 150, 0.9)";
    ctx.fillRect(width - 52, 2, 50, 16);
    ctx.fillStyle = "#fff";
    ctx.fillText("stale", width - 44, 14);
  }
}
