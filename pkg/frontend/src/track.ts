import type { GainsChanged, Telemetry } from "./protocol.js";

// 1-D track: current position, both targets, and (toggleable) the agreed
// reference, drawn per axis. Before any telemetry arrives only the frame
// is drawn, never stale markers.
export interface TrackState {
  telemetry: Telemetry | null;
  gains: GainsChanged | null;
  showAgreedRef: boolean;
  connectionLost: boolean;
}

interface Span {
  min: number;
  max: number;
}

function axisSpan(state: TrackState, axis: number): Span {
  const points: number[] = [0];
  if (state.gains) {
    points.push(state.gains.targets.human[axis], state.gains.targets.robot[axis]);
  }
  if (state.telemetry) points.push(state.telemetry.pos[axis]);
  const min = Math.min(...points);
  const max = Math.max(...points);
  const pad = 0.15 * Math.max(max - min, 0.5);
  return { min: min - pad, max: max + pad };
}

export function renderTrack(canvas: HTMLCanvasElement, state: TrackState): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);

  const axes = state.gains ? state.gains.targets.human.length : 1;
  const rowH = height / axes;
  for (let axis = 0; axis < axes; axis++) {
    const y = rowH * (axis + 0.55);
    const span = axisSpan(state, axis);
    const toX = (v: number) => ((v - span.min) / (span.max - span.min)) * (width - 40) + 20;

    ctx.strokeStyle = "#888";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(20, y);
    ctx.lineTo(width - 20, y);
    ctx.stroke();

    if (state.gains) {
      drawMarker(ctx, toX(state.gains.targets.human[axis]), y, "#2b6cb0", "human");
      drawMarker(ctx, toX(state.gains.targets.robot[axis]), y, "#c53030", "robot");
      if (state.showAgreedRef && state.gains.z_ref !== null) {
        drawMarker(ctx, toX(state.gains.z_ref[axis]), y, "#38a169", "agreed");
      }
    }
    if (state.telemetry) {
      ctx.fillStyle = "#1a202c";
      ctx.beginPath();
      ctx.arc(toX(state.telemetry.pos[axis]), y, 7, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  if (!state.telemetry) {
    ctx.fillStyle = "#718096";
    ctx.font = "13px sans-serif";
    ctx.fillText("waiting for telemetry...", 20, 16);
  }
  if (state.connectionLost) {
    ctx.fillStyle = "rgba(197, 48, 48, 0.85)";
    ctx.fillRect(0, 0, width, 22);
    ctx.fillStyle = "#fff";
    ctx.font = "bold 13px sans-serif";
    ctx.fillText("connection lost", 8, 15);
  }
}

function drawMarker(
  ctx: CanvasRenderingContext2D,
  x: number,
  y: number,
  color: string,
  label: string,
): void {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(x, y - 14);
  ctx.lineTo(x, y + 14);
  ctx.stroke();
  ctx.fillStyle = color;
  ctx.font = "11px sans-serif";
  ctx.fillText(label, x - 14, y - 18);
}
