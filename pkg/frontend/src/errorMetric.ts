import type { Telemetry } from "./protocol.js";

const norm = (v: number[]): number => Math.hypot(...v);

// Normalized deviation of measured from model-predicted human effort over
// a sample window: trapezoidal integral of |u_h - u_h_nominal| divided by
// the peak nominal norm. Returns null when the window is too short or the
// nominal effort is too small to normalize by.
export function effortError(samples: readonly Telemetry[]): number | null {
  if (samples.length < 2) return null;
  let peak = 0;
  for (const s of samples) peak = Math.max(peak, norm(s.u_h_nominal));
  if (peak < 1e-12) return null;
  let integral = 0;
  for (let i = 1; i < samples.length; i++) {
    const a = samples[i - 1];
    const b = samples[i];
    const da = norm(a.u_h.map((v, k) => v - a.u_h_nominal[k]));
    const db = norm(b.u_h.map((v, k) => v - b.u_h_nominal[k]));
    integral += 0.5 * (da + db) * (b.time - a.time);
  }
  return integral / peak;
}
