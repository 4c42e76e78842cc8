import { describe, expect, it } from "vitest";
import { effortError } from "../src/errorMetric.js";
import type { Telemetry } from "../src/protocol.js";

const frame = (time: number, u_h: number, u_nom: number): Telemetry => ({
  type: "telemetry",
  session: "s",
  tick: Math.round(time / 0.02),
  time,
  pos: [0],
  vel: [0],
  u_h: [u_h],
  u_r: [0],
  u_h_nominal: [u_nom],
  z_ref: null,
  mode: "live-human",
});

const constantWindow = (u_h: number, u_nom: number, seconds = 2, dt = 0.1) => {
  const out: Telemetry[] = [];
  for (let t = 0; t <= seconds + 1e-9; t += dt) out.push(frame(t, u_h, u_nom));
  return out;
};

describe("effortError", () => {
  it("is zero when measurement matches the model", () => {
    expect(effortError(constantWindow(1.5, 1.5))).toBe(0);
  });

  it("matches the constant-offset closed form", () => {
    // |1.5 - 1| * 2 s / max|nominal| = 1.0
    expect(effortError(constantWindow(1.5, 1.0))).toBeCloseTo(1.0, 12);
  });

  it("is invariant under positive scaling", () => {
    const base = effortError(constantWindow(1.5, 1.0))!;
    for (const c of [1e-3, 0.7, 42, 1e3]) {
      expect(effortError(constantWindow(1.5 * c, 1.0 * c))!).toBeCloseTo(base, 9);
    }
  });

  it("returns null for degenerate inputs", () => {
    expect(effortError([])).toBeNull();
    expect(effortError([frame(0, 1, 1)])).toBeNull();
    expect(effortError(constantWindow(1.0, 0.0))).toBeNull();
  });
});
