import type { Telemetry } from "./protocol.js";

// Time-ordered telemetry ring with a wall-of-history horizon in seconds.
// Samples are stored exactly as received; charts read them back unchanged,
// so rendering is lossless within the horizon.
export class TelemetryRing {
  private samples: Telemetry[] = [];

  constructor(public readonly horizonSeconds = 10) {}

  push(frame: Telemetry): void {
    const last = this.samples[this.samples.length - 1];
    if (last && frame.time < last.time) {
      // A reset restarted the session clock; drop the stale history.
      this.samples = [];
    }
    this.samples.push(frame);
    const cutoff = frame.time - this.horizonSeconds;
    let firstKept = 0;
    while (firstKept < this.samples.length && this.samples[firstKept].time < cutoff) {
      firstKept++;
    }
    if (firstKept > 0) this.samples = this.samples.slice(firstKept);
  }

  get length(): number {
    return this.samples.length;
  }

  latest(): Telemetry | null {
    return this.samples[this.samples.length - 1] ?? null;
  }

  all(): readonly Telemetry[] {
    return this.samples;
  }

  // Samples with time in [t0, t1], oldest first.
  window(t0: number, t1: number): Telemetry[] {
    return this.samples.filter((s) => s.time >= t0 && s.time <= t1);
  }

  clear(): void {
    this.samples = [];
  }
}
