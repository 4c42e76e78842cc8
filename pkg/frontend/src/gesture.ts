// Pointer drag to force mapping: horizontal displacement from the grab
// point maps linearly to newtons, clamped to the server's force limit.
// While held, the current force is emitted at a fixed cadence (>= 30 Hz);
// release emits exactly one zero-force message and stops the stream.

export interface GestureOptions {
  newtonsPerPixel: number;
  forceLimit: number;
  sendHz: number;
}

export const DEFAULT_GESTURE: GestureOptions = {
  newtonsPerPixel: 0.2,
  forceLimit: 50,
  sendHz: 40,
};

type Emit = (force: number) => void;

export class ForceGesture {
  private originX: number | null = null;
  private currentForce = 0;
  private timer: ReturnType<typeof setInterval> | null = null;
  clamped = false;

  constructor(
    private readonly emit: Emit,
    readonly options: GestureOptions = DEFAULT_GESTURE,
  ) {}

  get active(): boolean {
    return this.originX !== null;
  }

  forceFromDrag(dx: number): number {
    const raw = dx * this.options.newtonsPerPixel;
    const limit = this.options.forceLimit;
    this.clamped = Math.abs(raw) > limit;
    return Math.max(-limit, Math.min(limit, raw));
  }

  grab(x: number): void {
    this.originX = x;
    this.currentForce = 0;
    this.clamped = false;
    this.emit(0);
    if (this.timer === null) {
      this.timer = setInterval(() => {
        if (this.originX !== null) this.emit(this.currentForce);
      }, 1000 / this.options.sendHz);
    }
  }

  move(x: number): void {
    if (this.originX === null) return;
    this.currentForce = this.forceFromDrag(x - this.originX);
  }

  release(): void {
    if (this.originX === null) return;
    this.originX = null;
    this.currentForce = 0;
    this.clamped = false;
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    this.emit(0);
  }
}
