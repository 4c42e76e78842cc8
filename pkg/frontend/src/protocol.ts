// Wire protocol (schema version 1) shared with the session server.
// All messages are JSON text; the server's first message is gains_changed
// carrying the session id, which every client message must echo.

export const SCHEMA_VERSION = 1;

export interface Telemetry {
  type: "telemetry";
  session: string;
  tick: number;
  time: number;
  pos: number[];
  vel: number[];
  u_h: number[];
  u_r: number[];
  u_h_nominal: number[];
  z_ref: number[] | null;
  mode: "modeled-human" | "live-human";
}

export interface GainsChanged {
  type: "gains_changed";
  session: string;
  controller: "cgt" | "lqr" | "ncgt";
  alpha: number;
  k_h: number[][];
  k_r: number[][];
  z_ref: number[] | null;
  targets: { human: number[]; robot: number[] };
}

export interface ServerError {
  type: "error";
  session: string | null;
  message: string;
}

export type ServerMessage = Telemetry | GainsChanged | ServerError;

const isNumberArray = (v: unknown): v is number[] =>
  Array.isArray(v) && v.every((x) => typeof x === "number" && Number.isFinite(x));

export function parseServerMessage(raw: string): ServerMessage | null {
  let msg: any;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof msg !== "object" || msg === null || msg.v !== SCHEMA_VERSION) return null;
  switch (msg.type) {
    case "telemetry":
      if (
        typeof msg.tick === "number" &&
        typeof msg.time === "number" &&
        isNumberArray(msg.pos) &&
        isNumberArray(msg.vel) &&
        isNumberArray(msg.u_h) &&
        isNumberArray(msg.u_r) &&
        isNumberArray(msg.u_h_nominal) &&
        (msg.z_ref === null || isNumberArray(msg.z_ref))
      ) {
        return msg as Telemetry;
      }
      return null;
    case "gains_changed":
      if (
        typeof msg.session === "string" &&
        typeof msg.alpha === "number" &&
        (msg.z_ref === null || isNumberArray(msg.z_ref))
      ) {
        return msg as GainsChanged;
      }
      return null;
    case "error":
      if (typeof msg.message === "string") return msg as ServerError;
      return null;
    default:
      return null;
  }
}

export type ControlChange =
  | { type: "set_alpha"; alpha: number }
  | { type: "set_controller"; controller: "cgt" | "lqr" | "ncgt" }
  | { type: "reset" };

export function encodeForce(session: string, force: number[]): string {
  return JSON.stringify({ v: SCHEMA_VERSION, session, type: "apply_force", force });
}

export function encodeControl(session: string, change: ControlChange): string {
  return JSON.stringify({ v: SCHEMA_VERSION, session, ...change });
}
