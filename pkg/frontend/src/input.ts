/** Operator inputs (keyboard or virtual joystick) to wire commands.
 *
 * Mode 1: the steer axis drives the active steering wheel (other held 0),
 * the throttle axis the back wheel; the front speed is left to the server's
 * slip-free solution.  Mode 2: steer and throttle become the common angle
 * and common speed; the lateral axis overrides to 90/90 crab translation;
 * the rotate toggle overrides to 90/90 with opposite wheel speeds.
 *
 * Everything is range-clamped here so emitted commands always satisfy the
 * protocol invariants.
 */

import type { CommandMessage } from "./protocol.js";

export interface InputState {
  steer: number;      // -1..1, positive left
  throttle: number;   // -1..1, positive forward
  lateral: number;    // -1..1, positive right crab
  rotate: boolean;    // rotate-on-spot toggle
  activeSteering: "front" | "back";  // which wheel mode 1 steers
}

export interface CommandLimits {
  maxSteeringDeg: number;
  maxSpeed: number;   // m/s
}

export const DEFAULT_LIMITS: CommandLimits = { maxSteeringDeg: 90, maxSpeed: 0.2 };

export function initialInput(): InputState {
  return { steer: 0, throttle: 0, lateral: 0, rotate: false, activeSteering: "front" };
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}

export function inputToCommand(
  input: InputState,
  mode: 1 | 2,
  seq: number,
  limits: CommandLimits = DEFAULT_LIMITS,
): CommandMessage {
  const steer = clamp(input.steer, -1, 1);
  const throttle = clamp(input.throttle, -1, 1);
  const lateral = clamp(input.lateral, -1, 1);
  const angle = steer * limits.maxSteeringDeg;
  const speed = throttle * limits.maxSpeed;

  if (mode === 1) {
    return {
      type: "command", seq, mode,
      delta_front_deg: input.activeSteering === "front" ? angle : 0,
      delta_back_deg: input.activeSteering === "back" ? angle : 0,
      v_back: speed,
      v_front: null,
    };
  }
  if (input.rotate) {
    const rate = throttle * limits.maxSpeed;
    return {
      type: "command", seq, mode,
      delta_front_deg: limits.maxSteeringDeg,
      delta_back_deg: limits.maxSteeringDeg,
      v_back: -rate,
      v_front: rate,
    };
  }
  if (lateral !== 0) {
    const crab = lateral * limits.maxSpeed;
    return {
      type: "command", seq, mode,
      delta_front_deg: limits.maxSteeringDeg,
      delta_back_deg: limits.maxSteeringDeg,
      v_back: crab,
      v_front: crab,
    };
  }
  return {
    type: "command", seq, mode,
    delta_front_deg: angle,
    delta_back_deg: angle,
    v_back: speed,
    v_front: speed,
  };
}

/** WASD drives, A/D steer, Q/E crab left/right, R toggles rotate,
 * F swaps the mode-1 active wheel. */
export function applyKey(input: InputState, key: string, down: boolean): InputState {
  const next = { ...input };
  switch (key.toLowerCase()) {
    case "w": next.throttle = down ? 1 : Math.min(next.throttle, 0); break;
    case "s": next.throttle = down ? -1 : Math.max(next.throttle, 0); break;
    case "a": next.steer = down ? 1 : Math.min(next.steer, 0); break;
    case "d": next.steer = down ? -1 : Math.max(next.steer, 0); break;
    case "q": next.lateral = down ? -1 : Math.max(next.lateral, 0); break;
    case "e": next.lateral = down ? 1 : Math.min(next.lateral, 0); break;
    case "r": if (down) next.rotate = !next.rotate; break;
    case "f": if (down) next.activeSteering = next.activeSteering === "front" ? "back" : "front"; break;
  }
  return next;
}

/** Virtual joystick vector (x right, y up, each -1..1). */
export function applyJoystick(input: InputState, x: number, y: number): InputState {
  return { ...input, steer: clamp(-x, -1, 1), throttle: clamp(y, -1, 1) };
}
