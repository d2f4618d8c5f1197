import { describe, expect, it } from "vitest";

import {
  applyJoystick, applyKey, DEFAULT_LIMITS, initialInput, inputToCommand,
} from "../src/input.js";

describe("command mapping", () => {
  it("centered inputs give a zero command", () => {
    for (const mode of [1, 2] as const) {
      const cmd = inputToCommand(initialInput(), mode, 1);
      expect(cmd.delta_front_deg).toBe(0);
      expect(cmd.delta_back_deg).toBe(0);
      expect(cmd.v_back).toBe(0);
    }
  });

  it("mode 2 full-right lateral gives 90/90 with equal positive speeds", () => {
    const input = { ...initialInput(), lateral: 1 };
    const cmd = inputToCommand(input, 2, 1);
    expect(cmd.delta_front_deg).toBe(90);
    expect(cmd.delta_back_deg).toBe(90);
    expect(cmd.v_back).toBeGreaterThan(0);
    expect(cmd.v_front).toBe(cmd.v_back);
  });

  it("rotate toggle gives 90/90 with opposite speeds", () => {
    const input = { ...initialInput(), rotate: true, throttle: 0.5 };
    const cmd = inputToCommand(input, 2, 1);
    expect(cmd.delta_front_deg).toBe(90);
    expect(cmd.delta_back_deg).toBe(90);
    expect(cmd.v_front).toBe(-cmd.v_back);
    expect(cmd.v_back).not.toBe(0);
  });

  it("mode 1 steers a single wheel and leaves the front speed to the server", () => {
    const front = inputToCommand({ ...initialInput(), steer: 0.5, throttle: 1 }, 1, 1);
    expect(front.delta_front_deg).toBe(45);
    expect(front.delta_back_deg).toBe(0);
    expect(front.v_back).toBe(DEFAULT_LIMITS.maxSpeed);
    expect(front.v_front).toBeNull();

    const back = inputToCommand(
      { ...initialInput(), steer: 0.5, activeSteering: "back" }, 1, 2);
    expect(back.delta_front_deg).toBe(0);
    expect(back.delta_back_deg).toBe(45);
  });

  it("mode 2 parallel steering shares angle and speed", () => {
    const cmd = inputToCommand({ ...initialInput(), steer: -0.3, throttle: 0.5 }, 2, 3);
    expect(cmd.delta_front_deg).toBeCloseTo(-27, 10);
    expect(cmd.delta_back_deg).toBe(cmd.delta_front_deg);
    expect(cmd.v_front).toBe(cmd.v_back);
  });

  it("always emits protocol-legal commands even from wild inputs", () => {
    const wild = { ...initialInput(), steer: 7, throttle: -4, lateral: 0 };
    for (const mode of [1, 2] as const) {
      const cmd = inputToCommand(wild, mode, 1);
      expect(Math.abs(cmd.delta_front_deg)).toBeLessThanOrEqual(90);
      expect(Math.abs(cmd.delta_back_deg)).toBeLessThanOrEqual(90);
      expect(Math.abs(cmd.v_back)).toBeLessThanOrEqual(DEFAULT_LIMITS.maxSpeed);
    }
  });
});

describe("key and joystick bindings", () => {
  it("WASD drives and steers, release returns to center", () => {
    let input = initialInput();
    input = applyKey(input, "w", true);
    expect(input.throttle).toBe(1);
    input = applyKey(input, "w", false);
    expect(input.throttle).toBe(0);
    input = applyKey(input, "a", true);
    expect(input.steer).toBe(1);   // A steers left (positive)
    input = applyKey(input, "a", false);
    expect(input.steer).toBe(0);
  });

  it("QE crab and R toggles rotation", () => {
    let input = initialInput();
    input = applyKey(input, "e", true);
    expect(input.lateral).toBe(1);
    input = applyKey(input, "e", false);
    input = applyKey(input, "r", true);
    expect(input.rotate).toBe(true);
    input = applyKey(input, "r", false);
    input = applyKey(input, "r", true);
    expect(input.rotate).toBe(false);
  });

  it("joystick vector maps to steer/throttle with clamping", () => {
    const input = applyJoystick(initialInput(), -0.4, 1.5);
    expect(input.steer).toBeCloseTo(0.4, 10);
    expect(input.throttle).toBe(1);
  });
});
