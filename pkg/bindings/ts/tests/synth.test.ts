import { describe, expect, test } from "vitest";

import { GeoBiasError, synth } from "../src/index";

describe("synth", () => {
  test("null pattern is deterministic for a fixed seed", () => {
    const a = synth("null", 100, 1);
    const b = synth("null", 100, 1);
    expect(a).toHaveLength(100);
    expect(a).toEqual(b);
    for (const [lon, lat, perf] of a) {
      expect(Math.abs(lon)).toBeLessThanOrEqual(180);
      expect(Math.abs(lat)).toBeLessThanOrEqual(90);
      expect(perf === 0 || perf === 1).toBe(true);
    }
  });

  test("patterns share locations and differ only in marks", () => {
    const base = synth("null", 80, 5);
    const hemi = synth("hemisphere", 80, 5);
    expect(hemi.map((r) => [r[0], r[1]]))
      .toEqual(base.map((r) => [r[0], r[1]]));
    for (const [lon, , perf] of hemi) {
      expect(perf).toBe(lon < 0 ? 1 : 0);
    }
  });

  test("sector count option reaches the generator", () => {
    const twelve = synth("sector", 60, 3, { sectors: 12 });
    const four = synth("sector", 60, 3, { sectors: 4 });
    expect(twelve.map((r) => [r[0], r[1]]))
      .toEqual(four.map((r) => [r[0], r[1]]));
    expect(twelve.map((r) => r[2]))
      .not.toEqual(four.map((r) => r[2]));
  });

  test("unknown pattern raises usage_error", () => {
    try {
      synth("spiral", 10, 0);
      expect.unreachable("synth should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(GeoBiasError);
      expect((err as GeoBiasError).code).toBe("usage_error");
      expect((err as GeoBiasError).exitStatus).toBe(2);
    }
  });

  test("non-positive sample count raises usage_error", () => {
    expect(() => synth("null", 0, 1)).toThrowError(GeoBiasError);
    try {
      synth("null", 0, 1);
    } catch (err) {
      expect((err as GeoBiasError).code).toBe("usage_error");
    }
  });

  test("unknown option key is rejected by name", () => {
    expect(() => synth("null", 10, 0, { wobble: 2 } as never))
      .toThrowError(/unknown synth option key 'wobble'/);
  });
});
