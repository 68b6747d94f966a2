import { describe, expect, it } from "vitest";
import { WorkTimer } from "../src/timer.js";

function fakeClock(values: number[]): () => number {
  let i = 0;
  return () => values[Math.min(i++, values.length - 1)];
}

describe("WorkTimer", () => {
  it("reports whole non-negative milliseconds", () => {
    const timer = new WorkTimer(fakeClock([100, 100.2, 350.6]));
    expect(timer.elapsedMs()).toBe(0);
    const later = timer.elapsedMs();
    expect(later).toBe(251);
    expect(Number.isInteger(later)).toBe(true);
  });

  it("never decreases even if the clock jumps backwards", () => {
    const timer = new WorkTimer(fakeClock([100, 400, 150, 500]));
    const first = timer.elapsedMs();
    const second = timer.elapsedMs();
    const third = timer.elapsedMs();
    expect(first).toBe(300);
    expect(second).toBe(300);
    expect(third).toBe(400);
  });

  it("never goes below zero", () => {
    const timer = new WorkTimer(fakeClock([500, 100]));
    expect(timer.elapsedMs()).toBe(0);
  });

  it("restart resets the origin", () => {
    const timer = new WorkTimer(fakeClock([0, 1000, 1000, 1250]));
    expect(timer.elapsedMs()).toBe(1000);
    timer.restart();
    expect(timer.elapsedMs()).toBe(250);
  });

  it("tracks the real clock monotonically", () => {
    const timer = new WorkTimer();
    let prev = timer.elapsedMs();
    expect(prev).toBeGreaterThanOrEqual(0);
    for (let i = 0; i < 50; i++) {
      const now = timer.elapsedMs();
      expect(now).toBeGreaterThanOrEqual(prev);
      prev = now;
    }
  });
});
