/** Work-time measurement for one question. */

/**
 * Reports whole milliseconds since the last restart. Readings never go
 * below zero and never decrease between restarts, even if the underlying
 * clock misbehaves.
 */
export class WorkTimer {
  private startedAt: number;
  private highWater = 0;

  constructor(private clock: () => number = () => performance.now()) {
    this.startedAt = this.clock();
  }

  restart(): void {
    this.startedAt = this.clock();
    this.highWater = 0;
  }

  elapsedMs(): number {
    const raw = Math.round(this.clock() - this.startedAt);
    this.highWater = Math.max(this.highWater, raw, 0);
    return this.highWater;
  }
}
