/** Fixed-interval session polling, paused while a mutation runs.
 *
 * At most one request is in flight at any time: ticks skip while a
 * fetch or a guarded mutation is outstanding, so a slow network can
 * never interleave a poll response with a submission.
 */

import type { ApiClient, SessionState } from "./api.js";

export class SessionPoller {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inFlight = false;
  private stopped = true;

  constructor(
    private readonly client: ApiClient,
    private readonly sessionId: string,
    private readonly onState: (state: SessionState) => void,
    private readonly onError: (error: unknown) => void = () => undefined,
    readonly intervalMs: number = 2000,
  ) {}

  start(): void {
    if (!this.stopped) return;
    this.stopped = false;
    void this.tick();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  /** Run one mutation with polling paused; rethrows its failure. */
  async mutate<T>(action: () => Promise<T>): Promise<T> {
    while (this.inFlight) {
      await new Promise((resolve) => setTimeout(resolve, 10));
    }
    this.inFlight = true;
    try {
      return await action();
    } finally {
      this.inFlight = false;
    }
  }

  private schedule(): void {
    if (this.stopped) return;
    this.timer = setTimeout(() => void this.tick(), this.intervalMs);
  }

  private async tick(): Promise<void> {
    if (this.stopped) return;
    if (this.inFlight) {
      this.schedule();
      return;
    }
    this.inFlight = true;
    try {
      const state = await this.client.getSession(this.sessionId);
      if (!this.stopped) this.onState(state);
    } catch (error) {
      if (!this.stopped) this.onError(error);
    } finally {
      this.inFlight = false;
    }
    this.schedule();
  }
}
