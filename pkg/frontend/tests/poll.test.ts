import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { ApiClient, SessionState } from "../src/api.js";
import { SessionPoller } from "../src/poll.js";

const STATE = { session_id: "s-poll", status: "awaiting_shortlist" } as SessionState;

function deferred<T>(): {
  promise: Promise<T>;
  resolve: (value: T) => void;
  reject: (error: unknown) => void;
} {
  let resolve!: (value: T) => void;
  let reject!: (error: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

function makePoller(
  getSession: (id: string) => Promise<SessionState>,
  intervalMs: number,
  onState: (state: SessionState) => void = () => undefined,
  onError: (error: unknown) => void = () => undefined,
): SessionPoller {
  const client = { getSession } as unknown as ApiClient;
  return new SessionPoller(client, "s-poll", onState, onError, intervalMs);
}

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("SessionPoller cadence", () => {
  it("fetches immediately and then once per interval", async () => {
    const getSession = vi.fn(async () => STATE);
    const seen: SessionState[] = [];
    const poller = makePoller(getSession, 500, (state) => seen.push(state));
    poller.start();
    await vi.advanceTimersByTimeAsync(0);
    expect(getSession).toHaveBeenCalledTimes(1);
    expect(seen).toEqual([STATE]);
    await vi.advanceTimersByTimeAsync(499);
    expect(getSession).toHaveBeenCalledTimes(1);
    await vi.advanceTimersByTimeAsync(1);
    expect(getSession).toHaveBeenCalledTimes(2);
    poller.stop();
  });

  it("treats a second start as a no-op", async () => {
    const getSession = vi.fn(async () => STATE);
    const poller = makePoller(getSession, 500);
    poller.start();
    poller.start();
    await vi.advanceTimersByTimeAsync(0);
    expect(getSession).toHaveBeenCalledTimes(1);
    poller.stop();
  });

  it("stops cleanly", async () => {
    const getSession = vi.fn(async () => STATE);
    const poller = makePoller(getSession, 500);
    poller.start();
    await vi.advanceTimersByTimeAsync(0);
    poller.stop();
    await vi.advanceTimersByTimeAsync(5000);
    expect(getSession).toHaveBeenCalledTimes(1);
  });
});

describe("SessionPoller mutations", () => {
  it("pauses polling while a mutation is outstanding", async () => {
    const getSession = vi.fn(async () => STATE);
    const poller = makePoller(getSession, 500);
    poller.start();
    await vi.advanceTimersByTimeAsync(0);
    expect(getSession).toHaveBeenCalledTimes(1);

    const gate = deferred<string>();
    const pending = poller.mutate(() => gate.promise);
    await vi.advanceTimersByTimeAsync(1500);
    expect(getSession).toHaveBeenCalledTimes(1);

    gate.resolve("done");
    await expect(pending).resolves.toBe("done");
    await vi.advanceTimersByTimeAsync(500);
    expect(getSession).toHaveBeenCalledTimes(2);
    poller.stop();
  });

  it("waits for an in-flight poll before mutating", async () => {
    const gate = deferred<SessionState>();
    const getSession = vi.fn(() => gate.promise);
    const poller = makePoller(getSession, 500);
    poller.start();
    await vi.advanceTimersByTimeAsync(0);

    const action = vi.fn(async () => "ran");
    const pending = poller.mutate(action);
    await vi.advanceTimersByTimeAsync(30);
    expect(action).not.toHaveBeenCalled();

    gate.resolve(STATE);
    await vi.advanceTimersByTimeAsync(10);
    expect(action).toHaveBeenCalledTimes(1);
    await expect(pending).resolves.toBe("ran");
    poller.stop();
  });

  it("rethrows a failed mutation and resumes polling", async () => {
    const getSession = vi.fn(async () => STATE);
    const poller = makePoller(getSession, 500);
    poller.start();
    await vi.advanceTimersByTimeAsync(0);

    const pending = poller.mutate(async () => {
      throw new Error("submit rejected");
    });
    await expect(pending).rejects.toThrow("submit rejected");
    await vi.advanceTimersByTimeAsync(500);
    expect(getSession).toHaveBeenCalledTimes(2);
    poller.stop();
  });
});

describe("SessionPoller errors", () => {
  it("reports fetch failures and keeps polling", async () => {
    const getSession = vi
      .fn<[string], Promise<SessionState>>()
      .mockRejectedValueOnce(new Error("network down"))
      .mockResolvedValue(STATE);
    const errors: unknown[] = [];
    const seen: SessionState[] = [];
    const poller = makePoller(
      getSession,
      500,
      (state) => seen.push(state),
      (error) => errors.push(error),
    );
    poller.start();
    await vi.advanceTimersByTimeAsync(0);
    expect(errors).toHaveLength(1);
    expect(seen).toHaveLength(0);
    await vi.advanceTimersByTimeAsync(500);
    expect(seen).toEqual([STATE]);
    poller.stop();
  });
});
