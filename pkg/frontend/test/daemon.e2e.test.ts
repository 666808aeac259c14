/**
 * End-to-end against the real daemon: fixture responses replayed through the
 * forwarder must land in the archive, with the popup-side counters agreeing
 * with daemon stats and zero envelopes lost.
 */
import { type ChildProcess, spawn } from "node:child_process";
import { readFileSync, mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { fetchHealth, fetchStats } from "../src/daemon.js";
import { Forwarder } from "../src/forwarder.js";
import { DEFAULT_PATTERNS } from "../src/patterns.js";
import type { CaptureSettings, EnvelopeDoc } from "../src/types.js";

const FIXTURES = fileURLToPath(new URL("../../fixtures", import.meta.url));
const TOKEN = "e2e-shared-token";
const PORT = 18000 + (process.pid % 2000);

function settings(): CaptureSettings {
  return {
    enabled: true,
    daemonUrl: `http://127.0.0.1:${PORT}`,
    token: TOKEN,
    sessionLabel: "e2e-harness",
    patterns: DEFAULT_PATTERNS,
  };
}

function streamEnvelopes(name: string): EnvelopeDoc[] {
  return readFileSync(join(FIXTURES, name), "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as EnvelopeDoc);
}

let daemon: ChildProcess;

async function waitForDaemon(): Promise<void> {
  const deadline = Date.now() + 20000;
  while (Date.now() < deadline) {
    if (await fetchHealth(settings())) {
      return;
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("daemon did not come up in time");
}

beforeAll(async () => {
  const archiveRoot = join(mkdtempSync(join(tmpdir(), "storytide-e2e-")), "archive");
  daemon = spawn(
    "python3",
    [
      "-m",
      "storytide.cli",
      "--archive",
      archiveRoot,
      "serve",
      "--bind",
      `127.0.0.1:${PORT}`,
      "--token",
      TOKEN,
    ],
    { stdio: "ignore" },
  );
  await waitForDaemon();
}, 30000);

afterAll(() => {
  daemon?.kill();
});

describe("fixture replay against a live daemon", () => {
  it("replaying the reels fixture yields daemon stats items=7", async () => {
    const forwarder = new Forwarder(settings());
    for (const doc of streamEnvelopes("fx_reels_3users.ndjson")) {
      await forwarder.handleResponse(doc.source_url, doc.method, doc.status, doc.body);
    }
    const stats = await fetchStats(settings());
    expect(stats).not.toBeNull();
    expect(stats!.items).toBe(7);
    expect(forwarder.counters.itemsNew).toBe(7);
  }, 20000);

  it("full stream: counters match daemon stats, zero envelopes lost", async () => {
    const forwarder = new Forwarder(settings());
    let storyRelated = 0;
    for (const doc of streamEnvelopes("fx_stream.ndjson")) {
      const produced = await forwarder.handleResponse(
        doc.source_url,
        doc.method,
        doc.status,
        doc.body,
      );
      if (produced) {
        storyRelated += 1;
      }
    }
    // 5 story-related envelopes (the unrelated one is filtered client-side);
    // one of them quarantines (malformed body).
    expect(storyRelated).toBe(5);
    const c = forwarder.counters;
    expect(c.envelopesSent).toBe(5);
    expect(c.delivered).toBe(5);
    expect(c.quarantined).toBe(1);
    expect(c.buffered).toBe(0);
    expect(c.dropped).toBe(0);
    expect(c.envelopesSent).toBe(c.delivered + c.buffered + c.dropped);

    // Popup counters reflect daemon truth: everything new in this replay
    // beyond the 7 items the previous test already delivered.
    const stats = await fetchStats(settings());
    expect(stats!.items).toBe(11);
    expect(c.itemsNew).toBe(stats!.items - 7);
  }, 20000);

  it("daemon-down buffering recovers once the daemon is reachable again", async () => {
    const downSettings = { ...settings(), daemonUrl: "http://127.0.0.1:1" };
    const forwarder = new Forwarder(downSettings);
    const [reels] = streamEnvelopes("fx_reels_3users.ndjson");
    await forwarder.handleResponse(reels.source_url, reels.method, reels.status, reels.body);
    expect(forwarder.counters.errors).toBe(1);
    expect(forwarder.counters.buffered).toBe(1);

    forwarder.updateSettings(settings());
    const delivered = await forwarder.flush();
    expect(delivered).toBe(1);
    expect(forwarder.counters.buffered).toBe(0);
    expect(forwarder.counters.delivered).toBe(1);
  }, 20000);
});
