// End-to-end smoke against a live gateway spawned from the sibling package:
// the greet/ask/satisfied flow and the dissatisfied "No" flow, driven through
// the same engine the browser uses.
import { ChildProcess, spawn } from "node:child_process";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api.js";
import { ChatEngine } from "../src/engine.js";
import { MemoryStore } from "../src/session.js";

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = join(dirname(fileURLToPath(import.meta.url)), "..", "..");
const CORPUS = join(REPO_ROOT, "src", "kccbot", "data", "seed_corpus.csv");
const NUMBER = "1800-180-1551";

let gateway: ChildProcess;

async function waitForHealth(timeoutMs = 20_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/api/v1/health`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("gateway did not become healthy in time");
}

beforeAll(async () => {
  gateway = spawn(
    "python3",
    ["-m", "kccbot.cli", "serve", "--corpus", CORPUS,
     "--call-center-number", NUMBER, "--port", String(PORT)],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  await waitForHealth();
}, 30_000);

afterAll(() => {
  gateway?.kill();
});

function freshEngine(): ChatEngine {
  return new ChatEngine(new GatewayClient(BASE), new MemoryStore());
}

describe("webchat against a live gateway", () => {
  it("reports a healthy corpus", async () => {
    const health = await new GatewayClient(BASE).health();
    expect(health.status).toBe("ok");
    expect(health.corpus_docs).toBeGreaterThanOrEqual(50);
    expect(health.threshold).toBeCloseTo(0.7, 10);
  });

  it("happy path: greet, ask, read the badge, confirm", async () => {
    const engine = freshEngine();
    await engine.send("hi");
    expect(engine.turns).toHaveLength(2);
    expect(engine.quickRepliesVisible).toBe(false);

    await engine.send("CONTROL OF APHIDS IN PADDY");
    const answer = engine.turns[3];
    expect(answer.kind).toBe("Answer");
    expect(answer.text).toContain("APPLY INDOFIL");
    expect(Math.round((answer.confidence ?? 0) * 100)).toBe(100);
    expect(engine.turns[4].kind).toBe("SatisfactionPrompt");
    expect(engine.quickRepliesVisible).toBe(true);

    await engine.send("yes");
    expect(engine.quickRepliesVisible).toBe(false);
    expect(engine.lastError).toBeNull();
  }, 15_000);

  it("dissatisfied path: quick-reply No leads to the call-center referral", async () => {
    const engine = freshEngine();
    await engine.send("SEED TREATMENT IN PADDY");
    expect(engine.quickRepliesVisible).toBe(true);

    await engine.send("no"); // what the No quick-reply button sends
    const referral = engine.turns.at(-1)!;
    expect(referral.speaker).toBe("bot");
    expect(referral.text).toContain(NUMBER);
    expect(engine.quickRepliesVisible).toBe(false);
  }, 15_000);

  it("unanswerable query falls back with the call-center details", async () => {
    const engine = freshEngine();
    await engine.send("quantum flux capacitor maintenance");
    const fallback = engine.turns.at(-1)!;
    expect(fallback.text).toContain(NUMBER);
    expect(engine.quickRepliesVisible).toBe(false);
  }, 15_000);

  it("two engines keep independent transcripts", async () => {
    const tabA = freshEngine();
    const tabB = freshEngine();
    expect(tabA.sessionId).not.toBe(tabB.sessionId);
    await tabA.send("SEED TREATMENT IN PADDY");
    await tabB.send("hi");
    expect(tabA.quickRepliesVisible).toBe(true);
    expect(tabB.quickRepliesVisible).toBe(false);
    expect(tabB.turns).toHaveLength(2);
  }, 15_000);
});
