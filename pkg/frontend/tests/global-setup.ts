// Boots the real cataloging service on a scratch store so the workflow
// loop test runs against live semantics, not a mock.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import type { TestProject } from "vitest/node";

declare module "vitest" {
  export interface ProvidedContext {
    baseUrl: string;
  }
}

let child: ChildProcess | undefined;
let scratch: string | undefined;

async function waitForHealth(base: string): Promise<void> {
  const deadline = Date.now() + 20000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${base}/api/health`);
      if (response.ok) {
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("cataloging service did not come up");
}

export default async function setup(project: TestProject) {
  const port = 8400 + Math.floor(Math.random() * 400);
  const base = `http://127.0.0.1:${port}`;
  scratch = mkdtempSync(join(tmpdir(), "tapecat-ui-"));
  child = spawn("python3", [
    "-m", "tapecat.cli",
    "--store", join(scratch, "catalog.tlog"),
    "--id-source", "seq",
    "serve", "--listen", `127.0.0.1:${port}`,
  ], { stdio: "ignore" });
  await waitForHealth(base);
  project.provide("baseUrl", base);

  return () => {
    child?.kill();
    if (scratch) {
      rmSync(scratch, { recursive: true, force: true });
    }
  };
}
