/** Locating and invoking the core CLI. */

import { execFile } from "node:child_process";
import { promisify } from "node:util";

import { CliUnavailableError, errorForExit } from "./errors.js";

const execFileAsync = promisify(execFile);

export interface CliInvocation {
  command: string;
  prefixArgs: string[];
}

let resolved: CliInvocation | null = null;

function candidates(): CliInvocation[] {
  const fromEnv = process.env.KCDM_CLI;
  if (fromEnv) {
    const parts = fromEnv.split(" ").filter(Boolean);
    return [{ command: parts[0], prefixArgs: parts.slice(1) }];
  }
  return [
    { command: "kcdm", prefixArgs: [] },
    { command: "python3", prefixArgs: ["-m", "kcdm.cli"] },
  ];
}

async function probe(c: CliInvocation): Promise<boolean> {
  try {
    await execFileAsync(c.command, [...c.prefixArgs, "--help"], { timeout: 30_000 });
    return true;
  } catch {
    return false;
  }
}

export async function locateCli(): Promise<CliInvocation> {
  if (resolved) {
    return resolved;
  }
  for (const c of candidates()) {
    if (await probe(c)) {
      resolved = c;
      return c;
    }
  }
  throw new CliUnavailableError(
    "kcdm CLI not found: install the core package or set KCDM_CLI",
  );
}

export async function runCli(args: string[]): Promise<string> {
  const cli = await locateCli();
  try {
    const { stdout } = await execFileAsync(cli.command, [...cli.prefixArgs, ...args], {
      maxBuffer: 1 << 26,
    });
    return stdout;
  } catch (err) {
    const e = err as NodeJS.ErrnoException & { code?: number | string; stderr?: string };
    if (typeof e.code === "number") {
      throw errorForExit(e.code, e.stderr ?? "");
    }
    throw new CliUnavailableError(`failed to run kcdm CLI: ${e.message ?? e}`);
  }
}
