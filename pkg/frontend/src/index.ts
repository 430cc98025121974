/**
 * Array-in, array-out bindings for the kcdm masking core.
 *
 * The binding is a facade: every number in every result is produced by the
 * core (driven through its CLI and binary formats); this package only moves
 * bytes. Calls are async and never block the event loop, so pipelines can
 * overlap masking with I/O. Results are bitwise-identical to the core's
 * own output for identical inputs.
 */

import { mkdtemp, readFile, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { runCli } from "./cli.js";
import { InvalidArgumentsError } from "./errors.js";
import {
  Tensor,
  decodeContainer,
  decodeTensor,
  encodeContainer,
  encodeTensor,
} from "./format.js";

export type MapName = "logistic" | "tent" | "baker" | "standard" | "cat";
export type FamilyName = "er" | "ws";

/** Mirrors the core's CipherOptions; omitted fields use the core's defaults
 * or are auto-sampled from the key. This package defines no defaults of its
 * own. */
export interface MaskOptions {
  map?: MapName;
  family?: FamilyName;
  erP?: number;
  wsK?: number;
  wsBeta?: number;
  epsC?: number;
  mapR?: number;
  mapMu?: number;
  mapS?: number;
  mapKick?: number;
  tBurn?: number;
  sigma?: number;
  alpha?: number;
  verifyChaos?: boolean;
}

export { Tensor } from "./format.js";
export * from "./errors.js";

const FLAG_OF: Record<string, string> = {
  map: "--map",
  family: "--graph",
  erP: "--er-p",
  wsK: "--ws-k",
  wsBeta: "--ws-beta",
  epsC: "--eps-c",
  mapR: "--map-r",
  mapMu: "--map-mu",
  mapS: "--map-s",
  mapKick: "--map-kick",
  tBurn: "--burn",
  sigma: "--sigma",
  alpha: "--alpha",
};

function optionFlags(options: MaskOptions = {}): string[] {
  const flags: string[] = [];
  for (const [key, flag] of Object.entries(FLAG_OF)) {
    const value = (options as Record<string, unknown>)[key];
    if (value !== undefined) {
      flags.push(flag, String(value));
    }
  }
  if (options.verifyChaos) {
    flags.push("--verify-chaos");
  }
  return flags;
}

function checkHex(name: string, value: string, bytes: number): string {
  if (!new RegExp(`^[0-9a-f]{${2 * bytes}}$`).test(value)) {
    throw new InvalidArgumentsError(
      `${name} must be ${2 * bytes} lowercase hex chars`,
    );
  }
  return value;
}

function checkShape(shape: number[]): number[] {
  if (shape.length === 0 || shape.some((n) => !Number.isInteger(n) || n < 1)) {
    throw new InvalidArgumentsError(`shape must be positive integers, got [${shape}]`);
  }
  return shape;
}

async function withWorkDir<T>(fn: (dir: string) => Promise<T>): Promise<T> {
  const dir = await mkdtemp(join(tmpdir(), "kcdm-"));
  try {
    return await fn(dir);
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

/** The mask the core derives for (key, nonce, shape, options): shape
 * [rows, lastAxis] where rows is the product of the leading axes. */
export async function generateMask(
  shape: number[],
  keyHex: string,
  nonceHex: string,
  options: MaskOptions = {},
): Promise<Tensor> {
  checkHex("key", keyHex, 32);
  checkHex("nonce", nonceHex, 16);
  checkShape(shape);
  return withWorkDir(async (dir) => {
    const out = join(dir, "mask.kten");
    await runCli([
      "mask",
      "--key", keyHex,
      "--nonce", nonceHex,
      "--shape", shape.join(","),
      "--out", out,
      ...optionFlags(options),
    ]);
    return decodeTensor(await readFile(out));
  });
}

/** X + S, same shape out as in; values produced entirely by the core. */
export async function encrypt(
  data: Float64Array,
  shape: number[],
  keyHex: string,
  nonceHex: string,
  options: MaskOptions = {},
): Promise<Tensor> {
  checkHex("key", keyHex, 32);
  checkHex("nonce", nonceHex, 16);
  checkShape(shape);
  return withWorkDir(async (dir) => {
    const src = join(dir, "plain.kten");
    const dst = join(dir, "masked.kcdm");
    await writeFile(src, encodeTensor({ shape, data }));
    await runCli([
      "encrypt",
      "--key", keyHex,
      "--nonce", nonceHex,
      "--in", src,
      "--out", dst,
      ...optionFlags(options),
    ]);
    const { tensor } = decodeContainer(await readFile(dst));
    return tensor;
  });
}

/** X - S for the mask the core regenerates from (key, nonce, options). */
export async function decrypt(
  data: Float64Array,
  shape: number[],
  keyHex: string,
  nonceHex: string,
  options: MaskOptions = {},
): Promise<Tensor> {
  checkHex("key", keyHex, 32);
  checkHex("nonce", nonceHex, 16);
  checkShape(shape);
  return withWorkDir(async (dir) => {
    // The container needs a canonical options block. The core is the only
    // authority on option defaults, so have it emit one via a one-element
    // encrypt, then reuse that block (and its fingerprint) verbatim.
    const probeSrc = join(dir, "probe.kten");
    const probeDst = join(dir, "probe.kcdm");
    await writeFile(probeSrc, encodeTensor({ shape: [1], data: new Float64Array(1) }));
    await runCli([
      "encrypt",
      "--key", keyHex,
      "--nonce", nonceHex,
      "--in", probeSrc,
      "--out", probeDst,
      ...optionFlags(options),
    ]);
    const { meta } = decodeContainer(await readFile(probeDst));

    const src = join(dir, "masked.kcdm");
    const dst = join(dir, "plain.kten");
    await writeFile(
      src,
      encodeContainer({ shape, data }, Buffer.from(nonceHex, "hex"), meta.optionsBlock),
    );
    await runCli(["decrypt", "--key", keyHex, "--in", src, "--out", dst]);
    return decodeTensor(await readFile(dst));
  });
}
