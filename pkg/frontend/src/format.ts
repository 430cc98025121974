/**
 * The core's two binary formats, normative to the byte and little-endian.
 *
 * Tensor file ("KTEN"):
 *   magic 4B | version u16 | rank u8 | dims rank*u64 | payload f64*prod
 *
 * Masked container ("KCDM"):
 *   magic 4B | version u16 | nonce 16B | fingerprint 8B | options 87B
 *   | rank u8 | dims rank*u64 | payload f64*prod
 *
 * The fingerprint is SHA-256(options block) truncated to 8 bytes. This
 * module only moves bytes; it performs no numeric transformation, so the
 * binding stays a pure facade over the core.
 */

import { createHash } from "node:crypto";

import { FormatError } from "./errors.js";

export const TENSOR_MAGIC = "KTEN";
export const CONTAINER_MAGIC = "KCDM";
export const FORMAT_VERSION = 1;
export const OPTIONS_BLOCK_LEN = 87;

export interface Tensor {
  shape: number[];
  /** Row-major values; byte-identical to the file payload. */
  data: Float64Array;
}

export interface ContainerMeta {
  nonce: Buffer;
  fingerprint: Buffer;
  optionsBlock: Buffer;
}

export function fingerprintOf(optionsBlock: Buffer): Buffer {
  return createHash("sha256").update(optionsBlock).digest().subarray(0, 8);
}

function elementCount(shape: number[]): number {
  return shape.reduce((acc, n) => acc * n, 1);
}

class Cursor {
  pos = 0;
  constructor(private readonly data: Buffer) {}

  take(n: number, what: string): Buffer {
    if (this.pos + n > this.data.length) {
      throw new FormatError(`truncated while reading ${what}`);
    }
    const out = this.data.subarray(this.pos, this.pos + n);
    this.pos += n;
    return out;
  }

  u8(what: string): number {
    return this.take(1, what)[0];
  }

  u16(what: string): number {
    return this.take(2, what).readUInt16LE(0);
  }

  u64(what: string): number {
    const v = this.take(8, what).readBigUInt64LE(0);
    if (v > BigInt(Number.MAX_SAFE_INTEGER)) {
      throw new FormatError(`dimension ${v} is implausibly large`);
    }
    return Number(v);
  }

  rest(): Buffer {
    const out = this.data.subarray(this.pos);
    this.pos = this.data.length;
    return out;
  }
}

function readHeader(c: Cursor, magic: string): void {
  const got = c.take(4, "magic").toString("latin1");
  if (got !== magic) {
    throw new FormatError(`bad magic ${JSON.stringify(got)}, expected ${magic}`);
  }
  const version = c.u16("version");
  if (version !== FORMAT_VERSION) {
    throw new FormatError(`unsupported format version ${version}`);
  }
}

function readDimsAndPayload(c: Cursor): Tensor {
  const rank = c.u8("rank");
  const shape: number[] = [];
  for (let i = 0; i < rank; i++) {
    shape.push(c.u64(`dim ${i}`));
  }
  const count = elementCount(shape);
  const payload = c.rest();
  if (payload.length !== 8 * count) {
    throw new FormatError(`payload is ${payload.length} bytes, dims require ${8 * count}`);
  }
  return { shape, data: payloadToFloats(payload) };
}

function packDims(shape: number[]): Buffer {
  const out = Buffer.alloc(1 + 8 * shape.length);
  out.writeUInt8(shape.length, 0);
  shape.forEach((n, i) => {
    if (!Number.isInteger(n) || n < 0) {
      throw new FormatError(`bad dimension ${n}`);
    }
    out.writeBigUInt64LE(BigInt(n), 1 + 8 * i);
  });
  return out;
}

/** Bit-exact payload decode: bytes are copied, never round-tripped through
 * number parsing. Assumes a little-endian host (checked at load). */
const HOST_LE = new Uint8Array(new Uint16Array([1]).buffer)[0] === 1;

export function payloadToFloats(payload: Buffer): Float64Array {
  const copy = Buffer.from(payload);
  if (!HOST_LE) {
    copy.swap64();
  }
  return new Float64Array(copy.buffer, copy.byteOffset, copy.length / 8);
}

export function floatsToPayload(data: Float64Array): Buffer {
  const out = Buffer.from(new Uint8Array(data.buffer, data.byteOffset, data.byteLength));
  if (!HOST_LE) {
    out.swap64();
  }
  return out;
}

export function encodeTensor(tensor: Tensor): Buffer {
  if (tensor.data.length !== elementCount(tensor.shape)) {
    throw new FormatError(
      `data has ${tensor.data.length} elements, shape needs ${elementCount(tensor.shape)}`,
    );
  }
  const header = Buffer.alloc(6);
  header.write(TENSOR_MAGIC, 0, "latin1");
  header.writeUInt16LE(FORMAT_VERSION, 4);
  return Buffer.concat([header, packDims(tensor.shape), floatsToPayload(tensor.data)]);
}

export function decodeTensor(data: Buffer): Tensor {
  const c = new Cursor(data);
  readHeader(c, TENSOR_MAGIC);
  return readDimsAndPayload(c);
}

export function encodeContainer(tensor: Tensor, nonce: Buffer, optionsBlock: Buffer): Buffer {
  if (nonce.length !== 16) {
    throw new FormatError(`nonce must be 16 bytes, got ${nonce.length}`);
  }
  if (optionsBlock.length !== OPTIONS_BLOCK_LEN) {
    throw new FormatError(`options block must be ${OPTIONS_BLOCK_LEN} bytes`);
  }
  const header = Buffer.alloc(6);
  header.write(CONTAINER_MAGIC, 0, "latin1");
  header.writeUInt16LE(FORMAT_VERSION, 4);
  return Buffer.concat([
    header,
    nonce,
    fingerprintOf(optionsBlock),
    optionsBlock,
    packDims(tensor.shape),
    floatsToPayload(tensor.data),
  ]);
}

export function decodeContainer(data: Buffer): { tensor: Tensor; meta: ContainerMeta } {
  const c = new Cursor(data);
  readHeader(c, CONTAINER_MAGIC);
  const nonce = Buffer.from(c.take(16, "nonce"));
  const fingerprint = Buffer.from(c.take(8, "fingerprint"));
  const optionsBlock = Buffer.from(c.take(OPTIONS_BLOCK_LEN, "options block"));
  const tensor = readDimsAndPayload(c);
  return { tensor, meta: { nonce, fingerprint, optionsBlock } };
}
