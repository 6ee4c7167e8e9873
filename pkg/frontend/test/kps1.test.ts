import { describe, expect, it } from "vitest";

import {
  BadMagic, HEADER_BYTES, TruncatedSnapshot, parseSnapshot, xNodes, xSlice, yNodes,
} from "../src/kps1.js";

export function makeSnapshot(
  nx: number, ny: number, lx: number, ly: number, t: number,
  fill: (i: number, j: number) => number,
): Buffer {
  const buf = Buffer.alloc(HEADER_BYTES + 8 * nx * ny);
  buf.write("KPS1", 0, "latin1");
  buf.writeUInt32LE(1, 4);
  buf.writeUInt32LE(nx, 8);
  buf.writeUInt32LE(ny, 12);
  buf.writeDoubleLE(lx, 16);
  buf.writeDoubleLE(ly, 24);
  buf.writeDoubleLE(t, 32);
  for (let j = 0; j < ny; j++) {
    for (let i = 0; i < nx; i++) {
      buf.writeDoubleLE(fill(i, j), HEADER_BYTES + 8 * (j * nx + i));
    }
  }
  return buf;
}

describe("KPS1 parsing", () => {
  it("round-trips header and payload", () => {
    const buf = makeSnapshot(5, 3, 10, 2.5, 0.125, (i, j) => i + 100 * j);
    const s = parseSnapshot(buf);
    expect(s.version).toBe(1);
    expect(s.nx).toBe(5);
    expect(s.ny).toBe(3);
    expect(s.lx).toBe(10);
    expect(s.ly).toBe(2.5);
    expect(s.t).toBe(0.125);
    expect(s.values[0]).toBe(0);
    expect(s.values[1]).toBe(1); // x fastest
    expect(s.values[5]).toBe(100); // then y
  });

  it("rejects a bad magic", () => {
    const buf = makeSnapshot(2, 2, 1, 1, 0, () => 0);
    buf.write("NOPE", 0, "latin1");
    expect(() => parseSnapshot(buf)).toThrow(BadMagic);
  });

  it("rejects truncated headers and payload size mismatches", () => {
    expect(() => parseSnapshot(Buffer.alloc(10))).toThrow(TruncatedSnapshot);
    const buf = makeSnapshot(4, 4, 1, 1, 0, () => 0);
    expect(() => parseSnapshot(buf.subarray(0, buf.length - 8)))
      .toThrow(TruncatedSnapshot);
    expect(() => parseSnapshot(Buffer.concat([buf, Buffer.alloc(8)])))
      .toThrow(TruncatedSnapshot);
  });

  it("builds periodic grid nodes on [-L, L)", () => {
    const s = parseSnapshot(makeSnapshot(4, 2, 2, 1, 0, () => 0));
    expect(Array.from(xNodes(s))).toEqual([-2, -1, 0, 1]);
    expect(Array.from(yNodes(s))).toEqual([-1, 0]);
  });

  it("extracts the x-line nearest a requested y", () => {
    const s = parseSnapshot(makeSnapshot(3, 4, 1, 2, 0, (i, j) => 10 * j + i));
    const sl = xSlice(s, 0.1);
    expect(sl.y).toBe(0);
    expect(Array.from(sl.line)).toEqual([20, 21, 22]);
  });
});
