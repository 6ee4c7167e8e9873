/**
 * Reader for the KPS1 snapshot format written by the solver runner.
 *
 * Layout (little-endian):
 *   bytes 0..3   magic "KPS1"
 *   bytes 4..15  uint32 version, Nx, Ny
 *   bytes 16..39 float64 Lx, Ly, t
 *   bytes 40..   Ny*Nx float64 field values, y-major (x fastest)
 */

export class BadMagic extends Error {}
export class TruncatedSnapshot extends Error {}

export interface Snapshot {
  version: number;
  nx: number;
  ny: number;
  lx: number;
  ly: number;
  t: number;
  /** y-major: values[j * nx + i] = u(x_i, y_j) */
  values: Float64Array;
}

export const HEADER_BYTES = 40;

export function parseSnapshot(buf: Buffer): Snapshot {
  if (buf.length < HEADER_BYTES) {
    throw new TruncatedSnapshot(
      `snapshot header needs ${HEADER_BYTES} bytes, got ${buf.length}`);
  }
  const magic = buf.toString("latin1", 0, 4);
  if (magic !== "KPS1") {
    throw new BadMagic(`bad magic ${JSON.stringify(magic)}, expected "KPS1"`);
  }
  const view = new DataView(buf.buffer, buf.byteOffset, buf.length);
  const version = view.getUint32(4, true);
  const nx = view.getUint32(8, true);
  const ny = view.getUint32(12, true);
  const lx = view.getFloat64(16, true);
  const ly = view.getFloat64(24, true);
  const t = view.getFloat64(32, true);
  const expected = HEADER_BYTES + 8 * nx * ny;
  if (buf.length !== expected) {
    throw new TruncatedSnapshot(
      `payload mismatch: ${nx}x${ny} field needs ${expected} bytes, got ${buf.length}`);
  }
  const values = new Float64Array(nx * ny);
  for (let k = 0; k < values.length; k++) {
    values[k] = view.getFloat64(HEADER_BYTES + 8 * k, true);
  }
  return { version, nx, ny, lx, ly, t, values };
}

/** x grid nodes: uniform on [-Lx, Lx), periodic convention. */
export function xNodes(s: Snapshot): Float64Array {
  const h = (2 * s.lx) / s.nx;
  return Float64Array.from({ length: s.nx }, (_, i) => -s.lx + i * h);
}

/** y grid nodes: uniform on [-Ly, Ly), periodic convention. */
export function yNodes(s: Snapshot): Float64Array {
  const h = (2 * s.ly) / s.ny;
  return Float64Array.from({ length: s.ny }, (_, j) => -s.ly + j * h);
}

/** Extract the x-line u(., y) nearest to the requested y value. */
export function xSlice(s: Snapshot, y: number): { y: number; line: Float64Array } {
  const ys = yNodes(s);
  let best = 0;
  for (let j = 1; j < ys.length; j++) {
    if (Math.abs(ys[j] - y) < Math.abs(ys[best] - y)) best = j;
  }
  return { y: ys[best], line: s.values.subarray(best * s.nx, (best + 1) * s.nx) };
}
