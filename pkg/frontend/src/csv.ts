/** Parsers for the solver's text outputs: diagnostics CSV and (h, err) tables. */

export class MissingColumns extends Error {}
export class BadTable extends Error {}

export interface Diagnostics {
  columns: Map<string, Float64Array>;
  rows: number;
}

const REQUIRED = ["step", "time", "mass", "l2", "linf"];

export function parseDiagnostics(text: string): Diagnostics {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length < 2) {
    throw new BadTable("diagnostics CSV needs a header and at least one row");
  }
  const header = lines[0].split(",").map((s) => s.trim());
  const missing = REQUIRED.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new MissingColumns(`diagnostics CSV missing columns: ${missing.join(", ")}`);
  }
  const rows = lines.length - 1;
  const cols = new Map<string, Float64Array>(
    header.map((name) => [name, new Float64Array(rows)]));
  for (let r = 0; r < rows; r++) {
    const parts = lines[r + 1].split(",");
    if (parts.length !== header.length) {
      throw new BadTable(`row ${r + 1} has ${parts.length} fields, header has ${header.length}`);
    }
    for (let c = 0; c < header.length; c++) {
      const v = Number(parts[c]);
      if (!Number.isFinite(v) && parts[c].trim() !== "nan" && parts[c].trim() !== "inf") {
        throw new BadTable(`row ${r + 1}, column ${header[c]}: unparseable ${parts[c]!}`);
      }
      cols.get(header[c])![r] = v;
    }
  }
  return { columns: cols, rows };
}

export interface ConvergenceSample {
  h: number;
  err: number;
}

/**
 * Parse an (h, err) table as printed by the solver's convergence CLI:
 * optional "h,err"-style header, then comma- or whitespace-separated pairs.
 */
export function parseConvergence(text: string): ConvergenceSample[] {
  const out: ConvergenceSample[] = [];
  for (const raw of text.split(/\r?\n/)) {
    const line = raw.trim();
    if (line.length === 0 || /^[#a-zA-Z]/.test(line)) continue;
    const parts = line.split(/[,\s]+/).filter((p) => p.length > 0);
    if (parts.length < 2) {
      throw new BadTable(`convergence row needs two fields: ${JSON.stringify(line)}`);
    }
    const h = Number(parts[0]);
    const err = Number(parts[1]);
    if (!Number.isFinite(h) || !Number.isFinite(err)) {
      throw new BadTable(`unparseable convergence row: ${JSON.stringify(line)}`);
    }
    if (h <= 0 || err <= 0) {
      throw new BadTable(`log-log data must be positive, got (${h}, ${err})`);
    }
    out.push({ h, err });
  }
  if (out.length < 2) {
    throw new BadTable("need at least two (h, err) samples for a log-log fit");
  }
  return out;
}

/** Least-squares slope of log(err) vs log(h). */
export function fitSlope(samples: ConvergenceSample[]): number {
  const lh = samples.map((s) => Math.log(s.h));
  const le = samples.map((s) => Math.log(s.err));
  const n = samples.length;
  const mh = lh.reduce((a, b) => a + b, 0) / n;
  const me = le.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (lh[i] - mh) * (le[i] - me);
    den += (lh[i] - mh) ** 2;
  }
  if (den === 0) throw new BadTable("all h values identical; cannot fit a slope");
  return num / den;
}
