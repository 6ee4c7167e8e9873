#!/usr/bin/env node
/**
 * kp-plot <kind> --in FILE [--in FILE ...] --out FILE [options]
 *
 * Kinds:
 *   surface  --in snapshot.kps            axonometric wireframe of u(x, y)
 *   heatmap  --in snapshot.kps            filled u(x, y) map with color bar
 *   xslice   --in snapshot.kps --y 0,5,10 x-profiles at chosen y values
 *   norms    --in diagnostics.csv         L2 / mass / Linf time series
 *   loglog   --in table.csv [...]         (h, err) log-log fit per input file
 *
 * Exit codes: 0 success, 2 usage/parse error, 1 internal error.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";
import { parseArgs } from "node:util";

import { BadTable, MissingColumns, parseConvergence, parseDiagnostics } from "./csv.js";
import { BadMagic, TruncatedSnapshot, parseSnapshot } from "./kps1.js";
import {
  plotHeatmap, plotLogLog, plotNorms, plotSurface, plotXSlice,
} from "./plots.js";

const KINDS = ["surface", "heatmap", "xslice", "norms", "loglog"] as const;
type Kind = (typeof KINDS)[number];

export class UsageError extends Error {}

export interface CliOptions {
  kind: Kind;
  inputs: string[];
  out: string;
  y: number[];
  title?: string;
}

export function parseCli(argv: string[]): CliOptions {
  const kind = argv[0] as Kind;
  if (!kind || !KINDS.includes(kind)) {
    throw new UsageError(
      `usage: kp-plot <${KINDS.join("|")}> --in FILE --out FILE [--y LIST] [--title T]`);
  }
  const { values } = parseArgs({
    args: argv.slice(1),
    options: {
      in: { type: "string", multiple: true },
      out: { type: "string" },
      y: { type: "string" },
      title: { type: "string" },
    },
  });
  if (!values.in || values.in.length === 0) throw new UsageError("--in is required");
  if (!values.out) throw new UsageError("--out is required");
  let y: number[] = [];
  if (values.y !== undefined) {
    y = values.y.split(",").map((s) => {
      const v = Number(s.trim());
      if (!Number.isFinite(v)) throw new UsageError(`bad --y value: ${s}`);
      return v;
    });
  }
  if (kind === "xslice" && y.length === 0) {
    throw new UsageError("xslice requires --y with at least one value");
  }
  return { kind, inputs: values.in, out: values.out, y, title: values.title };
}

export function renderJob(opts: CliOptions): string {
  const first = opts.inputs[0];
  switch (opts.kind) {
    case "surface":
      return plotSurface(parseSnapshot(readFileSync(first)), opts.title);
    case "heatmap":
      return plotHeatmap(parseSnapshot(readFileSync(first)), opts.title);
    case "xslice":
      return plotXSlice(parseSnapshot(readFileSync(first)), opts.y, opts.title);
    case "norms":
      return plotNorms(parseDiagnostics(readFileSync(first, "utf8")), opts.title);
    case "loglog":
      return plotLogLog(
        opts.inputs.map((p) => ({
          label: opts.inputs.length > 1 ? basename(p).replace(/\.[^.]+$/, "") : "",
          samples: parseConvergence(readFileSync(p, "utf8")),
        })),
        opts.title);
  }
}

export function main(argv: string[]): number {
  try {
    const opts = parseCli(argv);
    writeFileSync(opts.out, renderJob(opts));
    return 0;
  } catch (err) {
    if (
      err instanceof UsageError || err instanceof BadMagic ||
      err instanceof TruncatedSnapshot || err instanceof BadTable ||
      err instanceof MissingColumns ||
      (err instanceof Error && (err as NodeJS.ErrnoException).code === "ENOENT")
    ) {
      console.error(`kp-plot: ${err.message}`);
      return 2;
    }
    console.error(`kp-plot: internal error: ${(err as Error).stack ?? err}`);
    return 1;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("kp-plot")) {
  process.exit(main(process.argv.slice(2)));
}
