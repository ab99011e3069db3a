#!/usr/bin/env node
/**
 * relspec-plot — render convergence figures from solver trace CSVs.
 *
 * Usage:
 *   relspec-plot --out fig.png trace1.csv[:label[:style]] [trace2.csv...]
 *
 * Each positional argument names a trace CSV, optionally followed by a
 * legend label and a line style ("solid" or "dashed").  A dashed trace is
 * drawn in the same color as the preceding solid one, which is how the
 * paired oracle-comparison figures are built:
 *
 *   relspec-plot --out cmp.png new.csv:unbiased pi.csv:power-iteration:dashed
 *
 * Exit codes: 0 on success, 2 on usage or input errors.
 */

import { pathToFileURL } from "node:url";

import { render, UsageError, type PlotEntry } from "./plot.js";

export const USAGE =
  "usage: relspec-plot --out <fig.png|fig.svg> <trace.csv[:label[:solid|dashed]]> ...";

const STYLES = new Set(["solid", "dashed"]);

/** Parse one positional `path[:label[:style]]` argument. */
export function parseEntryArg(arg: string): PlotEntry {
  const parts = arg.split(":");
  if (parts.length > 3) {
    throw new UsageError(`too many ':' segments in "${arg}"`);
  }
  const file = parts[0] ?? "";
  if (file === "") {
    throw new UsageError(`empty trace path in "${arg}"`);
  }
  let label: string | null = null;
  let style = "solid";
  if (parts.length === 3) {
    label = parts[1]!;
    style = parts[2]!;
    if (!STYLES.has(style)) {
      throw new UsageError(`unknown line style "${style}" in "${arg}" (use solid or dashed)`);
    }
  } else if (parts.length === 2) {
    // Grammar-wise the second segment is a label, but a bare style name is
    // unambiguous and almost certainly meant as one.
    if (STYLES.has(parts[1]!)) {
      style = parts[1]!;
    } else {
      label = parts[1]!;
    }
  }
  if (label === "") {
    throw new UsageError(`empty label in "${arg}"`);
  }
  return { path: file, label, style: style as PlotEntry["style"], colorGroup: null };
}

export interface CliIo {
  out: (line: string) => void;
  err: (line: string) => void;
}

export function runCli(argv: string[], io: CliIo): number {
  let out: string | null = null;
  const entries: PlotEntry[] = [];
  try {
    for (let i = 0; i < argv.length; i++) {
      const arg = argv[i]!;
      if (arg === "-h" || arg === "--help") {
        io.out(USAGE);
        return 0;
      }
      if (arg === "--out") {
        if (i + 1 >= argv.length) throw new UsageError("--out requires a path");
        out = argv[++i]!;
      } else if (arg.startsWith("--out=")) {
        out = arg.slice("--out=".length);
      } else if (arg.startsWith("-")) {
        throw new UsageError(`unknown option ${arg}`);
      } else {
        entries.push(parseEntryArg(arg));
      }
    }
    if (out === null) throw new UsageError("--out is required");
    if (entries.length === 0) throw new UsageError("no trace files given");

    const result = render({ entries, out });
    io.out(`wrote ${result.out}: ${result.curves} curve(s), ${result.bytes} bytes`);
    return 0;
  } catch (err) {
    if (err instanceof Error) {
      io.err(`error: ${err.message}`);
      io.err(USAGE);
      return 2;
    }
    throw err;
  }
}

const invokedAsScript =
  typeof process.argv[1] === "string" && import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedAsScript) {
  process.exit(
    runCli(process.argv.slice(2), {
      out: (l) => console.log(l),
      err: (l) => console.error(l),
    }),
  );
}
