/**
 * Reader for relspec trace CSV files.
 *
 * The format, as the solver writes it:
 *
 *   # key=value            (run metadata, any number of lines, before the header)
 *   iter,f_est,delta_k,matvecs,elapsed_s
 *   1,1.0070657,0.0070161,658,0.0123
 *   ...
 *   # status=early_stop    (trailing comments after the rows)
 *   # matvecs_oracle=111
 *   # matvecs_eval=547
 *
 * Rows are flushed as they are produced, so a file from a killed run may
 * end mid-stream; everything parsed up to that point is still valid.  All
 * parse errors name the file and 1-based line number.
 */

export interface TraceRow {
  iter: number;
  fEst: number;
  deltaK: number;
  matvecs: number;
  elapsedS: number;
}

export interface Trace {
  /** `# key=value` pairs seen before the header, in file order. */
  meta: Record<string, string>;
  rows: TraceRow[];
  /** "early_stop" | "budget_exhausted" | "" when the run never finalized. */
  status: string;
  /** Work counters from the trailing comments (matvecs_oracle, matvecs_eval). */
  counters: Record<string, number>;
}

export const CSV_HEADER = "iter,f_est,delta_k,matvecs,elapsed_s";

const COUNTER_KEYS = new Set(["matvecs_oracle", "matvecs_eval"]);

export class TraceParseError extends Error {
  constructor(
    public readonly file: string,
    public readonly line: number,
    detail: string,
  ) {
    super(`${file}:${line}: ${detail}`);
    this.name = "TraceParseError";
  }
}

/** Strict integer field: optional sign, digits, nothing else. */
function parseIntField(s: string): number | null {
  if (!/^[+-]?\d+$/.test(s)) return null;
  const v = Number(s);
  return Number.isSafeInteger(v) ? v : null;
}

/**
 * Float field as Python's repr/float round-trip produces it: decimal or
 * exponent notation, plus the spellings "nan", "inf", "-inf".
 */
function parseFloatField(s: string): number | null {
  const t = s.trim().toLowerCase();
  if (t === "nan") return NaN;
  if (t === "inf" || t === "+inf" || t === "infinity") return Infinity;
  if (t === "-inf" || t === "-infinity") return -Infinity;
  if (!/^[+-]?(\d+\.?\d*|\.\d+)(e[+-]?\d+)?$/i.test(t)) return null;
  return Number(t);
}

export function parseTraceText(file: string, text: string): Trace {
  const meta: Record<string, string> = {};
  const rows: TraceRow[] = [];
  let status = "";
  const counters: Record<string, number> = {};
  let sawHeader = false;

  const lines = text.split("\n");
  // A trailing newline yields one empty final element; ignore it.
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();

  for (let i = 0; i < lines.length; i++) {
    const lineno = i + 1;
    const line = (lines[i] ?? "").replace(/\r$/, "");
    if (line === "") continue;

    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq < 0) {
        throw new TraceParseError(file, lineno, `comment is not key=value: ${line}`);
      }
      const key = body.slice(0, eq).trim();
      const value = body.slice(eq + 1).trim();
      if (key === "status") {
        status = value;
      } else if (COUNTER_KEYS.has(key)) {
        const v = parseIntField(value);
        if (v === null) {
          throw new TraceParseError(file, lineno, `counter ${key} is not an integer: ${value}`);
        }
        counters[key] = v;
      } else if (!sawHeader) {
        meta[key] = value;
      }
      // Unrecognized comments after the header are tolerated and dropped.
      continue;
    }

    if (!sawHeader) {
      if (line !== CSV_HEADER) {
        throw new TraceParseError(file, lineno, `expected header "${CSV_HEADER}", got "${line}"`);
      }
      sawHeader = true;
      continue;
    }

    const fields = line.split(",");
    if (fields.length !== 5) {
      throw new TraceParseError(file, lineno, `expected 5 fields, got ${fields.length}`);
    }
    const iter = parseIntField(fields[0]!);
    const fEst = parseFloatField(fields[1]!);
    const deltaK = parseFloatField(fields[2]!);
    const matvecs = parseIntField(fields[3]!);
    const elapsedS = parseFloatField(fields[4]!);
    if (iter === null || fEst === null || deltaK === null || matvecs === null || elapsedS === null) {
      throw new TraceParseError(file, lineno, `malformed row: ${line}`);
    }
    rows.push({ iter, fEst, deltaK, matvecs, elapsedS });
  }

  if (!sawHeader) {
    throw new TraceParseError(file, lines.length + 1, `missing header "${CSV_HEADER}"`);
  }
  return { meta, rows, status, counters };
}

/** Default legend entry for a trace: "d, n×m" from its metadata. */
export function defaultLabel(trace: Trace): string {
  const d = trace.meta["d"];
  const n = trace.meta["n"];
  const m = trace.meta["m"];
  if (d !== undefined && n !== undefined && m !== undefined) {
    return `${d}, ${n}×${m}`;
  }
  return "";
}
