/**
 * Strict CSV schemas for the workbench report kinds.  Validation fails
 * closed: wrong header, short rows, non-finite numeric cells, or an empty
 * body all throw before any figure is written.
 */

export class SchemaError extends Error {}

export type Row = Record<string, string | number>;

export interface ReportFrame {
  kind: string;
  columns: string[];
  rows: Row[];
  configHash: string;
  version: string;
}

/** Per-kind column manifest; string names are the non-numeric columns. */
const MANIFESTS: Record<string, { columns: string[]; text: string[] }> = {
  "kernel-norms": {
    columns: ["r", "theta", "norm", "predicted_slope", "measured_slope",
      "config_hash", "version"],
    text: [],
  },
  gn: {
    columns: ["quantity", "value", "reference", "tolerance", "pass",
      "config_hash", "version"],
    text: ["quantity", "reference", "tolerance"],
  },
  besov: {
    columns: ["h", "quotient", "s", "tolerance", "pass", "config_hash",
      "version"],
    text: ["h", "tolerance"],
  },
  degiorgi: {
    columns: ["n", "R_n", "k_n", "M_n", "E_next", "level_set_ok", "interp_ok",
      "delta", "config_hash", "version"],
    text: [],
  },
  admissibility: {
    columns: ["p", "mu", "admissible", "reason", "q", "beta", "config_hash",
      "version"],
    text: ["reason"],
  },
};

export function knownKinds(): string[] {
  return Object.keys(MANIFESTS);
}

function splitCsv(textBody: string): string[][] {
  const lines = textBody.split("\n").filter((l) => l.length > 0);
  return lines.map((l) => l.split(","));
}

export function parseReport(kind: string, text: string): ReportFrame {
  const manifest = MANIFESTS[kind];
  if (!manifest) {
    throw new SchemaError(`unknown report kind: ${kind}`);
  }
  const cells = splitCsv(text);
  if (cells.length === 0) {
    throw new SchemaError("empty report file");
  }
  const header = cells[0];
  if (header.join(",") !== manifest.columns.join(",")) {
    throw new SchemaError(
      `header mismatch for kind ${kind}: got [${header.join(",")}], ` +
      `expected [${manifest.columns.join(",")}]`,
    );
  }
  if (cells.length < 2) {
    throw new SchemaError("report has a header but no data rows");
  }
  const rows: Row[] = [];
  for (let i = 1; i < cells.length; i++) {
    const raw = cells[i];
    if (raw.length !== header.length) {
      throw new SchemaError(`row ${i} has ${raw.length} cells, expected ${header.length}`);
    }
    const row: Row = {};
    for (let j = 0; j < header.length; j++) {
      const name = header[j];
      if (name === "config_hash" || name === "version" || manifest.text.includes(name)) {
        row[name] = raw[j];
        continue;
      }
      const value = Number(raw[j]);
      if (!Number.isFinite(value) && raw[j] !== "inf") {
        throw new SchemaError(`row ${i} column ${name}: non-finite value '${raw[j]}'`);
      }
      row[name] = raw[j] === "inf" ? Infinity : value;
    }
    rows.push(row);
  }
  const first = rows[0];
  return {
    kind,
    columns: header,
    rows,
    configHash: String(first["config_hash"]),
    version: String(first["version"]),
  };
}

/** Numeric column accessor that re-asserts finiteness (fail closed). */
export function numbers(frame: ReportFrame, column: string): number[] {
  if (!frame.columns.includes(column)) {
    throw new SchemaError(`missing column ${column}`);
  }
  return frame.rows.map((r, i) => {
    const v = Number(r[column]);
    if (!Number.isFinite(v)) {
      throw new SchemaError(`row ${i} column ${column} is not finite`);
    }
    return v;
  });
}
