#!/usr/bin/env node
/**
 * plot_report --in report.csv --kind KIND --out fig.svg
 *
 * Reads a workbench report CSV, validates it against the kind's column
 * manifest (fail closed: no figure is written on any violation), and emits
 * a deterministic SVG with the predicted guide drawn from the CSV itself.
 */

import { readFileSync, writeFileSync } from "node:fs";
import process from "node:process";

import { renderReport } from "./figures.js";
import { knownKinds, parseReport } from "./schema.js";

function parseArgs(argv: string[]): Map<string, string> {
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const val = argv[i + 1];
    if (!key?.startsWith("--") || val === undefined) {
      throw new Error(`malformed arguments near '${key}'`);
    }
    out.set(key.slice(2), val);
  }
  return out;
}

export function main(argv: string[]): number {
  let args: Map<string, string>;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  const input = args.get("in");
  const kind = args.get("kind");
  const output = args.get("out");
  if (!input || !kind || !output) {
    console.error(
      `usage: plot_report --in report.csv --kind {${knownKinds().join("|")}} --out fig.svg`,
    );
    return 2;
  }
  let text: string;
  try {
    text = readFileSync(input, "utf8");
  } catch (err) {
    console.error(`cannot read ${input}: ${String(err)}`);
    return 2;
  }
  try {
    const frame = parseReport(kind, text);
    const svg = renderReport(frame);
    writeFileSync(output, svg);
    console.log(`wrote ${output} (config ${frame.configHash}, v${frame.version})`);
    return 0;
  } catch (err) {
    console.error(`plot failed, no file written: ${String(err)}`);
    return 1;
  }
}

const isDirect = process.argv[1]?.endsWith("plot_report.js");
if (isDirect) {
  process.exit(main(process.argv.slice(2)));
}
