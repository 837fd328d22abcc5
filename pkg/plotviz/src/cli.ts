#!/usr/bin/env node
/**
 * plotviz plot --in <dir> --kind {convergence|cost|adaptive} --out <file>
 *
 * Reads medse.csv / curves.csv (and report.json for the adaptive inset)
 * produced by the experiment harness and writes a deterministic SVG figure.
 */

import { parseArgs } from "node:util";

import { CsvError, FigureKind } from "./csv.js";
import { render } from "./render.js";

const KINDS: FigureKind[] = ["convergence", "cost", "adaptive"];

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string" },
        kind: { type: "string" },
        out: { type: "string" },
      },
    });
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  const [command] = parsed.positionals;
  if (command !== "plot") {
    console.error("usage: plotviz plot --in <dir> --kind <kind> --out <file>");
    return 2;
  }
  const { in: inDir, kind, out } = parsed.values;
  if (!inDir || !kind || !out) {
    console.error("plot requires --in, --kind and --out");
    return 2;
  }
  if (!KINDS.includes(kind as FigureKind)) {
    console.error(`unknown kind "${kind}" (expected ${KINDS.join("|")})`);
    return 2;
  }
  try {
    render(inDir, kind as FigureKind, out);
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(`invalid input: ${err.message}`);
      return 1;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      console.error(`missing input: ${err.message}`);
      return 1;
    }
    throw err;
  }
  console.log(`wrote ${out}`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
