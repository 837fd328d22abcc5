/**
 * Strict readers for the experiment output files.
 *
 * The CSV schemas are a fixed contract with the simulation harness: the
 * header must match exactly (unknown or missing columns are rejected) and
 * every data row must parse cleanly.
 */

import { readFileSync } from "fs";
import path from "path";

export const MEDSE_COLUMNS = [
  "mode",
  "iteration",
  "t",
  "medse",
  "aux_solves_median_cum",
] as const;

export const CURVES_COLUMNS = [
  "mode",
  "run",
  "iteration",
  "t",
  "updating_node",
  "rho",
  "rel_sq_error",
  "aux_solves_cum",
  "scalars_cum",
  "constraint_residual",
] as const;

export interface MedseRow {
  mode: string;
  iteration: number;
  t: number;
  medse: number;
  aux_solves_median_cum: number;
}

export interface CurveRow {
  mode: string;
  run: number;
  iteration: number;
  t: number;
  updating_node: number;
  rho: number;
  rel_sq_error: number;
  aux_solves_cum: number;
  scalars_cum: number;
  constraint_residual: number;
}

export interface ReportDoc {
  config?: { samples?: number };
  ramp?: number[] | null;
}

export type FigureKind = "convergence" | "cost" | "adaptive";

/** Everything a figure needs, parsed and validated. */
export interface CurveSet {
  kind: FigureKind;
  medse: MedseRow[];
  curves: CurveRow[];
  report: ReportDoc | null;
}

export class CsvError extends Error {}

function parseTable(
  text: string,
  expected: readonly string[],
  file: string,
): Record<string, string>[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError(`${file}: empty file`);
  }
  const header = lines[0].split(",");
  if (header.length !== expected.length || header.some((h, i) => h !== expected[i])) {
    throw new CsvError(
      `${file}: header mismatch; expected "${expected.join(",")}" got "${lines[0]}"`,
    );
  }
  if (lines.length === 1) {
    throw new CsvError(`${file}: no data rows`);
  }
  return lines.slice(1).map((line, idx) => {
    const cells = line.split(",");
    if (cells.length !== expected.length) {
      throw new CsvError(`${file}: row ${idx + 2} has ${cells.length} cells`);
    }
    const row: Record<string, string> = {};
    expected.forEach((name, i) => (row[name] = cells[i]));
    return row;
  });
}

function toNumber(value: string, column: string, file: string): number {
  const parsed = Number(value);
  if (!Number.isFinite(parsed)) {
    throw new CsvError(`${file}: non-numeric value "${value}" in ${column}`);
  }
  return parsed;
}

export function readMedse(file: string): MedseRow[] {
  const rows = parseTable(readFileSync(file, "utf-8"), MEDSE_COLUMNS, file);
  return rows.map((r) => ({
    mode: r.mode,
    iteration: toNumber(r.iteration, "iteration", file),
    t: toNumber(r.t, "t", file),
    medse: toNumber(r.medse, "medse", file),
    aux_solves_median_cum: toNumber(
      r.aux_solves_median_cum,
      "aux_solves_median_cum",
      file,
    ),
  }));
}

export function readCurves(file: string): CurveRow[] {
  const rows = parseTable(readFileSync(file, "utf-8"), CURVES_COLUMNS, file);
  return rows.map((r) => ({
    mode: r.mode,
    run: toNumber(r.run, "run", file),
    iteration: toNumber(r.iteration, "iteration", file),
    t: toNumber(r.t, "t", file),
    updating_node: toNumber(r.updating_node, "updating_node", file),
    rho: toNumber(r.rho, "rho", file),
    rel_sq_error: toNumber(r.rel_sq_error, "rel_sq_error", file),
    aux_solves_cum: toNumber(r.aux_solves_cum, "aux_solves_cum", file),
    scalars_cum: toNumber(r.scalars_cum, "scalars_cum", file),
    constraint_residual: toNumber(r.constraint_residual, "constraint_residual", file),
  }));
}

export function loadCurveSet(dir: string, kind: FigureKind): CurveSet {
  const medse = readMedse(path.join(dir, "medse.csv"));
  const curves = readCurves(path.join(dir, "curves.csv"));
  let report: ReportDoc | null = null;
  try {
    report = JSON.parse(readFileSync(path.join(dir, "report.json"), "utf-8"));
  } catch {
    report = null; // the report is optional; only the adaptive inset uses it
  }
  return { kind, medse, curves, report };
}

export function modesOf(rows: { mode: string }[]): string[] {
  return [...new Set(rows.map((r) => r.mode))].sort();
}
