/**
 * The three figure kinds built from a validated curve set:
 *
 *   convergence - log-scale MedSE per iteration, one line per variant;
 *   cost        - median cumulative auxiliary-solve count per iteration;
 *   adaptive    - log-scale MedSE over time with the drift profile inset.
 */

import { writeFileSync } from "fs";

import { CurveSet, CsvError, FigureKind, loadCurveSet, modesOf } from "./csv.js";
import { Marker, Series, buildChart } from "./svg.js";

const PALETTE = ["#4361ee", "#e63946", "#2d6a4f", "#b5838d"];

function seriesByMode(
  set: CurveSet,
  value: (row: { medse: number; aux_solves_median_cum: number }) => number,
): Series[] {
  return modesOf(set.medse).map((mode, i) => {
    const rows = set.medse
      .filter((r) => r.mode === mode)
      .sort((a, b) => a.iteration - b.iteration);
    return {
      label: mode,
      color: PALETTE[i % PALETTE.length],
      xs: rows.map((r) => r.iteration),
      ys: rows.map(value),
    };
  });
}

function convergenceChart(set: CurveSet): string {
  return buildChart({
    title: "Median squared error per iteration",
    x: { label: "iteration" },
    y: { label: "MedSE", log: true },
    series: seriesByMode(set, (r) => r.medse),
  });
}

function costChart(set: CurveSet): string {
  return buildChart({
    title: "Cumulative auxiliary problems solved",
    x: { label: "iteration" },
    y: { label: "median cumulative solves" },
    series: seriesByMode(set, (r) => r.aux_solves_median_cum),
  });
}

function rampMarkers(xs: number[], ys: number[]): Marker[] {
  // Mark the points where the profile changes slope (the configured knots).
  const markers: Marker[] = [];
  for (let i = 1; i < xs.length - 1; i++) {
    const before = ys[i] - ys[i - 1];
    const after = ys[i + 1] - ys[i];
    if (Math.abs(after - before) > 1e-9) {
      markers.push({ x: xs[i], y: ys[i], color: "#e63946" });
    }
  }
  return markers;
}

function adaptiveChart(set: CurveSet): string {
  const modes = modesOf(set.medse);
  const series = modes.map((mode, i) => {
    const rows = set.medse
      .filter((r) => r.mode === mode)
      .sort((a, b) => a.t - b.t);
    return {
      label: mode,
      color: PALETTE[i % PALETTE.length],
      xs: rows.map((r) => r.t),
      ys: rows.map((r) => r.medse),
    };
  });
  let inset;
  const ramp = set.report?.ramp;
  if (ramp && ramp.length > 0) {
    const ts = set.medse
      .filter((r) => r.mode === modes[0])
      .sort((a, b) => a.t - b.t)
      .map((r) => r.t);
    const xs = ts.slice(0, ramp.length);
    inset = {
      label: "drift profile p(t)",
      xs,
      ys: ramp.slice(0, xs.length),
      markers: rampMarkers(xs, ramp),
    };
  }
  return buildChart({
    title: "Tracking error over time",
    x: { label: "t (samples)" },
    y: { label: "MedSE", log: true },
    series,
    inset,
  });
}

export function renderFigure(set: CurveSet): string {
  if (set.medse.some((r) => r.medse <= 0)) {
    throw new CsvError("medse values must be positive for log-scale plots");
  }
  switch (set.kind) {
    case "convergence":
      return convergenceChart(set);
    case "cost":
      return costChart(set);
    case "adaptive":
      return adaptiveChart(set);
  }
}

export function render(inDir: string, kind: FigureKind, outFile: string): void {
  const set = loadCurveSet(inDir, kind);
  writeFileSync(outFile, renderFigure(set));
}
