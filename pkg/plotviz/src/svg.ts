/**
 * Minimal deterministic SVG chart builder.
 *
 * Coordinates are rounded to a fixed number of decimals and all iteration
 * orders are explicit, so identical input bytes always produce identical
 * output bytes (the golden-file contract).
 */

export interface Series {
  label: string;
  color: string;
  xs: number[];
  ys: number[];
  dash?: string;
}

export interface Marker {
  x: number;
  y: number;
  color: string;
}

export interface AxisSpec {
  label: string;
  log?: boolean;
}

export interface ChartSpec {
  title: string;
  x: AxisSpec;
  y: AxisSpec;
  series: Series[];
  width?: number;
  height?: number;
  /** Secondary mini-panel drawn above the main axes (e.g. a drift profile). */
  inset?: { label: string; xs: number[]; ys: number[]; markers: Marker[] };
}

const FONT = "11px sans-serif";

function fmt(v: number): string {
  return v.toFixed(2).replace(/^-0\.00$/, "0.00");
}

function niceTicks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const raw = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => (hi - lo) / s <= count)!;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step) {
    ticks.push(v);
  }
  return ticks;
}

function tickLabel(value: number, log: boolean): string {
  if (log) {
    return `1e${Math.round(value)}`;
  }
  if (Number.isInteger(value)) {
    return String(value);
  }
  return String(Number(value.toPrecision(3)));
}

class Scale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly a: number,
    readonly b: number,
  ) {}

  map(v: number): number {
    const span = this.hi - this.lo || 1;
    return this.a + ((v - this.lo) / span) * (this.b - this.a);
  }
}

export function buildChart(spec: ChartSpec): string {
  const width = spec.width ?? 640;
  const height = spec.height ?? 420;
  const margin = { left: 64, right: 16, top: spec.inset ? 110 : 40, bottom: 48 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  const xLog = spec.x.log ?? false;
  const yLog = spec.y.log ?? false;
  const tx = (v: number) => (xLog ? Math.log10(v) : v);
  const ty = (v: number) => (yLog ? Math.log10(v) : v);

  const xsAll = spec.series.flatMap((s) => s.xs.map(tx));
  const ysAll = spec.series.flatMap((s) => s.ys.map(ty)).filter(Number.isFinite);
  const xScale = new Scale(
    Math.min(...xsAll), Math.max(...xsAll), margin.left, margin.left + plotW,
  );
  let yLo = Math.min(...ysAll);
  let yHi = Math.max(...ysAll);
  if (yLo === yHi) {
    yLo -= 1;
    yHi += 1;
  }
  const pad = 0.05 * (yHi - yLo);
  const yScale = new Scale(
    yLo - pad, yHi + pad, margin.top + plotH, margin.top,
  );

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${fmt(width / 2)}" y="20" text-anchor="middle" style="font:13px sans-serif;font-weight:bold">${spec.title}</text>`,
  );

  // Axes frame.
  parts.push(
    `<rect x="${fmt(margin.left)}" y="${fmt(margin.top)}" width="${fmt(plotW)}" height="${fmt(plotH)}" fill="none" stroke="#444"/>`,
  );

  const xTicks = niceTicks(xScale.lo, xScale.hi, 8);
  for (const tick of xTicks) {
    const px = xScale.map(tick);
    parts.push(
      `<line x1="${fmt(px)}" y1="${fmt(margin.top)}" x2="${fmt(px)}" y2="${fmt(margin.top + plotH)}" stroke="#ddd"/>`,
    );
    parts.push(
      `<text x="${fmt(px)}" y="${fmt(margin.top + plotH + 16)}" text-anchor="middle" style="font:${FONT}">${tickLabel(tick, xLog)}</text>`,
    );
  }
  const yTicks = niceTicks(yScale.lo, yScale.hi, 6);
  for (const tick of yTicks) {
    const py = yScale.map(tick);
    parts.push(
      `<line x1="${fmt(margin.left)}" y1="${fmt(py)}" x2="${fmt(margin.left + plotW)}" y2="${fmt(py)}" stroke="#ddd"/>`,
    );
    parts.push(
      `<text x="${fmt(margin.left - 6)}" y="${fmt(py + 4)}" text-anchor="end" style="font:${FONT}">${tickLabel(tick, yLog)}</text>`,
    );
  }

  parts.push(
    `<text x="${fmt(margin.left + plotW / 2)}" y="${fmt(height - 10)}" text-anchor="middle" style="font:${FONT}">${spec.x.label}</text>`,
  );
  parts.push(
    `<text x="16" y="${fmt(margin.top + plotH / 2)}" text-anchor="middle" style="font:${FONT}" transform="rotate(-90 16 ${fmt(margin.top + plotH / 2)})">${spec.y.label}</text>`,
  );

  for (const series of spec.series) {
    const points = series.xs
      .map((x, i) => [tx(x), ty(series.ys[i])] as const)
      .filter(([, y]) => Number.isFinite(y))
      .map(([x, y]) => `${fmt(xScale.map(x))},${fmt(yScale.map(y))}`)
      .join(" ");
    const dash = series.dash ? ` stroke-dasharray="${series.dash}"` : "";
    parts.push(
      `<polyline points="${points}" fill="none" stroke="${series.color}" stroke-width="1.5"${dash}/>`,
    );
  }

  // Legend (deterministic order: as provided).
  spec.series.forEach((series, i) => {
    const lx = margin.left + 12;
    const ly = margin.top + 16 + 16 * i;
    parts.push(
      `<line x1="${fmt(lx)}" y1="${fmt(ly - 4)}" x2="${fmt(lx + 22)}" y2="${fmt(ly - 4)}" stroke="${series.color}" stroke-width="1.5"/>`,
    );
    parts.push(
      `<text x="${fmt(lx + 28)}" y="${fmt(ly)}" style="font:${FONT}">${series.label}</text>`,
    );
  });

  if (spec.inset) {
    const ix = margin.left;
    const iy = 34;
    const ih = 56;
    const inset = spec.inset;
    const sx = new Scale(
      Math.min(...inset.xs), Math.max(...inset.xs), ix, ix + plotW,
    );
    const sy = new Scale(
      Math.min(0, ...inset.ys), Math.max(1, ...inset.ys), iy + ih, iy,
    );
    parts.push(
      `<rect x="${fmt(ix)}" y="${fmt(iy)}" width="${fmt(plotW)}" height="${fmt(ih)}" fill="none" stroke="#888"/>`,
    );
    const points = inset.xs
      .map((x, i) => `${fmt(sx.map(x))},${fmt(sy.map(inset.ys[i]))}`)
      .join(" ");
    parts.push(
      `<polyline points="${points}" fill="none" stroke="#2d6a4f" stroke-width="1.2"/>`,
    );
    for (const marker of inset.markers) {
      parts.push(
        `<circle cx="${fmt(sx.map(marker.x))}" cy="${fmt(sy.map(marker.y))}" r="2.5" fill="${marker.color}"/>`,
      );
    }
    parts.push(
      `<text x="${fmt(ix + 6)}" y="${fmt(iy + 12)}" style="font:${FONT}">${inset.label}</text>`,
    );
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
