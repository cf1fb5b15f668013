/**
 * Deterministic SVG line charts.
 *
 * No DOM, no fonts to measure, no timestamps: the output is a pure function
 * of the chart spec, so re-rendering identical data gives identical bytes.
 * The x axis is ordinal (sweep grids are discrete); the y axis is linear or
 * log10.
 */

export interface Series {
  label: string;
  /** y value per x category; null leaves a gap */
  ys: (number | null)[];
  color: string;
  dash?: string;
  marker?: "circle" | "square" | "diamond";
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  categories: string[];
  series: Series[];
  logY?: boolean;
}

export const PALETTE = [
  "#1f6feb", "#d1242f", "#1a7f37", "#8250df", "#bf6a02", "#0d7d87",
  "#6e4c13", "#c21e88",
];

const W = 640;
const BASE_H = 400;
const ML = 64;
const MR = 16;
const MT = 36;
const MB = 56;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 0.01 && abs < 10000) {
    return String(Number(v.toPrecision(4)));
  }
  const exp = Math.floor(Math.log10(abs));
  const mant = v / Math.pow(10, exp);
  return `${Number(mant.toPrecision(3))}e${exp}`;
}

function linearTicks(min: number, max: number, count: number): number[] {
  const span = max - min || Math.abs(max) || 1;
  const rough = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function logTicks(min: number, max: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(min) - 1e-9); Math.pow(10, e) <= max * (1 + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length >= 2 ? ticks : [min, max];
}

function markerShape(kind: Series["marker"], x: number, y: number, color: string): string {
  const r = 3;
  switch (kind) {
    case "square":
      return `<rect x="${(x - r).toFixed(2)}" y="${(y - r).toFixed(2)}" width="${2 * r}" height="${2 * r}" fill="${color}"/>`;
    case "diamond":
      return `<path d="M${x.toFixed(2)} ${(y - r - 1).toFixed(2)}L${(x + r + 1).toFixed(2)} ${y.toFixed(2)}L${x.toFixed(2)} ${(y + r + 1).toFixed(2)}L${(x - r - 1).toFixed(2)} ${y.toFixed(2)}Z" fill="${color}"/>`;
    default:
      return `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${r}" fill="${color}"/>`;
  }
}

export function renderChart(spec: ChartSpec): string {
  const { categories, series } = spec;
  const perRow = 3;
  const legendRows = Math.ceil(series.length / perRow);
  const H = BASE_H + 12 * Math.max(0, legendRows - 1);
  const pw = W - ML - MR;
  const ph = BASE_H - MT - MB;

  const values = series.flatMap((s) => s.ys).filter((v): v is number => v !== null);
  if (values.length === 0) {
    throw new Error("nothing to plot: every series is empty");
  }

  let yMin: number;
  let yMax: number;
  let yOf: (v: number) => number;
  let ticks: number[];
  if (spec.logY) {
    const positive = values.filter((v) => v > 0);
    // log charts clip nonpositive points to the bottom edge
    const floor = positive.length > 0 ? Math.min(...positive) : 1e-16;
    yMin = floor;
    yMax = Math.max(...values, floor * 10);
    const lo = Math.log10(yMin);
    const hi = Math.log10(yMax);
    yOf = (v) =>
      MT + ph - ((Math.log10(Math.max(v, yMin)) - lo) / (hi - lo || 1)) * ph;
    ticks = logTicks(yMin, yMax);
  } else {
    yMin = Math.min(...values, 0);
    yMax = Math.max(...values);
    if (yMax === yMin) yMax = yMin + 1;
    yOf = (v) => MT + ph - ((v - yMin) / (yMax - yMin)) * ph;
    ticks = linearTicks(yMin, yMax, 6);
  }

  const xOf = (i: number) =>
    categories.length === 1 ? ML + pw / 2 : ML + (i / (categories.length - 1)) * pw;

  let s = `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="DejaVu Sans, Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#ffffff"/>\n`;
  s += `<text x="${ML}" y="${MT - 14}" font-size="13" font-weight="600" fill="#24292f">${esc(spec.title)}</text>\n`;

  for (const v of ticks) {
    const y = yOf(v);
    s += `<line x1="${ML}" y1="${y.toFixed(2)}" x2="${ML + pw}" y2="${y.toFixed(2)}" stroke="#eaeef2" stroke-width="1"/>\n`;
    s += `<text x="${ML - 6}" y="${(y + 3).toFixed(2)}" text-anchor="end" font-size="10" fill="#57606a">${esc(fmt(v))}</text>\n`;
  }

  s += `<line x1="${ML}" y1="${MT}" x2="${ML}" y2="${MT + ph}" stroke="#24292f" stroke-width="1"/>\n`;
  s += `<line x1="${ML}" y1="${MT + ph}" x2="${ML + pw}" y2="${MT + ph}" stroke="#24292f" stroke-width="1"/>\n`;

  categories.forEach((cat, i) => {
    const x = xOf(i);
    s += `<line x1="${x.toFixed(2)}" y1="${MT + ph}" x2="${x.toFixed(2)}" y2="${MT + ph + 4}" stroke="#24292f" stroke-width="1"/>\n`;
    s += `<text x="${x.toFixed(2)}" y="${MT + ph + 16}" text-anchor="middle" font-size="10" fill="#57606a">${esc(cat)}</text>\n`;
  });
  s += `<text x="${ML + pw / 2}" y="${BASE_H - 26}" text-anchor="middle" font-size="11" fill="#24292f">${esc(spec.xLabel)}</text>\n`;
  s += `<text x="14" y="${MT + ph / 2}" text-anchor="middle" font-size="11" fill="#24292f" transform="rotate(-90,14,${MT + ph / 2})">${esc(spec.yLabel)}</text>\n`;

  for (const sr of series) {
    const pts: string[] = [];
    const markers: string[] = [];
    sr.ys.forEach((v, i) => {
      if (v === null) return;
      const x = xOf(i);
      const y = yOf(v);
      pts.push(`${x.toFixed(2)},${y.toFixed(2)}`);
      markers.push(markerShape(sr.marker, x, y, sr.color));
    });
    if (pts.length > 1) {
      const dash = sr.dash ? ` stroke-dasharray="${sr.dash}"` : "";
      s += `<polyline fill="none" stroke="${sr.color}" stroke-width="1.5"${dash} points="${pts.join(" ")}"/>\n`;
    }
    s += markers.join("\n") + "\n";
  }

  // legend strip under the x label, one entry per series
  series.forEach((sr, i) => {
    const col = i % perRow;
    const row = Math.floor(i / perRow);
    const lx = ML + col * (pw / perRow);
    const ly = BASE_H - 14 + row * 12;
    const dash = sr.dash ? ` stroke-dasharray="${sr.dash}"` : "";
    s += `<line x1="${lx}" y1="${ly - 3}" x2="${lx + 16}" y2="${ly - 3}" stroke="${sr.color}" stroke-width="1.5"${dash}/>\n`;
    s += markerShape(sr.marker, lx + 8, ly - 3, sr.color) + "\n";
    s += `<text x="${lx + 20}" y="${ly}" font-size="9" fill="#24292f">${esc(sr.label)}</text>\n`;
  });

  s += `</svg>\n`;
  return s;
}
