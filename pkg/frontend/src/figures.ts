/**
 * Figure families: turn validated CSV rows into chart specs.
 *
 * Each family mirrors one sweep command of the primary package:
 *  - decomp: decomposition error vs chain count or phase resolution;
 *  - aeb: angle error bound vs the swept parameter, one series per
 *    (method, metric) pair so single- and two-user runs both work;
 *  - quantbound: analytic upper bound vs measured errors over bits.
 */

import {
  BoundRow,
  SchemaError,
  SummaryRow,
  orderSweepValues,
} from "./schema.js";
import { ChartSpec, PALETTE, Series } from "./svg.js";

const X_LABELS: Record<string, string> = {
  n_rf: "RF chains",
  n_tx: "Transmit antennas",
  bits: "Phase shifter bits",
  aod: "Departure angle (deg)",
};

function sweepName(rows: { sweep_name: string }[]): string {
  const names = [...new Set(rows.map((r) => r.sweep_name))];
  if (names.length !== 1) {
    throw new SchemaError(`expected one sweep per file, found: ${names.join(", ")}`);
  }
  return names[0];
}

function seriesFrom(
  rows: SummaryRow[],
  categories: string[],
  keyOf: (r: SummaryRow) => string,
): Series[] {
  const keys = [...new Set(rows.map(keyOf))].sort();
  const markers: Series["marker"][] = ["circle", "square", "diamond"];
  return keys.map((key, i) => {
    const byValue = new Map(
      rows.filter((r) => keyOf(r) === key).map((r) => [r.sweep_value, r.mean]),
    );
    return {
      label: key,
      ys: categories.map((c) => byValue.get(c) ?? null),
      color: PALETTE[i % PALETTE.length],
      marker: markers[i % markers.length],
      dash: i >= PALETTE.length ? "5,3" : undefined,
    };
  });
}

export function decompFigure(rows: SummaryRow[]): ChartSpec {
  const data = rows.filter((r) => r.metric === "decp_err");
  if (data.length === 0) throw new SchemaError("no decp_err rows in input");
  const sweep = sweepName(data);
  const categories = orderSweepValues(data.map((r) => r.sweep_value));
  return {
    title: `Decomposition error vs ${X_LABELS[sweep] ?? sweep}`,
    xLabel: X_LABELS[sweep] ?? sweep,
    yLabel: "Relative decomposition error",
    categories,
    series: seriesFrom(data, categories, (r) => r.method),
    logY: true,
  };
}

export function aebFigure(rows: SummaryRow[]): ChartSpec {
  const data = rows.filter((r) => r.metric.startsWith("aeb"));
  if (data.length === 0) throw new SchemaError("no aeb rows in input");
  const sweep = sweepName(data);
  const categories = orderSweepValues(data.map((r) => r.sweep_value));
  const single = new Set(data.map((r) => r.metric)).size === 1;
  return {
    title: `Angle error bound vs ${X_LABELS[sweep] ?? sweep}`,
    xLabel: X_LABELS[sweep] ?? sweep,
    yLabel: "Angle error bound (rad)",
    categories,
    series: seriesFrom(
      data,
      categories,
      single ? (r) => r.method : (r) => `${r.method} ${r.metric}`,
    ),
    logY: true,
  };
}

export function quantBoundFigure(rows: BoundRow[]): ChartSpec {
  const categories = orderSweepValues(rows.map((r) => r.B));
  const pick = (get: (r: BoundRow) => number) => {
    const byB = new Map(rows.map((r) => [r.B, get(r)]));
    return categories.map((c) => byB.get(c) ?? null);
  };
  return {
    title: "Decomposition error upper bound vs phase shifter bits",
    xLabel: X_LABELS.bits,
    yLabel: "Relative decomposition error",
    categories,
    series: [
      { label: "analytic upper bound", ys: pick((r) => r.decp_ub), color: PALETTE[0], marker: "square" },
      { label: "unquantized error", ys: pick((r) => r.true_error), color: PALETTE[1], marker: "circle" },
    ],
    logY: true,
  };
}
