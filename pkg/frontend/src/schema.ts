/**
 * CSV schemas for the sweep outputs consumed by the figure renderers.
 *
 * Two file shapes exist:
 *  - summary CSVs from the sweep commands (decomp-sweep, aeb-sweep,
 *    quant-bound): one row per (sweep value, method, metric);
 *  - bound-report CSVs from quant-bound: one row per bit setting with the
 *    analytic bound pieces.
 *
 * Any violation (missing column, empty data, non-numeric cell) raises
 * SchemaError; the CLI maps that to a nonzero exit.
 */

import { z } from "zod";

export class SchemaError extends Error {}

const finite = z.coerce.number().refine(Number.isFinite, "not a finite number");

const summaryRowSchema = z.object({
  sweep_name: z.string().min(1),
  sweep_value: z.string().min(1),
  method: z.string().min(1),
  metric: z.string().min(1),
  mean: finite,
  std: finite.refine((v) => v >= 0, "std must be >= 0"),
  trials: z.coerce.number().int().min(1),
  seed: z.coerce.number().int(),
});

export type SummaryRow = z.infer<typeof summaryRowSchema>;

const boundRowSchema = z.object({
  B: z.string().min(1),
  factor: finite.refine((v) => v >= 0, "factor must be >= 0"),
  C: finite,
  true_error: finite,
  decp_ub: finite,
});

export type BoundRow = z.infer<typeof boundRowSchema>;

export const SUMMARY_COLUMNS = Object.keys(summaryRowSchema.shape);
export const BOUND_COLUMNS = Object.keys(boundRowSchema.shape);

/** Split simple comma-separated text; the writers never quote fields. */
function splitCsv(text: string, expected: string[]): Record<string, string>[] {
  const lines = text.split("\n").filter((ln) => ln.trim().length > 0);
  if (lines.length === 0) throw new SchemaError("empty file");
  const header = lines[0].split(",").map((h) => h.trim());
  const missing = expected.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(`missing columns: ${missing.join(", ")}`);
  }
  if (lines.length === 1) throw new SchemaError("no data rows");
  return lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(`row ${i + 1}: expected ${header.length} cells, got ${cells.length}`);
    }
    return Object.fromEntries(header.map((h, j) => [h, cells[j]]));
  });
}

function validate<T>(schema: z.ZodType<T>, records: Record<string, string>[]): T[] {
  return records.map((rec, i) => {
    const parsed = schema.safeParse(rec);
    if (!parsed.success) {
      const issue = parsed.error.issues[0];
      throw new SchemaError(`row ${i + 1}: ${issue.path.join(".")}: ${issue.message}`);
    }
    return parsed.data;
  });
}

export function parseSummaryCsv(text: string): SummaryRow[] {
  return validate(summaryRowSchema, splitCsv(text, SUMMARY_COLUMNS));
}

export function parseBoundCsv(text: string): BoundRow[] {
  return validate(boundRowSchema, splitCsv(text, BOUND_COLUMNS));
}

/**
 * Order sweep values for the x axis: numeric ascending with "inf"
 * (infinite phase-shifter resolution) pinned to the end.
 */
export function orderSweepValues(values: string[]): string[] {
  const unique = [...new Set(values)];
  return unique.sort((a, b) => {
    if (a === "inf") return 1;
    if (b === "inf") return -1;
    return Number(a) - Number(b);
  });
}
