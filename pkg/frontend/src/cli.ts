#!/usr/bin/env node
/**
 * Figure CLI: one subcommand per figure family, reading the sweep CSVs and
 * writing a deterministic SVG or PNG.
 *
 * Usage:
 *   hybeam-plots decomp --in run.csv --out fig.svg
 *   hybeam-plots aeb --in run.csv --out fig.png --format png
 *   hybeam-plots quantbound --in run_bound_reports.csv --out fig.svg
 *
 * Exit codes: 0 ok, 2 schema/input problem, 1 anything else.
 */

import { readFileSync, writeFileSync } from "fs";
import { fileURLToPath } from "url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { aebFigure, decompFigure, quantBoundFigure } from "./figures.js";
import { SchemaError, parseBoundCsv, parseSummaryCsv } from "./schema.js";
import { renderChart } from "./svg.js";

type Format = "svg" | "png";

interface RenderArgs {
  in: string;
  out: string;
  format: Format;
}

async function toBytes(svg: string, format: Format): Promise<Buffer> {
  if (format === "svg") return Buffer.from(svg, "utf-8");
  const { Resvg } = await import("@resvg/resvg-js");
  // the vendored fonts keep the raster output identical across machines
  const fontDir = fileURLToPath(new URL("../fonts/", import.meta.url));
  return new Resvg(svg, {
    font: {
      loadSystemFonts: false,
      fontFiles: [fontDir + "DejaVuSans.ttf", fontDir + "DejaVuSans-Bold.ttf"],
      defaultFontFamily: "DejaVu Sans",
    },
  })
    .render()
    .asPng();
}

export async function renderFamily(family: string, args: RenderArgs): Promise<void> {
  const text = readFileSync(args.in, "utf-8");
  let svg: string;
  if (family === "decomp") {
    svg = renderChart(decompFigure(parseSummaryCsv(text)));
  } else if (family === "aeb") {
    svg = renderChart(aebFigure(parseSummaryCsv(text)));
  } else if (family === "quantbound") {
    svg = renderChart(quantBoundFigure(parseBoundCsv(text)));
  } else {
    throw new Error(`unknown figure family ${family}`);
  }
  writeFileSync(args.out, await toBytes(svg, args.format));
}

export async function main(argv: string[]): Promise<number> {
  const parser = yargs(argv)
    .scriptName("hybeam-plots")
    .strict()
    .exitProcess(false)
    .demandCommand(1);
  for (const family of ["decomp", "aeb", "quantbound"]) {
    parser.command(`${family}`, `render the ${family} figure family`, (y) =>
      y
        .option("in", { type: "string", demandOption: true, describe: "input CSV" })
        .option("out", { type: "string", demandOption: true, describe: "output image path" })
        .option("format", { choices: ["svg", "png"] as const, default: "svg" as Format }),
    );
  }

  let parsed;
  try {
    parsed = await parser.parse();
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  const family = String(parsed._[0]);
  try {
    await renderFamily(family, parsed as unknown as RenderArgs);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      console.error(`cannot read input: ${err.message}`);
      return 2;
    }
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

const isDirectRun =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (isDirectRun) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
