import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";

const FIXTURES = join(__dirname, "fixtures");

function outDir(): string {
  return mkdtempSync(join(tmpdir(), "hybeam-plots-"));
}

describe("cli", () => {
  it("renders every figure family to svg", async () => {
    const dir = outDir();
    const jobs: [string, string][] = [
      ["decomp", "decomp_nrf.csv"],
      ["decomp", "decomp_bits.csv"],
      ["aeb", "aeb_aod.csv"],
      ["aeb", "aeb_two_ue.csv"],
      ["quantbound", "qb_bound_reports.csv"],
    ];
    for (const [family, fixture] of jobs) {
      const out = join(dir, `${fixture}.svg`);
      const code = await main([family, "--in", join(FIXTURES, fixture), "--out", out]);
      expect(code).toBe(0);
      expect(readFileSync(out, "utf-8")).toContain("</svg>");
    }
  });

  it("re-renders byte-identical svg", async () => {
    const dir = outDir();
    const a = join(dir, "a.svg");
    const b = join(dir, "b.svg");
    for (const out of [a, b]) {
      const code = await main(["quantbound", "--in", join(FIXTURES, "qb_bound_reports.csv"), "--out", out]);
      expect(code).toBe(0);
    }
    expect(readFileSync(a)).toEqual(readFileSync(b));
  });

  it("re-renders byte-identical png", async () => {
    const dir = outDir();
    const a = join(dir, "a.png");
    const b = join(dir, "b.png");
    for (const out of [a, b]) {
      const code = await main([
        "decomp", "--in", join(FIXTURES, "decomp_bits.csv"), "--out", out, "--format", "png",
      ]);
      expect(code).toBe(0);
    }
    const bytes = readFileSync(a);
    expect([...bytes.subarray(0, 4)]).toEqual([0x89, 0x50, 0x4e, 0x47]);
    expect(bytes).toEqual(readFileSync(b));
  });

  it("exits nonzero on a schema violation", async () => {
    const dir = outDir();
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "sweep_name,mean\nn_rf,1.0\n");
    const code = await main(["decomp", "--in", bad, "--out", join(dir, "x.svg")]);
    expect(code).toBe(2);
  });

  it("exits nonzero on empty data", async () => {
    const dir = outDir();
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "");
    const code = await main(["aeb", "--in", empty, "--out", join(dir, "x.svg")]);
    expect(code).toBe(2);
  });

  it("exits nonzero when the input file is missing", async () => {
    const dir = outDir();
    const code = await main(["aeb", "--in", join(dir, "nope.csv"), "--out", join(dir, "x.svg")]);
    expect(code).toBe(2);
  });

  it("exits nonzero on a wrong-schema input for the family", async () => {
    const dir = outDir();
    const code = await main([
      "quantbound", "--in", join(FIXTURES, "decomp_nrf.csv"), "--out", join(dir, "x.svg"),
    ]);
    expect(code).toBe(2);
  });

  it("rejects an unknown format flag value", async () => {
    const dir = outDir();
    const code = await main([
      "decomp", "--in", join(FIXTURES, "decomp_nrf.csv"),
      "--out", join(dir, "x.gif"), "--format", "gif",
    ]);
    expect(code).toBe(2);
  });
});
