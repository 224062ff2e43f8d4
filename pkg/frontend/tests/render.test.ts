import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { describe, expect, it } from "vitest";

import { main, parseArgs, renderToBytes } from "../src/render";

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "render-"));
}

const HEADER =
  "sweep_param,sweep_value,tau_y,tau_z,transmission,flip_prob," +
  "mean_kinetic_energy,norm_drift,boundary_norm,status,oracle_tau_y";

function writeFig1Csv(dir: string): string {
  const lines = [HEADER];
  for (const v of [0.01, 0.04, 0.09, 0.13]) {
    lines.push(`omega0_over_e0,${v},${Math.sqrt(v)},0.001,0.999,nan,100,1e-12,1e-20,ok,${Math.sqrt(v) * 0.99}`);
  }
  const p = path.join(dir, "fig1.csv");
  fs.writeFileSync(p, lines.join("\n") + "\n");
  return p;
}

describe("parseArgs", () => {
  it("derives the format from the extension", () => {
    const args = parseArgs(["render", "--preset", "fig1", "--csv", "a.csv",
                            "--out", "x.pdf"]);
    expect(args.format).toBe("pdf");
  });

  it("rejects unknown presets and formats", () => {
    expect(() => parseArgs(["render", "--preset", "fig9", "--csv", "a",
                            "--out", "x.svg"])).toThrow(/preset/);
    expect(() => parseArgs(["render", "--preset", "fig1", "--csv", "a",
                            "--out", "x.bmp"])).toThrow(/format/);
  });
});

describe("renderToBytes", () => {
  it("produces deterministic svg, pdf and png bytes", () => {
    const dir = tmpdir();
    const csv = writeFig1Csv(dir);
    for (const format of ["svg", "pdf", "png"] as const) {
      const args = { preset: "fig1" as const, csvPaths: [csv],
                     outputPath: "x", format };
      const a = renderToBytes(args);
      const b = renderToBytes(args);
      expect(a.equals(b)).toBe(true);
    }
  });

  it("emits valid magic bytes per format", () => {
    const dir = tmpdir();
    const csv = writeFig1Csv(dir);
    const svg = renderToBytes({ preset: "fig1", csvPaths: [csv],
                                outputPath: "x", format: "svg" });
    expect(svg.toString().startsWith("<svg")).toBe(true);
    const pdf = renderToBytes({ preset: "fig1", csvPaths: [csv],
                                outputPath: "x", format: "pdf" });
    expect(pdf.subarray(0, 5).toString()).toBe("%PDF-");
    expect(pdf.toString("latin1")).toContain("%%EOF");
    const png = renderToBytes({ preset: "fig1", csvPaths: [csv],
                                outputPath: "x", format: "png" });
    expect(png.subarray(1, 4).toString()).toBe("PNG");
  });
});

describe("main", () => {
  it("renders fig1 end to end", () => {
    const dir = tmpdir();
    const csv = writeFig1Csv(dir);
    const out = path.join(dir, "fig1.svg");
    expect(main(["render", "--preset", "fig1", "--csv", csv, "--out", out])).toBe(0);
    expect(fs.existsSync(out)).toBe(true);
    expect(fs.readFileSync(out, "utf-8")).toContain("omega0/E0");
  });

  it("exits 2 and writes nothing for an empty CSV", () => {
    const dir = tmpdir();
    const csv = path.join(dir, "empty.csv");
    fs.writeFileSync(csv, "");
    const out = path.join(dir, "fig1.svg");
    expect(main(["render", "--preset", "fig1", "--csv", csv, "--out", out])).toBe(2);
    expect(fs.existsSync(out)).toBe(false);
  });

  it("exits 2 on a truncated CSV, naming the absent column", () => {
    const dir = tmpdir();
    const csv = path.join(dir, "trunc.csv");
    fs.writeFileSync(csv, "sweep_param,sweep_value,status\nomega0_over_e0,0.1,ok\n");
    const out = path.join(dir, "fig1.svg");
    expect(main(["render", "--preset", "fig1", "--csv", csv, "--out", out])).toBe(2);
    expect(fs.existsSync(out)).toBe(false);
  });

  it("exits 2 on usage errors and missing files", () => {
    expect(main(["render", "--preset", "fig1", "--out", "x.svg"])).toBe(2);
    expect(main(["render", "--preset", "fig1", "--csv", "/nonexistent.csv",
                 "--out", "/tmp/never.svg"])).toBe(2);
  });
});
