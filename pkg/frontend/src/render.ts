#!/usr/bin/env node
/**
 * CLI: render --preset fig3 --csv results.csv [--csv more.csv] --out fig3.png
 *
 * The output format comes from --format or the output extension (svg, png,
 * pdf). Exit codes: 0 success, 2 usage/config/data error.
 */

import * as fs from "fs";
import * as path from "path";

import { PdfCanvas, SvgCanvas } from "./canvas";
import { CsvError, readSweepCsv } from "./csv";
import { PresetName, buildFigure } from "./figures";

export interface RenderArgs {
  preset: PresetName;
  csvPaths: string[];
  outputPath: string;
  format: "svg" | "png" | "pdf";
}

export class UsageError extends Error {}

const PRESETS = new Set(["fig1", "fig2", "fig3", "fig5"]);
const FORMATS = new Set(["svg", "png", "pdf"]);

export function parseArgs(argv: string[]): RenderArgs {
  if (argv[0] !== "render") {
    throw new UsageError("usage: render --preset <fig1|fig2|fig3|fig5> --csv FILE [--csv FILE ...] --out FILE [--format svg|png|pdf]");
  }
  let preset: string | undefined;
  let out: string | undefined;
  let format: string | undefined;
  const csvPaths: string[] = [];
  for (let i = 1; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new UsageError(`${arg} needs a value`);
      return argv[++i];
    };
    if (arg === "--preset") preset = next();
    else if (arg === "--csv") csvPaths.push(next());
    else if (arg === "--out") out = next();
    else if (arg === "--format") format = next();
    else throw new UsageError(`unknown argument ${arg}`);
  }
  if (!preset || !PRESETS.has(preset)) {
    throw new UsageError(`--preset must be one of fig1, fig2, fig3, fig5 (got ${preset})`);
  }
  if (csvPaths.length === 0) throw new UsageError("at least one --csv is required");
  if (!out) throw new UsageError("--out is required");
  if (!format) {
    format = path.extname(out).replace(".", "").toLowerCase() || "svg";
  }
  if (!FORMATS.has(format)) {
    throw new UsageError(`unsupported format ${format} (svg, png, pdf)`);
  }
  return { preset: preset as PresetName, csvPaths, outputPath: out,
           format: format as RenderArgs["format"] };
}

export function renderToBytes(args: RenderArgs): Buffer {
  const tables = args.csvPaths.map((p) => readSweepCsv(p));
  const fig = buildFigure(args.preset, tables, args.csvPaths);
  if (args.format === "pdf") {
    const canvas = new PdfCanvas(fig.width, fig.height);
    fig.draw(canvas);
    return canvas.toBytes();
  }
  const canvas = new SvgCanvas(fig.width, fig.height);
  fig.draw(canvas);
  const svg = canvas.toString();
  if (args.format === "svg") {
    return Buffer.from(svg, "utf-8");
  }
  // png: rasterize the SVG at 2x for crisp markers
  const { Resvg } = require("@resvg/resvg-js");
  const resvg = new Resvg(svg, {
    fitTo: { mode: "width", value: fig.width * 2 },
  });
  return Buffer.from(resvg.render().asPng());
}

export function main(argv: string[]): number {
  let args: RenderArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
  try {
    const bytes = renderToBytes(args);
    fs.writeFileSync(args.outputPath, bytes);
  } catch (err) {
    if (err instanceof CsvError || err instanceof UsageError ||
        (err as NodeJS.ErrnoException).code === "ENOENT") {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      return 2;
    }
    throw err;
  }
  process.stderr.write(`wrote ${args.outputPath}\n`);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
