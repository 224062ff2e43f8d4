/**
 * Figure assembly: each preset maps its sweep CSV(s) onto a fixed panel
 * layout. The renderer never recomputes physics; analytic overlays come from
 * oracle_* columns written by the simulation CLI.
 */

import { Canvas } from "./canvas";
import { CsvError, SweepTable, numbers, okRows, requireColumns } from "./csv";
import { Panel, extent } from "./plot";

export type PresetName = "fig1" | "fig2" | "fig3" | "fig5";

export interface FigureSpec {
  width: number;
  height: number;
  draw(canvas: Canvas): void;
}

export const CSV_COUNT: Record<PresetName, [number, number]> = {
  fig1: [1, 1],
  fig2: [1, 1],
  fig3: [1, 2],
  fig5: [4, 4],
};

function physicsMeta(table: SweepTable): Record<string, any> | undefined {
  const cfg = (table.meta as any)?.config;
  return cfg?.physics;
}

function fig1(tables: SweepTable[], paths: string[]): FigureSpec {
  requireColumns(tables[0], ["sweep_value", "tau_y"], paths[0]);
  const rows = okRows(tables[0]);
  const x = numbers(rows, "sweep_value");
  const tau = numbers(rows, "tau_y");
  const hasOracle = tables[0].columns.includes("oracle_tau_y");
  const free = hasOracle ? numbers(rows, "oracle_tau_y") : [];
  return {
    width: 520,
    height: 380,
    draw(c) {
      const panel = new Panel(c, { x: 70, y: 30, w: 410, h: 290 },
        extent(x), extent(tau.concat(free)),
        { xLabel: "omega0/E0", yLabel: "tau_y", title: "time of flight from the precession clock" });
      panel.frame();
      if (hasOracle) {
        panel.line(x, free, { color: "black", width: 1.5 });
      }
      panel.scatter("circle", x, tau, "black");
      const entries: any[] = [{ kind: "circle", color: "black", label: "simulated" }];
      if (hasOracle) entries.push({ kind: "line", color: "black", label: "2D/v0" });
      panel.legend(entries);
    },
  };
}

function fig2(tables: SweepTable[], paths: string[]): FigureSpec {
  requireColumns(tables[0], ["sweep_value", "tau_y", "tau_z", "transmission"], paths[0]);
  const rows = okRows(tables[0]);
  const x = numbers(rows, "sweep_value");
  const tauY = numbers(rows, "tau_y");
  const tauZ = numbers(rows, "tau_z");
  const trans = numbers(rows, "transmission");
  const cols = tables[0].columns;
  const oraY = cols.includes("oracle_tau_y") ? numbers(rows, "oracle_tau_y") : [];
  const oraZ = cols.includes("oracle_tau_z") ? numbers(rows, "oracle_tau_z") : [];
  const oraT = cols.includes("oracle_transmission") ? numbers(rows, "oracle_transmission") : [];
  return {
    width: 560,
    height: 720,
    draw(c) {
      const upper = new Panel(c, { x: 75, y: 30, w: 440, h: 280 },
        extent(x), extent(tauY.concat(tauZ, oraY, oraZ)),
        { yLabel: "clock time", title: "clock times over the barrier" });
      upper.frame();
      if (oraY.length) upper.line(x, oraY, { color: "navy", width: 1.2, dash: [4, 3] });
      if (oraZ.length) upper.line(x, oraZ, { color: "red", width: 1.2, dash: [4, 3] });
      upper.scatter("circle", x, tauY, "navy");
      upper.scatter("square", x, tauZ, "red");
      upper.legend([
        { kind: "circle", color: "navy", label: "tau_y" },
        { kind: "square", color: "red", label: "tau_z" },
      ]);
      const lower = new Panel(c, { x: 75, y: 380, w: 440, h: 280 },
        extent(x), [0, 1.05],
        { xLabel: "U0/E0", yLabel: "transmission" });
      lower.frame();
      if (oraT.length) lower.line(x, oraT, { color: "black", width: 1.2, dash: [4, 3] });
      lower.scatter("circle", x, trans, "black");
    },
  };
}

function spinSign(table: SweepTable, fallback: number): number {
  const ph = physicsMeta(table);
  return ph && typeof ph.spin_sign === "number" ? ph.spin_sign : fallback;
}

function fig3(tables: SweepTable[], paths: string[]): FigureSpec {
  tables.forEach((t, i) => requireColumns(t, ["sweep_value", "flip_prob"], paths[i]));
  const series = tables.map((t, i) => ({
    sign: spinSign(t, i === 0 ? 1 : -1),
    rows: okRows(t),
    table: t,
  }));
  const allX = series.flatMap((s) => numbers(s.rows, "sweep_value"));
  const oracleSeries = series.find((s) => s.table.columns.includes("oracle_flip_prob"));
  return {
    width: 560,
    height: 400,
    draw(c) {
      const panel = new Panel(c, { x: 70, y: 30, w: 450, h: 300 },
        [Math.min(...allX), Math.max(...allX)], [0, 1.05],
        { xLog: true, xLabel: "omega0/E0", yLabel: "spin-flip probability",
          title: "adiabaticity of the rotating-field traversal" });
      panel.frame();
      if (oracleSeries) {
        panel.line(numbers(oracleSeries.rows, "sweep_value"),
          numbers(oracleSeries.rows, "oracle_flip_prob"),
          { color: "grey", width: 1.6 });
      }
      const entries: any[] = [];
      for (const s of series) {
        const xs = numbers(s.rows, "sweep_value");
        const ps = numbers(s.rows, "flip_prob");
        if (s.sign >= 0) {
          panel.scatter("circle", xs, ps, "blue");
          entries.push({ kind: "circle", color: "blue", label: "spin up" });
        } else {
          panel.scatter("cross", xs, ps, "red");
          entries.push({ kind: "cross", color: "red", label: "spin down" });
        }
      }
      if (oracleSeries) {
        entries.push({ kind: "line", color: "grey", label: "rotating frame" });
      }
      panel.legend(entries);
    },
  };
}

function fig5(tables: SweepTable[], paths: string[]): FigureSpec {
  tables.forEach((t, i) =>
    requireColumns(t, ["sweep_value", "flip_prob", "transmission"], paths[i]));
  // identify (coupling, spin) from sidecar metadata; fall back to the
  // documented argument order: weak up, weak down, strong up, strong down
  const tagged = tables.map((t, i) => {
    const ph = physicsMeta(t);
    return {
      coupling: ph && typeof ph.omega0_over_e0 === "number"
        ? ph.omega0_over_e0 : [0.1, 0.1, 0.5, 0.5][i],
      sign: spinSign(t, i % 2 === 0 ? 1 : -1),
      rows: okRows(t),
    };
  });
  const couplings = Array.from(new Set(tagged.map((t) => t.coupling))).sort((a, b) => a - b);
  if (couplings.length !== 2) {
    throw new CsvError(
      `fig5 needs two coupling strengths x two spins, got couplings [${couplings.join(", ")}]`);
  }
  const allX = tagged.flatMap((t) => numbers(t.rows, "sweep_value"));
  const xDomain = extent(allX, 0.02);
  return {
    width: 920,
    height: 700,
    draw(c) {
      couplings.forEach((coupling, rowIdx) => {
        const y0 = 35 + rowIdx * 345;
        const up = tagged.find((t) => t.coupling === coupling && t.sign > 0);
        const dn = tagged.find((t) => t.coupling === coupling && t.sign < 0);
        if (!up || !dn) {
          throw new CsvError(
            `fig5: missing a spin series for coupling omega0/E0 = ${coupling}`);
        }
        const flip = new Panel(c, { x: 70, y: y0, w: 360, h: 270 },
          xDomain, [0, 1.05],
          { xLabel: "U0/E0", yLabel: "spin-flip probability",
            title: `omega0/E0 = ${coupling}` });
        flip.frame();
        flip.scatter("square", numbers(up.rows, "sweep_value"),
          numbers(up.rows, "flip_prob"), "navy");
        flip.scatter("triangle", numbers(dn.rows, "sweep_value"),
          numbers(dn.rows, "flip_prob"), "pink");
        flip.legend([
          { kind: "square", color: "navy", label: "spin up" },
          { kind: "triangle", color: "pink", label: "spin down" },
        ]);
        const trans = new Panel(c, { x: 520, y: y0, w: 360, h: 270 },
          xDomain, [0, 1.05],
          { xLabel: "U0/E0", yLabel: "transmission",
            title: `omega0/E0 = ${coupling}` });
        trans.frame();
        trans.scatter("square", numbers(up.rows, "sweep_value"),
          numbers(up.rows, "transmission"), "navy");
        trans.scatter("triangle", numbers(dn.rows, "sweep_value"),
          numbers(dn.rows, "transmission"), "pink");
      });
    },
  };
}

export function buildFigure(preset: PresetName, tables: SweepTable[],
                            paths: string[]): FigureSpec {
  const [lo, hi] = CSV_COUNT[preset];
  if (tables.length < lo || tables.length > hi) {
    throw new CsvError(
      `${preset} takes ${lo === hi ? lo : `${lo}-${hi}`} CSV file(s), got ${tables.length}`);
  }
  switch (preset) {
    case "fig1":
      return fig1(tables, paths);
    case "fig2":
      return fig2(tables, paths);
    case "fig3":
      return fig3(tables, paths);
    case "fig5":
      return fig5(tables, paths);
  }
}
