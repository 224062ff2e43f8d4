import { describe, expect, it } from "vitest";

import { CsvError, okRows, parseCsv, requireColumns } from "../src/csv";

const HEADER =
  "sweep_param,sweep_value,tau_y,tau_z,transmission,flip_prob," +
  "mean_kinetic_energy,norm_drift,boundary_norm,status";

function line(value: number, status = "ok"): string {
  return `u0_over_e0,${value},0.5,0.1,0.9,nan,8.0,1e-12,1e-20,${status}`;
}

describe("parseCsv", () => {
  it("parses numeric cells and keeps strings", () => {
    const t = parseCsv(`${HEADER}\n${line(0.5)}\n`);
    expect(t.rows).toHaveLength(1);
    expect(t.rows[0].sweep_value).toBe(0.5);
    expect(t.rows[0].status).toBe("ok");
    expect(t.rows[0].flip_prob).toBeNaN();
  });

  it("handles quoted cells with commas", () => {
    const t = parseCsv(
      `${HEADER}\nu0_over_e0,1.0,nan,nan,nan,nan,nan,nan,nan,"error: bad, very bad"\n`);
    expect(t.rows[0].status).toBe("error: bad, very bad");
  });

  it("rejects empty files and header-only files", () => {
    expect(() => parseCsv("")).toThrow(CsvError);
    expect(() => parseCsv(`${HEADER}\n`)).toThrow(/no data rows/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv(`${HEADER}\n1,2,3\n`)).toThrow(/line 2/);
  });
});

describe("requireColumns", () => {
  it("names the missing column", () => {
    const t = parseCsv(`${HEADER}\n${line(0.1)}\n`);
    expect(() => requireColumns(t, ["oracle_flip_prob"], "x.csv")).toThrow(
      /missing required column 'oracle_flip_prob'/);
  });
});

describe("okRows", () => {
  it("filters failures and sorts by sweep value", () => {
    const t = parseCsv(
      `${HEADER}\n${line(0.9)}\n${line(0.3, "error: blew up")}\n${line(0.1)}\n`);
    const rows = okRows(t);
    expect(rows.map((r) => r.sweep_value)).toEqual([0.1, 0.9]);
  });
});
