/**
 * Strict reader for the sweep CSVs produced by the simulation CLI.
 *
 * Columns are validated against the set a figure needs; a missing column is
 * reported by name. Numeric cells parse as floats ("nan" included); the
 * sweep_param and status cells stay strings.
 */

import * as fs from "fs";

export class CsvError extends Error {}

export interface SweepRow {
  [column: string]: number | string;
}

export interface SweepTable {
  columns: string[];
  rows: SweepRow[];
  /** sidecar metadata (<path>.meta.json) when present */
  meta?: Record<string, unknown>;
}

const STRING_COLUMNS = new Set(["sweep_param", "status"]);

function splitCsvLine(line: string): string[] {
  const cells: string[] = [];
  let cur = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"') {
        if (line[i + 1] === '"') {
          cur += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === ",") {
      cells.push(cur);
      cur = "";
    } else {
      cur += ch;
    }
  }
  cells.push(cur);
  return cells;
}

export function parseCsv(text: string, path = "<csv>"): SweepTable {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvError(`${path}: empty file`);
  }
  const columns = splitCsvLine(lines[0]);
  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = splitCsvLine(lines[i]);
    if (cells.length !== columns.length) {
      throw new CsvError(
        `${path}: line ${i + 1} has ${cells.length} cells, header has ${columns.length}`);
    }
    const row: SweepRow = {};
    columns.forEach((col, j) => {
      row[col] = STRING_COLUMNS.has(col) ? cells[j] : Number(cells[j]);
    });
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new CsvError(`${path}: no data rows`);
  }
  return { columns, rows };
}

export function readSweepCsv(path: string): SweepTable {
  const table = parseCsv(fs.readFileSync(path, "utf-8"), path);
  const metaPath = `${path}.meta.json`;
  if (fs.existsSync(metaPath)) {
    table.meta = JSON.parse(fs.readFileSync(metaPath, "utf-8"));
  }
  return table;
}

export function requireColumns(table: SweepTable, needed: string[], path: string): void {
  for (const col of needed) {
    if (!table.columns.includes(col)) {
      throw new CsvError(
        `${path}: missing required column '${col}' (found: ${table.columns.join(", ")})`);
    }
  }
}

/** rows with status "ok", sorted by sweep value */
export function okRows(table: SweepTable): SweepRow[] {
  return table.rows
    .filter((r) => r.status === "ok")
    .sort((a, b) => (a.sweep_value as number) - (b.sweep_value as number));
}

export function numbers(rows: SweepRow[], column: string): number[] {
  return rows.map((r) => r[column] as number);
}
