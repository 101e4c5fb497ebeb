/**
 * Loaders for the simulator's documented output schemas.
 *
 * atlas.csv       one row per node per rest-shape cell
 * atlas_index.json  per-cell boundary values and summary metrics
 * trajectory.csv  per output sample: one row per node, then one diagnostics
 *                 row keyed node = -1 (s column = s_bar/L, r_x = tip
 *                 curvature, r_y = energy, kappa = max speed, V_top =
 *                 distance, V_bottom = status code)
 */

import { readFileSync } from "fs";

export class SchemaError extends Error {}
export class JobError extends Error {}

export interface CsvTable {
  columns: string[];
  rows: number[][];
}

/** Parse a plain numeric CSV with a header row. */
export function parseCsv(text: string, context: string): CsvTable {
  const lines = text.split("\n").filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${context}: empty file`);
  }
  const columns = lines[0].split(",");
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(
        `${context}: line ${i + 1} has ${parts.length} fields, expected ${columns.length}`,
      );
    }
    rows.push(parts.map(Number));
  }
  return { columns, rows };
}

export function columnIndex(table: CsvTable, name: string, context: string): number {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`${context}: missing column ${name}`);
  }
  return idx;
}

export interface AtlasCell {
  cell: number;
  v0Top: number;
  vLTop: number;
  adaptation: number;
  kappaTip: number | null;
  totalCurl: number | null;
  error: string | null;
  x: number[];
  y: number[];
  activation: number[]; // max of the two muscle activations per node
}

export interface Atlas {
  cells: AtlasCell[];
}

export function loadAtlas(csvPath: string, indexPath: string): Atlas {
  const table = parseCsv(readFileSync(csvPath, "utf8"), "atlas.csv");
  const col = {
    cell: columnIndex(table, "cell", "atlas.csv"),
    x: columnIndex(table, "r_x", "atlas.csv"),
    y: columnIndex(table, "r_y", "atlas.csv"),
    st: columnIndex(table, "sigma_top", "atlas.csv"),
    sb: columnIndex(table, "sigma_bottom", "atlas.csv"),
  };
  const index = JSON.parse(readFileSync(indexPath, "utf8")) as {
    cells: Array<{
      cell: number;
      v0_top: number;
      vL_top: number;
      adaptation: number;
      kappa_tip?: number;
      total_curl?: number;
      error: string | null;
    }>;
  };
  if (!Array.isArray(index.cells)) {
    throw new SchemaError("atlas_index.json: missing cells array");
  }
  const cells: AtlasCell[] = index.cells.map((c) => ({
    cell: c.cell,
    v0Top: c.v0_top,
    vLTop: c.vL_top,
    adaptation: c.adaptation,
    kappaTip: c.kappa_tip ?? null,
    totalCurl: c.total_curl ?? null,
    error: c.error,
    x: [],
    y: [],
    activation: [],
  }));
  const byId = new Map(cells.map((c) => [c.cell, c]));
  for (const row of table.rows) {
    const cell = byId.get(row[col.cell]);
    if (cell === undefined) {
      throw new SchemaError(`atlas.csv: cell ${row[col.cell]} not in atlas_index.json`);
    }
    cell.x.push(row[col.x]);
    cell.y.push(row[col.y]);
    cell.activation.push(Math.max(row[col.st], row[col.sb]));
  }
  return { cells };
}

export interface TrajectorySample {
  t: number;
  x: number[];
  y: number[];
  sBarOverL: number;
  kappaTip: number;
  energy: number;
  maxSpeed: number;
  dist: number;
  status: number;
}

export interface TrajectoryData {
  samples: TrajectorySample[];
}

export function loadTrajectory(csvPath: string): TrajectoryData {
  const table = parseCsv(readFileSync(csvPath, "utf8"), "trajectory.csv");
  const col = {
    t: columnIndex(table, "t", "trajectory.csv"),
    node: columnIndex(table, "node", "trajectory.csv"),
    s: columnIndex(table, "s", "trajectory.csv"),
    x: columnIndex(table, "r_x", "trajectory.csv"),
    y: columnIndex(table, "r_y", "trajectory.csv"),
    kappa: columnIndex(table, "kappa", "trajectory.csv"),
    vTop: columnIndex(table, "V_top", "trajectory.csv"),
    vBottom: columnIndex(table, "V_bottom", "trajectory.csv"),
  };
  const samples: TrajectorySample[] = [];
  let current: TrajectorySample | null = null;
  for (const row of table.rows) {
    if (row[col.node] === -1) {
      if (current === null) {
        throw new SchemaError("trajectory.csv: diagnostics row before any node rows");
      }
      current.sBarOverL = row[col.s];
      current.kappaTip = row[col.x];
      current.energy = row[col.y];
      current.maxSpeed = row[col.kappa];
      current.dist = row[col.vTop];
      current.status = row[col.vBottom];
      samples.push(current);
      current = null;
    } else {
      if (current === null || row[col.t] !== current.t) {
        current = {
          t: row[col.t],
          x: [],
          y: [],
          sBarOverL: NaN,
          kappaTip: NaN,
          energy: NaN,
          maxSpeed: NaN,
          dist: NaN,
          status: NaN,
        };
      }
      current.x.push(row[col.x]);
      current.y.push(row[col.y]);
    }
  }
  if (samples.length === 0) {
    throw new JobError("trajectory.csv: no complete output samples");
  }
  return { samples };
}
