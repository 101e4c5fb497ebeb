/**
 * Figure renderers. Each takes loaded data and returns a complete SVG
 * string; rendering the same inputs twice yields identical bytes.
 */

import {
  Atlas,
  AtlasCell,
  JobError,
  TrajectoryData,
} from "./data.js";
import {
  activationPath,
  axisTicks,
  document,
  fmt,
  polyline,
  star,
  text,
  viewport,
} from "./svg.js";

const CELL = 150;
const PAD = 44;

function armExtent(cells: AtlasCell[]): number {
  let m = 0;
  for (const c of cells) {
    for (const v of c.x) m = Math.max(m, Math.abs(v));
    for (const v of c.y) m = Math.max(m, Math.abs(v));
  }
  return m <= 0 ? 1 : m;
}

function drawCell(cell: AtlasCell, left: number, top: number, extent: number): string {
  const vp = viewport(-extent, extent, -extent, extent, left, top, CELL, CELL);
  const frame =
    `<rect x="${fmt(left)}" y="${fmt(top)}" width="${CELL}" height="${CELL}" ` +
    `fill="none" stroke="#ccc" stroke-width="0.5"/>`;
  if (cell.error !== null) {
    return frame + text(left + CELL / 2, top + CELL / 2, "solver error", 10);
  }
  return frame + activationPath(cell.x, cell.y, cell.activation, vp, 2.5);
}

/** Rest-shape grid: rows are tip boundary voltages, columns base voltages. */
export function renderShapeGrid(atlas: Atlas): string {
  const v0Values = [...new Set(atlas.cells.map((c) => c.v0Top))].sort((a, b) => a - b);
  const vLValues = [...new Set(atlas.cells.map((c) => c.vLTop))].sort((a, b) => a - b);
  if (atlas.cells.length !== v0Values.length * vLValues.length) {
    throw new JobError(
      `shape-grid: ${atlas.cells.length} cells do not form a ` +
      `${v0Values.length}x${vLValues.length} voltage grid`,
    );
  }
  const extent = armExtent(atlas.cells);
  const width = PAD + v0Values.length * CELL + 10;
  const height = PAD + vLValues.length * CELL + 10;
  const parts: string[] = [];
  for (const cell of atlas.cells) {
    const col = v0Values.indexOf(cell.v0Top);
    const row = vLValues.indexOf(cell.vLTop);
    parts.push(drawCell(cell, PAD + col * CELL, PAD + row * CELL, extent));
  }
  for (let c = 0; c < v0Values.length; c++) {
    parts.push(text(PAD + c * CELL + CELL / 2, PAD - 10, `V0=${v0Values[c]}`, 11));
  }
  for (let r = 0; r < vLValues.length; r++) {
    parts.push(text(PAD - 24, PAD + r * CELL + CELL / 2, `VL=${vLValues[r]}`, 11));
  }
  return document(width, height, parts.join(""));
}

/** Adaptation sweep: one row of cells ordered by the adaptation strength. */
export function renderAdaptationRow(atlas: Atlas): string {
  const cells = [...atlas.cells].sort((a, b) => a.adaptation - b.adaptation);
  const extent = armExtent(cells);
  const width = 20 + cells.length * CELL + 10;
  const height = PAD + CELL + 10;
  const parts: string[] = [];
  cells.forEach((cell, k) => {
    parts.push(drawCell(cell, 20 + k * CELL, PAD, extent));
    parts.push(text(20 + k * CELL + CELL / 2, PAD - 10, `b=${cell.adaptation}`, 11));
  });
  return document(width, height, parts.join(""));
}

/** Overlaid arm snapshots of one reaching run plus the target. */
export function renderReachSnapshots(
  traj: TrajectoryData, target: [number, number] | null, count = 6,
): string {
  const n = traj.samples.length;
  const picks: number[] = [];
  for (let k = 0; k < Math.min(count, n); k++) {
    picks.push(Math.round((k * (n - 1)) / Math.max(1, Math.min(count, n) - 1)));
  }
  let extent = 0;
  for (const s of traj.samples) {
    for (const v of s.x) extent = Math.max(extent, Math.abs(v));
    for (const v of s.y) extent = Math.max(extent, Math.abs(v));
  }
  if (target) {
    extent = Math.max(extent, Math.abs(target[0]), Math.abs(target[1]));
  }
  extent *= 1.1;
  const size = 420;
  const vp = viewport(-extent, extent, -extent, extent, 30, 30, size, size);
  const parts: string[] = [];
  picks.forEach((idx, k) => {
    const s = traj.samples[idx];
    const alpha = 0.25 + (0.75 * k) / Math.max(1, picks.length - 1);
    parts.push(
      polyline(
        s.x, s.y, vp,
        `stroke="#2255aa" stroke-width="2.5" stroke-opacity="${fmt(alpha)}"`,
      ),
    );
    parts.push(
      text(vp.px(s.x[s.x.length - 1]) + 6, vp.py(s.y[s.y.length - 1]), `t=${s.t.toFixed(2)}`, 9, "start"),
    );
  });
  if (target) {
    parts.push(star(vp.px(target[0]), vp.py(target[1]), 9, "#cc3333"));
  }
  return document(size + 60, size + 60, parts.join(""));
}

export interface LabeledRun {
  label: string;
  traj: TrajectoryData;
}

const COMPARE_STYLES = [
  'stroke="#2255aa" stroke-width="2"',
  'stroke="#2a9d4e" stroke-width="2" stroke-dasharray="7,4"',
  'stroke="#e08020" stroke-width="2" stroke-dasharray="2,3"',
];

/** Tip-curvature and bend-position trajectories overlaid for several runs. */
export function renderTrajectoryCompare(runs: LabeledRun[]): string {
  if (runs.length === 0) {
    throw new JobError("trajectory-compare: no runs given");
  }
  const width = 640;
  const panel = 200;
  const left = 70;
  const plotW = width - left - 30;
  let tMax = 0;
  let kMin = 0;
  let kMax = 0;
  for (const run of runs) {
    for (const s of run.traj.samples) {
      tMax = Math.max(tMax, s.t);
      kMin = Math.min(kMin, s.kappaTip);
      kMax = Math.max(kMax, s.kappaTip);
    }
  }
  if (kMax === kMin) kMax = kMin + 1;
  const parts: string[] = [];

  const vpK = viewport(0, tMax, kMin, kMax, left, 30, plotW, panel);
  const kTicks = [Math.ceil(kMin / 50) * 50, 0, Math.floor(kMax / 50) * 50]
    .filter((v, i, arr) => arr.indexOf(v) === i && v >= kMin && v <= kMax);
  parts.push(axisTicks(vpK, tickValues(tMax), kTicks, left, 30, plotW, panel, "", "tip curvature [1/m]"));
  runs.forEach((run, i) => {
    const ts = run.traj.samples.map((s) => s.t);
    const ks = run.traj.samples.map((s) => s.kappaTip);
    parts.push(polyline(ts, ks, vpK, COMPARE_STYLES[i % COMPARE_STYLES.length]));
  });

  const top2 = 30 + panel + 50;
  const vpS = viewport(0, tMax, 0, 1.05, left, top2, plotW, panel);
  parts.push(
    axisTicks(vpS, tickValues(tMax), [0, 0.5, 1], left, top2, plotW, panel, "t [s]", "bend position / L"),
  );
  runs.forEach((run, i) => {
    const ts = run.traj.samples.map((s) => s.t);
    const ss = run.traj.samples.map((s) => s.sBarOverL);
    parts.push(polyline(ts, ss, vpS, COMPARE_STYLES[i % COMPARE_STYLES.length]));
  });

  runs.forEach((run, i) => {
    const y = top2 + panel + 36 + 0 * i;
    const x = left + i * 180;
    parts.push(
      `<line x1="${fmt(x)}" y1="${fmt(y)}" x2="${fmt(x + 28)}" y2="${fmt(y)}" ` +
      `fill="none" ${COMPARE_STYLES[i % COMPARE_STYLES.length]}/>`,
    );
    parts.push(text(x + 34, y + 4, run.label, 11, "start"));
  });
  return document(width, top2 + panel + 60, parts.join(""));
}

function tickValues(tMax: number): number[] {
  if (tMax <= 0) return [0];
  const step = tMax > 10 ? 5 : tMax > 2 ? 1 : 0.5;
  const out: number[] = [];
  for (let v = 0; v <= tMax + 1e-9; v += step) out.push(Number(v.toFixed(3)));
  return out;
}
