#!/usr/bin/env node
/**
 * Figure CLI: one verb per figure kind.
 *
 *   shape-grid         <atlas.csv> <atlas_index.json> <out.svg>
 *   adaptation-row     <atlas.csv> <atlas_index.json> <out.svg>
 *   reach-snapshots    <trajectory.csv> <out.svg> [--target X,Y] [--count N]
 *   trajectory-compare <out.svg> <label=trajectory.csv> [...]
 *
 * Output files are written atomically only after rendering succeeds, so a
 * failed job leaves no image behind. Identical inputs render identical
 * bytes.
 */

import { writeFileSync } from "fs";

import { JobError, SchemaError, loadAtlas, loadTrajectory } from "./data.js";
import {
  LabeledRun,
  renderAdaptationRow,
  renderReachSnapshots,
  renderShapeGrid,
  renderTrajectoryCompare,
} from "./figures.js";

function usageError(message: string): never {
  throw new JobError(message);
}

export function runCli(argv: string[]): number {
  const [verb, ...rest] = argv;
  try {
    switch (verb) {
      case "shape-grid": {
        const [csv, index, out] = rest;
        if (!csv || !index || !out) usageError("shape-grid needs <atlas.csv> <atlas_index.json> <out.svg>");
        writeFileSync(out, renderShapeGrid(loadAtlas(csv, index)));
        break;
      }
      case "adaptation-row": {
        const [csv, index, out] = rest;
        if (!csv || !index || !out) usageError("adaptation-row needs <atlas.csv> <atlas_index.json> <out.svg>");
        writeFileSync(out, renderAdaptationRow(loadAtlas(csv, index)));
        break;
      }
      case "reach-snapshots": {
        const positional = rest.filter((a) => !a.startsWith("--"));
        const [csv, out] = positional;
        if (!csv || !out) usageError("reach-snapshots needs <trajectory.csv> <out.svg>");
        let target: [number, number] | null = null;
        let count = 6;
        for (let i = 0; i < rest.length; i++) {
          if (rest[i] === "--target") {
            const xy = rest[++i].split(",").map(Number);
            target = [xy[0], xy[1]];
          } else if (rest[i] === "--count") {
            count = Number(rest[++i]);
          }
        }
        writeFileSync(out, renderReachSnapshots(loadTrajectory(csv), target, count));
        break;
      }
      case "trajectory-compare": {
        const [out, ...pairs] = rest;
        if (!out || pairs.length === 0) {
          usageError("trajectory-compare needs <out.svg> <label=trajectory.csv> [...]");
        }
        const runs: LabeledRun[] = pairs.map((pair) => {
          const eq = pair.indexOf("=");
          if (eq <= 0) usageError(`expected label=path, got ${pair}`);
          return { label: pair.slice(0, eq), traj: loadTrajectory(pair.slice(eq + 1)) };
        });
        writeFileSync(out, renderTrajectoryCompare(runs));
        break;
      }
      default:
        usageError(
          "usage: neuroarm-figures <shape-grid|adaptation-row|reach-snapshots|trajectory-compare> ...",
        );
    }
  } catch (err) {
    if (err instanceof JobError || err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      console.error(`error: missing input (${err.message})`);
      return 1;
    }
    throw err;
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  process.exit(runCli(process.argv.slice(2)));
}
