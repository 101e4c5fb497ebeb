import { describe, expect, it } from "vitest";
import { fileURLToPath } from "url";
import fs from "fs";
import os from "os";
import path from "path";

import { loadAtlas, loadTrajectory, JobError } from "../src/data.js";
import {
  renderAdaptationRow,
  renderReachSnapshots,
  renderShapeGrid,
  renderTrajectoryCompare,
} from "../src/figures.js";
import { runCli } from "../src/cli.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const fix = (...p: string[]) => path.join(here, "fixtures", ...p);

const gridAtlas = () => loadAtlas(fix("atlas_grid", "atlas.csv"), fix("atlas_grid", "atlas_index.json"));
const sweepAtlas = () => loadAtlas(fix("atlas_sweep", "atlas.csv"), fix("atlas_sweep", "atlas_index.json"));

describe("renderShapeGrid", () => {
  it("renders a 2x2 grid with voltage labels", () => {
    const svg = renderShapeGrid(gridAtlas());
    expect(svg).toContain("<svg");
    expect(svg).toContain("V0=40");
    expect(svg).toContain("VL=100");
    expect((svg.match(/<line /g) ?? []).length).toBeGreaterThan(4 * 90);
  });

  it("is byte-idempotent", () => {
    expect(renderShapeGrid(gridAtlas())).toBe(renderShapeGrid(gridAtlas()));
  });

  it("rejects a non-grid cell set", () => {
    const atlas = gridAtlas();
    atlas.cells.pop();
    expect(() => renderShapeGrid(atlas)).toThrowError(JobError);
  });
});

describe("renderAdaptationRow", () => {
  it("orders panels by adaptation strength", () => {
    const svg = renderAdaptationRow(sweepAtlas());
    const order = ["b=0", "b=1", "b=2"].map((label) => svg.indexOf(label));
    expect(order[0]).toBeGreaterThan(-1);
    expect(order[0]).toBeLessThan(order[1]);
    expect(order[1]).toBeLessThan(order[2]);
  });
});

describe("renderReachSnapshots", () => {
  it("draws the requested snapshot count plus the target", () => {
    const traj = loadTrajectory(fix("reach_sensory", "trajectory.csv"));
    const svg = renderReachSnapshots(traj, [0.2, 0.1], 4);
    expect((svg.match(/<polyline /g) ?? []).length).toBe(4);
    expect(svg).toContain("<polygon");
  });
});

describe("renderTrajectoryCompare", () => {
  it("overlays several runs with legend labels", () => {
    const runs = [
      { label: "sensory", traj: loadTrajectory(fix("reach_sensory", "trajectory.csv")) },
      { label: "benchmark", traj: loadTrajectory(fix("reach_benchmark", "trajectory.csv")) },
    ];
    const svg = renderTrajectoryCompare(runs);
    expect(svg).toContain("sensory");
    expect(svg).toContain("benchmark");
    expect(svg).toContain("tip curvature");
    expect(svg).toContain("bend position / L");
  });

  it("rejects an empty run list", () => {
    expect(() => renderTrajectoryCompare([])).toThrowError(JobError);
  });
});

describe("cli", () => {
  const outDir = fs.mkdtempSync(path.join(os.tmpdir(), "figures-"));

  it("renders every figure kind and is idempotent on disk", () => {
    const grid1 = path.join(outDir, "grid1.svg");
    const grid2 = path.join(outDir, "grid2.svg");
    expect(
      runCli(["shape-grid", fix("atlas_grid", "atlas.csv"), fix("atlas_grid", "atlas_index.json"), grid1]),
    ).toBe(0);
    expect(
      runCli(["shape-grid", fix("atlas_grid", "atlas.csv"), fix("atlas_grid", "atlas_index.json"), grid2]),
    ).toBe(0);
    expect(fs.readFileSync(grid1)).toEqual(fs.readFileSync(grid2));

    const row = path.join(outDir, "row.svg");
    expect(
      runCli(["adaptation-row", fix("atlas_sweep", "atlas.csv"), fix("atlas_sweep", "atlas_index.json"), row]),
    ).toBe(0);
    expect(fs.existsSync(row)).toBe(true);

    const snaps = path.join(outDir, "snaps.svg");
    expect(
      runCli(["reach-snapshots", fix("reach_sensory", "trajectory.csv"), snaps, "--target", "0.2,0.1"]),
    ).toBe(0);
    expect(fs.existsSync(snaps)).toBe(true);

    const cmp = path.join(outDir, "cmp.svg");
    expect(
      runCli([
        "trajectory-compare", cmp,
        `sensory=${fix("reach_sensory", "trajectory.csv")}`,
        `benchmark=${fix("reach_benchmark", "trajectory.csv")}`,
      ]),
    ).toBe(0);
    expect(fs.existsSync(cmp)).toBe(true);
  });

  it("fails an empty trajectory job without writing the image", () => {
    const empty = path.join(outDir, "empty.csv");
    fs.writeFileSync(
      empty,
      "t,node,s,r_x,r_y,theta,kappa,V_top,V_bottom,W_top,W_bottom,I_top,I_bottom,u_net\n",
    );
    const out = path.join(outDir, "never.svg");
    expect(runCli(["reach-snapshots", empty, out])).toBe(1);
    expect(fs.existsSync(out)).toBe(false);
  });

  it("fails cleanly on a missing input file", () => {
    expect(runCli(["reach-snapshots", path.join(outDir, "nope.csv"), path.join(outDir, "x.svg")])).toBe(1);
  });

  it("rejects unknown verbs", () => {
    expect(runCli(["render-everything"])).toBe(1);
  });
});
