/**
 * End-to-end: drive the simulator CLI (the external interface) to produce a
 * fresh atlas, then render it. Requires the neuroarm Python package to be
 * installed in the environment, as it is in this repo's dev setup.
 */

import { describe, expect, it } from "vitest";
import { execFileSync } from "child_process";
import fs from "fs";
import os from "os";
import path from "path";

import { loadAtlas } from "../src/data.js";
import { renderShapeGrid } from "../src/figures.js";

describe("simulator CLI integration", () => {
  it("renders a shape grid from a freshly generated atlas", () => {
    const work = fs.mkdtempSync(path.join(os.tmpdir(), "e2e-"));
    const cfg = path.join(work, "atlas.toml");
    fs.writeFileSync(
      cfg,
      'kind = "atlas"\n[atlas]\ntop_base = [40.0, 50.0]\ntop_tip = [60.0, 80.0]\nadaptation = [1.0]\n',
    );
    execFileSync("python3", ["-m", "neuroarm.cli", "atlas", cfg, "-o", work], {
      stdio: "pipe",
      timeout: 120_000,
    });
    const atlas = loadAtlas(path.join(work, "atlas.csv"), path.join(work, "atlas_index.json"));
    expect(atlas.cells).toHaveLength(4);
    const svg = renderShapeGrid(atlas);
    const out = path.join(work, "grid.svg");
    fs.writeFileSync(out, svg);
    expect(fs.statSync(out).size).toBeGreaterThan(10_000);
  }, 180_000);
});
