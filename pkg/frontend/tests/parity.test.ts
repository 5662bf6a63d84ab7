// Formula parity: per-node screen errors at the scripted pose must match
// the batch tool's flythrough debug dump within 1e-4 px.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { CameraPose, screenSpaceError } from "../src/adapt.js";
import { parseTree } from "../src/vtree.js";

const FIXTURES = join(__dirname, "fixtures");

function loadJson(name: string) {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8"));
}

describe("screen-error parity with the batch tool", () => {
  const tree = parseTree(loadJson("octa.tree.json"));
  const dump = loadJson("octa.dump.json");
  const cam: CameraPose = {
    eye: dump.camera.eye,
    forward: dump.camera.forward,
    up: dump.camera.up,
    fovY: dump.camera.fov_y,
    viewportHeight: dump.camera.viewport_height,
    near: dump.camera.near,
  };

  it("matches every node within 1e-4 px", () => {
    expect(dump.errors.length).toBe(tree.nodeCount);
    for (let nid = 0; nid < tree.nodeCount; nid++) {
      const expected = dump.errors[nid];
      const got = screenSpaceError(tree, nid, cam);
      if (expected === "inf") {
        expect(got).toBe(Infinity);
      } else {
        expect(Math.abs(got - expected)).toBeLessThanOrEqual(1e-4);
      }
    }
  });
});
