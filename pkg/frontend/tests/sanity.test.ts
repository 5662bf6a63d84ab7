// Interactive sanity: loading the icosphere export and dragging the pixel
// tolerance from max to min drives the triangle count up to full detail
// within 200 frames, with the cut staying valid throughout.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { ActiveFront, AdaptParams, CameraPose, adapt, renderSet } from "../src/adapt.js";
import { parseTree } from "../src/vtree.js";

const FIXTURES = join(__dirname, "fixtures");

function loadTree(name: string) {
  return parseTree(JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")));
}

function defaultCamera(tree: ReturnType<typeof loadTree>): CameraPose {
  const [lo, hi] = tree.bbox;
  const radius = Math.hypot(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]) / 2;
  const center = [(lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2, (lo[2] + hi[2]) / 2];
  return {
    eye: [center[0], center[1], center[2] + radius * 2.8],
    forward: [0, 0, -1],
    up: [0, 1, 0],
    fovY: Math.PI / 3,
    viewportHeight: 1080,
    near: radius * 1e-3,
  };
}

const TAU_MAX = 64.0;
const TAU_MIN = 0.5;

describe("icosphere export sanity", () => {
  const tree = loadTree("ico.tree.json");
  const cam = defaultCamera(tree);

  it("drag from max to min tolerance reaches full detail within 200 frames", () => {
    const fullDetail = renderSet(ActiveFront.allLeaves(tree), tree).length / 3;
    expect(fullDetail).toBeGreaterThan(0);

    let front = ActiveFront.rootsOnly(tree);
    expect(renderSet(front, tree).length / 3).toBeLessThan(fullDetail);

    let reachedAt = -1;
    for (let frame = 0; frame < 200; frame++) {
      // slider sweep: 40 frames from max to min, then held at min
      const t = Math.min(1, frame / 40);
      const tau = TAU_MAX * Math.pow(TAU_MIN / TAU_MAX, t);
      const params: AdaptParams = {
        tau, tauSilhouette: tau, hysteresis: 0.0, maxOpsPerFrame: null,
      };
      front = adapt(front, tree, cam, params);
      if (renderSet(front, tree).length / 3 === fullDetail) {
        reachedAt = frame;
        break;
      }
    }
    expect(reachedAt).toBeGreaterThanOrEqual(0);
    front.validate(tree);
    expect(front.active.size).toBe(tree.leafCount);
  });

  it("keeps the cut valid on every frame of a zoom", () => {
    let front = ActiveFront.rootsOnly(tree);
    for (let frame = 0; frame < 30; frame++) {
      const zoomCam: CameraPose = {
        ...cam,
        eye: [cam.eye[0], cam.eye[1], cam.eye[2] - frame * 0.05],
      };
      front = adapt(front, tree, zoomCam, {
        tau: 2.0, tauSilhouette: 1.0, hysteresis: 0.3, maxOpsPerFrame: 64,
      });
      front.validate(tree);
      expect(renderSet(front, tree).length / 3).toBeGreaterThanOrEqual(0);
    }
  });

  it("HUD triangle count equals the render set length", () => {
    let front = ActiveFront.rootsOnly(tree);
    for (let frame = 0; frame < 10; frame++) {
      front = adapt(front, tree, cam, {
        tau: 4.0, tauSilhouette: 4.0, hysteresis: 0.2, maxOpsPerFrame: null,
      });
    }
    const triples = renderSet(front, tree);
    expect(triples.length % 3).toBe(0);
    const triangleCount = triples.length / 3;  // what the HUD displays
    const recount = new Set<string>();
    for (let f = 0; f < tree.faceCount; f++) {
      const pa = front.proxy[tree.faces[3 * f]];
      const pb = front.proxy[tree.faces[3 * f + 1]];
      const pc = front.proxy[tree.faces[3 * f + 2]];
      if (pa !== pb && pb !== pc && pa !== pc) {
        recount.add([pa, pb, pc].sort((x, y) => x - y).join(","));
      }
    }
    expect(triangleCount).toBe(recount.size);
  });
});

describe("export validation", () => {
  it("rejects malformed documents", () => {
    expect(() => parseTree({})).toThrow();
    expect(() => parseTree({ format: "vtree", version: 2 })).toThrow();
    expect(() => parseTree(null)).toThrow();
    const good = JSON.parse(readFileSync(join(FIXTURES, "octa.tree.json"), "utf-8"));
    const bad = { ...good, children: good.children.slice(0, -1) };
    expect(() => parseTree(bad)).toThrow();
  });

  it("renders nothing for an export with no faces", () => {
    const good = JSON.parse(readFileSync(join(FIXTURES, "octa.tree.json"), "utf-8"));
    const faceless = { ...good, face_count: 0, faces: [] };
    const tree = parseTree(faceless);
    const front = ActiveFront.allLeaves(tree);
    expect(renderSet(front, tree).length).toBe(0);
  });
});
