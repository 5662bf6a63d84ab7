// Vertex-tree export parsing and derived structure.
//
// The export is one JSON document: leaves occupy ids [0, leafCount), each
// internal node id leafCount+r has the two children stored at children[2r].
// Every node covers a contiguous slice of a DFS leaf ordering (roots in
// ascending id order, left child first), which makes proxy updates cheap.

export interface TreeData {
  leafCount: number;
  nodeCount: number;
  faceCount: number;
  bbox: [number[], number[]];
  positions: Float64Array; // nodeCount*3
  costs: Float64Array;
  radii: Float64Array;
  cones: Float64Array; // nodeCount*4: axis xyz + half angle
  children: Int32Array; // (nodeCount-leafCount)*2
  faces: Int32Array; // faceCount*3, leaf ids
  parents: Int32Array; // -1 for roots
  roots: number[];
  leafOrder: Int32Array;
  leafSpan: Int32Array; // nodeCount*2: [lo, hi) into leafOrder
}

export class TreeFormatError extends Error {}

function numberArray(doc: Record<string, unknown>, key: string, length: number): number[] {
  const value = doc[key];
  if (!Array.isArray(value) || value.length !== length) {
    throw new TreeFormatError(`field ${key} must be an array of length ${length}`);
  }
  for (const v of value) {
    if (typeof v !== "number" || !Number.isFinite(v)) {
      throw new TreeFormatError(`field ${key} contains a non-finite entry`);
    }
  }
  return value as number[];
}

export function parseTree(raw: unknown): TreeData {
  if (typeof raw !== "object" || raw === null) {
    throw new TreeFormatError("export must be a JSON object");
  }
  const doc = raw as Record<string, unknown>;
  if (doc.format !== "vtree") throw new TreeFormatError("not a vtree export");
  if (doc.version !== 1) throw new TreeFormatError(`unsupported version ${doc.version}`);
  const leafCount = doc.leaf_count;
  const nodeCount = doc.node_count;
  const faceCount = doc.face_count;
  if (!Number.isInteger(leafCount) || !Number.isInteger(nodeCount) ||
      !Number.isInteger(faceCount) || (leafCount as number) < 0 ||
      (nodeCount as number) < (leafCount as number) || (faceCount as number) < 0) {
    throw new TreeFormatError("invalid counts");
  }
  const n = nodeCount as number;
  const leaf = leafCount as number;
  const internal = n - leaf;
  const positions = new Float64Array(numberArray(doc, "positions", n * 3));
  const costs = new Float64Array(numberArray(doc, "costs", n));
  const radii = new Float64Array(numberArray(doc, "radii", n));
  const cones = new Float64Array(numberArray(doc, "cones", n * 4));
  const childrenRaw = numberArray(doc, "children", internal * 2);
  const facesRaw = numberArray(doc, "faces", (faceCount as number) * 3);
  const children = new Int32Array(childrenRaw);
  const faces = new Int32Array(facesRaw);

  const parents = new Int32Array(n).fill(-1);
  const claimed = new Uint8Array(n);
  for (let r = 0; r < internal; r++) {
    const nid = leaf + r;
    const a = children[2 * r];
    const b = children[2 * r + 1];
    if (a < 0 || b < 0 || a >= nid || b >= nid || a === b) {
      throw new TreeFormatError(`node ${nid} has invalid children (${a}, ${b})`);
    }
    if (claimed[a] || claimed[b]) {
      throw new TreeFormatError("node claimed by two parents");
    }
    claimed[a] = 1;
    claimed[b] = 1;
    parents[a] = nid;
    parents[b] = nid;
  }
  for (let f = 0; f < faces.length; f++) {
    if (faces[f] < 0 || faces[f] >= leaf) {
      throw new TreeFormatError("face corner is not a leaf id");
    }
  }

  const roots: number[] = [];
  for (let i = 0; i < n; i++) {
    if (parents[i] === -1) roots.push(i);
  }

  const leafOrder = new Int32Array(leaf);
  const leafSpan = new Int32Array(n * 2);
  let cursor = 0;
  for (const root of roots) {
    // iterative DFS, left child first; post-order span assembly
    const stack: Array<[number, boolean]> = [[root, false]];
    while (stack.length > 0) {
      const [node, done] = stack.pop()!;
      if (done) {
        const a = children[2 * (node - leaf)];
        const b = children[2 * (node - leaf) + 1];
        leafSpan[2 * node] = leafSpan[2 * a];
        leafSpan[2 * node + 1] = leafSpan[2 * b + 1];
        continue;
      }
      if (node < leaf) {
        leafOrder[cursor] = node;
        leafSpan[2 * node] = cursor;
        leafSpan[2 * node + 1] = cursor + 1;
        cursor++;
      } else {
        const a = children[2 * (node - leaf)];
        const b = children[2 * (node - leaf) + 1];
        stack.push([node, true]);
        stack.push([b, false]);
        stack.push([a, false]);
      }
    }
  }
  if (cursor !== leaf) throw new TreeFormatError("forest does not cover every leaf");

  return {
    leafCount: leaf,
    nodeCount: n,
    faceCount: faceCount as number,
    bbox: doc.bbox as [number[], number[]],
    positions, costs, radii, cones, children, faces, parents, roots,
    leafOrder, leafSpan,
  };
}
