// Viewer wiring: load a tree export, fly the camera, adapt the front each
// frame under the slider thresholds, draw, and keep the HUD in sync.

import { ActiveFront, AdaptParams, adapt, renderSet, screenSpaceError } from "./adapt.js";
import { CameraController } from "./camera.js";
import { Hud } from "./hud.js";
import { Renderer } from "./renderer.js";
import { TreeData, TreeFormatError, parseTree } from "./vtree.js";

const TAU_MIN = 0.5;
const TAU_MAX = 64.0;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function sliderToTau(value: number): number {
  // log scale across [TAU_MIN, TAU_MAX]
  const t = value / 1000;
  return TAU_MIN * Math.pow(TAU_MAX / TAU_MIN, t);
}

class ViewerApp {
  tree: TreeData | null = null;
  front: ActiveFront | null = null;
  camera = new CameraController();
  renderer: Renderer;
  hud: Hud;
  paused = false;
  frontDirty = true;
  triangleCount = 0;
  private lastTime = performance.now();

  private canvas = el<HTMLCanvasElement>("view");
  private tauSlider = el<HTMLInputElement>("tau");
  private tauSilSlider = el<HTMLInputElement>("tau-sil");
  private hysteresisSlider = el<HTMLInputElement>("hysteresis");
  private tauLabel = el<HTMLElement>("tau-label");
  private tauSilLabel = el<HTMLElement>("tau-sil-label");
  private hysteresisLabel = el<HTMLElement>("hysteresis-label");
  private banner = el<HTMLElement>("banner");

  constructor() {
    this.renderer = new Renderer(this.canvas);
    this.hud = new Hud(el("hud"));
    this.bindUi();
    requestAnimationFrame(() => this.frame());
  }

  params(): AdaptParams {
    const tau = sliderToTau(Number(this.tauSlider.value));
    let tauSil = sliderToTau(Number(this.tauSilSlider.value));
    if (tauSil > tau) tauSil = tau;
    return {
      tau,
      tauSilhouette: tauSil,
      hysteresis: Number(this.hysteresisSlider.value) / 100,
      maxOpsPerFrame: 512,
    };
  }

  loadDocument(text: string): void {
    try {
      this.tree = parseTree(JSON.parse(text));
    } catch (exc) {
      const reason = exc instanceof TreeFormatError || exc instanceof SyntaxError
        ? String(exc) : "unexpected error";
      this.banner.textContent = `load failed: ${reason}`;
      this.banner.style.display = "block";
      return;
    }
    this.banner.style.display = "none";
    this.front = ActiveFront.rootsOnly(this.tree);
    this.frontDirty = true;
    const [lo, hi] = this.tree.bbox;
    const center: [number, number, number] = [
      (lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2, (lo[2] + hi[2]) / 2,
    ];
    const radius = Math.max(
      Math.hypot(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]) / 2, 1e-6);
    this.camera.frameScene(center, radius);
    this.renderer.sceneRadius = radius;
  }

  private bindUi(): void {
    const labels = () => {
      const p = this.params();
      this.tauLabel.textContent = `${p.tau.toFixed(2)} px`;
      this.tauSilLabel.textContent = `${p.tauSilhouette.toFixed(2)} px`;
      this.hysteresisLabel.textContent = p.hysteresis.toFixed(2);
    };
    for (const slider of [this.tauSlider, this.tauSilSlider, this.hysteresisSlider]) {
      slider.addEventListener("input", labels);
    }
    labels();

    el<HTMLInputElement>("file").addEventListener("change", async (ev) => {
      const input = ev.target as HTMLInputElement;
      const file = input.files?.[0];
      if (file) this.loadDocument(await file.text());
    });
    el<HTMLButtonElement>("reset").addEventListener("click", () => {
      if (this.tree) {
        this.front = ActiveFront.rootsOnly(this.tree);
        this.frontDirty = true;
      }
    });
    el<HTMLInputElement>("pause").addEventListener("change", (ev) => {
      this.paused = (ev.target as HTMLInputElement).checked;
    });
    el<HTMLInputElement>("wireframe").addEventListener("change", (ev) => {
      this.renderer.wireframe = (ev.target as HTMLInputElement).checked;
    });
    el<HTMLSelectElement>("mode").addEventListener("change", (ev) => {
      const mode = (ev.target as HTMLSelectElement).value as "orbit" | "fly";
      if (mode === "fly") this.camera.syncFlyFromOrbit();
      this.camera.mode = mode;
    });
    el<HTMLButtonElement>("dump").addEventListener("click", () => this.downloadDump());

    this.canvas.addEventListener("pointerdown", (ev) => {
      this.canvas.setPointerCapture(ev.pointerId);
    });
    this.canvas.addEventListener("pointermove", (ev) => {
      if (ev.buttons & 1) this.camera.rotate(ev.movementX, ev.movementY);
    });
    this.canvas.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      this.camera.zoom(Math.exp(ev.deltaY * 0.001));
    }, { passive: false });
    window.addEventListener("keydown", (ev) => this.camera.keyDown(ev.code));
    window.addEventListener("keyup", (ev) => this.camera.keyUp(ev.code));
  }

  // per-node screen errors at the current pose, same schema as the batch
  // tool's flythrough debug dump, for parity checking
  private downloadDump(): void {
    if (!this.tree) return;
    const cam = this.camera.pose(this.canvas.height);
    const errors = [];
    for (let nid = 0; nid < this.tree.nodeCount; nid++) {
      const err = screenSpaceError(this.tree, nid, cam);
      errors.push(Number.isFinite(err) ? err : "inf");
    }
    const doc = {
      camera: {
        eye: cam.eye, forward: cam.forward, up: cam.up, fov_y: cam.fovY,
        viewport_height: cam.viewportHeight, near: cam.near,
      },
      errors,
    };
    const blob = new Blob([JSON.stringify(doc)], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "screen_errors.json";
    link.click();
    URL.revokeObjectURL(link.href);
  }

  private frame(): void {
    const now = performance.now();
    const dt = Math.min(0.1, (now - this.lastTime) / 1000);
    this.lastTime = now;
    const dpr = window.devicePixelRatio || 1;
    const width = Math.floor(this.canvas.clientWidth * dpr);
    const height = Math.floor(this.canvas.clientHeight * dpr);
    if (width > 0 && (this.canvas.width !== width || this.canvas.height !== height)) {
      this.canvas.width = width;
      this.canvas.height = height;
    }
    this.camera.tick(dt);

    if (this.tree && this.front) {
      const cam = this.camera.pose(this.canvas.height);
      if (!this.paused) {
        const next = adapt(this.front, this.tree, cam, this.params());
        if (next.lastSplits + next.lastMerges > 0) this.frontDirty = true;
        this.front = next;
      }
      if (this.frontDirty) {
        const triples = renderSet(this.front, this.tree);
        this.triangleCount = triples.length / 3;
        this.renderer.setTriangles(this.tree, triples);
        this.frontDirty = false;
      }
      this.renderer.draw(cam);
      this.hud.update({
        triangles: this.triangleCount,
        active: this.front.active.size,
        splits: this.front.lastSplits,
        merges: this.front.lastMerges,
        paused: this.paused,
        frameMs: now - this.lastTime + dt * 1000,
      });
    }
    requestAnimationFrame(() => this.frame());
  }
}

new ViewerApp();
