// Orbit and fly camera controllers; both produce the pose consumed by the
// adaptation rule and the renderer.

import { CameraPose } from "./adapt.js";

type Vec3 = [number, number, number];

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [a[1] * b[2] - a[2] * b[1],
          a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]];
}

function normalize(v: Vec3): Vec3 {
  const n = Math.hypot(v[0], v[1], v[2]);
  if (n === 0) return [0, 0, 1];
  return [v[0] / n, v[1] / n, v[2] / n];
}

export class CameraController {
  mode: "orbit" | "fly" = "orbit";
  target: Vec3 = [0, 0, 0];
  distance = 4;
  azimuth = 0.6;
  elevation = 0.35;
  flyPosition: Vec3 = [0, 0, 4];
  fovY = Math.PI / 3;
  near = 1e-3;
  private keys = new Set<string>();

  frameScene(center: Vec3, radius: number): void {
    this.target = [...center] as Vec3;
    this.distance = Math.max(radius * 2.8, 1e-3);
    this.near = Math.max(radius * 1e-3, 1e-6);
    this.azimuth = 0.6;
    this.elevation = 0.35;
    this.syncFlyFromOrbit();
  }

  private orbitEye(): Vec3 {
    const ce = Math.cos(this.elevation);
    return [
      this.target[0] + this.distance * ce * Math.cos(this.azimuth),
      this.target[1] + this.distance * Math.sin(this.elevation),
      this.target[2] + this.distance * ce * Math.sin(this.azimuth),
    ];
  }

  syncFlyFromOrbit(): void {
    this.flyPosition = this.orbitEye();
  }

  rotate(dx: number, dy: number): void {
    this.azimuth += dx * 0.005;
    this.elevation += dy * 0.005;
    const cap = Math.PI / 2 - 0.01;
    this.elevation = Math.min(cap, Math.max(-cap, this.elevation));
  }

  zoom(factor: number): void {
    this.distance = Math.max(this.near * 10, this.distance * factor);
  }

  keyDown(code: string): void {
    this.keys.add(code);
  }

  keyUp(code: string): void {
    this.keys.delete(code);
  }

  tick(dt: number): void {
    if (this.mode !== "fly") return;
    const pose = this.pose(1);
    const fwd = pose.forward;
    const right = normalize(cross(fwd, pose.up));
    const speed = this.distance * 0.6 * dt;
    const move = (dir: Vec3, s: number) => {
      this.flyPosition = [
        this.flyPosition[0] + dir[0] * s,
        this.flyPosition[1] + dir[1] * s,
        this.flyPosition[2] + dir[2] * s,
      ];
    };
    if (this.keys.has("KeyW")) move(fwd, speed);
    if (this.keys.has("KeyS")) move(fwd, -speed);
    if (this.keys.has("KeyA")) move(right, -speed);
    if (this.keys.has("KeyD")) move(right, speed);
    if (this.keys.has("KeyQ")) move(pose.up, -speed);
    if (this.keys.has("KeyE")) move(pose.up, speed);
  }

  pose(viewportHeight: number): CameraPose {
    const eye = this.mode === "orbit" ? this.orbitEye() : this.flyPosition;
    let forward: Vec3;
    if (this.mode === "orbit") {
      forward = normalize(sub(this.target, eye));
    } else {
      const ce = Math.cos(this.elevation);
      forward = normalize([
        -ce * Math.cos(this.azimuth),
        -Math.sin(this.elevation),
        -ce * Math.sin(this.azimuth),
      ]);
    }
    let worldUp: Vec3 = [0, 1, 0];
    if (Math.abs(forward[1]) > 0.999) worldUp = [1, 0, 0];
    const right = normalize(cross(forward, worldUp));
    const up = normalize(cross(right, forward));
    return {
      eye, forward, up,
      fovY: this.fovY,
      viewportHeight,
      near: this.near,
    };
  }
}
