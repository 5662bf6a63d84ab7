// Minimal WebGL2 renderer: flat-shaded triangles plus optional wireframe,
// rebuilt from the render set whenever the front changes.

import { CameraPose } from "./adapt.js";
import { TreeData } from "./vtree.js";

const VERT = `#version 300 es
layout(location = 0) in vec3 position;
layout(location = 1) in vec3 normal;
uniform mat4 viewProj;
out vec3 vNormal;
void main() {
  vNormal = normal;
  gl_Position = viewProj * vec4(position, 1.0);
}`;

const FRAG = `#version 300 es
precision mediump float;
in vec3 vNormal;
uniform vec3 lightDir;
uniform vec3 baseColor;
uniform float flat_;
out vec4 color;
void main() {
  float lit = mix(1.0, 0.25 + 0.75 * abs(dot(normalize(vNormal), lightDir)), flat_);
  color = vec4(baseColor * lit, 1.0);
}`;

function compile(gl: WebGL2RenderingContext, kind: number, src: string): WebGLShader {
  const shader = gl.createShader(kind)!;
  gl.shaderSource(shader, src);
  gl.compileShader(shader);
  if (!gl.getShaderParameter(shader, gl.COMPILE_STATUS)) {
    throw new Error(gl.getShaderInfoLog(shader) ?? "shader compile failed");
  }
  return shader;
}

function look(cam: CameraPose, aspect: number, far: number): Float32Array {
  // column-major viewProj = perspective * view
  const [ex, ey, ez] = cam.eye;
  const f = cam.forward;
  const u = cam.up;
  const s = [
    f[1] * u[2] - f[2] * u[1],
    f[2] * u[0] - f[0] * u[2],
    f[0] * u[1] - f[1] * u[0],
  ];
  const view = new Float32Array([
    s[0], u[0], -f[0], 0,
    s[1], u[1], -f[1], 0,
    s[2], u[2], -f[2], 0,
    -(s[0] * ex + s[1] * ey + s[2] * ez),
    -(u[0] * ex + u[1] * ey + u[2] * ez),
    (f[0] * ex + f[1] * ey + f[2] * ez),
    1,
  ]);
  const t = 1.0 / Math.tan(0.5 * cam.fovY);
  const near = cam.near;
  const proj = new Float32Array(16);
  proj[0] = t / aspect;
  proj[5] = t;
  proj[10] = (far + near) / (near - far);
  proj[11] = -1;
  proj[14] = (2 * far * near) / (near - far);
  const out = new Float32Array(16);
  for (let c = 0; c < 4; c++) {
    for (let r = 0; r < 4; r++) {
      let acc = 0;
      for (let k = 0; k < 4; k++) acc += proj[4 * k + r] * view[4 * c + k];
      out[4 * c + r] = acc;
    }
  }
  return out;
}

export class Renderer {
  private gl: WebGL2RenderingContext;
  private program: WebGLProgram;
  private vaoTris: WebGLVertexArrayObject;
  private vaoLines: WebGLVertexArrayObject;
  private triBuffer: WebGLBuffer;
  private lineBuffer: WebGLBuffer;
  private triVertices = 0;
  private lineVertices = 0;
  wireframe = false;
  sceneRadius = 1;

  constructor(private canvas: HTMLCanvasElement) {
    const gl = canvas.getContext("webgl2");
    if (!gl) throw new Error("WebGL2 is not available");
    this.gl = gl;
    const program = gl.createProgram()!;
    gl.attachShader(program, compile(gl, gl.VERTEX_SHADER, VERT));
    gl.attachShader(program, compile(gl, gl.FRAGMENT_SHADER, FRAG));
    gl.linkProgram(program);
    if (!gl.getProgramParameter(program, gl.LINK_STATUS)) {
      throw new Error(gl.getProgramInfoLog(program) ?? "link failed");
    }
    this.program = program;
    this.triBuffer = gl.createBuffer()!;
    this.lineBuffer = gl.createBuffer()!;
    this.vaoTris = this.makeVao(this.triBuffer, true);
    this.vaoLines = this.makeVao(this.lineBuffer, false);
    gl.enable(gl.DEPTH_TEST);
    gl.clearColor(0.07, 0.08, 0.1, 1.0);
  }

  private makeVao(buffer: WebGLBuffer, withNormals: boolean): WebGLVertexArrayObject {
    const gl = this.gl;
    const vao = gl.createVertexArray()!;
    gl.bindVertexArray(vao);
    gl.bindBuffer(gl.ARRAY_BUFFER, buffer);
    const stride = withNormals ? 24 : 12;
    gl.enableVertexAttribArray(0);
    gl.vertexAttribPointer(0, 3, gl.FLOAT, false, stride, 0);
    if (withNormals) {
      gl.enableVertexAttribArray(1);
      gl.vertexAttribPointer(1, 3, gl.FLOAT, false, stride, 12);
    }
    gl.bindVertexArray(null);
    return vao;
  }

  // interleave position+flat normal per corner; wireframe gets bare edges
  setTriangles(tree: TreeData, triples: Int32Array): void {
    const gl = this.gl;
    const faceCount = triples.length / 3;
    const tri = new Float32Array(faceCount * 3 * 6);
    const lines = new Float32Array(faceCount * 6 * 3);
    const p = tree.positions;
    for (let f = 0; f < faceCount; f++) {
      const ids = [triples[3 * f], triples[3 * f + 1], triples[3 * f + 2]];
      const ax = p[3 * ids[0]], ay = p[3 * ids[0] + 1], az = p[3 * ids[0] + 2];
      const bx = p[3 * ids[1]], by = p[3 * ids[1] + 1], bz = p[3 * ids[1] + 2];
      const cx = p[3 * ids[2]], cy = p[3 * ids[2] + 1], cz = p[3 * ids[2] + 2];
      let nx = (by - ay) * (cz - az) - (bz - az) * (cy - ay);
      let ny = (bz - az) * (cx - ax) - (bx - ax) * (cz - az);
      let nz = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
      const nn = Math.hypot(nx, ny, nz) || 1;
      nx /= nn; ny /= nn; nz /= nn;
      const corners = [[ax, ay, az], [bx, by, bz], [cx, cy, cz]];
      for (let c = 0; c < 3; c++) {
        const base = (3 * f + c) * 6;
        tri[base] = corners[c][0];
        tri[base + 1] = corners[c][1];
        tri[base + 2] = corners[c][2];
        tri[base + 3] = nx;
        tri[base + 4] = ny;
        tri[base + 5] = nz;
        const lb = (6 * f + 2 * c) * 3;
        const next = corners[(c + 1) % 3];
        lines[lb] = corners[c][0];
        lines[lb + 1] = corners[c][1];
        lines[lb + 2] = corners[c][2];
        lines[lb + 3] = next[0];
        lines[lb + 4] = next[1];
        lines[lb + 5] = next[2];
      }
    }
    gl.bindBuffer(gl.ARRAY_BUFFER, this.triBuffer);
    gl.bufferData(gl.ARRAY_BUFFER, tri, gl.DYNAMIC_DRAW);
    gl.bindBuffer(gl.ARRAY_BUFFER, this.lineBuffer);
    gl.bufferData(gl.ARRAY_BUFFER, lines, gl.DYNAMIC_DRAW);
    this.triVertices = faceCount * 3;
    this.lineVertices = faceCount * 6;
  }

  draw(cam: CameraPose): void {
    const gl = this.gl;
    const w = this.canvas.width;
    const h = this.canvas.height;
    gl.viewport(0, 0, w, h);
    gl.clear(gl.COLOR_BUFFER_BIT | gl.DEPTH_BUFFER_BIT);
    gl.useProgram(this.program);
    const far = Math.max(this.sceneRadius * 20, cam.near * 100);
    const vp = look(cam, w / Math.max(1, h), far);
    gl.uniformMatrix4fv(gl.getUniformLocation(this.program, "viewProj"), false, vp);
    gl.uniform3f(gl.getUniformLocation(this.program, "lightDir"),
                 0.45, 0.8, 0.4);
    gl.uniform3f(gl.getUniformLocation(this.program, "baseColor"),
                 0.55, 0.68, 0.9);
    gl.uniform1f(gl.getUniformLocation(this.program, "flat_"), 1.0);
    gl.bindVertexArray(this.vaoTris);
    gl.drawArrays(gl.TRIANGLES, 0, this.triVertices);
    if (this.wireframe) {
      gl.uniform3f(gl.getUniformLocation(this.program, "baseColor"),
                   0.95, 0.95, 0.95);
      gl.uniform1f(gl.getUniformLocation(this.program, "flat_"), 0.0);
      gl.bindVertexArray(this.vaoLines);
      gl.drawArrays(gl.LINES, 0, this.lineVertices);
    }
    gl.bindVertexArray(null);
  }
}
