// HUD overlay: triangle/active counts, last-frame split/merge totals, FPS.

export class Hud {
  private fpsWindow: number[] = [];

  constructor(private element: HTMLElement) {}

  update(stats: { triangles: number; active: number; splits: number;
                  merges: number; paused: boolean; frameMs: number }): void {
    this.fpsWindow.push(stats.frameMs);
    if (this.fpsWindow.length > 30) this.fpsWindow.shift();
    const avg = this.fpsWindow.reduce((a, b) => a + b, 0) / this.fpsWindow.length;
    const fps = avg > 0 ? 1000 / avg : 0;
    this.element.textContent = [
      `triangles ${stats.triangles}`,
      `active ${stats.active}`,
      `splits ${stats.splits} / merges ${stats.merges}`,
      `fps ${fps.toFixed(0)}${stats.paused ? " (adaptation paused)" : ""}`,
    ].join("\n");
  }
}
