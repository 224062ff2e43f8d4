/**
 * Small deterministic plot kit: linear/log scales, tick generation, axis
 * frames, scatter markers and line overlays drawn onto a Canvas.
 */

import { Canvas } from "./canvas";

export interface Scale {
  (v: number): number;
  domain: [number, number];
  ticks(): number[];
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const f = ((v: number) => r0 + ((v - d0) / (d1 - d0)) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.ticks = () => {
    const step = niceStep(d1 - d0, 5);
    const out: number[] = [];
    for (let t = Math.ceil(d0 / step) * step; t <= d1 + 1e-9 * step; t += step) {
      out.push(Math.abs(t) < 1e-12 ? 0 : t);
    }
    return out;
  };
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const f = ((v: number) => r0 + ((Math.log10(v) - l0) / (l1 - l0)) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.ticks = () => {
    const out: number[] = [];
    for (let e = Math.ceil(l0 - 1e-9); e <= Math.floor(l1 + 1e-9); e++) {
      out.push(Math.pow(10, e));
    }
    return out.length >= 2 ? out : [d0, d1];
  };
  return f;
}

export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const e = Math.floor(Math.log10(a));
    const m = v / Math.pow(10, e);
    const ms = Math.abs(m - 1) < 1e-9 ? "" : `${Number(m.toPrecision(3))}x`;
    return `${ms}1e${e}`;
  }
  return String(Number(v.toPrecision(4)));
}

export interface PanelBox {
  x: number;
  y: number;
  w: number;
  h: number;
}

export type MarkerKind = "circle" | "square" | "triangle" | "cross";

export class Panel {
  readonly xScale: Scale;
  readonly yScale: Scale;

  constructor(
    private canvas: Canvas,
    private box: PanelBox,
    xDomain: [number, number],
    yDomain: [number, number],
    private opts: { xLog?: boolean; xLabel?: string; yLabel?: string; title?: string } = {},
  ) {
    const xr: [number, number] = [box.x, box.x + box.w];
    const yr: [number, number] = [box.y + box.h, box.y]; // y grows upward
    this.xScale = opts.xLog ? logScale(xDomain, xr) : linearScale(xDomain, xr);
    this.yScale = linearScale(yDomain, yr);
  }

  frame(): void {
    const { x, y, w, h } = this.box;
    const c = this.canvas;
    c.rect(x, y, w, h, { color: "black", width: 1 });
    for (const t of this.xScale.ticks()) {
      const px = this.xScale(t);
      if (px < x - 0.5 || px > x + w + 0.5) continue;
      c.polyline([[px, y + h], [px, y + h - 4]], { color: "black" });
      c.text(px, y + h + 14, tickLabel(t), { anchor: "middle", size: 10 });
    }
    for (const t of this.yScale.ticks()) {
      const py = this.yScale(t);
      if (py < y - 0.5 || py > y + h + 0.5) continue;
      c.polyline([[x, py], [x + 4, py]], { color: "black" });
      c.text(x - 5, py + 3.5, tickLabel(t), { anchor: "end", size: 10 });
    }
    if (this.opts.xLabel) {
      c.text(x + w / 2, y + h + 30, this.opts.xLabel, { anchor: "middle", size: 12 });
    }
    if (this.opts.yLabel) {
      c.text(x - 42, y + h / 2, this.opts.yLabel, {
        anchor: "middle",
        size: 12,
        rotate: -90,
      });
    }
    if (this.opts.title) {
      c.text(x + w / 2, y - 6, this.opts.title, { anchor: "middle", size: 12 });
    }
  }

  private clip(px: number, py: number): boolean {
    const { x, y, w, h } = this.box;
    return px >= x - 1e-6 && px <= x + w + 1e-6 && py >= y - 1e-6 && py <= y + h + 1e-6;
  }

  marker(kind: MarkerKind, vx: number, vy: number, color: string, size = 3.2): void {
    const px = this.xScale(vx);
    const py = this.yScale(vy);
    if (!Number.isFinite(px) || !Number.isFinite(py) || !this.clip(px, py)) return;
    const c = this.canvas;
    const s = size;
    if (kind === "circle") {
      c.circle(px, py, s, color);
    } else if (kind === "square") {
      c.polygon([[px - s, py - s], [px + s, py - s], [px + s, py + s], [px - s, py + s]], color);
    } else if (kind === "triangle") {
      c.polygon([[px, py - s * 1.2], [px + s * 1.1, py + s], [px - s * 1.1, py + s]], color);
    } else {
      c.polyline([[px - s, py - s], [px + s, py + s]], { color, width: 1.4 });
      c.polyline([[px - s, py + s], [px + s, py - s]], { color, width: 1.4 });
    }
  }

  scatter(kind: MarkerKind, xs: number[], ys: number[], color: string): void {
    xs.forEach((vx, i) => this.marker(kind, vx, ys[i], color));
  }

  line(xs: number[], ys: number[], opts: { color: string; width?: number; dash?: number[] }): void {
    const pts: Array<[number, number]> = [];
    xs.forEach((vx, i) => {
      const px = this.xScale(vx);
      const py = this.yScale(ys[i]);
      if (Number.isFinite(px) && Number.isFinite(py) && this.clip(px, py)) {
        pts.push([px, py]);
      }
    });
    if (pts.length >= 2) this.canvas.polyline(pts, opts);
  }

  legend(entries: Array<{ kind: MarkerKind | "line"; color: string; label: string; dash?: number[] }>): void {
    const { x, y, w } = this.box;
    let ly = y + 12;
    for (const e of entries) {
      const lx = x + w - 112;
      if (e.kind === "line") {
        this.canvas.polyline([[lx, ly - 3], [lx + 16, ly - 3]],
          { color: e.color, width: 1.5, dash: e.dash });
      } else if (e.kind === "circle") {
        this.canvas.circle(lx + 8, ly - 3, 3.2, e.color);
      } else if (e.kind === "square") {
        this.canvas.polygon(
          [[lx + 5, ly - 6], [lx + 11, ly - 6], [lx + 11, ly], [lx + 5, ly]], e.color);
      } else if (e.kind === "triangle") {
        this.canvas.polygon([[lx + 8, ly - 7], [lx + 12, ly], [lx + 4, ly]], e.color);
      } else {
        this.canvas.polyline([[lx + 5, ly - 6], [lx + 11, ly]], { color: e.color, width: 1.4 });
        this.canvas.polyline([[lx + 5, ly], [lx + 11, ly - 6]], { color: e.color, width: 1.4 });
      }
      this.canvas.text(lx + 20, ly, e.label, { size: 10 });
      ly += 14;
    }
  }
}

export function extent(values: number[], padFrac = 0.05): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v));
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (!(hi > lo)) {
    hi = lo + 1;
  }
  const pad = (hi - lo) * padFrac;
  return [lo - pad, hi + pad];
}
