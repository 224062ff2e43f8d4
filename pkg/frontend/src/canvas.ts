/**
 * Minimal vector canvas with two byte-deterministic backends (SVG text and a
 * single-page PDF). Coordinates are top-left based; the PDF backend flips y.
 * Only the primitives the plots need: polylines, markers, rectangles, text.
 */

export interface StrokeOpts {
  color: string;
  width?: number;
  dash?: number[];
}

export interface TextOpts {
  size?: number;
  color?: string;
  anchor?: "start" | "middle" | "end";
  rotate?: number; // degrees, about the text origin
}

export interface Canvas {
  readonly width: number;
  readonly height: number;
  polyline(points: Array<[number, number]>, opts: StrokeOpts): void;
  circle(cx: number, cy: number, r: number, fill: string): void;
  polygon(points: Array<[number, number]>, fill: string): void;
  rect(x: number, y: number, w: number, h: number, opts: StrokeOpts): void;
  text(x: number, y: number, s: string, opts?: TextOpts): void;
}

/** fixed-precision coordinate formatting keeps the output byte-stable */
export function fmt(x: number): string {
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

const NAMED_COLORS: Record<string, [number, number, number]> = {
  black: [0, 0, 0],
  white: [1, 1, 1],
  grey: [0.5, 0.5, 0.5],
  navy: [0, 0, 0.5],
  pink: [1, 0.41, 0.71],
  blue: [0.12, 0.28, 0.76],
  red: [0.84, 0.15, 0.16],
};

function rgb(color: string): [number, number, number] {
  if (color in NAMED_COLORS) return NAMED_COLORS[color];
  if (color.startsWith("#") && color.length === 7) {
    return [
      parseInt(color.slice(1, 3), 16) / 255,
      parseInt(color.slice(3, 5), 16) / 255,
      parseInt(color.slice(5, 7), 16) / 255,
    ];
  }
  throw new Error(`unknown color ${color}`);
}

export class SvgCanvas implements Canvas {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    );
  }

  polyline(points: Array<[number, number]>, opts: StrokeOpts): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const dash = opts.dash ? ` stroke-dasharray="${opts.dash.join(" ")}"` : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${opts.color}" ` +
        `stroke-width="${opts.width ?? 1}"${dash}/>`,
    );
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.parts.push(
      `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}"/>`,
    );
  }

  polygon(points: Array<[number, number]>, fill: string): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polygon points="${pts}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, opts: StrokeOpts): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ` +
        `fill="none" stroke="${opts.color}" stroke-width="${opts.width ?? 1}"/>`,
    );
  }

  text(x: number, y: number, s: string, opts: TextOpts = {}): void {
    const size = opts.size ?? 11;
    const anchor = opts.anchor ?? "start";
    const rot = opts.rotate
      ? ` transform="rotate(${opts.rotate} ${fmt(x)} ${fmt(y)})"`
      : "";
    const esc = s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="Helvetica,Arial,sans-serif" ` +
        `font-size="${size}" fill="${opts.color ?? "black"}" ` +
        `text-anchor="${anchor}"${rot}>${esc}</text>`,
    );
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

/** Helvetica metric approximation good enough for anchored plot labels. */
const CHAR_WIDTH = 0.52;

export class PdfCanvas implements Canvas {
  private ops: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.ops.push("1 1 1 rg", `0 0 ${fmt(width)} ${fmt(height)} re f`);
  }

  private flip(y: number): number {
    return this.height - y;
  }

  private setStroke(opts: StrokeOpts): void {
    const [r, g, b] = rgb(opts.color);
    this.ops.push(`${r.toFixed(3)} ${g.toFixed(3)} ${b.toFixed(3)} RG`);
    this.ops.push(`${(opts.width ?? 1).toFixed(2)} w`);
    this.ops.push(opts.dash ? `[${opts.dash.join(" ")}] 0 d` : "[] 0 d");
  }

  private setFill(color: string): void {
    const [r, g, b] = rgb(color);
    this.ops.push(`${r.toFixed(3)} ${g.toFixed(3)} ${b.toFixed(3)} rg`);
  }

  polyline(points: Array<[number, number]>, opts: StrokeOpts): void {
    if (points.length < 2) return;
    this.setStroke(opts);
    const [x0, y0] = points[0];
    this.ops.push(`${fmt(x0)} ${fmt(this.flip(y0))} m`);
    for (const [x, y] of points.slice(1)) {
      this.ops.push(`${fmt(x)} ${fmt(this.flip(y))} l`);
    }
    this.ops.push("S");
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.setFill(fill);
    const k = 0.5523 * r;
    const y = this.flip(cy);
    this.ops.push(`${fmt(cx + r)} ${fmt(y)} m`);
    this.ops.push(`${fmt(cx + r)} ${fmt(y + k)} ${fmt(cx + k)} ${fmt(y + r)} ${fmt(cx)} ${fmt(y + r)} c`);
    this.ops.push(`${fmt(cx - k)} ${fmt(y + r)} ${fmt(cx - r)} ${fmt(y + k)} ${fmt(cx - r)} ${fmt(y)} c`);
    this.ops.push(`${fmt(cx - r)} ${fmt(y - k)} ${fmt(cx - k)} ${fmt(y - r)} ${fmt(cx)} ${fmt(y - r)} c`);
    this.ops.push(`${fmt(cx + k)} ${fmt(y - r)} ${fmt(cx + r)} ${fmt(y - k)} ${fmt(cx + r)} ${fmt(y)} c`);
    this.ops.push("f");
  }

  polygon(points: Array<[number, number]>, fill: string): void {
    if (points.length < 3) return;
    this.setFill(fill);
    const [x0, y0] = points[0];
    this.ops.push(`${fmt(x0)} ${fmt(this.flip(y0))} m`);
    for (const [x, y] of points.slice(1)) {
      this.ops.push(`${fmt(x)} ${fmt(this.flip(y))} l`);
    }
    this.ops.push("h f");
  }

  rect(x: number, y: number, w: number, h: number, opts: StrokeOpts): void {
    this.setStroke(opts);
    this.ops.push(`${fmt(x)} ${fmt(this.flip(y + h))} ${fmt(w)} ${fmt(h)} re S`);
  }

  text(x: number, y: number, s: string, opts: TextOpts = {}): void {
    const size = opts.size ?? 11;
    const width = s.length * size * CHAR_WIDTH;
    let dx = 0;
    if (opts.anchor === "middle") dx = -width / 2;
    if (opts.anchor === "end") dx = -width;
    const [r, g, b] = rgb(opts.color ?? "black");
    const esc = s.replace(/\\/g, "\\\\").replace(/\(/g, "\\(").replace(/\)/g, "\\)");
    const yy = this.flip(y);
    this.ops.push("BT");
    this.ops.push(`${r.toFixed(3)} ${g.toFixed(3)} ${b.toFixed(3)} rg`);
    this.ops.push(`/F1 ${size} Tf`);
    if (opts.rotate) {
      const a = (-opts.rotate * Math.PI) / 180;
      const c = Math.cos(a).toFixed(5);
      const sn = Math.sin(a).toFixed(5);
      // rotate about the anchor point, then shift by the anchor offset
      this.ops.push(`${c} ${sn} ${(-Number(sn)).toFixed(5)} ${c} ${fmt(x)} ${fmt(yy)} Tm`);
      this.ops.push(`${fmt(dx)} 0 Td`);
    } else {
      this.ops.push(`1 0 0 1 ${fmt(x + dx)} ${fmt(yy)} Tm`);
    }
    this.ops.push(`(${esc}) Tj`, "ET");
  }

  /** Serialize as a complete single-page PDF (no timestamps: byte-stable). */
  toBytes(): Buffer {
    const content = this.ops.join("\n");
    const objects: string[] = [];
    objects.push("<< /Type /Catalog /Pages 2 0 R >>");
    objects.push("<< /Type /Pages /Kids [3 0 R] /Count 1 >>");
    objects.push(
      `<< /Type /Page /Parent 2 0 R /MediaBox [0 0 ${fmt(this.width)} ${fmt(this.height)}] ` +
        "/Contents 4 0 R /Resources << /Font << /F1 5 0 R >> >> >>",
    );
    objects.push(
      `<< /Length ${Buffer.byteLength(content, "latin1")} >>\nstream\n${content}\nendstream`,
    );
    objects.push("<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>");

    let out = "%PDF-1.4\n";
    const offsets: number[] = [];
    objects.forEach((obj, i) => {
      offsets.push(Buffer.byteLength(out, "latin1"));
      out += `${i + 1} 0 obj\n${obj}\nendobj\n`;
    });
    const xref = Buffer.byteLength(out, "latin1");
    out += `xref\n0 ${objects.length + 1}\n`;
    out += "0000000000 65535 f \n";
    for (const off of offsets) {
      out += `${off.toString().padStart(10, "0")} 00000 n \n`;
    }
    out += `trailer\n<< /Size ${objects.length + 1} /Root 1 0 R >>\n`;
    out += `startxref\n${xref}\n%%EOF\n`;
    return Buffer.from(out, "latin1");
  }
}
