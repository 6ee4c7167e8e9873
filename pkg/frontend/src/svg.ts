/** Minimal deterministic SVG scene builder: no dependencies, stable output. */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const DEFAULT_MARGIN: Margin = { top: 36, right: 24, bottom: 44, left: 64 };

export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(2);
  return Number(v.toPrecision(6)).toString();
}

export class Scene {
  readonly parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  add(tag: string, attrs: Record<string, string | number>, text?: string): void {
    const a = Object.entries(attrs)
      .map(([k, v]) => `${k}="${v}"`)
      .join(" ");
    if (text === undefined) {
      this.parts.push(`<${tag} ${a}/>`);
    } else {
      this.parts.push(`<${tag} ${a}>${escapeText(text)}</${tag}>`);
    }
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
        `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}" ` +
        `font-family="Helvetica, Arial, sans-serif">`,
      `<rect x="0" y="0" width="${this.width}" height="${this.height}" fill="white"/>`,
      ...this.parts,
      "</svg>",
      "",
    ].join("\n");
  }
}

function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface Scale {
  (v: number): number;
  readonly min: number;
  readonly max: number;
  readonly log: boolean;
}

export function linearScale(min: number, max: number, r0: number, r1: number): Scale {
  const span = max - min || 1;
  const f = ((v: number) => r0 + ((v - min) / span) * (r1 - r0)) as Scale;
  return Object.assign(f, { min, max, log: false });
}

export function logScale(min: number, max: number, r0: number, r1: number): Scale {
  const lo = Math.log10(min);
  const hi = Math.log10(max);
  const span = hi - lo || 1;
  const f = ((v: number) => r0 + ((Math.log10(v) - lo) / span) * (r1 - r0)) as Scale;
  return Object.assign(f, { min, max, log: true });
}

export function ticks(min: number, max: number, n = 6): number[] {
  const span = max - min || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / n / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const out: number[] = [];
  for (let v = Math.ceil(min / s) * s; v <= max + 1e-12 * span; v += s) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

export function logTicks(min: number, max: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(min) - 1e-9); Math.pow(10, e) <= max * (1 + 1e-9); e++) {
    out.push(Math.pow(10, e));
  }
  return out.length >= 2 ? out : [min, max];
}

/** Draw framed axes with tick labels; returns nothing, mutates the scene. */
export function drawAxes(
  sc: Scene,
  x: Scale,
  y: Scale,
  box: { x0: number; x1: number; y0: number; y1: number },
  labels: { title?: string; xlabel?: string; ylabel?: string },
): void {
  sc.add("rect", {
    x: box.x0, y: box.y1, width: box.x1 - box.x0, height: box.y0 - box.y1,
    fill: "none", stroke: "#333", "stroke-width": 1,
  });
  const xt = x.log ? logTicks(x.min, x.max) : ticks(x.min, x.max);
  for (const v of xt) {
    const px = x(v);
    if (px < box.x0 - 0.5 || px > box.x1 + 0.5) continue;
    sc.add("line", { x1: px, y1: box.y0, x2: px, y2: box.y0 + 4, stroke: "#333" });
    sc.add("text", {
      x: px, y: box.y0 + 16, "text-anchor": "middle", "font-size": 10, fill: "#333",
    }, fmt(v));
  }
  const yt = y.log ? logTicks(y.min, y.max) : ticks(y.min, y.max);
  for (const v of yt) {
    const py = y(v);
    if (py > box.y0 + 0.5 || py < box.y1 - 0.5) continue;
    sc.add("line", { x1: box.x0 - 4, y1: py, x2: box.x0, y2: py, stroke: "#333" });
    sc.add("text", {
      x: box.x0 - 6, y: py + 3, "text-anchor": "end", "font-size": 10, fill: "#333",
    }, fmt(v));
  }
  if (labels.title) {
    sc.add("text", {
      x: (box.x0 + box.x1) / 2, y: box.y1 - 10, "text-anchor": "middle",
      "font-size": 13, fill: "#111",
    }, labels.title);
  }
  if (labels.xlabel) {
    sc.add("text", {
      x: (box.x0 + box.x1) / 2, y: box.y0 + 32, "text-anchor": "middle",
      "font-size": 11, fill: "#333",
    }, labels.xlabel);
  }
  if (labels.ylabel) {
    const cx = box.x0 - 46;
    const cy = (box.y0 + box.y1) / 2;
    sc.parts.push(
      `<text x="${cx}" y="${cy}" text-anchor="middle" font-size="11" fill="#333" ` +
        `transform="rotate(-90 ${cx} ${cy})">${escapeText(labels.ylabel)}</text>`);
  }
}

export function polyline(
  sc: Scene, pts: Array<[number, number]>, stroke: string, width = 1.2,
): void {
  const d = pts.map(([a, b]) => `${round2(a)},${round2(b)}`).join(" ");
  sc.add("polyline", { points: d, fill: "none", stroke, "stroke-width": width });
}

export function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

/** Blue-white-red diverging colormap on [-1, 1]. */
export function diverging(v: number): string {
  const t = Math.max(-1, Math.min(1, v));
  let r: number;
  let g: number;
  let b: number;
  if (t < 0) {
    r = 255 * (1 + t);
    g = 255 * (1 + t);
    b = 255;
  } else {
    r = 255;
    g = 255 * (1 - t);
    b = 255 * (1 - t);
  }
  return `rgb(${Math.round(r)},${Math.round(g)},${Math.round(b)})`;
}

export const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"];
