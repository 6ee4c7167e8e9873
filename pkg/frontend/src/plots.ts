/** The five plot kinds: surface, heatmap, xslice, norms, loglog. */

import {
  ConvergenceSample, Diagnostics, MissingColumns, fitSlope,
} from "./csv.js";
import { Snapshot, xNodes, xSlice } from "./kps1.js";
import {
  DEFAULT_MARGIN, SERIES_COLORS, Scene, diverging, drawAxes, fmt,
  linearScale, logScale, polyline, round2,
} from "./svg.js";

const W = 720;
const H = 520;

function fieldRange(values: Float64Array): { lo: number; hi: number } {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    throw new Error("snapshot contains non-finite values");
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return { lo, hi };
}

/** Axonometric wireframe of u(x, y): the paper-style "3-dimensional" view. */
export function plotSurface(s: Snapshot, title?: string): string {
  const sc = new Scene(W, H);
  const { lo, hi } = fieldRange(s.values);
  // project (x, y, u) -> screen with a fixed oblique projection
  const cosA = Math.cos(Math.PI / 6);
  const sinA = Math.sin(Math.PI / 6);
  const px = (i: number, j: number) => i / (s.nx - 1) + 0.45 * (j / (s.ny - 1)) * cosA;
  const py = (j: number, u: number) =>
    0.45 * (j / (s.ny - 1)) * sinA + 0.5 * ((u - lo) / (hi - lo));
  const m = { left: 60, right: 30, top: 50, bottom: 40 };
  const sx = linearScale(0, 1 + 0.45 * cosA, m.left, W - m.right);
  const sy = linearScale(0, 0.45 * sinA + 0.5, H - m.bottom, m.top);
  // draw back-to-front so nearer lines overpaint farther ones
  const strideJ = Math.max(1, Math.floor(s.ny / 60));
  for (let j = s.ny - 1; j >= 0; j -= strideJ) {
    const pts: Array<[number, number]> = [];
    for (let i = 0; i < s.nx; i++) {
      const u = s.values[j * s.nx + i];
      pts.push([sx(px(i, j)), sy(py(j, u))]);
    }
    const t = j / (s.ny - 1 || 1);
    const shade = Math.round(40 + 120 * t);
    polyline(sc, pts, `rgb(${shade},${shade},${Math.min(255, shade + 90)})`, 0.8);
  }
  sc.add("text", {
    x: W / 2, y: 24, "text-anchor": "middle", "font-size": 13, fill: "#111",
  }, title ?? `u(x, y) at t = ${fmt(s.t)}`);
  sc.add("text", {
    x: W / 2, y: H - 12, "text-anchor": "middle", "font-size": 11, fill: "#333",
  }, `x in [${fmt(-s.lx)}, ${fmt(s.lx)}], y in [${fmt(-s.ly)}, ${fmt(s.ly)}], ` +
     `u in [${fmt(lo)}, ${fmt(hi)}]`);
  return sc.render();
}

export function plotHeatmap(s: Snapshot, title?: string): string {
  const sc = new Scene(W, H);
  const m = DEFAULT_MARGIN;
  const box = { x0: m.left, x1: W - 90, y0: H - m.bottom, y1: m.top };
  const { lo, hi } = fieldRange(s.values);
  const amp = Math.max(Math.abs(lo), Math.abs(hi)) || 1;
  const cw = (box.x1 - box.x0) / s.nx;
  const ch = (box.y0 - box.y1) / s.ny;
  for (let j = 0; j < s.ny; j++) {
    for (let i = 0; i < s.nx; i++) {
      const v = s.values[j * s.nx + i] / amp;
      sc.add("rect", {
        x: round2(box.x0 + i * cw),
        y: round2(box.y0 - (j + 1) * ch),
        width: round2(cw + 0.05),
        height: round2(ch + 0.05),
        fill: diverging(v),
      });
    }
  }
  const x = linearScale(-s.lx, s.lx, box.x0, box.x1);
  const y = linearScale(-s.ly, s.ly, box.y0, box.y1);
  drawAxes(sc, x, y, box, {
    title: title ?? `u(x, y) at t = ${fmt(s.t)}`, xlabel: "x", ylabel: "y",
  });
  // color bar
  const bx = W - 70;
  for (let k = 0; k < 100; k++) {
    const v = -1 + (2 * k) / 99;
    sc.add("rect", {
      x: bx, y: round2(box.y0 - ((k + 1) / 100) * (box.y0 - box.y1)),
      width: 16, height: round2((box.y0 - box.y1) / 100 + 0.05), fill: diverging(v),
    });
  }
  sc.add("text", { x: bx + 20, y: box.y1 + 8, "font-size": 10, fill: "#333" }, fmt(amp));
  sc.add("text", { x: bx + 20, y: box.y0, "font-size": 10, fill: "#333" }, fmt(-amp));
  return sc.render();
}

export function plotXSlice(s: Snapshot, yValues: number[], title?: string): string {
  if (yValues.length === 0) {
    throw new Error("xslice needs at least one y value (--y)");
  }
  const sc = new Scene(W, H);
  const m = DEFAULT_MARGIN;
  const box = { x0: m.left, x1: W - m.right, y0: H - m.bottom, y1: m.top };
  const xs = xNodes(s);
  const slices = yValues.map((y) => xSlice(s, y));
  let lo = Infinity;
  let hi = -Infinity;
  for (const sl of slices) {
    for (const v of sl.line) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.05 * (hi - lo);
  const x = linearScale(-s.lx, s.lx, box.x0, box.x1);
  const y = linearScale(lo - pad, hi + pad, box.y0, box.y1);
  drawAxes(sc, x, y, box, {
    title: title ?? `u(x, y = const) at t = ${fmt(s.t)}`, xlabel: "x", ylabel: "u",
  });
  slices.forEach((sl, k) => {
    const pts: Array<[number, number]> = [];
    for (let i = 0; i < s.nx; i++) pts.push([x(xs[i]), y(sl.line[i])]);
    const color = SERIES_COLORS[k % SERIES_COLORS.length];
    polyline(sc, pts, color);
    sc.add("text", {
      x: box.x1 - 8, y: box.y1 + 16 + 14 * k, "text-anchor": "end",
      "font-size": 11, fill: color,
    }, `y = ${fmt(sl.y)}`);
  });
  return sc.render();
}

/** Three stacked panels: L2 norm, mean (mass/area), Linf norm vs time. */
export function plotNorms(d: Diagnostics, title?: string): string {
  for (const c of ["time", "l2", "mass", "linf"]) {
    if (!d.columns.has(c)) throw new MissingColumns(`norms plot needs column ${c}`);
  }
  const sc = new Scene(W, 640);
  const time = d.columns.get("time")!;
  const panels: Array<{ name: string; data: Float64Array }> = [
    { name: "L2 norm", data: d.columns.get("l2")! },
    { name: "mass", data: d.columns.get("mass")! },
    { name: "Linf norm", data: d.columns.get("linf")! },
  ];
  const ph = 180;
  panels.forEach((p, k) => {
    const top = 40 + k * (ph + 20);
    const box = { x0: 70, x1: W - 30, y0: top + ph, y1: top };
    let lo = Infinity;
    let hi = -Infinity;
    for (const v of p.data) {
      if (Number.isFinite(v)) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
      }
    }
    if (!Number.isFinite(lo)) {
      lo = 0;
      hi = 1;
    }
    if (lo === hi) {
      lo -= Math.abs(lo) * 0.1 + 1e-12;
      hi += Math.abs(hi) * 0.1 + 1e-12;
    }
    const pad = 0.06 * (hi - lo);
    const x = linearScale(time[0], time[time.length - 1] || 1, box.x0, box.x1);
    const y = linearScale(lo - pad, hi + pad, box.y0, box.y1);
    drawAxes(sc, x, y, box, {
      title: p.name, xlabel: k === 2 ? "t" : undefined,
    });
    const pts: Array<[number, number]> = [];
    for (let i = 0; i < d.rows; i++) {
      if (Number.isFinite(p.data[i])) pts.push([x(time[i]), y(p.data[i])]);
    }
    polyline(sc, pts, SERIES_COLORS[k]);
  });
  sc.add("text", {
    x: W / 2, y: 20, "text-anchor": "middle", "font-size": 13, fill: "#111",
  }, title ?? "diagnostics");
  return sc.render();
}

export function plotLogLog(
  series: Array<{ label: string; samples: ConvergenceSample[] }>,
  title?: string,
): string {
  if (series.length === 0) throw new Error("loglog needs at least one series");
  const sc = new Scene(W, H);
  const m = DEFAULT_MARGIN;
  const box = { x0: m.left, x1: W - m.right, y0: H - m.bottom, y1: m.top };
  let hLo = Infinity;
  let hHi = -Infinity;
  let eLo = Infinity;
  let eHi = -Infinity;
  for (const s of series) {
    for (const { h, err } of s.samples) {
      hLo = Math.min(hLo, h);
      hHi = Math.max(hHi, h);
      eLo = Math.min(eLo, err);
      eHi = Math.max(eHi, err);
    }
  }
  const x = logScale(hLo / 1.2, hHi * 1.2, box.x0, box.x1);
  const y = logScale(eLo / 2, eHi * 2, box.y0, box.y1);
  drawAxes(sc, x, y, box, {
    title: title ?? "convergence", xlabel: "h", ylabel: "L2 error",
  });
  series.forEach((s, k) => {
    const sorted = [...s.samples].sort((a, b) => a.h - b.h);
    const slope = fitSlope(sorted);
    const color = SERIES_COLORS[k % SERIES_COLORS.length];
    polyline(sc, sorted.map(({ h, err }) => [x(h), y(err)]), color, 1.4);
    for (const { h, err } of sorted) {
      sc.add("circle", { cx: round2(x(h)), cy: round2(y(err)), r: 3, fill: color });
    }
    const label = s.label ? `${s.label}: ` : "";
    sc.add("text", {
      x: box.x0 + 10, y: box.y1 + 18 + 15 * k, "font-size": 12, fill: color,
    }, `${label}slope ${slope.toFixed(2)}`);
  });
  return sc.render();
}
