/**
 * Minimal deterministic SVG figure builder: one axes box, scatter/line
 * series, dashed guide lines, tick labels.  Log axes take pre-transformed
 * coordinates; callers pass log10 values and label the axis accordingly.
 */

export interface Series {
  x: number[];
  y: number[];
  color: string;
  label?: string;
  line?: boolean;
  marker?: boolean;
}

export interface Guide {
  x: number[];
  y: number[];
  color?: string;
  label?: string;
}

export interface FigureSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  guides: Guide[];
  notes?: string[];
  width?: number;
  height?: number;
}

const PAL = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function palette(i: number): string {
  return PAL[i % PAL.length];
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    throw new Error("cannot scale empty or non-finite data");
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.06 * (hi - lo);
  return [lo - pad, hi + pad];
}

function fmt(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a < 1e-3 || a >= 1e4)) return v.toExponential(1);
  return String(Math.round(v * 1000) / 1000);
}

export function renderFigure(spec: FigureSpec): string {
  const W = spec.width ?? 640;
  const H = spec.height ?? 440;
  const m = { left: 70, right: 20, top: 44, bottom: 52 };
  const allX = spec.series.flatMap((s) => s.x).concat(spec.guides.flatMap((g) => g.x));
  const allY = spec.series.flatMap((s) => s.y).concat(spec.guides.flatMap((g) => g.y));
  const [x0, x1] = extent(allX);
  const [y0, y1] = extent(allY);
  const sx = (x: number) => m.left + ((x - x0) / (x1 - x0)) * (W - m.left - m.right);
  const sy = (y: number) => H - m.bottom - ((y - y0) / (y1 - y0)) * (H - m.top - m.bottom);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" ` +
    `viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(
    `<rect x="${m.left}" y="${m.top}" width="${W - m.left - m.right}" ` +
    `height="${H - m.top - m.bottom}" fill="none" stroke="#333"/>`,
  );
  parts.push(`<text x="${W / 2}" y="24" text-anchor="middle" font-size="15">${spec.title}</text>`);
  parts.push(
    `<text x="${W / 2}" y="${H - 12}" text-anchor="middle" font-size="12">${spec.xLabel}</text>`,
  );
  parts.push(
    `<text x="18" y="${H / 2}" text-anchor="middle" font-size="12" ` +
    `transform="rotate(-90 18 ${H / 2})">${spec.yLabel}</text>`,
  );

  const nTicks = 5;
  for (let i = 0; i <= nTicks; i++) {
    const xv = x0 + (i / nTicks) * (x1 - x0);
    const yv = y0 + (i / nTicks) * (y1 - y0);
    parts.push(
      `<line x1="${sx(xv)}" y1="${H - m.bottom}" x2="${sx(xv)}" y2="${H - m.bottom + 4}" stroke="#333"/>` +
      `<text x="${sx(xv)}" y="${H - m.bottom + 16}" text-anchor="middle" font-size="10">${fmt(xv)}</text>`,
    );
    parts.push(
      `<line x1="${m.left - 4}" y1="${sy(yv)}" x2="${m.left}" y2="${sy(yv)}" stroke="#333"/>` +
      `<text x="${m.left - 7}" y="${sy(yv) + 3}" text-anchor="end" font-size="10">${fmt(yv)}</text>`,
    );
  }

  for (const g of spec.guides) {
    const pts = g.x.map((x, i) => `${sx(x)},${sy(g.y[i])}`).join(" ");
    parts.push(
      `<polyline class="guide" points="${pts}" fill="none" ` +
      `stroke="${g.color ?? "#555"}" stroke-width="1.5" stroke-dasharray="6,4"/>`,
    );
    if (g.label) {
      parts.push(
        `<text x="${sx(g.x[g.x.length - 1])}" y="${sy(g.y[g.y.length - 1]) - 6}" ` +
        `font-size="10" fill="${g.color ?? "#555"}" text-anchor="end">${g.label}</text>`,
      );
    }
  }

  let legendY = m.top + 14;
  for (const s of spec.series) {
    if (s.line !== false && s.x.length > 1) {
      const pts = s.x.map((x, i) => `${sx(x)},${sy(s.y[i])}`).join(" ");
      parts.push(
        `<polyline class="series" points="${pts}" fill="none" stroke="${s.color}" stroke-width="1.8"/>`,
      );
    }
    if (s.marker !== false) {
      for (let i = 0; i < s.x.length; i++) {
        parts.push(
          `<circle cx="${sx(s.x[i])}" cy="${sy(s.y[i])}" r="3" fill="${s.color}"/>`,
        );
      }
    }
    if (s.label) {
      parts.push(
        `<circle cx="${W - m.right - 120}" cy="${legendY - 3}" r="3" fill="${s.color}"/>` +
        `<text x="${W - m.right - 112}" y="${legendY}" font-size="10">${s.label}</text>`,
      );
      legendY += 14;
    }
  }

  let noteY = H - m.bottom - 8;
  for (const note of spec.notes ?? []) {
    parts.push(
      `<text x="${m.left + 8}" y="${noteY}" font-size="10" fill="#333">${note}</text>`,
    );
    noteY -= 13;
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

/** Categorical heat map for the admissibility chart. */
export function renderCellMap(
  title: string,
  xLabel: string,
  yLabel: string,
  cells: { x: number; y: number; color: string }[],
  legend: { color: string; label: string }[],
  overlay: Guide | null,
): string {
  const W = 640;
  const H = 480;
  const m = { left: 70, right: 150, top: 44, bottom: 52 };
  const xs = cells.map((c) => c.x);
  const ys = cells.map((c) => c.y);
  const [x0, x1] = extent(xs);
  const [y0, y1] = extent(ys);
  const sx = (x: number) => m.left + ((x - x0) / (x1 - x0)) * (W - m.left - m.right);
  const sy = (y: number) => H - m.bottom - ((y - y0) / (y1 - y0)) * (H - m.top - m.bottom);
  const uniq = (vals: number[]) => [...new Set(vals)].sort((a, b) => a - b);
  const cw = ((W - m.left - m.right) / Math.max(uniq(xs).length - 1, 1)) * 0.92;
  const chh = ((H - m.top - m.bottom) / Math.max(uniq(ys).length - 1, 1)) * 0.92;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" ` +
    `viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(`<text x="${(m.left + W - m.right) / 2}" y="24" text-anchor="middle" font-size="15">${title}</text>`);
  for (const c of cells) {
    parts.push(
      `<rect x="${sx(c.x) - cw / 2}" y="${sy(c.y) - chh / 2}" width="${cw}" ` +
      `height="${chh}" fill="${c.color}"/>`,
    );
  }
  parts.push(
    `<rect x="${m.left}" y="${m.top}" width="${W - m.left - m.right}" ` +
    `height="${H - m.top - m.bottom}" fill="none" stroke="#333"/>`,
  );
  const nTicks = 5;
  for (let i = 0; i <= nTicks; i++) {
    const xv = x0 + (i / nTicks) * (x1 - x0);
    const yv = y0 + (i / nTicks) * (y1 - y0);
    parts.push(
      `<text x="${sx(xv)}" y="${H - m.bottom + 16}" text-anchor="middle" font-size="10">${fmt(xv)}</text>`,
    );
    parts.push(
      `<text x="${m.left - 7}" y="${sy(yv) + 3}" text-anchor="end" font-size="10">${fmt(yv)}</text>`,
    );
  }
  parts.push(
    `<text x="${(m.left + W - m.right) / 2}" y="${H - 12}" text-anchor="middle" font-size="12">${xLabel}</text>`,
  );
  parts.push(
    `<text x="18" y="${H / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 18 ${H / 2})">${yLabel}</text>`,
  );
  if (overlay) {
    const inside = overlay.x
      .map((x, i) => ({ x, y: overlay.y[i] }))
      .filter((p) => p.y >= y0 && p.y <= y1 && p.x >= x0 && p.x <= x1);
    if (inside.length > 1) {
      const pts = inside.map((p) => `${sx(p.x)},${sy(p.y)}`).join(" ");
      parts.push(
        `<polyline class="guide" points="${pts}" fill="none" stroke="#000" ` +
        `stroke-width="1.5" stroke-dasharray="6,4"/>`,
      );
      if (overlay.label) {
        parts.push(
          `<text x="${sx(inside[inside.length - 1].x) - 4}" y="${sy(inside[inside.length - 1].y) - 6}" font-size="10" text-anchor="end">${overlay.label}</text>`,
        );
      }
    }
  }
  let ly = m.top + 10;
  for (const item of legend) {
    parts.push(
      `<rect x="${W - m.right + 12}" y="${ly - 8}" width="10" height="10" fill="${item.color}"/>` +
      `<text x="${W - m.right + 27}" y="${ly}" font-size="10">${item.label}</text>`,
    );
    ly += 16;
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
