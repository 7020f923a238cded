/**
 * Per-kind figure assembly: each kind reads its validated frame and draws
 * the measured data with the predicted guide taken from the CSV's own
 * columns (slopes, reference ratios, the iteration gap delta).
 */

import { ReportFrame, SchemaError, numbers } from "./schema.js";
import { Guide, Series, palette, renderCellMap, renderFigure } from "./svg.js";

const log10 = (v: number) => Math.log(v) / Math.LN10;

function groupBy<T>(items: T[], key: (t: T) => string): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const item of items) {
    const k = key(item);
    if (!out.has(k)) out.set(k, []);
    out.get(k)!.push(item);
  }
  return out;
}

export function kernelNormsFigure(frame: ReportFrame): string {
  const r = numbers(frame, "r");
  const norm = numbers(frame, "norm");
  if (norm.some((v) => v <= 0) || r.some((v) => v <= 0)) {
    throw new SchemaError("kernel norms must be positive for the log-log plot");
  }
  const rows = frame.rows.map((row, i) => ({
    theta: String(row["theta"]),
    lr: log10(r[i]),
    ln: log10(norm[i]),
    pred: Number(row["predicted_slope"]),
    meas: Number(row["measured_slope"]),
  }));
  const series: Series[] = [];
  const guides: Guide[] = [];
  const notes: string[] = [];
  let ci = 0;
  for (const [theta, pts] of groupBy(rows, (p) => p.theta)) {
    pts.sort((a, b) => a.lr - b.lr);
    const color = palette(ci++);
    series.push({
      x: pts.map((p) => p.lr),
      y: pts.map((p) => p.ln),
      color,
      label: `theta=${theta} (meas ${pts[0].meas.toFixed(3)})`,
    });
    const a = pts[0];
    const b = pts[pts.length - 1];
    guides.push({
      x: [a.lr, b.lr],
      y: [a.ln, a.ln + a.pred * (b.lr - a.lr)],
      color,
      label: `slope ${a.pred.toFixed(3)}`,
    });
    notes.push(`theta=${theta}: predicted ${a.pred.toFixed(3)}, measured ${a.meas.toFixed(3)}`);
  }
  return renderFigure({
    title: "Mollification kernel norms vs scale",
    xLabel: "log10 r",
    yLabel: "log10 ||K_r||_theta",
    series,
    guides,
    notes,
  });
}

export function gnFigure(frame: ReportFrame): string {
  const ratioRows = frame.rows.filter((r) => String(r["quantity"]).startsWith("ratio_"));
  const spreadRow = frame.rows.find((r) => r["quantity"] === "scaling_spread");
  if (ratioRows.length === 0 || !spreadRow) {
    throw new SchemaError("gn report needs ratio_* rows and a scaling_spread row");
  }
  const labels = ratioRows.map((r) => String(r["quantity"]).replace("ratio_", ""));
  const values = ratioRows.map((r) => Number(r["value"]));
  if (values.some((v) => !Number.isFinite(v))) {
    throw new SchemaError("non-finite ratio value");
  }
  const baseIdx = labels.indexOf("base");
  const base = baseIdx >= 0 ? values[baseIdx] : Number(ratioRows[0]["reference"]);
  const xs = values.map((_, i) => i);
  const series: Series[] = [
    { x: xs, y: values, color: palette(0), line: false, label: "interpolation ratio" },
  ];
  const guides: Guide[] = [
    { x: [-0.4, xs.length - 0.6], y: [base, base], label: "base ratio" },
    { x: [-0.4, xs.length - 0.6], y: [base * 1.02, base * 1.02], color: "#d62728", label: "+2%" },
    { x: [-0.4, xs.length - 0.6], y: [base / 1.02, base / 1.02], color: "#d62728", label: "-2%" },
  ];
  const spread = Number(spreadRow["value"]);
  return renderFigure({
    title: "Interpolation-ratio invariance under the two rescalings",
    xLabel: labels.join("  |  "),
    yLabel: "ratio",
    series,
    guides,
    notes: [`spread = ${spread.toFixed(5)} (tolerance 1.02)`],
  });
}

export function besovFigure(frame: ReportFrame): string {
  const rows = frame.rows.filter((r) => r["h"] !== "C_meas");
  if (rows.length < 2) {
    throw new SchemaError("besov report needs at least two per-h rows");
  }
  const h = rows.map((r) => Number(r["h"]));
  const quot = rows.map((r) => Number(r["quotient"]));
  if (h.some((v) => !(v > 0)) || quot.some((v) => !(v > 0))) {
    throw new SchemaError("besov rows must have positive h and quotient");
  }
  const s = Number(rows[0]["s"]);
  const lh = h.map(log10);
  const lq = quot.map(log10);
  const order = lh.map((_, i) => i).sort((a, b) => lh[a] - lh[b]);
  const xs = order.map((i) => lh[i]);
  const ys = order.map((i) => lq[i]);
  const smoothSlope = 1.0 - s; // smooth-field prediction for the quotient
  const hi = xs.length - 1;
  const guides: Guide[] = [
    {
      x: [xs[0], xs[hi]],
      y: [ys[hi] - smoothSlope * (xs[hi] - xs[0]), ys[hi]],
      label: `slope 1-s = ${smoothSlope.toFixed(4)}`,
    },
    {
      x: [xs[0], xs[hi]],
      y: [Math.max(...ys), Math.max(...ys)],
      color: "#d62728",
      label: "sup (seminorm value)",
    },
  ];
  return renderFigure({
    title: "Finite-difference quotient profile in the shift h",
    xLabel: "log10 h",
    yLabel: "log10 ||f(.+h)-f||_q / h^s",
    series: [{ x: xs, y: ys, color: palette(0), label: `s = ${s.toFixed(4)}` }],
    guides,
  });
}

export function degiorgiFigure(frame: ReportFrame): string {
  const n = numbers(frame, "n");
  const M = numbers(frame, "M_n");
  const delta = numbers(frame, "delta")[0];
  const pos = n.map((_, i) => i).filter((i) => M[i] > 0);
  if (pos.length === 0) {
    throw new SchemaError("cascade has no positive energies to draw");
  }
  const xs = pos.map((i) => n[i]);
  const ys = pos.map((i) => log10(M[i]));
  // guide: the two-step recursion gain log M_{n+2} = (1+delta) log M_n,
  // anchored at the first level with M < 1
  const anchor = pos.find((i) => M[i] < 1.0) ?? pos[0];
  const gx: number[] = [];
  const gy: number[] = [];
  let gm = log10(M[anchor]);
  for (let k = n[anchor]; k <= n[pos[pos.length - 1]] + 2; k += 2) {
    gx.push(k);
    gy.push(gm);
    gm = (1.0 + delta) * gm;
  }
  const floor = Math.min(...ys) - 2;
  const gyc = gy.map((v) => Math.max(v, floor));
  return renderFigure({
    title: "Truncation-energy cascade",
    xLabel: "level n",
    yLabel: "log10 M_n",
    series: [{ x: xs, y: ys, color: palette(0), label: "measured M_n" }],
    guides: [{ x: gx, y: gyc, label: `(1+delta) gain, delta=${delta.toFixed(4)}` }],
    notes: [`levels with M_n = 0 are below the plotted range`],
  });
}

export function admissibilityFigure(frame: ReportFrame): string {
  const p = numbers(frame, "p");
  const mu = numbers(frame, "mu");
  const adm = numbers(frame, "admissible");
  const reasons = frame.rows.map((r) => String(r["reason"]));
  const colorFor = (ok: number, reason: string): string => {
    if (ok === 1) return "#2ca02c";
    if (reason === "WINDOW_A") return "#d62728";
    if (reason === "WINDOW_Q2") return "#ff7f0e";
    if (reason === "DA_SINGULAR") return "#9467bd";
    return "#7f7f7f";
  };
  const cells = p.map((pv, i) => ({
    x: pv,
    y: mu[i],
    color: colorFor(adm[i], reasons[i]),
  }));
  const seen = new Set<string>();
  const legend: { color: string; label: string }[] = [];
  p.forEach((_, i) => {
    const label = adm[i] === 1 ? "admissible" : reasons[i];
    if (!seen.has(label)) {
      seen.add(label);
      legend.push({ color: colorFor(adm[i], reasons[i]), label });
    }
  });
  const ps = [...new Set(p)].sort((a, b) => a - b);
  const dual: Guide = {
    x: ps,
    y: ps.map((v) => v / (v - 1.0)),
    label: "mu = p'",
  };
  return renderCellMap(
    "Admissibility window in the (p, mu) plane",
    "p",
    "mu",
    cells,
    legend,
    dual,
  );
}

export function renderReport(frame: ReportFrame): string {
  switch (frame.kind) {
    case "kernel-norms":
      return kernelNormsFigure(frame);
    case "gn":
      return gnFigure(frame);
    case "besov":
      return besovFigure(frame);
    case "degiorgi":
      return degiorgiFigure(frame);
    case "admissibility":
      return admissibilityFigure(frame);
    default:
      throw new SchemaError(`no renderer for kind ${frame.kind}`);
  }
}
