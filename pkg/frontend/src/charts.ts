/** Tiny dependency-free SVG line charts (string-producing, so the logic is
 * testable without a DOM). */

export interface Series {
  label: string;
  points: [number, number][];
  color?: string;
}

export interface ChartOptions {
  width?: number;
  height?: number;
  xLabel?: string;
  yLabel?: string;
  logY?: boolean;
}

const COLORS = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed", "#0891b2", "#be185d"];
const PAD = { left: 54, right: 12, top: 10, bottom: 30 };

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === Infinity) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function lineChart(series: Series[], options: ChartOptions = {}): string {
  const width = options.width ?? 460;
  const height = options.height ?? 220;
  const innerW = width - PAD.left - PAD.right;
  const innerH = height - PAD.top - PAD.bottom;

  const ys = options.logY
    ? (v: number) => Math.log10(Math.max(v, 1e-300))
    : (v: number) => v;

  const allX = series.flatMap((s) => s.points.map((p) => p[0]));
  const allY = series.flatMap((s) => s.points.map((p) => ys(p[1])));
  const [x0, x1] = extent(allX);
  const [y0, y1] = extent(allY);

  const sx = (x: number) => PAD.left + ((x - x0) / (x1 - x0)) * innerW;
  const sy = (y: number) => PAD.top + innerH - ((ys(y) - y0) / (y1 - y0)) * innerH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="chart">`,
  );
  parts.push(
    `<rect x="${PAD.left}" y="${PAD.top}" width="${innerW}" height="${innerH}" class="chart-bg"/>`,
  );
  // axes labels and end ticks
  const fmtTick = (v: number) => (Math.abs(v) >= 1e4 || (v !== 0 && Math.abs(v) < 1e-2))
    ? v.toExponential(1) : String(Math.round(v * 1000) / 1000);
  const yLo = options.logY ? Math.pow(10, y0) : y0;
  const yHi = options.logY ? Math.pow(10, y1) : y1;
  parts.push(`<text x="${PAD.left}" y="${height - 8}" class="tick">${fmtTick(x0)}</text>`);
  parts.push(`<text x="${width - PAD.right}" y="${height - 8}" text-anchor="end" class="tick">${fmtTick(x1)}</text>`);
  parts.push(`<text x="${PAD.left - 6}" y="${PAD.top + innerH}" text-anchor="end" class="tick">${fmtTick(yLo)}</text>`);
  parts.push(`<text x="${PAD.left - 6}" y="${PAD.top + 10}" text-anchor="end" class="tick">${fmtTick(yHi)}</text>`);
  if (options.xLabel) {
    parts.push(`<text x="${PAD.left + innerW / 2}" y="${height - 8}" text-anchor="middle" class="axis">${esc(options.xLabel)}</text>`);
  }
  if (options.yLabel) {
    parts.push(`<text x="12" y="${PAD.top + innerH / 2}" transform="rotate(-90 12 ${PAD.top + innerH / 2})" text-anchor="middle" class="axis">${esc(options.yLabel)}</text>`);
  }

  series.forEach((s, i) => {
    const color = s.color ?? COLORS[i % COLORS.length];
    const path = s.points
      .filter((p) => Number.isFinite(p[0]) && Number.isFinite(p[1]))
      .map((p) => `${sx(p[0]).toFixed(1)},${sy(p[1]).toFixed(1)}`)
      .join(" ");
    parts.push(`<polyline fill="none" stroke="${color}" stroke-width="1.6" points="${path}"/>`);
    parts.push(
      `<text x="${width - PAD.right}" y="${PAD.top + 14 + i * 14}" text-anchor="end" fill="${color}" class="legend">${esc(s.label)}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}
