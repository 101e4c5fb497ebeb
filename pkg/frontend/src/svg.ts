/** Minimal deterministic SVG assembly: fixed-precision numbers, no state. */

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  const out = v.toFixed(3);
  return out === "-0.000" ? "0.000" : out;
}

export interface Viewport {
  /** map data coordinates to pixel coordinates (y flipped) */
  px: (x: number) => number;
  py: (y: number) => number;
}

export function viewport(
  xMin: number, xMax: number, yMin: number, yMax: number,
  left: number, top: number, width: number, height: number,
): Viewport {
  const sx = width / (xMax - xMin);
  const sy = height / (yMax - yMin);
  return {
    px: (x: number) => left + (x - xMin) * sx,
    py: (y: number) => top + (yMax - y) * sy,
  };
}

export function polyline(
  xs: number[], ys: number[], vp: Viewport, style: string,
): string {
  const pts = xs.map((x, i) => `${fmt(vp.px(x))},${fmt(vp.py(ys[i]))}`).join(" ");
  return `<polyline points="${pts}" fill="none" ${style}/>`;
}

/** Per-segment colored polyline (used for muscle activation intensity). */
export function activationPath(
  xs: number[], ys: number[], act: number[], vp: Viewport, width: number,
): string {
  const parts: string[] = [];
  for (let i = 0; i + 1 < xs.length; i++) {
    const a = Math.min(1, Math.max(0, (act[i] + act[i + 1]) / 2));
    const r = Math.round(120 + 135 * a);
    const gb = Math.round(120 * (1 - a));
    const color = `rgb(${r},${gb},${gb})`;
    parts.push(
      `<line x1="${fmt(vp.px(xs[i]))}" y1="${fmt(vp.py(ys[i]))}" ` +
      `x2="${fmt(vp.px(xs[i + 1]))}" y2="${fmt(vp.py(ys[i + 1]))}" ` +
      `stroke="${color}" stroke-width="${fmt(width)}" stroke-linecap="round"/>`,
    );
  }
  return parts.join("");
}

export function text(
  x: number, y: number, content: string, size: number, anchor = "middle",
): string {
  return (
    `<text x="${fmt(x)}" y="${fmt(y)}" font-family="monospace" ` +
    `font-size="${size}" text-anchor="${anchor}" fill="#222">${content}</text>`
  );
}

export function star(cx: number, cy: number, r: number, color: string): string {
  const pts: string[] = [];
  for (let k = 0; k < 10; k++) {
    const rad = k % 2 === 0 ? r : 0.4 * r;
    const ang = -Math.PI / 2 + (k * Math.PI) / 5;
    pts.push(`${fmt(cx + rad * Math.cos(ang))},${fmt(cy + rad * Math.sin(ang))}`);
  }
  return `<polygon points="${pts.join(" ")}" fill="${color}"/>`;
}

export function axisTicks(
  vp: Viewport, xTicks: number[], yTicks: number[],
  left: number, top: number, width: number, height: number,
  xLabel: string, yLabel: string,
): string {
  const parts: string[] = [];
  parts.push(
    `<rect x="${fmt(left)}" y="${fmt(top)}" width="${fmt(width)}" height="${fmt(height)}" ` +
    `fill="none" stroke="#999" stroke-width="1"/>`,
  );
  for (const tx of xTicks) {
    const x = vp.px(tx);
    parts.push(
      `<line x1="${fmt(x)}" y1="${fmt(top + height)}" x2="${fmt(x)}" y2="${fmt(top + height + 4)}" stroke="#999"/>`,
    );
    parts.push(text(x, top + height + 16, String(tx), 10));
  }
  for (const ty of yTicks) {
    const y = vp.py(ty);
    parts.push(
      `<line x1="${fmt(left - 4)}" y1="${fmt(y)}" x2="${fmt(left)}" y2="${fmt(y)}" stroke="#999"/>`,
    );
    parts.push(text(left - 8, y + 3, String(ty), 10, "end"));
  }
  parts.push(text(left + width / 2, top + height + 30, xLabel, 11));
  parts.push(text(left - 40, top - 8, yLabel, 11, "start"));
  return parts.join("");
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">` +
    `<rect width="${width}" height="${height}" fill="white"/>` +
    body +
    `</svg>\n`
  );
}
