import init, { geodesicPaths, riskCurves, compareEstimators } from "./pkg/codashrink_wasm.js";

const $ = (id) => document.getElementById(id);

function numbers(text) {
  const t = text.trim();
  if (t === "") return [];
  return t.split(/[,\s]+/).filter((s) => s !== "").map(Number);
}

function counts(text) {
  const v = numbers(text);
  if (v.some((x) => !Number.isInteger(x) || x < 0)) throw new Error("counts must be nonnegative integers");
  return new Uint32Array(v);
}

function guarded(errId, fn) {
  return () => {
    $(errId).textContent = "";
    try { fn(); } catch (e) { $(errId).textContent = e.message ?? String(e); }
  };
}

// Ternary layout: part 1 bottom-left, part 2 bottom-right, part 3 top.
const G = { x0: 30, y0: 350, side: 360 };
const H = G.side * Math.sqrt(3) / 2;

function toXY([a, b, c]) {
  return [G.x0 + b * G.side + c * G.side / 2, G.y0 - c * H];
}

function fromXY(x, y) {
  const c = (G.y0 - y) / H;
  const b = (x - G.x0 - c * G.side / 2) / G.side;
  return [1 - b - c, b, c];
}

function polyline(ctx, pts, color) {
  ctx.strokeStyle = color;
  ctx.beginPath();
  pts.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
  ctx.stroke();
}

function dot(ctx, [x, y], color) {
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(x, y, 4, 0, 2 * Math.PI);
  ctx.fill();
}

function drawGeodesics() {
  const q = numbers($("g-q").value);
  const tau = numbers($("g-tau").value);
  if (q.length !== 3) throw new Error("q needs three parts for the triangle");
  const steps = 100;
  const flat = geodesicPaths(new Float64Array(tau), new Float64Array(q), steps);
  const rows = [];
  for (let i = 0; i < flat.length; i += 3) rows.push(toXY([flat[i], flat[i + 1], flat[i + 2]]));
  const m = rows.slice(0, steps + 1);
  const e = rows.slice(steps + 1);

  const ctx = $("g-canvas").getContext("2d");
  ctx.clearRect(0, 0, 420, 380);
  ctx.lineWidth = 1;
  polyline(ctx, [toXY([1, 0, 0]), toXY([0, 1, 0]), toXY([0, 0, 1]), toXY([1, 0, 0])], "#888");
  ctx.fillStyle = "#444";
  ctx.fillText("x1", G.x0 - 20, G.y0 + 12);
  ctx.fillText("x2", G.x0 + G.side + 6, G.y0 + 12);
  ctx.fillText("x3", G.x0 + G.side / 2 - 6, G.y0 - H - 8);
  ctx.lineWidth = 2;
  polyline(ctx, m, "#1f5fbf");
  polyline(ctx, e, "#c0501f");
  dot(ctx, m[0], "#000");
  dot(ctx, m[steps], "#2a8a2a");
}

function drawRisk() {
  const steps = 200;
  const flat = riskCurves(counts($("r-n").value), new Float64Array(numbers($("r-tau").value)), steps);
  const k = steps + 1;
  const ls = flat.slice(0, k);
  const rm = flat.slice(k, 2 * k);
  const re = flat.slice(2 * k, 3 * k);
  const [lStar, lMin] = flat.slice(3 * k);

  const W = 560, Ht = 300, pad = 40;
  const all = [...rm, ...re];
  const lo = Math.min(0, ...all), hi = Math.max(...all);
  const sx = (l) => pad + l * (W - 2 * pad);
  const sy = (r) => Ht - pad - ((r - lo) / (hi - lo || 1)) * (Ht - 2 * pad);

  const ctx = $("r-canvas").getContext("2d");
  ctx.clearRect(0, 0, W, Ht);
  ctx.lineWidth = 1;
  polyline(ctx, [[pad, pad], [pad, Ht - pad], [W - pad, Ht - pad]], "#888");
  ctx.fillStyle = "#444";
  ctx.fillText("0", pad - 4, Ht - pad + 14);
  ctx.fillText("1", W - pad - 4, Ht - pad + 14);
  ctx.fillText("target weight", W / 2 - 30, Ht - 10);
  ctx.lineWidth = 2;
  polyline(ctx, ls.map((l, i) => [sx(l), sy(rm[i])]), "#1f5fbf");
  polyline(ctx, ls.map((l, i) => [sx(l), sy(re[i])]), "#c0501f");
  ctx.setLineDash([4, 4]);
  ctx.lineWidth = 1;
  polyline(ctx, [[sx(lStar), pad], [sx(lStar), Ht - pad]], "#1f5fbf");
  polyline(ctx, [[sx(lMin), pad], [sx(lMin), Ht - pad]], "#c0501f");
  ctx.setLineDash([]);

  $("r-info").innerHTML =
    `<span class="m">mixture risk, lambda* = ${lStar.toFixed(4)}</span>; ` +
    `<span class="e">Aitchison risk of the power transform, lambda_min = ${lMin.toFixed(4)} ` +
    `(beta* = ${(1 - lMin).toFixed(4)})</span>`;
}

function drawComparison() {
  const n = counts($("c-n").value);
  const flat = compareEstimators(n, new Float64Array(numbers($("c-tau").value)));
  const D = n.length;
  const names = ["empirical", "shrinkage", "exp. shrinkage"];
  const weights = ["", `lambda = ${flat[3 * D].toFixed(4)}`, `beta = ${flat[3 * D + 1].toFixed(4)}`];
  let html = "<table><tr><th></th>";
  for (let j = 0; j < D; j++) html += `<th>x${j + 1}</th>`;
  html += "<th>weight</th></tr>";
  names.forEach((name, r) => {
    html += `<tr><th>${name}</th>`;
    for (let j = 0; j < D; j++) html += `<td>${flat[r * D + j].toFixed(4)}</td>`;
    html += `<td>${weights[r]}</td></tr>`;
  });
  $("c-out").innerHTML = html + "</table>";
}

await init();

const geo = guarded("g-err", drawGeodesics);
const risk = guarded("r-err", drawRisk);
const comp = guarded("c-err", drawComparison);

$("g-q").addEventListener("input", geo);
$("g-tau").addEventListener("input", geo);
$("g-canvas").addEventListener("click", (ev) => {
  const rect = ev.target.getBoundingClientRect();
  const p = fromXY(ev.clientX - rect.left, ev.clientY - rect.top);
  if (p.some((x) => x < 0)) return;
  $("g-q").value = p.map((x) => x.toFixed(3)).join(", ");
  geo();
});
for (const id of ["r-n", "r-tau"]) $(id).addEventListener("input", risk);
for (const id of ["c-n", "c-tau"]) $(id).addEventListener("input", comp);

geo();
risk();
comp();
