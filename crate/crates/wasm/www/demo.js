import init, { curve, slack_vs_p, cake } from "./pkg/traceineq_wasm.js";

const $ = (id) => document.getElementById(id);

function axes(ctx, w, h, xs, ys, xlabel) {
  const pad = 40;
  const [x0, x1] = xs, [y0, y1] = ys;
  const sx = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0 || 1)) * (h - 2 * pad);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(x0.toFixed(2), pad, h - pad + 14);
  ctx.fillText(x1.toFixed(2), w - pad - 24, h - pad + 14);
  ctx.fillText(xlabel, w / 2, h - pad + 14);
  ctx.fillText(y1.toPrecision(4), 2, pad + 4);
  ctx.fillText(y0.toPrecision(4), 2, h - pad);
  return { sx, sy };
}

function line(ctx, pts, color) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  pts.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
  ctx.stroke();
}

function range(values) {
  let lo = Math.min(...values), hi = Math.max(...values);
  if (hi - lo < 1e-12) { lo -= 1; hi += 1; }
  return [lo, hi];
}

function drawCurve() {
  const canvas = $("curve"), ctx = canvas.getContext("2d");
  const p = +$("cp").value;
  $("cpv").textContent = p.toFixed(2);
  $("curve-err").textContent = "";
  try {
    const n = 201;
    const ys = Array.from(curve(+$("ca").value, +$("cb").value, p, n));
    const { sx, sy } = axes(ctx, canvas.width, canvas.height, [-1, 1], range(ys), "t");
    line(ctx, ys.map((y, i) => [sx(-1 + (2 * i) / (n - 1)), sy(y)]), "#2a6");
  } catch (e) {
    $("curve-err").textContent = e;
  }
}

function drawSlack() {
  const canvas = $("slack"), ctx = canvas.getContext("2d");
  $("slack-err").textContent = "";
  try {
    const [p0, p1, n] = [1, 6, 101];
    const ys = Array.from(slack_vs_p($("sid").value, $("skind").value, +$("sdim").value,
                                     BigInt($("sseed").value), p0, p1, n));
    const [lo, hi] = range(ys.concat([0]));
    const { sx, sy } = axes(ctx, canvas.width, canvas.height, [p0, p1], [lo, hi], "p");
    ctx.setLineDash([4, 4]);
    line(ctx, [[sx(p0), sy(0)], [sx(p1), sy(0)]], "#b00");
    ctx.setLineDash([]);
    line(ctx, ys.map((y, i) => [sx(p0 + ((p1 - p0) * i) / (n - 1)), sy(y)]), "#26a");
  } catch (e) {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    $("slack-err").textContent = e;
  }
}

function drawCake() {
  const canvas = $("cake"), ctx = canvas.getContext("2d");
  const view = JSON.parse(cake(+$("ldim").value, BigInt($("lseed").value)));
  const lam = view.eigenvalues, c = view.coefficients, n = lam.length;
  const { sy } = axes(ctx, canvas.width, canvas.height, [0, n], [0, lam[0]], "j");
  const pad = 40, bw = (canvas.width - 2 * pad) / n;
  // Band k covers columns 0..=k, from height λ_{k+1} up to λ_k.
  for (let k = 0; k < n; k++) {
    const top = lam[k], bottom = top - c[k];
    ctx.fillStyle = `hsl(${(k * 360) / n}, 55%, 65%)`;
    ctx.fillRect(pad, sy(top), bw * (k + 1), sy(bottom) - sy(top));
  }
  $("cake-info").textContent =
    `λ = [${lam.map((x) => x.toFixed(3)).join(", ")}], ` +
    `c = [${c.map((x) => x.toFixed(3)).join(", ")}], ` +
    `reconstruction error ${view.reconstruction_error.toExponential(2)}`;
}

await init();
for (const id of ["ca", "cb", "cp"]) $(id).addEventListener("input", drawCurve);
for (const id of ["sid", "skind", "sdim", "sseed"]) $(id).addEventListener("input", drawSlack);
for (const id of ["ldim", "lseed"]) $(id).addEventListener("input", drawCake);
drawCurve();
drawSlack();
drawCake();
