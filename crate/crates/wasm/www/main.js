import init, { sigmaXSignals, liouvillianSpectrum, blochOrbits } from "./pkg/liouville_sync_wasm.js";

const COLORS = ["#555", "#c0392b", "#2471a3"];
const N = 801;

const value = (id) => Number(document.getElementById(id).value);
const params = () => [value("delta"), value("b"), value("gamma")];
const status = (msg) => { document.getElementById("status").textContent = msg; };

function frame(canvas, xr, yr) {
  const ctx = canvas.getContext("2d");
  const pad = 36;
  const sx = (x) => pad + ((x - xr[0]) / (xr[1] - xr[0])) * (canvas.width - 2 * pad);
  const sy = (y) => canvas.height - pad - ((y - yr[0]) / (yr[1] - yr[0])) * (canvas.height - 2 * pad);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#bbb";
  ctx.strokeRect(pad, pad, canvas.width - 2 * pad, canvas.height - 2 * pad);
  ctx.fillStyle = "#666";
  ctx.font = "11px sans-serif";
  ctx.fillText(xr[0].toFixed(2), pad, canvas.height - pad + 14);
  ctx.fillText(xr[1].toFixed(2), canvas.width - pad - 24, canvas.height - pad + 14);
  ctx.fillText(yr[1].toFixed(2), 2, pad + 4);
  ctx.fillText(yr[0].toFixed(2), 2, canvas.height - pad);
  return { ctx, sx, sy };
}

function range(xs) {
  let lo = Math.min(...xs), hi = Math.max(...xs);
  if (hi - lo < 1e-12) { lo -= 1; hi += 1; }
  const m = 0.05 * (hi - lo);
  return [lo - m, hi + m];
}

function polyline(ctx, xs, ys, sx, sy, color) {
  ctx.strokeStyle = color;
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
  ctx.stroke();
}

function run(fn) {
  status("");
  try { fn(); } catch (e) { status(String(e.message ?? e)); }
}

function drawSignals() {
  const data = sigmaXSignals(...params(), value("tend"), N, value("seed"));
  const t = data.subarray(0, N);
  const series = [1, 2, 3].map((k) => data.subarray(k * N, (k + 1) * N));
  const { ctx, sx, sy } = frame(document.getElementById("c-signals"), [t[0], t[N - 1]], range(series.flatMap((s) => Array.from(s))));
  series.forEach((s, k) => polyline(ctx, Array.from(t), Array.from(s), sx, sy, COLORS[k]));
}

function drawSpectrum() {
  const z = liouvillianSpectrum(...params());
  const re = [], im = [];
  for (let i = 0; i < z.length; i += 2) { re.push(z[i]); im.push(z[i + 1]); }
  const { ctx, sx, sy } = frame(document.getElementById("c-spectrum"), range(re), range(im));
  re.forEach((x, i) => {
    ctx.fillStyle = Math.abs(x) < 1e-9 ? "#c0392b" : "#2471a3";
    ctx.beginPath();
    ctx.arc(sx(x), sy(im[i]), 3, 0, 2 * Math.PI);
    ctx.fill();
  });
}

function drawBloch() {
  const n = 400;
  const o = blochOrbits(...params(), value("tend"), n, value("seed"));
  const { ctx, sx, sy } = frame(document.getElementById("c-bloch"), [-1.05, 1.05], [-1.05, 1.05]);
  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.arc(sx(0), sy(0), sx(1) - sx(0), 0, 2 * Math.PI);
  ctx.stroke();
  for (let site = 0; site < 3; site++) {
    const xs = [], zs = [];
    for (let i = 0; i < n; i++) {
      const base = 3 * (site * n + i);
      xs.push(o[base]);
      zs.push(o[base + 2]);
    }
    polyline(ctx, xs, zs, sx, sy, COLORS[site]);
  }
}

await init();
document.getElementById("signals").onclick = () => run(drawSignals);
document.getElementById("spectrum").onclick = () => run(drawSpectrum);
document.getElementById("bloch").onclick = () => run(drawBloch);
run(drawSignals);
