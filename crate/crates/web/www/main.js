// Build with: wasm-pack build crates/web --target web --out-dir www/pkg
import init, { density_curve, h_curve, argmax_histogram } from "./pkg/chernoff_web.js";

const $ = (id) => document.getElementById(id);
const canvas = $("plot");
const ctx = canvas.getContext("2d");

function status(msg) { $("status").textContent = msg; }

function range(from, to, n) {
  const h = (to - from) / (n - 1);
  return Array.from({ length: n }, (_, i) => from + h * i);
}

// series: [{ xs, ys, color, bars }]
function plot(series) {
  const W = canvas.width, H = canvas.height, pad = 40;
  ctx.clearRect(0, 0, W, H);
  const xs = series.flatMap((s) => s.xs), ys = series.flatMap((s) => Array.from(s.ys));
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  const y1 = Math.max(...ys) * 1.05 || 1;
  const px = (x) => pad + ((x - x0) / (x1 - x0)) * (W - 2 * pad);
  const py = (y) => H - pad - (y / y1) * (H - 2 * pad);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.fillText(x0.toFixed(2), pad, H - pad + 14);
  ctx.fillText(x1.toFixed(2), W - pad - 24, H - pad + 14);
  ctx.fillText(y1.toFixed(3), 4, pad + 4);
  for (const s of series) {
    if (s.bars) {
      ctx.fillStyle = s.color;
      const w = px(s.xs[1]) - px(s.xs[0]);
      s.xs.forEach((x, i) => ctx.fillRect(px(x) - w / 2, py(s.ys[i]), w - 1, py(0) - py(s.ys[i])));
    } else {
      ctx.strokeStyle = s.color;
      ctx.lineWidth = 2;
      ctx.beginPath();
      s.xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(s.ys[i])) : ctx.moveTo(px(x), py(s.ys[i]))));
      ctx.stroke();
    }
  }
}

function timed(label, fn) {
  status(label + "...");
  setTimeout(() => {
    const t0 = performance.now();
    try {
      fn();
      status(`${label}: ${((performance.now() - t0) / 1000).toFixed(2)} s`);
    } catch (e) {
      status(`${label} failed: ${e.message ?? e}`);
    }
  }, 10);
}

await init();

$("draw-density").onclick = () => timed("density", () => {
  const which = $("which").value;
  let from = +$("from").value;
  const to = +$("to").value, n = +$("n").value;
  if (which === "max" && from <= 0) from = 0.01;
  plot([{ xs: range(from, to, n), ys: density_curve(which, from, to, n), color: "#1f5fa8" }]);
});

$("draw-h").onclick = () => timed("h kernel", () => {
  const x = +$("hx").value, tmax = +$("ht").value, n = 150;
  const ts = range(0, tmax, n + 1).slice(1);
  plot([{ xs: ts, ys: h_curve(x, tmax, n), color: "#a83a1f" }]);
});

$("draw-mc").onclick = () => timed("simulation", () => {
  const width = 0.05, bins = 100, half = (bins * width) / 2;
  const mids = Array.from({ length: bins }, (_, i) => -half + (i + 0.5) * width);
  const hist = argmax_histogram(+$("paths").value, BigInt($("seed").value), width, bins);
  const ts = range(-half, half, 201);
  plot([
    { xs: mids, ys: hist, color: "#c9d8ea", bars: true },
    { xs: ts, ys: density_curve("chernoff", -half, half, 201), color: "#1f5fa8" },
  ]);
});

status("ready");
