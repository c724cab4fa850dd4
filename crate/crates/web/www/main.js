import init, { solveNested, noiseCurve, deltaScan } from "./pkg/ecfit_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const seed = (id) => BigInt(Math.max(0, Math.floor(num(id))));

function fail(out, e) {
  out.className = "out err";
  out.textContent = String(e.message ?? e);
}

// Scatter plot with optional curve, axes in data units (log or linear).
function plot(canvas, series, opts) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 48;
  ctx.clearRect(0, 0, w, h);
  const tx = opts.logx ? Math.log10 : (v) => v;
  const ty = opts.logy ? Math.log10 : (v) => v;
  const pts = series.flatMap((s) => s.points).filter(([x, y]) => isFinite(tx(x)) && isFinite(ty(y)));
  const xs = pts.map(([x]) => tx(x));
  const ys = pts.map(([, y]) => ty(y));
  const [x0, x1] = opts.xrange ?? [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = opts.yrange ?? [Math.min(...ys), Math.max(...ys)];
  const sx = (v) => pad + ((tx(v) - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (v) => h - pad - ((ty(v) - y0) / (y1 - y0 || 1)) * (h - 2 * pad);

  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.fillText(opts.xlabel, w / 2 - 40, h - 12);
  ctx.save();
  ctx.translate(14, h / 2 + 40);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(opts.ylabel, 0, 0);
  ctx.restore();
  const fmt = (v, log) => (log ? `1e${v.toFixed(1)}` : v.toFixed(2));
  ctx.fillText(fmt(x0, opts.logx), pad, h - pad + 14);
  ctx.fillText(fmt(x1, opts.logx), w - pad - 30, h - pad + 14);
  ctx.fillText(fmt(y0, opts.logy), 4, h - pad);
  ctx.fillText(fmt(y1, opts.logy), 4, pad + 4);

  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (s.line) {
      ctx.beginPath();
      s.points.forEach(([x, y], i) => (i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
      ctx.stroke();
    }
    for (const [x, y, err] of s.points) {
      if (!s.line) {
        ctx.beginPath();
        ctx.arc(sx(x), sy(y), 3, 0, 2 * Math.PI);
        ctx.fill();
      }
      if (err) {
        ctx.beginPath();
        ctx.moveTo(sx(x), sy(y - err));
        ctx.lineTo(sx(x), sy(y + err));
        ctx.stroke();
      }
    }
  }
}

function runSolve() {
  const out = $("s-out");
  out.className = "out";
  try {
    const s = solveNested(num("s-c"), num("s-p"), num("s-b"), seed("s-s"), num("s-d"));
    const [a, b, r] = s.trend;
    const d = s.diversification;
    const ineff = s.inefficiency;
    const fit = [...d].sort((p, q) => p - q).map((x) => [x, a * x ** b]);
    out.textContent =
      `converged in ${s.iterations} iterations\n` +
      `I ≈ ${a.toFixed(4)} · D^${b.toFixed(4)}   (r = ${r.toFixed(4)})\n` +
      `ρ(J) = ${s.spectralRadius.toFixed(4)}   Tr(J²) = ${s.traceJ2.toFixed(4)}   ` +
      `max fitness ${Math.max(...s.fitness).toFixed(3)}`;
    plot($("s-plot"), [
      { color: "#1f5fa8", points: Array.from(d, (x, i) => [x, ineff[i]]) },
      { color: "#111", line: true, points: fit },
    ], { logx: true, logy: true, xlabel: "diversification D", ylabel: "inefficiency I" });
    s.free();
  } catch (e) {
    fail(out, e);
  }
}

function runNoise() {
  const out = $("n-out");
  out.className = "out";
  out.textContent = "running…";
  setTimeout(() => {
    try {
      const r = noiseCurve(num("n-c"), num("n-p"), seed("n-s"), num("n-t"), num("n-k"));
      const etas = r.etas, mean = r.mean, sd = r.sd;
      out.textContent = Array.from(etas, (e, i) => `η = ${e.toFixed(2)}  ρs = ${mean[i].toFixed(4)} ± ${sd[i].toFixed(4)}`)
        .join("\n") + (r.skipped ? `\n${r.skipped} trials skipped` : "");
      plot($("n-plot"), [
        { color: "#a83a1f", line: true, points: Array.from(etas, (e, i) => [e, mean[i]]) },
        { color: "#a83a1f", points: Array.from(etas, (e, i) => [e, mean[i], sd[i]]) },
      ], { xrange: [0, 1], yrange: [-1, 1], xlabel: "flip probability η", ylabel: "Spearman ρs" });
      r.free();
    } catch (e) {
      fail(out, e);
    }
  }, 10);
}

function runScan() {
  const out = $("d-out");
  out.className = "out";
  try {
    const deltas = new Float64Array([1, 1e-1, 1e-2, 1e-3, 1e-4]);
    const dev = deltaScan(num("d-c"), num("d-p"), seed("d-s"), deltas);
    out.textContent = "δ          max |F̃(δ) − F̃(0)| / F̃(0)\n" +
      Array.from(deltas, (d, i) => `${d.toExponential(0).padEnd(10)} ${dev[i].toExponential(3)}`).join("\n");
  } catch (e) {
    fail(out, e);
  }
}

await init();
$("s-run").onclick = runSolve;
$("n-run").onclick = runNoise;
$("d-run").onclick = runScan;
runSolve();
