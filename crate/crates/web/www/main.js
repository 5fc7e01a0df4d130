import init, { sampleGaussian, estimate, truncationProfile } from "./pkg/wiener_density_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
let samples = null;

// Maps [-π, π] onto canvas pixels; y grows upward.
function toPixel(canvas, x, y) {
  const s = canvas.width / (2 * Math.PI);
  return [(x + Math.PI) * s, canvas.height - (y + Math.PI) * s];
}

function report(id, err) {
  $(id).textContent = err ? String(err.message ?? err) : "";
  $(id).className = err ? "error" : "";
}

function drawScatter(points) {
  const c = $("scatter");
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  g.fillStyle = "rgba(30, 80, 160, 0.55)";
  for (let i = 0; i < points.length; i += 2) {
    const [px, py] = toPixel(c, points[i], points[i + 1]);
    g.fillRect(px - 1.5, py - 1.5, 3, 3);
  }
}

function drawHeat(values, n) {
  const c = $("heat");
  const g = c.getContext("2d");
  const max = Math.max(...values);
  const cell = c.width / n;
  g.clearRect(0, 0, c.width, c.height);
  // grid is row-major with x2 fastest; x1 runs left to right, x2 bottom to top
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const v = values[i * n + j];
      const t = Math.max(0, v) / max;
      g.fillStyle = v < 0 ? "#c8d8e8" : `hsl(${(1 - t) * 240}, 80%, ${30 + 40 * t}%)`;
      g.fillRect(i * cell, c.height - (j + 1) * cell, Math.ceil(cell), Math.ceil(cell));
    }
  }
}

function showStats(est) {
  const [m1, m2] = est.mean;
  const [c11, c12, c22] = est.covariance;
  const f = (v) => v.toFixed(4);
  $("stats").innerHTML = `
    <tr><th></th><th>estimate</th></tr>
    <tr><td>μ₁</td><td>${f(m1)}</td></tr>
    <tr><td>μ₂</td><td>${f(m2)}</td></tr>
    <tr><td>Σ₁₁</td><td>${f(c11)}</td></tr>
    <tr><td>Σ₁₂</td><td>${f(c12)}</td></tr>
    <tr><td>Σ₂₂</td><td>${f(c22)}</td></tr>
    <tr><td>Newton steps</td><td>${est.iterations}</td></tr>
    <tr><td>residual</td><td>${est.residual.toExponential(2)}</td></tr>`;
}

function drawCurve(profile) {
  const c = $("curve");
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  const dist = [], bound = [];
  for (let i = 0; i < profile.length; i += 2) {
    dist.push(profile[i]);
    bound.push(profile[i + 1]);
  }
  const positive = [...dist, ...bound].filter((v) => v > 0);
  const lo = Math.log10(Math.min(...positive)), hi = Math.log10(Math.max(...positive));
  const pad = 30;
  const x = (k) => pad + (k / (dist.length - 1)) * (c.width - 2 * pad);
  const y = (v) => c.height - pad - ((Math.log10(v) - lo) / (hi - lo || 1)) * (c.height - 2 * pad);
  g.strokeStyle = "#999";
  g.strokeRect(pad, pad, c.width - 2 * pad, c.height - 2 * pad);
  g.fillStyle = "#444";
  g.fillText(`1e${hi.toFixed(1)}`, 2, pad + 4);
  g.fillText(`1e${lo.toFixed(1)}`, 2, c.height - pad);
  g.fillText("n", c.width / 2, c.height - 8);
  for (const [series, color] of [[bound, "#d07020"], [dist, "#2050a0"]]) {
    g.strokeStyle = color;
    g.beginPath();
    let started = false;
    series.forEach((v, k) => {
      if (v <= 0) return;
      if (started) g.lineTo(x(k), y(v));
      else g.moveTo(x(k), y(v));
      started = true;
    });
    g.stroke();
  }
  g.fillStyle = "#2050a0";
  g.fillText("distance", c.width - 95, pad + 14);
  g.fillStyle = "#d07020";
  g.fillText("bound", c.width - 95, pad + 28);
}

await init();

$("sample").onclick = () => {
  try {
    samples = sampleGaussian(num("mx"), num("my"), num("s11"), num("s12"), num("s22"), num("m"), BigInt(num("seed")));
    drawScatter(samples);
    $("estimate").disabled = false;
    report("sample-msg", null);
    $("sample-msg").textContent = `${samples.length / 2} samples`;
  } catch (e) {
    report("sample-msg", e);
  }
};

$("estimate").onclick = () => {
  try {
    const est = estimate(samples, num("n1"), num("n2"), num("grid"));
    drawHeat(est.grid, est.pointsPerAxis);
    showStats(est);
    report("estimate-msg", est.converged ? null : "solver did not converge");
    est.free();
  } catch (e) {
    report("estimate-msg", e);
  }
};

$("profile").onclick = () => {
  try {
    drawCurve(truncationProfile(num("amp"), num("decay"), num("radius")));
    report("profile-msg", null);
  } catch (e) {
    report("profile-msg", e);
  }
};

$("sample").click();
$("profile").click();
