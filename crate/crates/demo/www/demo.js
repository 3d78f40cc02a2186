import init, { scan_demo, critical_curve, limit_demo } from "./pkg/cmi_demo.js";

const $ = (id) => document.getElementById(id);

function frame(canvas, xr, yr) {
  const ctx = canvas.getContext("2d");
  const pad = 36;
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w, h);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(xr[0].toFixed(2), pad, canvas.height - pad + 14);
  ctx.fillText(xr[1].toFixed(2), pad + w - 24, canvas.height - pad + 14);
  ctx.fillText(yr[1].toFixed(2), 2, pad + 4);
  ctx.fillText(yr[0].toFixed(2), 2, pad + h);
  const px = (x) => pad + ((x - xr[0]) / (xr[1] - xr[0])) * w;
  const py = (y) => pad + h - ((y - yr[0]) / (yr[1] - yr[0])) * h;
  return { ctx, px, py, pad, h };
}

function line(f, xs, ys, color) {
  f.ctx.strokeStyle = color;
  f.ctx.beginPath();
  let started = false;
  xs.forEach((x, i) => {
    if (ys[i] === null) return;
    if (started) f.ctx.lineTo(f.px(x), f.py(ys[i]));
    else f.ctx.moveTo(f.px(x), f.py(ys[i]));
    started = true;
  });
  f.ctx.stroke();
}

function drawScan() {
  $("amp-out").textContent = Number($("amp").value).toFixed(2);
  let r;
  try {
    r = JSON.parse(scan_demo(Number($("amp").value), Number($("n").value), BigInt($("seed").value), Number($("sigma").value)));
  } catch (e) {
    $("scan-result").textContent = String(e);
    return;
  }
  const f = frame($("scan"), [0, 1], [-2.6, 2.6]);
  if (r.argmin) {
    f.ctx.fillStyle = "rgba(200, 60, 60, 0.15)";
    f.ctx.fillRect(f.px(r.argmin[0]), f.pad, Math.max(1, f.px(r.argmin[1]) - f.px(r.argmin[0])), f.h);
  }
  f.ctx.fillStyle = "rgba(30, 80, 160, 0.5)";
  const jitter = (i) => ((i * 2654435761) % 1000) / 1000 - 0.5;
  r.x.forEach((x, i) => f.ctx.fillRect(f.px(x) - 1, f.py(r.y[i] + 0.25 * jitter(i)) - 1, 2, 2));
  line(f, [0, 1], [0, 0], "#999");
  const fmt = (v) => (v === null || v === undefined ? "none" : v.toFixed(4));
  $("scan-result").innerHTML =
    `statistic ${fmt(r.statistic)} &nbsp; critical value ${fmt(r.cv)} &nbsp; &sigma;<sub>min</sub> ${fmt(r.sigma_min)} &nbsp; ` +
    (r.reject ? '<span class="reject">reject</span>' : "do not reject") +
    (r.argmin ? ` &nbsp; interval [${r.argmin[0].toFixed(3)}, ${r.argmin[1].toFixed(3)}]` : "") +
    (r.flags.length ? ` &nbsp; flags: ${r.flags.join(", ")}` : "");
}

function drawCurve() {
  let r;
  try {
    r = JSON.parse(critical_curve(Number($("alpha").value), 1, 12, 111));
  } catch (e) {
    return;
  }
  const ks = r.points.map((p) => p.k);
  const cv = r.points.map((p) => p.cv);
  const fo = r.points.map((p) => p.first_order);
  const top = Math.max(...cv.filter((v) => v !== null), ...fo);
  const f = frame($("curve"), [ks[0], ks[ks.length - 1]], [0, Math.ceil(top)]);
  line(f, ks, fo, "#999");
  line(f, ks, cv, "#1e50a0");
}

function drawLimit() {
  let r;
  try {
    r = JSON.parse(limit_demo(Number($("horizon").value), BigInt($("reps").value), 7n, 40));
  } catch (e) {
    $("limit-result").textContent = String(e);
    return;
  }
  const centers = r.density.map((_, i) => r.lo + (i + 0.5) * r.width);
  const top = Math.max(...r.density, ...r.gumbel) * 1.1;
  const f = frame($("limit"), [r.lo, r.lo + r.width * r.density.length], [0, top]);
  f.ctx.fillStyle = "rgba(30, 80, 160, 0.4)";
  r.density.forEach((d, i) => {
    const x0 = f.px(r.lo + i * r.width);
    f.ctx.fillRect(x0, f.py(d), f.px(r.lo + (i + 1) * r.width) - x0 - 1, f.py(0) - f.py(d));
  });
  line(f, centers, r.gumbel, "#b00");
  $("limit-result").textContent = `Kolmogorov-Smirnov distance to the Gumbel law: ${r.ks_distance.toFixed(4)}`;
}

await init();
for (const id of ["amp", "n", "seed", "sigma"]) $(id).addEventListener("input", drawScan);
$("alpha").addEventListener("input", drawCurve);
$("run-limit").addEventListener("click", drawLimit);
drawScan();
drawCurve();
