import init, { recoveryDemo, discCurve, phaseGrid } from "./pkg/rpm_web.js";

const $ = (id) => document.getElementById(id);

function values(formId) {
  const out = {};
  for (const el of $(formId).querySelectorAll("input, select")) out[el.name] = el.value;
  return out;
}

function status(id, text, isError = false) {
  const el = $(id);
  el.textContent = text;
  el.className = isError ? "status err" : "status";
}

// Runs `work` after the browser has painted the "running" message.
function later(id, work) {
  status(id, "running…");
  setTimeout(() => {
    try {
      work();
    } catch (e) {
      status(id, String(e.message ?? e), true);
    }
  }, 20);
}

function axes(ctx, w, h, pad, yMin, yMax, label) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(yMax.toPrecision(3), 2, pad / 2 + 8);
  ctx.fillText(yMin.toPrecision(3), 2, h - pad);
  ctx.fillText(label, pad + 6, pad / 2 + 8);
}

function bars(canvas, series, label) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 36;
  const all = series.flatMap((s) => s.data);
  let yMax = Math.max(1e-12, ...all.map(Math.abs));
  const yMin = all.some((v) => v < 0) ? -yMax : 0;
  axes(ctx, w, h, pad, yMin, yMax, label);
  const n = series[0].data.length;
  const slot = (w - 1.5 * pad) / n;
  const bw = Math.max(1, slot / (series.length + 0.5));
  const y = (v) => h - pad - ((v - yMin) / (yMax - yMin)) * (h - 1.5 * pad);
  series.forEach((s, k) => {
    ctx.fillStyle = s.color;
    s.data.forEach((v, i) => {
      const x = pad + i * slot + k * bw;
      ctx.fillRect(x, Math.min(y(v), y(0)), bw, Math.abs(y(v) - y(0)) || 1);
    });
    ctx.fillText(s.name, w - 140, pad / 2 + 12 + 13 * k);
  });
}

function runRecovery() {
  const v = values("rec-form");
  later("rec-status", () => {
    const r = JSON.parse(
      recoveryDemo(+v.n, +v.m, +v.delta, v.model, +v.anchor, +v.kappa, v.formulation, BigInt(v.seed)),
    );
    const series = [{ name: "x0", data: r.x0, color: "#1f4e99" }];
    if (r.x_hat.length) series.push({ name: "x̂", data: r.x_hat, color: "#e08a1e" });
    bars($("rec-x"), series, "signal entries");
    const negEta = r.eta.map((e) => Math.max(-e, 0));
    const eSeries = [{ name: "max(−η, 0)", data: negEta, color: "#9a9a9a" }];
    if (r.e_hat.length) eSeries.push({ name: "ê", data: r.e_hat, color: "#c0392b" });
    bars($("rec-e"), eSeries, "slack per measurement");
    const fmt = (x) => (x === null ? "n/a" : x.toExponential(2));
    status(
      "rec-status",
      `status ${r.status}, success ${r.success}, rel. error ${fmt(r.rel_err_signed)}, ` +
        `slack residual ${fmt(r.slack_residual)}, λ ${fmt(r.lambda)}, ${r.iterations} pivots, ` +
        `${r.support.length} corrupted`,
    );
  });
}

function runDisc() {
  const v = values("disc-form");
  later("disc-status", () => {
    const r = JSON.parse(discCurve(+v.points, +v.samples, BigInt(v.seed)));
    const canvas = $("disc");
    const ctx = canvas.getContext("2d");
    const { width: w, height: h } = canvas;
    const pad = 36;
    const ys = r.points.flatMap((p) => [p.closed_form, p.mc_disc, p.mc_box]);
    const yMin = Math.min(...ys) - 0.02;
    const yMax = Math.max(...ys) + 0.02;
    axes(ctx, w, h, pad, yMin, yMax, "E vs θ ∈ [0, π]");
    const x = (t) => pad + (t / Math.PI) * (w - 1.5 * pad);
    const y = (v) => h - pad - ((v - yMin) / (yMax - yMin)) * (h - 1.5 * pad);
    ctx.strokeStyle = "#1f4e99";
    ctx.beginPath();
    r.points.forEach((p, i) => (i ? ctx.lineTo : ctx.moveTo).call(ctx, x(p.theta), y(p.closed_form)));
    ctx.stroke();
    ctx.setLineDash([4, 4]);
    ctx.strokeStyle = "#888";
    ctx.beginPath();
    ctx.moveTo(pad, y(r.floor));
    ctx.lineTo(w - pad / 2, y(r.floor));
    ctx.stroke();
    ctx.setLineDash([]);
    for (const [key, color] of [["mc_disc", "#e08a1e"], ["mc_box", "#2e8b57"]]) {
      ctx.fillStyle = color;
      for (const p of r.points) ctx.fillRect(x(p.theta) - 2, y(p[key]) - 2, 4, 4);
    }
    ctx.fillStyle = "#444";
    ctx.fillText("line: closed form   orange: MC disc   green: MC box   dashed: minimum", pad + 6, h - 8);
    const gap = Math.max(...r.points.map((p) => Math.abs(p.mc_disc - p.closed_form)));
    status("disc-status", `max |MC disc − closed form| = ${gap.toExponential(2)}, minimum ${r.floor.toFixed(6)}`);
  });
}

function runGrid() {
  const v = values("grid-form");
  later("grid-status", () => {
    const r = JSON.parse(phaseGrid(+v.n, v.ratios, v.deltas, +v.trials, BigInt(v.seed)));
    const canvas = $("grid");
    const ctx = canvas.getContext("2d");
    const { width: w, height: h } = canvas;
    const left = 60, bottom = 40, top = 10;
    const cw = (w - left - 10) / r.ratios.length;
    const ch = (h - bottom - top) / r.deltas.length;
    ctx.clearRect(0, 0, w, h);
    ctx.font = "12px sans-serif";
    for (const c of r.cells) {
      const i = r.ratios.indexOf(c.ratio);
      const j = r.deltas.indexOf(c.delta);
      const t = c.success_rate;
      ctx.fillStyle = `rgb(${247 - 239 * t}, ${251 - 203 * t}, ${255 - 148 * t})`;
      const px = left + i * cw;
      const py = top + (r.deltas.length - 1 - j) * ch;
      ctx.fillRect(px, py, cw - 1, ch - 1);
      ctx.fillStyle = t > 0.55 ? "#fff" : "#000";
      ctx.fillText(t.toFixed(2), px + cw / 2 - 12, py + ch / 2 + 4);
    }
    ctx.fillStyle = "#444";
    r.ratios.forEach((q, i) => ctx.fillText(String(q), left + i * cw + cw / 2 - 6, h - bottom + 16));
    r.deltas.forEach((d, j) => ctx.fillText(String(d), 10, top + (r.deltas.length - 1 - j) * ch + ch / 2 + 4));
    ctx.fillText("m/n", left + (w - left) / 2 - 10, h - 6);
    ctx.fillText("δ", 10, top + 12);
    status("grid-status", `${r.cells.length} cells`);
  });
}

await init();
$("rec-run").addEventListener("click", runRecovery);
$("disc-run").addEventListener("click", runDisc);
$("grid-run").addEventListener("click", runGrid);
runRecovery();
