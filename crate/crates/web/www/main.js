import init, { solve_plate, basis_function, convergence } from "./pkg/gekp_web.js";

const RES = 128;
const BASIS_NAMES = [
  "value at (0,0)", "value at (1,0)", "value at (0,1)",
  "∂x at (0,0)", "∂y at (0,0)", "∂x at (1,0)", "∂y at (1,0)",
  "∂x at (0,1)", "∂y at (0,1)", "value at barycenter",
];

const $ = (id) => document.getElementById(id);

// diverging blue-white-red map, symmetric about zero; NaN is transparent
function heatmap(canvas, values, res) {
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(res, res);
  const scale = values.reduce((m, v) => (Number.isNaN(v) ? m : Math.max(m, Math.abs(v))), 0) || 1;
  for (let j = 0; j < res; j++) {
    for (let i = 0; i < res; i++) {
      const v = values[j * res + i];
      // canvas rows go down, samples go up in y
      const k = 4 * ((res - 1 - j) * res + i);
      if (Number.isNaN(v)) continue;
      const t = v / scale;
      img.data[k] = t > 0 ? 255 : Math.round(255 * (1 + t));
      img.data[k + 1] = Math.round(255 * (1 - Math.abs(t)));
      img.data[k + 2] = t < 0 ? 255 : Math.round(255 * (1 - t));
      img.data[k + 3] = 255;
    }
  }
  ctx.putImageData(img, 0, 0);
}

function report(el, fn) {
  try {
    fn();
    el.classList.remove("error");
  } catch (e) {
    el.textContent = String(e);
    el.classList.add("error");
  }
}

function solve() {
  const info = $("solve-info");
  report(info, () => {
    const t0 = performance.now();
    const p = solve_plate(+$("example").value, +$("n").value, +$("iota").value, +$("eta").value, RES);
    const ms = performance.now() - t0;
    heatmap($("plate"), p.values(), p.res());
    info.textContent = `${p.dofs()} unknowns, ${ms.toFixed(0)} ms; ` +
      `‖w − w_h‖_{ι,h} = ${p.norm_iota_h().toExponential(3)}, |w − w_h|₁ = ${p.h1().toExponential(3)}`;
    p.free();
  });
}

function basis() {
  const i = +$("basis").value;
  $("basis-name").textContent = BASIS_NAMES[i];
  heatmap($("basis-canvas"), basis_function(i, RES), RES);
}

function study() {
  const table = $("study-table");
  report(table, () => {
    const result = JSON.parse(convergence(+$("study-iota").value, +$("study-eta").value, +$("study-n").value));
    const fmt = (v) => (v == null ? "-" : v.toExponential(3));
    const rows = result.rows.map((r) =>
      `<tr><td>${r.n}</td><td>${r.dofs}</td><td>${fmt(r.errors && r.errors.norm_iota_h)}</td>` +
      `<td>${r.rate_norm_iota_h == null ? "-" : r.rate_norm_iota_h.toFixed(2)}</td>` +
      `<td>${fmt(r.errors && r.errors.h1)}</td><td>${r.failure ?? ""}</td></tr>`);
    table.innerHTML = "<tr><th>n</th><th>unknowns</th><th>‖w − w_h‖_{ι,h}</th><th>rate</th><th>|w − w_h|₁</th><th></th></tr>" + rows.join("");
  });
}

await init();
$("solve").addEventListener("click", solve);
$("basis").addEventListener("input", basis);
$("study").addEventListener("click", study);
basis();
solve();
