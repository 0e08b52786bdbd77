import init, { simulate, decompose_table, verify } from "./pkg/dfalg_web.js";

const SERIES = [
  ["df_fidelity", "DF fidelity", "#1f77b4"],
  ["df_purity", "DF purity", "#2ca02c"],
  ["system_purity", "system purity", "#d62728"],
  ["leakage", "leakage", "#9467bd"],
  ["bath_entropy", "entanglement entropy", "#ff7f0e"],
];

const status = document.getElementById("status");

function fail(err) {
  status.textContent = String(err && err.message ? err.message : err);
}

function plot(report) {
  const canvas = document.getElementById("plot");
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 40;
  ctx.clearRect(0, 0, w, h);
  const t = report.times;
  const tmax = t[t.length - 1] || 1;
  let ymax = 1;
  for (const [key] of SERIES) for (const v of report[key]) ymax = Math.max(ymax, v);
  const x = (v) => pad + (v / tmax) * (w - 2 * pad);
  const y = (v) => h - pad - (v / ymax) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "12px system-ui";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
  for (let k = 0; k <= 4; k++) {
    const v = (ymax * k) / 4;
    ctx.fillText(v.toFixed(2), 4, y(v) + 4);
    const tv = (tmax * k) / 4;
    ctx.fillText(tv.toFixed(1), x(tv) - 8, h - pad + 16);
  }
  ctx.fillText("t", w - pad / 2 - 8, h - pad + 28);

  for (const [key, , color] of SERIES) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    report[key].forEach((v, i) => (i ? ctx.lineTo(x(t[i]), y(v)) : ctx.moveTo(x(t[i]), y(v))));
    ctx.stroke();
  }
  document.getElementById("legend").innerHTML = SERIES.map(
    ([, label, color]) => `<span><i style="background:${color}"></i>${label}</span>`
  ).join("");
}

function runSimulation(form) {
  const f = new FormData(form);
  const report = JSON.parse(
    simulate(
      f.get("scenario"),
      BigInt(f.get("seed")),
      Number(f.get("g")),
      Number(f.get("epsilon")),
      Number(f.get("tmax")),
      Number(f.get("steps"))
    )
  );
  plot(report);
  const s = report.summary;
  const lines = [
    `min DF fidelity   ${s.min_df_fidelity.toFixed(12)}`,
    `min DF purity     ${s.min_df_purity.toFixed(12)}`,
    `min system purity ${s.min_system_purity.toFixed(6)}`,
    `max leakage       ${s.max_leakage.toExponential(2)}`,
    ...report.assertions.map((a) => `${a.passed ? "pass" : "FAIL"}  ${a.name}: observed ${a.observed.toExponential(3)}, threshold ${a.threshold}`),
  ];
  document.getElementById("sim-summary").textContent = lines.join("\n");
}

function runDecompose(form) {
  const n = Number(new FormData(form).get("n"));
  const table = JSON.parse(decompose_table(n));
  document.querySelector("#dec-table tbody").innerHTML = table.blocks
    .map((b) => `<tr><td>${b.j}</td><td>${b.multiplicity}</td><td>${b.dimension}</td></tr>`)
    .join("");
}

function runVerify(form) {
  const f = new FormData(form);
  const tol = Number(f.get("tol"));
  const out = JSON.parse(verify(f.get("target"), tol));
  document.querySelector("#ver-table tbody").innerHTML = out.reports
    .map((r) => {
      const comm = r.df_condition_violation == null ? "–" : r.df_condition_violation.toExponential(1);
      const ok = r.max_su2_violation <= tol && r.casimir_deviation <= tol && (r.df_condition_violation == null || r.df_condition_violation <= tol) && (r.anticommutator_deviation == null || r.anticommutator_deviation <= tol);
      return `<tr><td>${r.set_name}</td><td>${r.max_su2_violation.toExponential(1)}</td><td>${r.casimir_value.toFixed(6)}</td><td>${r.claimed_casimir}</td><td>${comm}</td><td class="${ok ? "pass" : "fail"}">${ok ? "pass" : "fail"}</td></tr>`;
    })
    .join("");
}

function bind(id, fn) {
  const form = document.getElementById(id);
  form.addEventListener("submit", (e) => {
    e.preventDefault();
    status.textContent = "";
    try {
      fn(form);
    } catch (err) {
      fail(err);
    }
  });
  return form;
}

init()
  .then(() => {
    runSimulation(bind("sim-form", runSimulation));
    runDecompose(bind("dec-form", runDecompose));
    runVerify(bind("ver-form", runVerify));
  })
  .catch(fail);
