import init, { truth_table, preset, generate, simulate } from "./pkg/gatesim_wasm.js";

const $ = (id) => document.getElementById(id);

function showTruthTable() {
  const t = JSON.parse(truth_table($("tt-gate").value));
  const out = $("tt-out");
  if (!t.ok) {
    out.textContent = t.error;
    return;
  }
  const head = t.rows.length === 1
    ? `<tr><th>in</th>${t.values.map((v) => `<th>${v}</th>`).join("")}</tr>`
    : `<tr><th>a \\ b</th>${t.values.map((v) => `<th>${v}</th>`).join("")}</tr>`;
  const body = t.rows.map((row, i) => {
    const label = t.rows.length === 1 ? "out" : t.values[i];
    return `<tr><th>${label}</th>${row.map((v) => `<td>${v}</td>`).join("")}</tr>`;
  }).join("");
  out.innerHTML = `<table class="tt">${head}${body}</table>`;
}

function loadSources(s) {
  if (!s.ok) {
    $("sim-error").textContent = s.error;
    return;
  }
  $("src-net").value = s.netlist;
  $("src-dly").value = s.delays;
  $("src-stim").value = s.stimulus;
  run();
}

const LANE = 26;
const LABEL = 90;
const COLORS = { "0": "#1565c0", "1": "#2e7d32", X: "#c62828", Z: "#8e24aa" };

function drawWaves(sim) {
  const canvas = $("waves");
  const nets = sim.nets.slice(0, Math.max(1, Number($("max-nets").value) || 1));
  const dpr = window.devicePixelRatio || 1;
  const width = canvas.clientWidth;
  const height = LANE * nets.length + 24;
  canvas.width = width * dpr;
  canvas.height = height * dpr;
  canvas.style.height = `${height}px`;
  const g = canvas.getContext("2d");
  g.scale(dpr, dpr);
  g.clearRect(0, 0, width, height);
  g.font = "12px ui-monospace, monospace";
  const span = Math.max(1, sim.duration);
  const x = (t) => LABEL + ((width - LABEL - 10) * t) / span;

  nets.forEach((net, i) => {
    const top = 6 + i * LANE;
    const hi = top + 3;
    const lo = top + LANE - 9;
    const mid = (hi + lo) / 2;
    g.fillStyle = net.stimulus ? "#555" : "#000";
    g.fillText(net.name, 4, mid + 4);
    // Every net starts at X until its first transition.
    const segs = [];
    let t0 = 0;
    let v = "X";
    for (const [t, nv] of net.transitions) {
      if (t > t0) segs.push([t0, t, v]);
      t0 = t;
      v = nv;
    }
    segs.push([t0, span, v]);
    for (const [a, b, val] of segs) {
      const xa = x(a);
      const xb = x(b);
      g.strokeStyle = COLORS[val];
      g.fillStyle = COLORS[val];
      g.beginPath();
      if (val === "X") {
        g.globalAlpha = 0.25;
        g.fillRect(xa, hi, xb - xa, lo - hi);
        g.globalAlpha = 1;
        g.rect(xa, hi, xb - xa, lo - hi);
      } else {
        const y = val === "1" ? hi : val === "0" ? lo : mid;
        g.moveTo(xa, y);
        g.lineTo(xb, y);
      }
      g.stroke();
    }
    g.strokeStyle = "#999";
    g.beginPath();
    for (const [t] of net.transitions) {
      g.moveTo(x(t), hi);
      g.lineTo(x(t), lo);
    }
    g.stroke();
  });

  g.fillStyle = "#666";
  const axis = 6 + nets.length * LANE + 10;
  for (let k = 0; k <= 4; k++) {
    const t = Math.round((span * k) / 4);
    g.fillText(`${t} ps`, Math.min(x(t), width - 60), axis);
  }
}

function run() {
  $("sim-error").textContent = "";
  const sim = JSON.parse(simulate(
    $("src-net").value,
    $("src-dly").value,
    $("src-stim").value,
    Number($("page-len").value) || 16,
  ));
  if (!sim.ok) {
    $("sim-error").textContent = sim.error;
    return;
  }
  drawWaves(sim);
  const wcv = sim.wcv === null ? "n/a" : sim.wcv.toFixed(3);
  $("sim-stats").textContent = [
    `cells=${sim.cells} nets=${sim.nets_total} wcv=${wcv}`,
    `pages_used=${sim.pages_used} capacity_pages=${sim.capacity_pages}`,
    `waste_bytes=${sim.waste_bytes} waste_bound_bytes=${sim.waste_bound_bytes}`,
    `engines_agree=${sim.engines_agree}`,
  ].join("\n");
}

await init();
$("tt-gate").addEventListener("change", showTruthTable);
$("preset").addEventListener("change", () => loadSources(JSON.parse(preset($("preset").value))));
$("g-go").addEventListener("click", () => loadSources(JSON.parse(generate(
  Number($("g-cells").value),
  Number($("g-inputs").value),
  Number($("g-trans").value),
  $("g-skewed").checked,
  BigInt($("g-seed").value || 0),
))));
$("run").addEventListener("click", run);
window.addEventListener("resize", run);
showTruthTable();
loadSources(JSON.parse(preset($("preset").value)));
