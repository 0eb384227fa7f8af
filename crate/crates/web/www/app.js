import init, { fuse_rankings, rank_grid, reduce_grid } from "./pkg/netreduce_web.js";

const $ = (id) => document.getElementById(id);
const SVG = "http://www.w3.org/2000/svg";

function el(tag, attrs, text) {
  const node = document.createElementNS(SVG, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function table(target, header, rows) {
  const t = $(target);
  t.innerHTML = "";
  const head = t.insertRow();
  for (const h of header) head.appendChild(Object.assign(document.createElement("th"), { textContent: h }));
  for (const r of rows) {
    const row = t.insertRow();
    for (const c of r) row.insertCell().textContent = c;
  }
}

const fmt = (x) => (x === null ? "-" : Math.abs(x) >= 100 ? x.toFixed(1) : x.toFixed(4));

function guarded(errId, fn) {
  return () => {
    $(errId).textContent = "";
    try { fn(); } catch (e) { $(errId).textContent = String(e); }
  };
}

function showValue(input) {
  $(input + "-v").textContent = $(input).value;
}

// Grouped bars: combined belief per grade for each node, plus the residual.
function fusion() {
  showValue("f-w"); showValue("f-beta");
  const out = JSON.parse(fuse_rankings($("f-a").value, $("f-b").value, +$("f-w").value, +$("f-beta").value));
  const svg = $("f-chart");
  svg.innerHTML = "";
  const slots = out.grades + 1, group = 500 / out.nodes.length, bar = (group - 10) / slots;
  const colors = ["#4878a8", "#e0923a", "#5aa05a", "#c04848", "#8a6cb8", "#8c6450", "#d07ab8", "#7f7f7f", "#b8b83a", "#3ab8c8", "#246", "#642"];
  out.nodes.forEach((n, i) => {
    [...n.beliefs, n.uncertainty].forEach((b, g) => {
      const h = b * 180, x = 10 + i * group + g * bar;
      svg.appendChild(el("rect", { x, y: 190 - h, width: bar - 1, height: h, fill: g < out.grades ? colors[g % colors.length] : "#bbb" }));
    });
    svg.appendChild(el("text", { x: 10 + i * group, y: 205 }, `node ${n.node}`));
  });
  table("f-table", ["node", "u_min", "u_max", "u_avg"], out.nodes.map((n) => [n.node, fmt(n.u_min), fmt(n.u_max), fmt(n.u_avg)]));
}

function layout(buses) {
  const pos = new Map();
  buses.forEach((b, i) => {
    const a = (2 * Math.PI * i) / buses.length - Math.PI / 2;
    pos.set(b.id, [230 + 200 * Math.cos(a), 230 + 200 * Math.sin(a)]);
  });
  return pos;
}

function drawNetwork(svgId, net, pos, style) {
  const svg = $(svgId);
  svg.innerHTML = "";
  for (const br of net.branches) {
    const [x1, y1] = pos.get(br.from), [x2, y2] = pos.get(br.to);
    svg.appendChild(el("line", { x1, y1, x2, y2, stroke: style.edge ? style.edge(br) : "#999", "stroke-width": 1.2 }));
  }
  for (const b of net.buses) {
    const [cx, cy] = pos.get(b.id);
    const shape = b.generator
      ? el("rect", { x: cx - 7, y: cy - 7, width: 14, height: 14 })
      : el("circle", { cx, cy, r: 7 });
    shape.setAttribute("fill", style.fill(b));
    shape.setAttribute("stroke", "#333");
    svg.appendChild(shape);
    svg.appendChild(el("text", { x: cx + 9, y: cy + 4 }, b.id));
  }
}

// Rank 1 is drawn darkest; squares mark generator buses.
function ranking() {
  showValue("r-w"); showValue("r-beta");
  const out = JSON.parse(rank_grid(+$("r-w").value, +$("r-beta").value));
  const crit = out.criteria.find((c) => c.code === $("r-crit").value);
  const rank = new Map(crit.ids.map((id, i) => [id, crit.ranks[i]]));
  const n = crit.ids.length;
  drawNetwork("r-graph", out.network, layout(out.network.buses), {
    fill: (b) => `hsl(210, 60%, ${25 + (65 * (rank.get(b.id) - 1)) / (n - 1)}%)`,
  });
  const order = crit.ids.map((id, i) => [id, crit.scores[i], crit.ranks[i]]).sort((a, b) => a[2] - b[2]);
  table("r-table", ["rank", "bus", crit.name], order.map(([id, s, r]) => [r, id, fmt(s)]));
}

function reduction() {
  const out = JSON.parse(reduce_grid($("d-crit").value, +$("d-k").value, +$("d-x").value, $("d-retain").checked));
  const pos = layout(out.full.buses);
  const gone = new Set(out.eliminated);
  const eq = new Set(out.equivalents.map((e) => `${e.from}-${e.to}`));
  const merged = {
    buses: out.full.buses.map((b) => ({ ...b })),
    branches: out.reduced.branches,
  };
  drawNetwork("d-graph", merged, pos, {
    fill: (b) => (gone.has(b.id) ? "#fff" : "#4878a8"),
    edge: (br) => (eq.has(`${br.from}-${br.to}`) || eq.has(`${br.to}-${br.from}`) ? "#c04848" : "#999"),
  });
  table("d-table", ["metric", "full", "reduced", "rel. error"], out.errors.map((e) => [
    e.metric, fmt(out.metrics.full[e.metric]), fmt(out.metrics.reduced[e.metric]), e.error === null ? "-" : (100 * e.error).toFixed(2) + "%",
  ]));
  $("d-report").textContent = out.report;
}

await init();
const f = guarded("f-err", fusion), r = guarded("r-err", ranking), d = guarded("d-err", reduction);
for (const id of ["f-a", "f-b", "f-w", "f-beta"]) $(id).addEventListener("input", f);
for (const id of ["r-crit", "r-w", "r-beta"]) $(id).addEventListener("input", r);
for (const id of ["d-crit", "d-k", "d-x", "d-retain"]) $(id).addEventListener("input", d);
f(); r(); d();
