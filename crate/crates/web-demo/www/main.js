import init, { transform, diagnostics, probe } from "./pkg/syntaug_web_demo.js";

const $ = (id) => document.getElementById(id);

function rows(table, header, data) {
  table.replaceChildren();
  const head = table.insertRow();
  for (const h of header) {
    const th = document.createElement("th");
    th.textContent = h;
    head.appendChild(th);
  }
  for (const r of data) {
    const tr = table.insertRow();
    for (const v of r) tr.insertCell().textContent = v;
  }
}

function fail(el, e) {
  el.replaceChildren();
  el.className = "error";
  el.textContent = e.message ?? String(e);
}

function runTransform() {
  const out = $("transform-out");
  try {
    const t = JSON.parse(transform($("parse").value));
    out.className = "";
    rows(out, ["form", "sentence"], [
      ["original", t.original],
      ["inversion", t.inversion],
      ["passive", t.passive],
      ["passive of inversion", t.passive_inverted],
    ]);
  } catch (e) {
    fail(out, e);
  }
}

function runDiagnostics() {
  const out = $("diag-out");
  try {
    const d = JSON.parse(diagnostics(Number($("diag-n").value), Number($("diag-seed").value)));
    out.className = "";
    rows(out, ["heuristic", "gold", "subcase", "premise", "hypothesis"],
      d.map((r) => [r.heuristic, r.gold, r.subcase, r.premise, r.hypothesis]));
  } catch (e) {
    fail(out, e);
  }
}

function runProbe() {
  const out = $("probe-out");
  out.className = "";
  out.textContent = "training...";
  // Let the status paint before the synchronous run blocks the page.
  setTimeout(() => {
    try {
      const p = JSON.parse(probe(
        Number($("probe-runs").value),
        Number($("probe-seed").value),
        Number($("probe-rows").value),
        $("probe-tier").value,
      ));
      out.textContent = p.table;
    } catch (e) {
      fail(out, e);
    }
  }, 20);
}

await init();
$("transform").onclick = runTransform;
$("diagnose").onclick = runDiagnostics;
$("probe").onclick = runProbe;
runTransform();
