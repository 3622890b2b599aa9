import init, { atomReport, evaluate, forkingReport } from "./pkg/probalg_wasm.js";

const presets = {
  fork4: {
    atoms: [
      { label: "p", weight: "3/8" }, { label: "q", weight: "1/8" },
      { label: "r", weight: "1/8" }, { label: "t", weight: "3/8" },
    ],
    events: { a1: ["p", "r"], a2: ["q", "t"], W: ["p", "q"] },
    subalgebras: { C: ["W"], A: ["a1"] },
  },
  xyz: {
    atoms: [
      { label: "x", weight: "1/2" }, { label: "y", weight: "1/4" }, { label: "z", weight: "1/4" },
    ],
    events: { A: ["x", "y"], X: ["x"] },
    subalgebras: { C: ["X"] },
  },
  coin: {
    atoms: [{ label: "h", weight: "1/2" }, { label: "t", weight: "1/2" }],
    events: { H: ["h"] },
    subalgebras: { P: ["H"] },
  },
};

const $ = (id) => document.getElementById(id);

function load(name) {
  $("structure").value = JSON.stringify(presets[name], null, 2);
}

function show(out, f) {
  const el = $(out);
  try {
    el.textContent = JSON.stringify(JSON.parse(f()), null, 2);
    el.className = "";
  } catch (e) {
    el.textContent = String(e);
    el.className = "error";
  }
}

await init();
load("fork4");
$("preset").onchange = (e) => load(e.target.value);
const doc = () => $("structure").value;
$("atoms-run").onclick = () => show("atoms-out", () => atomReport(doc(), $("atoms-event").value));
$("eval-run").onclick = () =>
  show("eval-out", () => evaluate(doc(), $("eval-formula").value, $("eval-binds").value));
$("fork-run").onclick = () =>
  show("fork-out", () =>
    forkingReport(doc(), $("fork-tuple").value, $("fork-base").value, $("fork-sub").value, $("fork-eps").value));
