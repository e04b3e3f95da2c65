// Browser wiring: draw on the canvas, submit, view contour + ranked photos.

import { createClient } from "./api.js";
import { SubmitController, type ResultPanelState } from "./controller.js";
import { StrokeSession } from "./strokes.js";

const CANVAS_SIZE = 256;
const SERVICE_URL = (window as any).SKETCHINVERT_SERVICE_URL ?? "http://127.0.0.1:8000";

document.body.innerHTML = `
  <h1>Sketch retrieval</h1>
  <div id="banner" style="display:none;background:#fdd;padding:6px 10px;margin-bottom:8px;"></div>
  <div style="display:flex;gap:24px;align-items:flex-start;">
    <div>
      <canvas id="pad" width="${CANVAS_SIZE}" height="${CANVAS_SIZE}" style="border:1px solid #444;touch-action:none;"></canvas>
      <div style="margin-top:6px;display:flex;gap:6px;">
        <button id="undo">Undo</button>
        <button id="redo">Redo</button>
        <button id="clear">Clear</button>
        <label>k <select id="k">${[5, 10, 20].map((v) => `<option${v === 10 ? " selected" : ""}>${v}</option>`).join("")}</select></label>
        <button id="submit" disabled>Search</button>
      </div>
    </div>
    <div>
      <h3>Synthesised contour</h3>
      <img id="contour" width="128" height="128" style="border:1px solid #999;image-rendering:pixelated;" />
    </div>
  </div>
  <h3>Results</h3>
  <div id="results" style="display:flex;flex-wrap:wrap;gap:10px;"></div>
`;

const canvas = document.getElementById("pad") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const session = new StrokeSession(CANVAS_SIZE);
const client = createClient(SERVICE_URL);

const banner = document.getElementById("banner")!;
const contourImg = document.getElementById("contour") as HTMLImageElement;
const resultsDiv = document.getElementById("results")!;
const submitBtn = document.getElementById("submit") as HTMLButtonElement;
const kSelect = document.getElementById("k") as HTMLSelectElement;

function render(state: ResultPanelState): void {
  banner.style.display = state.error ? "block" : "none";
  banner.textContent = state.error ?? "";
  submitBtn.disabled = session.isEmpty || state.pending;
  if (state.contourB64) {
    contourImg.src = `data:image/png;base64,${state.contourB64}`;
  }
  resultsDiv.innerHTML = "";
  for (const [rank, item] of state.results.entries()) {
    const card = document.createElement("div");
    card.style.textAlign = "center";
    const img = document.createElement("img");
    img.src = client.resolveUrl(item.thumbnail_url);
    img.width = 96;
    img.height = 96;
    img.style.border = "1px solid #999";
    const label = document.createElement("div");
    label.textContent = `#${rank + 1} ${item.id} (${item.distance.toFixed(4)})`;
    card.append(img, label);
    resultsDiv.append(card);
  }
}

const controller = new SubmitController(client, render);

function redraw(): void {
  ctx.fillStyle = "#fff";
  ctx.fillRect(0, 0, CANVAS_SIZE, CANVAS_SIZE);
  ctx.strokeStyle = "#000";
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  for (const stroke of session.strokes) {
    ctx.lineWidth = stroke.width;
    ctx.beginPath();
    const [first, ...rest] = stroke.points;
    ctx.moveTo(first.x, first.y);
    for (const p of rest) ctx.lineTo(p.x, p.y);
    ctx.stroke();
  }
  submitBtn.disabled = session.isEmpty;
}

let drawing = false;
canvas.addEventListener("pointerdown", (e) => {
  drawing = true;
  canvas.setPointerCapture(e.pointerId);
  const rect = canvas.getBoundingClientRect();
  session.begin(e.clientX - rect.left, e.clientY - rect.top, 3);
  redraw();
});
canvas.addEventListener("pointermove", (e) => {
  if (!drawing) return;
  const rect = canvas.getBoundingClientRect();
  session.extend(e.clientX - rect.left, e.clientY - rect.top);
  redraw();
});
canvas.addEventListener("pointerup", () => {
  drawing = false;
  session.end();
  redraw();
});

document.getElementById("undo")!.addEventListener("click", () => {
  session.undo();
  redraw();
});
document.getElementById("redo")!.addEventListener("click", () => {
  session.redo();
  redraw();
});
document.getElementById("clear")!.addEventListener("click", () => {
  session.clear();
  redraw();
});
submitBtn.addEventListener("click", () => {
  void controller.submit(session, Number(kSelect.value));
});

redraw();
