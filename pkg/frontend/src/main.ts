// DOM wiring for the review tool. All logic lives in geometry/state/api;
// this file only moves pixels and events around.

import { ApiClient, NoBandsError } from "./api.js";
import { dragToCrop, fitImage, rectToScreen, toScreen, ViewTransform } from "./geometry.js";
import {
  ReviewState,
  canSubmit,
  codeEdited,
  correctionPayload,
  cropChanged,
  decodeFailed,
  decodeFoundNothing,
  decodeStarted,
  decodeSucceeded,
  imageLoaded,
  initialState,
  submitted,
} from "./state.js";
import type { ColorInfo } from "./types.js";

const api = new ApiClient(localStorage.getItem("slabcode-api") ?? "http://127.0.0.1:8077");

const canvas = document.getElementById("viewer") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const fileInput = document.getElementById("file") as HTMLInputElement;
const codeInput = document.getElementById("code") as HTMLInputElement;
const submitButton = document.getElementById("submit") as HTMLButtonElement;
const statusLine = document.getElementById("status") as HTMLElement;
const legendBox = document.getElementById("legend") as HTMLElement;

let state: ReviewState = initialState;
let image: HTMLImageElement | null = null;
let imageBlob: Blob | null = null;
let view: ViewTransform = { scale: 1, offsetX: 0, offsetY: 0 };
let legend: ColorInfo[] = [];
let dragStart: [number, number] | null = null;
let dragNow: [number, number] | null = null;
let inflight: AbortController | null = null;

function setState(next: ReviewState): void {
  state = next;
  statusLine.textContent = state.message;
  codeInput.value = state.editedCode;
  codeInput.disabled = state.phase !== "decoded";
  submitButton.disabled = !canSubmit(state);
  draw();
}

function swatchOf(name: string): string {
  return legend.find((c) => c.name === name)?.swatch ?? "#ffffff";
}

function draw(): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!image || !state.imageSize) return;
  view = fitImage(state.imageSize.w, state.imageSize.h, canvas.width, canvas.height);
  ctx.drawImage(
    image,
    view.offsetX,
    view.offsetY,
    state.imageSize.w * view.scale,
    state.imageSize.h * view.scale,
  );

  if (state.crop) {
    const [cx, cy] = toScreen(view, state.crop.x, state.crop.y);
    ctx.strokeStyle = "#00e5ff";
    ctx.lineWidth = 2;
    ctx.setLineDash([6, 4]);
    ctx.strokeRect(cx, cy, state.crop.w * view.scale, state.crop.h * view.scale);
    ctx.setLineDash([]);
  }

  if (dragStart && dragNow) {
    ctx.strokeStyle = "#ffee58";
    ctx.lineWidth = 1.5;
    ctx.strokeRect(
      Math.min(dragStart[0], dragNow[0]),
      Math.min(dragStart[1], dragNow[1]),
      Math.abs(dragNow[0] - dragStart[0]),
      Math.abs(dragNow[1] - dragStart[1]),
    );
  }

  if (state.result) {
    for (const band of state.result.bands) {
      const [x, y, w, h] = rectToScreen(view, band.rect);
      ctx.strokeStyle = swatchOf(band.color);
      ctx.lineWidth = 3;
      ctx.strokeRect(x, y, w, h);
      ctx.fillStyle = swatchOf(band.color);
      ctx.font = "bold 16px system-ui";
      ctx.fillText(String(band.digit), x + w + 6, y + h / 2 + 5);
    }
  }
}

async function runDecode(): Promise<void> {
  if (!imageBlob || !state.imageName) return;
  inflight?.abort();
  inflight = new AbortController();
  const mine = inflight;
  setState(decodeStarted(state));
  try {
    const result = await api.decode(imageBlob, state.imageName, state.crop, mine.signal);
    if (mine !== inflight) return; // a newer request superseded this one
    setState(decodeSucceeded(state, result));
  } catch (err) {
    if (mine !== inflight || (err instanceof DOMException && err.name === "AbortError")) return;
    if (err instanceof NoBandsError) {
      setState(decodeFoundNothing(state));
    } else {
      setState(decodeFailed(state, `decode failed: ${String(err)}`));
    }
  }
}

fileInput.addEventListener("change", () => {
  const file = fileInput.files?.[0];
  if (!file) return;
  imageBlob = file;
  const url = URL.createObjectURL(file);
  const img = new Image();
  img.onload = () => {
    image = img;
    setState(imageLoaded(state, file.name, img.naturalWidth, img.naturalHeight));
    void runDecode();
  };
  img.src = url;
});

canvas.addEventListener("pointerdown", (ev) => {
  if (!image) return;
  canvas.setPointerCapture(ev.pointerId);
  dragStart = [ev.offsetX, ev.offsetY];
  dragNow = dragStart;
});

canvas.addEventListener("pointermove", (ev) => {
  if (!dragStart) return;
  dragNow = [ev.offsetX, ev.offsetY];
  draw();
});

canvas.addEventListener("pointerup", (ev) => {
  if (!dragStart || !state.imageSize) return;
  const crop = dragToCrop(
    view,
    dragStart[0],
    dragStart[1],
    ev.offsetX,
    ev.offsetY,
    state.imageSize.w,
    state.imageSize.h,
  );
  dragStart = dragNow = null;
  setState(cropChanged(state, crop));
  void runDecode();
});

codeInput.addEventListener("input", () => {
  setState(codeEdited(state, codeInput.value));
});

submitButton.addEventListener("click", async () => {
  if (!canSubmit(state)) return;
  try {
    await api.submitCorrection(correctionPayload(state));
    setState(submitted(state));
  } catch (err) {
    setState(decodeFailed(state, `submit failed: ${String(err)}`));
  }
});

async function boot(): Promise<void> {
  try {
    const payload = await api.fetchLegend();
    legend = payload.colors;
    legendBox.innerHTML = "";
    for (const color of legend) {
      const item = document.createElement("span");
      item.className = "legend-item";
      const chip = document.createElement("span");
      chip.className = "chip";
      chip.style.background = color.swatch;
      item.append(chip, ` ${color.digit} ${color.name}`);
      legendBox.append(item);
    }
  } catch {
    statusLine.textContent = "service offline - start it with: slabcode serve";
    legendBox.textContent = "";
    return;
  }
  setState(initialState);
}

void boot();
