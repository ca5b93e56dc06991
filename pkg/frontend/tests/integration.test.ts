// Full review loop against the real backend: start the service, upload the
// 24227 fixture, crop-decode, edit one digit, submit, and watch the
// corrections file grow a manifest-compatible row carrying both codes.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, existsSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { dragToCrop, fitImage } from "../src/geometry.js";
import {
  codeEdited,
  correctionPayload,
  cropChanged,
  decodeStarted,
  decodeSucceeded,
  imageLoaded,
  initialState,
  submitted,
} from "../src/state.js";

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess | null = null;
let workDir: string;
let fixturePath: string;
let correctionsPath: string;

async function waitForHealth(deadlineMs: number): Promise<void> {
  const until = Date.now() + deadlineMs;
  while (Date.now() < until) {
    try {
      const resp = await fetch(`${BASE}/healthz`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("service did not become healthy");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "slabcode-ui-"));
  fixturePath = join(workDir, "slab_24227.png");
  correctionsPath = join(workDir, "corrections.csv");

  execFileSync("python3", [
    "-c",
    [
      "from slabcode.synthgen import SynthParams, generate_slab",
      "from slabcode.imgio import save_image",
      "img, _ = generate_slab('24227', SynthParams(noise_seed=7))",
      `save_image(img, ${JSON.stringify(fixturePath)})`,
    ].join("\n"),
  ]);

  service = spawn(
    "python3",
    ["-m", "slabcode.cli", "serve", "--port", String(PORT), "--corrections-file", correctionsPath],
    { stdio: "ignore" },
  );
  await waitForHealth(30_000);
}, 60_000);

afterAll(() => {
  service?.kill("SIGTERM");
});

describe("review loop against the live service", () => {
  it("crop-decodes fixture 24227 and stores an edited correction", async () => {
    const api = new ApiClient(BASE);
    const legend = await api.fetchLegend();
    expect(legend.colors).toHaveLength(8);
    expect(legend.colors.map((c) => c.digit)).toEqual([0, 1, 2, 3, 4, 5, 6, 7]);

    const bytes = readFileSync(fixturePath);
    const blob = new Blob([bytes], { type: "image/png" });
    const imageW = 900;
    const imageH = 2600;

    // The operator loads the photo and drags a rectangle around the band
    // area (a generous margin keeps the top/bottom distance cue intact).
    let state = imageLoaded(initialState, "slab_24227.png", imageW, imageH);
    const view = fitImage(imageW, imageH, 960, 640);
    const [sx0, sy0] = [view.offsetX + 20 * view.scale, view.offsetY + 40 * view.scale];
    const [sx1, sy1] = [
      view.offsetX + (imageW - 20) * view.scale,
      view.offsetY + (imageH - 40) * view.scale,
    ];
    const crop = dragToCrop(view, sx0, sy0, sx1, sy1, imageW, imageH);
    expect(crop).not.toBeNull();
    state = cropChanged(state, crop);

    state = decodeStarted(state);
    const result = await api.decode(blob, state.imageName!, state.crop);
    state = decodeSucceeded(state, result);

    expect(state.editedCode).toBe("24227");
    expect(result.direction).toBe("down");
    expect(result.bands).toHaveLength(5);
    for (const band of result.bands) {
      expect(band.rect.x_min).toBeGreaterThanOrEqual(0);
      expect(band.rect.x_max).toBeLessThan(imageW);
      expect(band.rect.y_min).toBeGreaterThanOrEqual(0);
      expect(band.rect.y_max).toBeLessThan(imageH);
    }

    // The operator fixes one digit and submits; both codes travel together.
    state = codeEdited(state, "24237");
    await api.submitCorrection(correctionPayload(state));
    state = submitted(state);
    expect(state.phase).toBe("submitted");

    expect(existsSync(correctionsPath)).toBe(true);
    const lines = readFileSync(correctionsPath, "utf-8").trim().split("\n");
    expect(lines).toHaveLength(2); // header plus one row
    expect(lines[0].split(",")).toEqual([
      "path", "code", "crop_x", "crop_y", "crop_w", "crop_h", "anchor", "split",
      "machine_code", "timestamp",
    ]);
    const row = lines[1].split(",");
    expect(row[0]).toBe("slab_24227.png");
    expect(row[1]).toBe("24237"); // human-confirmed code
    expect(row[8]).toBe("24227"); // machine code
    expect(row[7]).toBe("train");
  }, 60_000);

  it("a crop with no bands yields the adjust-crop prompt state", async () => {
    const api = new ApiClient(BASE);
    const bytes = readFileSync(fixturePath);
    const blob = new Blob([bytes], { type: "image/png" });
    let state = imageLoaded(initialState, "slab_24227.png", 900, 2600);
    state = cropChanged(state, { x: 700, y: 2300, w: 180, h: 280 }); // bottom corner, no paint
    try {
      await api.decode(blob, state.imageName!, state.crop);
      expect.unreachable("expected a no-bands rejection");
    } catch (err) {
      const { NoBandsError } = await import("../src/api.js");
      expect(err).toBeInstanceOf(NoBandsError);
      const { decodeFoundNothing } = await import("../src/state.js");
      state = decodeFoundNothing(state);
      expect(state.message).toContain("adjust crop");
    }
  }, 30_000);
});
