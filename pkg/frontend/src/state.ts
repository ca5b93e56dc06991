// Review-session state machine as pure transition functions, so the whole
// crop-decode-verify-submit loop is testable without a DOM.

import type { CropRect, DetectResponse } from "./types.js";

export type Phase = "empty" | "ready" | "decoding" | "decoded" | "no-bands" | "submitted" | "error";

export interface ReviewState {
  phase: Phase;
  imageName: string | null;
  imageSize: { w: number; h: number } | null;
  crop: CropRect | null;
  result: DetectResponse | null;
  editedCode: string;
  message: string;
}

export const initialState: ReviewState = {
  phase: "empty",
  imageName: null,
  imageSize: null,
  crop: null,
  result: null,
  editedCode: "",
  message: "load a slab photo to begin",
};

export function imageLoaded(state: ReviewState, name: string, w: number, h: number): ReviewState {
  return {
    ...initialState,
    phase: "ready",
    imageName: name,
    imageSize: { w, h },
    message: "drag a rectangle over the color bands",
  };
}

export function cropChanged(state: ReviewState, crop: CropRect | null): ReviewState {
  if (!state.imageSize) return state;
  return { ...state, crop, phase: "ready", result: null, editedCode: "" };
}

export function decodeStarted(state: ReviewState): ReviewState {
  return { ...state, phase: "decoding", message: "decoding..." };
}

export function decodeSucceeded(state: ReviewState, result: DetectResponse): ReviewState {
  return {
    ...state,
    phase: "decoded",
    result,
    editedCode: result.code,
    message:
      result.warnings.length > 0
        ? `decoded with warnings: ${result.warnings.join("; ")}`
        : `decoded reading ${result.direction === "down" ? "downward" : "upward"}`,
  };
}

export function decodeFoundNothing(state: ReviewState): ReviewState {
  return {
    ...state,
    phase: "no-bands",
    result: null,
    editedCode: "",
    message: "no code found - adjust crop",
  };
}

export function decodeFailed(state: ReviewState, reason: string): ReviewState {
  return { ...state, phase: "error", result: null, editedCode: "", message: reason };
}

/** Keep only digits 0-7; the code field silently drops anything else. */
export function codeEdited(state: ReviewState, raw: string): ReviewState {
  const cleaned = raw.replace(/[^0-7]/g, "");
  return { ...state, editedCode: cleaned };
}

export function canSubmit(state: ReviewState): boolean {
  return state.phase === "decoded" && state.editedCode.length > 0;
}

/**
 * The payload always carries both codes: an unedited submission is an
 * explicit confirmation that machine and human agree.
 */
export function correctionPayload(state: ReviewState, anchor: "auto" | "top" | "bottom" = "auto") {
  if (!state.result || !state.imageName) throw new Error("nothing to submit");
  return {
    image: state.imageName,
    machine_code: state.result.code,
    human_code: state.editedCode,
    crop: state.crop,
    anchor,
  };
}

export function submitted(state: ReviewState): ReviewState {
  const confirmed = state.result && state.editedCode === state.result.code;
  return {
    ...state,
    phase: "submitted",
    message: confirmed ? "confirmed and stored" : "correction stored",
  };
}
