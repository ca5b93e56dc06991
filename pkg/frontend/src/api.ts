// Thin typed client for the three review endpoints.

import { cropField } from "./geometry.js";
import type { CorrectionRecord, CropRect, DetectResponse, LegendResponse } from "./types.js";

export class NoBandsError extends Error {
  constructor(public maskCounts: Record<string, number>) {
    super("no bands detected");
  }
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = fetch,
  ) {}

  async fetchLegend(): Promise<LegendResponse> {
    const resp = await this.fetchFn(`${this.baseUrl}/api/config`);
    if (!resp.ok) throw new ApiError(resp.status, `config request failed (${resp.status})`);
    return (await resp.json()) as LegendResponse;
  }

  async decode(
    image: Blob,
    fileName: string,
    crop: CropRect | null,
    signal?: AbortSignal,
  ): Promise<DetectResponse> {
    const form = new FormData();
    form.append("image", image, fileName);
    if (crop) form.append("crop", cropField(crop));
    const resp = await this.fetchFn(`${this.baseUrl}/api/decode`, {
      method: "POST",
      body: form,
      signal,
    });
    if (resp.status === 422) {
      const body = (await resp.json()) as { mask_counts?: Record<string, number> };
      throw new NoBandsError(body.mask_counts ?? {});
    }
    if (!resp.ok) throw new ApiError(resp.status, `decode failed (${resp.status})`);
    return (await resp.json()) as DetectResponse;
  }

  async submitCorrection(record: CorrectionRecord): Promise<void> {
    const resp = await this.fetchFn(`${this.baseUrl}/api/corrections`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(record),
    });
    if (resp.status !== 201) throw new ApiError(resp.status, `correction rejected (${resp.status})`);
  }
}
