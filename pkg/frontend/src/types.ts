export interface Rect {
  x_min: number;
  y_min: number;
  x_max: number;
  y_max: number;
}

export interface CropRect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface BandOverlay {
  color: string;
  digit: number;
  y: number;
  rect: Rect;
}

export interface DetectResponse {
  code: string;
  direction: "down" | "up";
  bands: BandOverlay[];
  mask_counts: Record<string, number>;
  warnings: string[];
}

export interface ColorInfo {
  name: string;
  digit: number;
  swatch: string;
  labels: string[];
}

export interface LegendResponse {
  colors: ColorInfo[];
  scale_factor: number;
}

export interface CorrectionRecord {
  image: string;
  machine_code: string;
  human_code: string;
  crop: CropRect | null;
  anchor: "auto" | "top" | "bottom";
}
