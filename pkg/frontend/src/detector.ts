/**
 * Detector model boundary.
 *
 * The exporter only needs something that turns a frame into raw
 * detections in the model's own label space; remapping to the canonical
 * person class happens downstream. The shipped implementation is a
 * deterministic brightness-blob finder, which is enough to exercise the
 * whole export path without an ML runtime. A real segmentation model
 * plugs in by implementing the same interface.
 */
import type { VideoFrame } from './y4m.js';

export interface RawDetection {
  bbox: [number, number, number, number];
  /** Class id in the model's own label map. */
  classId: number;
  score: number;
  mask: string | null;
}

export interface Detector {
  readonly name: string;
  detect(frame: VideoFrame): RawDetection[];
}

export interface BrightnessOptions {
  /** Luma threshold separating subject from background. */
  minBrightness?: number;
  /** Blobs smaller than this many pixels are noise, not detections. */
  minArea?: number;
  /** Emit a run-length-encoded mask string per detection. */
  withMasks?: boolean;
}

/** The only class the stub model knows. */
export const BRIGHTNESS_CLASS_ID = 0;

/**
 * Finds 4-connected components of pixels at or above a luma threshold.
 * Score is the blob's mean brightness on a 0..1 scale, so a washed-out
 * blob scores lower than a solid one.
 */
export class BrightnessDetector implements Detector {
  readonly name = 'brightness';
  private readonly minBrightness: number;
  private readonly minArea: number;
  private readonly withMasks: boolean;

  constructor(options: BrightnessOptions = {}) {
    this.minBrightness = options.minBrightness ?? 128;
    this.minArea = options.minArea ?? 4;
    if (this.minBrightness < 1 || this.minBrightness > 255) {
      throw new Error(`minBrightness must be in 1..255, got ${this.minBrightness}`);
    }
    if (this.minArea < 1) {
      throw new Error(`minArea must be at least 1, got ${this.minArea}`);
    }
    this.withMasks = options.withMasks ?? false;
  }

  detect(frame: VideoFrame): RawDetection[] {
    const { width, height, luma } = frame;
    const labels = new Int32Array(width * height).fill(-1);
    const detections: RawDetection[] = [];
    let nextLabel = 0;

    for (let start = 0; start < luma.length; start++) {
      if ((luma[start] ?? 0) < this.minBrightness || labels[start] !== -1) continue;
      // flood fill one component, tracking its extent and brightness
      const label = nextLabel++;
      const stack = [start];
      labels[start] = label;
      let minX = width;
      let minY = height;
      let maxX = -1;
      let maxY = -1;
      let area = 0;
      let brightness = 0;
      while (stack.length > 0) {
        const at = stack.pop() as number;
        const x = at % width;
        const y = (at - x) / width;
        area += 1;
        brightness += luma[at] ?? 0;
        if (x < minX) minX = x;
        if (x > maxX) maxX = x;
        if (y < minY) minY = y;
        if (y > maxY) maxY = y;
        for (const next of [at - width, at + width, x > 0 ? at - 1 : -1, x < width - 1 ? at + 1 : -1]) {
          if (next < 0 || next >= luma.length) continue;
          if ((luma[next] ?? 0) >= this.minBrightness && labels[next] === -1) {
            labels[next] = label;
            stack.push(next);
          }
        }
      }
      if (area < this.minArea) continue;
      detections.push({
        bbox: [minX, minY, maxX + 1, maxY + 1],
        classId: BRIGHTNESS_CLASS_ID,
        score: brightness / area / 255,
        mask: this.withMasks ? encodeMask(labels, label, width, height) : null,
      });
    }
    detections.sort((a, b) => a.bbox[0] - b.bbox[0] || a.bbox[1] - b.bbox[1]);
    return detections;
  }
}

/**
 * Row-major run-length encoding: "<h>x<w>;c0,c1,c2,..." with alternating
 * background/foreground run lengths, starting with background. The
 * pipeline carries masks opaquely, so the format only has to round-trip.
 */
export function encodeMask(
  labels: Int32Array,
  label: number,
  width: number,
  height: number,
): string {
  const counts: number[] = [];
  let current = 0; // background first
  let run = 0;
  for (let i = 0; i < labels.length; i++) {
    const value = labels[i] === label ? 1 : 0;
    if (value === current) {
      run += 1;
    } else {
      counts.push(run);
      current = value;
      run = 1;
    }
  }
  counts.push(run);
  return `${height}x${width};${counts.join(',')}`;
}

export function decodeMask(mask: string): { width: number; height: number; pixels: Uint8Array } {
  const match = /^(\d+)x(\d+);([\d,]+)$/.exec(mask);
  if (!match) throw new Error('not a run-length mask');
  const height = Number(match[1]);
  const width = Number(match[2]);
  const pixels = new Uint8Array(width * height);
  let at = 0;
  let value = 0;
  for (const count of (match[3] as string).split(',').map(Number)) {
    pixels.fill(value, at, at + count);
    at += count;
    value = 1 - value;
  }
  if (at !== pixels.length) throw new Error('mask runs do not cover the frame');
  return { width, height, pixels };
}

export interface ModelOptions extends BrightnessOptions {}

/** Instantiate a detector by model id; unknown ids fail fast. */
export function createDetector(modelId: string, options: ModelOptions = {}): Detector {
  if (modelId === 'brightness') {
    return new BrightnessDetector(options);
  }
  throw new Error(`unknown model ${modelId}; available: brightness`);
}
