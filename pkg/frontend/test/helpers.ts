/** Synthetic video builder: bright rectangles on a dark background. */
import { writeFileSync } from 'node:fs';

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
  /** Luma value of the painted pixels; background stays at 16. */
  level?: number;
}

export interface VideoSpec {
  width: number;
  height: number;
  fps?: [number, number];
  /** One entry per frame, each a list of rectangles to paint. */
  frames: Rect[][];
}

export function renderLuma(width: number, height: number, rects: Rect[]): Uint8Array {
  const luma = new Uint8Array(width * height).fill(16);
  for (const rect of rects) {
    const level = rect.level ?? 235;
    for (let y = rect.y; y < rect.y + rect.h; y++) {
      luma.fill(level, y * width + rect.x, y * width + rect.x + rect.w);
    }
  }
  return luma;
}

export function writeY4m(path: string, spec: VideoSpec): void {
  const [num, den] = spec.fps ?? [30, 1];
  const chroma = new Uint8Array((spec.width * spec.height) / 4).fill(128);
  const parts: Buffer[] = [
    Buffer.from(`YUV4MPEG2 W${spec.width} H${spec.height} F${num}:${den} Ip A1:1 C420\n`),
  ];
  for (const rects of spec.frames) {
    parts.push(Buffer.from('FRAME\n'));
    parts.push(Buffer.from(renderLuma(spec.width, spec.height, rects)));
    parts.push(Buffer.from(chroma), Buffer.from(chroma));
  }
  writeFileSync(path, Buffer.concat(parts));
}
