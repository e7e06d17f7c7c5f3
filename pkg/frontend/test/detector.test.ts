import { describe, expect, it } from 'vitest';

import {
  BRIGHTNESS_CLASS_ID,
  BrightnessDetector,
  createDetector,
  decodeMask,
} from '../src/detector.js';
import type { VideoFrame } from '../src/y4m.js';
import { renderLuma, type Rect } from './helpers.js';

function frameOf(width: number, height: number, rects: Rect[]): VideoFrame {
  return { index: 0, timestampS: 0, width, height, luma: renderLuma(width, height, rects) };
}

describe('BrightnessDetector', () => {
  it('boxes a single bright rectangle exactly', () => {
    const detector = new BrightnessDetector();
    const dets = detector.detect(frameOf(64, 48, [{ x: 10, y: 5, w: 8, h: 12 }]));
    expect(dets).toHaveLength(1);
    expect(dets[0]?.bbox).toEqual([10, 5, 18, 17]);
    expect(dets[0]?.classId).toBe(BRIGHTNESS_CLASS_ID);
  });

  it('scores by mean brightness on a 0..1 scale', () => {
    const detector = new BrightnessDetector();
    const dets = detector.detect(frameOf(32, 32, [{ x: 2, y: 2, w: 4, h: 4, level: 204 }]));
    expect(dets[0]?.score).toBeCloseTo(204 / 255, 12);
  });

  it('separates disjoint blobs and orders them left to right', () => {
    const detector = new BrightnessDetector();
    const dets = detector.detect(
      frameOf(64, 32, [
        { x: 40, y: 4, w: 5, h: 5 },
        { x: 3, y: 10, w: 6, h: 6 },
      ]),
    );
    expect(dets.map((d) => d.bbox[0])).toEqual([3, 40]);
  });

  it('merges touching rectangles into one component', () => {
    const detector = new BrightnessDetector();
    const dets = detector.detect(
      frameOf(64, 32, [
        { x: 10, y: 10, w: 5, h: 5 },
        { x: 15, y: 10, w: 5, h: 5 },
      ]),
    );
    expect(dets).toHaveLength(1);
    expect(dets[0]?.bbox).toEqual([10, 10, 20, 15]);
  });

  it('treats diagonal contact as separate components', () => {
    const detector = new BrightnessDetector({ minArea: 1 });
    const dets = detector.detect(
      frameOf(16, 16, [
        { x: 2, y: 2, w: 2, h: 2 },
        { x: 4, y: 4, w: 2, h: 2 },
      ]),
    );
    expect(dets).toHaveLength(2);
  });

  it('ignores blobs below the minimum area', () => {
    const detector = new BrightnessDetector({ minArea: 4 });
    const dets = detector.detect(
      frameOf(32, 32, [
        { x: 2, y: 2, w: 1, h: 2 },
        { x: 10, y: 10, w: 3, h: 3 },
      ]),
    );
    expect(dets).toHaveLength(1);
    expect(dets[0]?.bbox).toEqual([10, 10, 13, 13]);
  });

  it('ignores pixels below the brightness threshold', () => {
    const detector = new BrightnessDetector({ minBrightness: 150 });
    const dets = detector.detect(frameOf(32, 32, [{ x: 5, y: 5, w: 6, h: 6, level: 100 }]));
    expect(dets).toHaveLength(0);
  });

  it('handles blobs touching the frame border', () => {
    const detector = new BrightnessDetector();
    const dets = detector.detect(frameOf(20, 20, [{ x: 0, y: 0, w: 4, h: 20 }]));
    expect(dets[0]?.bbox).toEqual([0, 0, 4, 20]);
  });

  it('round-trips masks through the run-length encoding', () => {
    const detector = new BrightnessDetector({ withMasks: true });
    const rect = { x: 3, y: 4, w: 5, h: 6 };
    const dets = detector.detect(frameOf(24, 16, [rect]));
    const mask = decodeMask(dets[0]?.mask as string);
    expect(mask.width).toBe(24);
    expect(mask.height).toBe(16);
    let painted = 0;
    for (let y = 0; y < 16; y++) {
      for (let x = 0; x < 24; x++) {
        const inside =
          x >= rect.x && x < rect.x + rect.w && y >= rect.y && y < rect.y + rect.h;
        expect(mask.pixels[y * 24 + x]).toBe(inside ? 1 : 0);
        painted += mask.pixels[y * 24 + x] ?? 0;
      }
    }
    expect(painted).toBe(rect.w * rect.h);
  });

  it('emits null masks by default', () => {
    const detector = new BrightnessDetector();
    const dets = detector.detect(frameOf(16, 16, [{ x: 2, y: 2, w: 4, h: 4 }]));
    expect(dets[0]?.mask).toBeNull();
  });

  it('validates its options', () => {
    expect(() => new BrightnessDetector({ minBrightness: 0 })).toThrow(/minBrightness/);
    expect(() => new BrightnessDetector({ minBrightness: 300 })).toThrow(/minBrightness/);
    expect(() => new BrightnessDetector({ minArea: 0 })).toThrow(/minArea/);
  });
});

describe('createDetector', () => {
  it('resolves the brightness model', () => {
    expect(createDetector('brightness').name).toBe('brightness');
  });

  it('fails fast on unknown model ids', () => {
    expect(() => createDetector('mask-rcnn-x152')).toThrow(/unknown model/);
  });
});

describe('decodeMask', () => {
  it('rejects strings that are not run-length masks', () => {
    expect(() => decodeMask('garbage')).toThrow(/not a run-length mask/);
  });

  it('rejects runs that do not cover the frame', () => {
    expect(() => decodeMask('2x2;1,1')).toThrow(/do not cover/);
  });
});
