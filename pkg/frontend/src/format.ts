/**
 * Canonical detection-stream wire format.
 *
 * One JSON object per line, one line per frame. This is the exact shape
 * the measurement pipeline ingests, so the schemas here double as an
 * output validator in tests.
 */
import { z } from 'zod';

const finite = z.number().finite();

export const boundingBoxSchema = z
  .tuple([finite, finite, finite, finite])
  .refine(([x1, y1, x2, y2]) => x1 >= 0 && y1 >= 0 && x2 > x1 && y2 > y1, {
    message: 'bbox must be [x1, y1, x2, y2] with x2 > x1 and y2 > y1, all non-negative',
  });

export const detectionSchema = z.object({
  bbox: boundingBoxSchema,
  class: z.number().int(),
  score: z.number().min(0).max(1),
  mask: z.string().nullable(),
});

export const frameLineSchema = z
  .object({
    frame: z.number().int().nonnegative(),
    t: z.number().finite().nullable(),
    w: z.number().int().positive(),
    h: z.number().int().positive(),
    dets: z.array(detectionSchema),
  })
  .refine(
    (line) =>
      line.dets.every(
        ({ bbox: [, , x2, y2] }) => x2 <= line.w && y2 <= line.h,
      ),
    { message: 'detection boxes must lie within the image bounds' },
  );

export type BoundingBox = z.infer<typeof boundingBoxSchema>;
export type StreamDetection = z.infer<typeof detectionSchema>;
export type FrameLine = z.infer<typeof frameLineSchema>;

/** Canonical person class id in the emitted stream. */
export const PERSON_CLASS = 1;

/** Serialize one frame line exactly as the pipeline expects it. */
export function serializeFrameLine(line: FrameLine): string {
  return JSON.stringify({
    frame: line.frame,
    t: line.t,
    w: line.w,
    h: line.h,
    dets: line.dets.map((d) => ({
      bbox: d.bbox,
      class: d.class,
      score: d.score,
      mask: d.mask,
    })),
  });
}

/** Parse and validate a whole stream; throws on the first bad line. */
export function parseStream(text: string): FrameLine[] {
  const lines: FrameLine[] = [];
  let previous = -1;
  for (const [i, raw] of text.split('\n').entries()) {
    if (raw.trim() === '') continue;
    let parsed: unknown;
    try {
      parsed = JSON.parse(raw);
    } catch {
      throw new Error(`malformed line ${i + 1}: not valid JSON`);
    }
    const result = frameLineSchema.safeParse(parsed);
    if (!result.success) {
      throw new Error(`malformed line ${i + 1}: ${result.error.issues[0]?.message}`);
    }
    if (result.data.frame <= previous) {
      throw new Error(`non-monotonic frame index at line ${i + 1}`);
    }
    previous = result.data.frame;
    lines.push(result.data);
  }
  return lines;
}
