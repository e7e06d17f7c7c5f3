/**
 * Export a video as a canonical detection stream.
 *
 * Frames are strided, run through the configured detector, and written
 * one JSON line each. Source frame numbering is preserved under stride
 * so downstream timing stays honest, and class ids are remapped to the
 * canonical person class the pipeline expects.
 */
import { writeFileSync } from 'node:fs';

import { createDetector, type ModelOptions } from './detector.js';
import { PERSON_CLASS, serializeFrameLine, type FrameLine } from './format.js';
import { openY4m } from './y4m.js';

export interface AdapterConfig {
  videoPath: string;
  /** Detector id, resolved via the model registry. */
  modelId: string;
  /** Which class in the model's label map is a person. */
  personClassId: number;
  /** Detections scoring below this are dropped. */
  scoreFloor: number;
  /** Emit every Nth frame, keeping source frame indices. */
  stride: number;
  model?: ModelOptions;
}

export const DEFAULT_CONFIG = {
  modelId: 'brightness',
  personClassId: 0,
  scoreFloor: 0.7,
  stride: 1,
} as const;

export interface ExportSummary {
  framesRead: number;
  framesWritten: number;
  detectionsWritten: number;
  droppedBelowFloor: number;
  droppedOtherClass: number;
}

function validate(config: AdapterConfig): void {
  if (!Number.isInteger(config.stride) || config.stride < 1) {
    throw new Error(`stride must be an integer >= 1, got ${config.stride}`);
  }
  if (!(config.scoreFloor >= 0 && config.scoreFloor <= 1)) {
    throw new Error(`score floor must be in [0, 1], got ${config.scoreFloor}`);
  }
  if (!Number.isInteger(config.personClassId)) {
    throw new Error(`person class id must be an integer, got ${config.personClassId}`);
  }
}

export function exportLines(config: AdapterConfig): { lines: string[]; summary: ExportSummary } {
  validate(config);
  const detector = createDetector(config.modelId, config.model);
  const video = openY4m(config.videoPath);
  const summary: ExportSummary = {
    framesRead: 0,
    framesWritten: 0,
    detectionsWritten: 0,
    droppedBelowFloor: 0,
    droppedOtherClass: 0,
  };
  const lines: string[] = [];
  for (const frame of video.frames()) {
    summary.framesRead += 1;
    if (frame.index % config.stride !== 0) continue;
    const dets: FrameLine['dets'] = [];
    for (const raw of detector.detect(frame)) {
      if (raw.classId !== config.personClassId) {
        summary.droppedOtherClass += 1;
        continue;
      }
      if (raw.score < config.scoreFloor) {
        summary.droppedBelowFloor += 1;
        continue;
      }
      dets.push({
        bbox: raw.bbox,
        class: PERSON_CLASS,
        score: raw.score,
        mask: raw.mask,
      });
    }
    lines.push(
      serializeFrameLine({
        frame: frame.index,
        t: frame.timestampS,
        w: frame.width,
        h: frame.height,
        dets,
      }),
    );
    summary.framesWritten += 1;
    summary.detectionsWritten += dets.length;
  }
  return { lines, summary };
}

export function exportToFile(config: AdapterConfig, outPath: string): ExportSummary {
  const { lines, summary } = exportLines(config);
  writeFileSync(outPath, lines.join('\n') + (lines.length > 0 ? '\n' : ''));
  return summary;
}
