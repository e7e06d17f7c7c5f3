export {
  boundingBoxSchema,
  detectionSchema,
  frameLineSchema,
  parseStream,
  serializeFrameLine,
  PERSON_CLASS,
  type BoundingBox,
  type FrameLine,
  type StreamDetection,
} from './format.js';
export {
  BrightnessDetector,
  BRIGHTNESS_CLASS_ID,
  createDetector,
  decodeMask,
  encodeMask,
  type Detector,
  type RawDetection,
} from './detector.js';
export { openY4m, type VideoFrame, type VideoInfo, type Y4mVideo } from './y4m.js';
export {
  DEFAULT_CONFIG,
  exportLines,
  exportToFile,
  type AdapterConfig,
  type ExportSummary,
} from './export.js';
