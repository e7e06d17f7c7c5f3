/**
 * Minimal YUV4MPEG2 (.y4m) reader.
 *
 * Y4M is uncompressed video with a one-line text header carrying the
 * geometry and frame rate, which is everything the exporter needs for
 * frame metadata. Only the luma plane is decoded; detectors here work
 * on brightness, and chroma is skipped over.
 */
import { readFileSync } from 'node:fs';

export interface VideoInfo {
  width: number;
  height: number;
  fpsNum: number;
  fpsDen: number;
  colorspace: string;
}

export interface VideoFrame {
  /** Frame number in the source video. */
  index: number;
  /** Seconds since the first frame, from the container frame rate. */
  timestampS: number;
  width: number;
  height: number;
  /** Row-major Y plane, one byte per pixel. */
  luma: Uint8Array;
}

const MAGIC = 'YUV4MPEG2';

// bytes per pixel of chroma to skip after the luma plane
const CHROMA_FACTOR: Record<string, number> = {
  C420: 0.5,
  C420jpeg: 0.5,
  C420mpeg2: 0.5,
  C420paldv: 0.5,
  C422: 1,
  C444: 2,
  Cmono: 0,
};

function parseHeader(line: string, path: string): VideoInfo {
  const fields = line.split(' ');
  if (fields[0] !== MAGIC) {
    throw new Error(`${path}: not a YUV4MPEG2 file`);
  }
  let width = 0;
  let height = 0;
  let fpsNum = 0;
  let fpsDen = 0;
  let colorspace = 'C420';
  for (const field of fields.slice(1)) {
    const tag = field[0];
    const value = field.slice(1);
    if (tag === 'W') width = Number(value);
    else if (tag === 'H') height = Number(value);
    else if (tag === 'F') {
      const [num, den] = value.split(':').map(Number);
      fpsNum = num ?? 0;
      fpsDen = den ?? 0;
    } else if (tag === 'C') colorspace = field;
    // interlace, aspect, and X extensions are irrelevant here
  }
  if (!Number.isInteger(width) || width <= 0 || !Number.isInteger(height) || height <= 0) {
    throw new Error(`${path}: missing or invalid frame geometry in header`);
  }
  if (!Number.isInteger(fpsNum) || fpsNum <= 0 || !Number.isInteger(fpsDen) || fpsDen <= 0) {
    throw new Error(`${path}: missing or invalid frame rate in header`);
  }
  if (!(colorspace in CHROMA_FACTOR)) {
    throw new Error(`${path}: unsupported colorspace ${colorspace}`);
  }
  return { width, height, fpsNum, fpsDen, colorspace };
}

export interface Y4mVideo {
  info: VideoInfo;
  frames(): Generator<VideoFrame>;
}

export function openY4m(path: string): Y4mVideo {
  let buffer: Buffer;
  try {
    buffer = readFileSync(path);
  } catch (cause) {
    throw new Error(`cannot read video ${path}: ${(cause as Error).message}`);
  }
  const headerEnd = buffer.indexOf(0x0a);
  if (headerEnd < 0) {
    throw new Error(`${path}: not a YUV4MPEG2 file`);
  }
  const info = parseHeader(buffer.subarray(0, headerEnd).toString('ascii'), path);
  const lumaSize = info.width * info.height;
  const chromaSize = Math.floor(lumaSize * (CHROMA_FACTOR[info.colorspace] ?? 0));

  function* frames(): Generator<VideoFrame> {
    let offset = headerEnd + 1;
    let index = 0;
    while (offset < buffer.length) {
      const lineEnd = buffer.indexOf(0x0a, offset);
      if (lineEnd < 0 || !buffer.subarray(offset, offset + 5).equals(Buffer.from('FRAME'))) {
        throw new Error(`${path}: corrupt frame marker at byte ${offset}`);
      }
      const dataStart = lineEnd + 1;
      const dataEnd = dataStart + lumaSize + chromaSize;
      if (dataEnd > buffer.length) {
        throw new Error(`${path}: truncated frame ${index}`);
      }
      yield {
        index,
        timestampS: (index * info.fpsDen) / info.fpsNum,
        width: info.width,
        height: info.height,
        luma: new Uint8Array(buffer.subarray(dataStart, dataStart + lumaSize)),
      };
      offset = dataEnd;
      index += 1;
    }
  }

  return { info, frames };
}
