#!/usr/bin/env node
/**
 * Command-line entry: export a detection stream from a video file.
 *
 * Exit codes follow the pipeline's convention: 0 success, 1 usage
 * errors, 2 unreadable or malformed input data.
 */
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import { DEFAULT_CONFIG, exportToFile } from './export.js';

export async function main(argv: string[]): Promise<number> {
  let usageError = false;
  const parser = yargs(argv)
    .scriptName('sdmonitor-adapter')
    .command(
      'export',
      'run a detector over a video and write the detection stream',
      (cmd) =>
        cmd
          .option('video', { type: 'string', demandOption: true, describe: 'input .y4m video' })
          .option('out', { type: 'string', demandOption: true, describe: 'output detections .jsonl' })
          .option('model', { type: 'string', default: DEFAULT_CONFIG.modelId })
          .option('person-class', {
            type: 'number',
            default: DEFAULT_CONFIG.personClassId,
            describe: "person class id in the model's label map",
          })
          .option('score-floor', { type: 'number', default: DEFAULT_CONFIG.scoreFloor })
          .option('stride', { type: 'number', default: DEFAULT_CONFIG.stride })
          .option('masks', { type: 'boolean', default: false, describe: 'include RLE masks' })
          .option('min-brightness', {
            type: 'number',
            default: 128,
            describe: 'luma threshold for the brightness model',
          }),
    )
    .demandCommand(1)
    .strict()
    .exitProcess(false)
    .fail((message) => {
      usageError = true;
      console.error(`error: ${message}`);
    });

  const args = await parser.parse();
  if (usageError) return 1;

  try {
    const summary = exportToFile(
      {
        videoPath: args.video as string,
        modelId: args.model as string,
        personClassId: args['person-class'] as number,
        scoreFloor: args['score-floor'] as number,
        stride: args.stride as number,
        model: {
          withMasks: args.masks as boolean,
          minBrightness: args['min-brightness'] as number,
        },
      },
      args.out as string,
    );
    console.error(
      `wrote ${args.out}: ${summary.framesWritten} frames, ` +
        `${summary.detectionsWritten} detections ` +
        `(dropped ${summary.droppedBelowFloor} below floor, ` +
        `${summary.droppedOtherClass} other-class)`,
    );
    return 0;
  } catch (cause) {
    const message = (cause as Error).message;
    console.error(`error: ${message}`);
    // config mistakes are usage errors; everything else is bad data
    return /stride|score floor|class id|unknown model/.test(message) ? 1 : 2;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split('/').pop() ?? '');
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
