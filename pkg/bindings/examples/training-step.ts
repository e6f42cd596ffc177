/**
 * Integrating the loss into a generic training step.
 *
 * The host framework owns the parameters (two Float64Array embedding
 * views here) and the update rule (plain SGD). Per iteration it:
 *   1. evaluates the unweighted triplet loss (lambda = 0) as the
 *      scheduler's progress signal,
 *   2. steps the scheduler to get the current coefficient,
 *   3. evaluates the combined objective and gradients at that
 *      coefficient, and
 *   4. applies the update to its own arrays.
 *
 * Run with: npm run example
 */

import { DphrKernel } from '../src/index.js';

function prng(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (s + 0x6d2b79f5) >>> 0;
    let t = s;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const ROWS = 8;
const COLS = 16;
const LR = 0.08;
const STEPS = 100;

async function main(): Promise<void> {
  const rand = prng(1);
  const gauss = () =>
    Math.sqrt(-2 * Math.log(Math.max(rand(), 1e-12))) * Math.cos(2 * Math.PI * rand());

  // Weakly matched views: plenty of active triplets at the start, so
  // the scheduler's ramp from delta_min toward delta_max is visible.
  const viewA = new Float64Array(ROWS * COLS);
  const viewB = new Float64Array(ROWS * COLS);
  for (let i = 0; i < viewA.length; i++) {
    viewA[i] = gauss();
    viewB[i] = 0.1 * viewA[i] + gauss();
  }

  const kernel = new DphrKernel();
  // Normalized-embedding losses live well below the default band, so
  // the band is moved down to match this data's scale.
  const scheduler = await kernel.createScheduler({ sigmaMin: 0.12, sigmaMax: 0.35 });

  let firstLoss = Number.NaN;
  let lastLoss = Number.NaN;
  for (let step = 0; step < STEPS; step++) {
    const probe = await kernel.dphrLoss(viewA, viewB, ROWS, COLS, {
      lambda: 0,
      normalize: true,
    });
    const sched = await kernel.stepScheduler(scheduler, probe.loss);
    const { loss, gradA, gradB } = await kernel.dphrLoss(viewA, viewB, ROWS, COLS, {
      lambda: sched.lambda,
      normalize: true,
    });

    for (let i = 0; i < viewA.length; i++) {
      viewA[i] -= LR * gradA[i];
      viewB[i] -= LR * gradB[i];
    }

    if (Number.isNaN(firstLoss)) firstLoss = loss;
    lastLoss = loss;
    if (step % 20 === 0 || step === STEPS - 1) {
      console.log(
        `step ${String(step).padStart(3)}  loss ${loss.toFixed(4)}  ` +
          `unweighted ${probe.loss.toFixed(4)}  lambda ${sched.lambda.toFixed(3)}`,
      );
    }
  }

  console.log(`\nloss went ${firstLoss.toFixed(4)} -> ${lastLoss.toFixed(4)}`);
  await kernel.destroyScheduler(scheduler);
  await kernel.close();
  if (!(lastLoss < firstLoss)) {
    throw new Error('training step failed to reduce the loss');
  }
}

main().catch((err) => {
  console.error(err);
  process.exitCode = 1;
});
