/**
 * Kernel bindings: the combined hardness-weighted triplet objective with
 * gradients, plus a handle-based loss-weighting scheduler, over flat
 * row-major float64 arrays with explicit shapes.
 *
 * The caller owns all arrays; nothing is transferred. Scheduler state
 * lives in the bridge process and is referenced by opaque handles that
 * stay valid between `createScheduler` and `destroyScheduler`. Stepping
 * a destroyed or unknown handle rejects with a `KernelError` of code
 * `invalid_handle` — never undefined behaviour. A handle must be stepped
 * from one caller at a time.
 */

import { Bridge, type BridgeOptions } from './bridge.js';
import {
  KernelError,
  type DphrLossOptions,
  type DphrLossResult,
  type SchedulerConfig,
  type SchedulerHandle,
  type SchedulerStep,
} from './types.js';

export { KernelError } from './types.js';
export type {
  DphrLossOptions,
  DphrLossResult,
  SchedulerConfig,
  SchedulerHandle,
  SchedulerStep,
  KernelErrorCode,
} from './types.js';
export type { BridgeOptions } from './bridge.js';

export class DphrKernel {
  private readonly bridge: Bridge;

  constructor(options: BridgeOptions = {}) {
    this.bridge = new Bridge(options);
  }

  /**
   * Evaluate the combined objective and its gradients.
   *
   * `viewA`/`viewB` are row-major `rows x cols` matrices: row i of
   * viewB is the positive for row i of viewA, every other row is a
   * negative. Needs rows >= 2 and `viewX.length === rows * cols`.
   */
  async dphrLoss(
    viewA: Float64Array,
    viewB: Float64Array,
    rows: number,
    cols: number,
    options: DphrLossOptions = {},
  ): Promise<DphrLossResult> {
    if (viewA.length !== rows * cols || viewB.length !== rows * cols) {
      throw new KernelError(
        'shape_error',
        `expected ${rows * cols} values per view, got ${viewA.length} and ${viewB.length}`,
      );
    }
    const res = await this.bridge.request('dphr_loss', {
      view_a: Array.from(viewA),
      view_b: Array.from(viewB),
      rows,
      cols,
      margin: options.margin ?? 0.3,
      w_min: options.wMin ?? 0.5,
      w_max: options.wMax ?? 2.0,
      lambda: options.lambda ?? 1.0,
      normalize: options.normalize ?? true,
      direction: options.direction ?? 'both',
    });
    return {
      loss: res.loss as number,
      gradA: Float64Array.from(res.grad_a as number[]),
      gradB: Float64Array.from(res.grad_b as number[]),
    };
  }

  /** Create scheduler state in the bridge process. */
  async createScheduler(config: SchedulerConfig = {}): Promise<SchedulerHandle> {
    const res = await this.bridge.request('palw_create', {
      window: config.window ?? 16,
      sigma_min: config.sigmaMin ?? 0.8,
      sigma_max: config.sigmaMax ?? 1.5,
      delta_min: config.deltaMin ?? 0.2,
      delta_max: config.deltaMax ?? 1.0,
      gamma: config.gamma ?? 1.5,
      beta: config.beta ?? 0.9,
    });
    return { id: res.handle as number };
  }

  /** Feed one unweighted loss value; returns the smoothed coefficient
   * and all intermediates. */
  async stepScheduler(handle: SchedulerHandle, loss: number): Promise<SchedulerStep> {
    // JSON cannot represent non-finite numbers, so police them here.
    if (!Number.isFinite(loss)) {
      throw new KernelError('validation_error', `loss must be finite, got ${loss}`);
    }
    const res = await this.bridge.request('palw_step', { handle: handle.id, loss });
    return {
      t: res.t as number,
      alpha: res.alpha as number,
      alphaHat: res.alpha_hat as number,
      lambdaInst: res.lambda_inst as number,
      lambda: res.lambda as number,
    };
  }

  /** Release scheduler state; the handle becomes invalid. */
  async destroyScheduler(handle: SchedulerHandle): Promise<void> {
    await this.bridge.request('palw_destroy', { handle: handle.id });
  }

  /** Live handle count and resident memory of the bridge process. */
  async stats(): Promise<{ liveHandles: number; rssBytes: number }> {
    const res = await this.bridge.request('stats');
    return {
      liveHandles: res.live_handles as number,
      rssBytes: res.rss_bytes as number,
    };
  }

  /** Shut the bridge process down; all further calls reject. */
  async close(): Promise<void> {
    await this.bridge.close();
  }
}
