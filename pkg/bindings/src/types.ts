/** Shared types for the kernel bindings. */

/** Options for a combined-loss evaluation. Defaults mirror the Python side. */
export interface DphrLossOptions {
  /** Triplet margin (default 0.3). */
  margin?: number;
  /** Hardness-weight interval (defaults 0.5 / 2.0). */
  wMin?: number;
  wMax?: number;
  /** Coefficient on the weighted term (default 1.0; 0 disables weighting). */
  lambda?: number;
  /** L2-normalize embeddings before distances (default true). */
  normalize?: boolean;
  /** 'a_to_b', 'b_to_a' or 'both' (default 'both'). */
  direction?: 'a_to_b' | 'b_to_a' | 'both';
}

export interface DphrLossResult {
  loss: number;
  /** Row-major gradients, same length as the inputs. */
  gradA: Float64Array;
  gradB: Float64Array;
}

/** Scheduler hyperparameters; defaults mirror the Python side. */
export interface SchedulerConfig {
  window?: number;
  sigmaMin?: number;
  sigmaMax?: number;
  deltaMin?: number;
  deltaMax?: number;
  gamma?: number;
  beta?: number;
}

/** Intermediates of one scheduler step. */
export interface SchedulerStep {
  t: number;
  alpha: number;
  alphaHat: number;
  lambdaInst: number;
  lambda: number;
}

/** Opaque reference to scheduler state owned by the bridge process. */
export interface SchedulerHandle {
  readonly id: number;
}

export type KernelErrorCode =
  | 'shape_error'
  | 'validation_error'
  | 'invalid_handle'
  | 'bad_request'
  | 'bridge_closed';

/** Error protocol of the bridge: a status code plus a message. */
export class KernelError extends Error {
  constructor(
    readonly code: KernelErrorCode,
    message: string,
  ) {
    super(`${code}: ${message}`);
    this.name = 'KernelError';
  }
}
