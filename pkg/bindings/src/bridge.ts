/**
 * Child-process transport: newline-delimited JSON to the Python shim.
 *
 * Requests carry an incrementing id; responses settle the matching
 * pending promise, so callers may pipeline freely. Numbers serialize
 * via shortest-repr on both sides, which round-trips IEEE doubles
 * bit-exactly.
 */

import { spawn, type ChildProcessWithoutNullStreams } from 'node:child_process';
import { existsSync } from 'node:fs';
import { createInterface } from 'node:readline';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { KernelError, type KernelErrorCode } from './types.js';

export interface BridgeOptions {
  /** Python interpreter (default 'python3'). */
  python?: string;
  /** Extra PYTHONPATH entries, prepended. */
  pythonPath?: string[];
}

interface Pending {
  resolve: (value: Record<string, unknown>) => void;
  reject: (err: Error) => void;
}

/** Walk upward from this module until the package root (holds py/). */
function packageRoot(): string {
  let dir = dirname(fileURLToPath(import.meta.url));
  for (let i = 0; i < 6; i++) {
    if (existsSync(join(dir, 'py', 'kernel_bridge.py'))) return dir;
    dir = dirname(dir);
  }
  throw new Error('cannot locate py/kernel_bridge.py above ' + import.meta.url);
}

export class Bridge {
  private readonly child: ChildProcessWithoutNullStreams;
  private readonly pending = new Map<number, Pending>();
  private nextId = 1;
  private closed = false;

  constructor(options: BridgeOptions = {}) {
    const root = packageRoot();
    const shim = join(root, 'py', 'kernel_bridge.py');
    // Make the library importable even without `pip install -e .`:
    // the primary package sits one level above the bindings.
    const pythonPath = [
      ...(options.pythonPath ?? []),
      join(root, '..', 'src'),
      process.env.PYTHONPATH ?? '',
    ]
      .filter((p) => p.length > 0)
      .join(':');

    this.child = spawn(options.python ?? 'python3', [shim], {
      stdio: ['pipe', 'pipe', 'pipe'],
      env: { ...process.env, PYTHONPATH: pythonPath },
    });
    this.child.on('exit', () => this.failAllPending('bridge process exited'));
    this.child.stderr.setEncoding('utf8');
    let stderrTail = '';
    this.child.stderr.on('data', (chunk: string) => {
      stderrTail = (stderrTail + chunk).slice(-4000);
    });
    this.child.on('error', (err) => this.failAllPending(String(err)));

    const lines = createInterface({ input: this.child.stdout });
    lines.on('line', (line) => this.dispatch(line));
  }

  private dispatch(line: string): void {
    let msg: Record<string, unknown>;
    try {
      msg = JSON.parse(line) as Record<string, unknown>;
    } catch {
      return; // stray non-JSON output; ignore
    }
    const id = msg.id as number | null;
    if (id === null || id === undefined) return;
    const entry = this.pending.get(id);
    if (!entry) return;
    this.pending.delete(id);
    if (msg.ok === true) {
      entry.resolve(msg);
    } else {
      entry.reject(
        new KernelError(
          (msg.code as KernelErrorCode) ?? 'bad_request',
          String(msg.message ?? 'unknown bridge error'),
        ),
      );
    }
  }

  private failAllPending(reason: string): void {
    this.closed = true;
    for (const [, entry] of this.pending) {
      entry.reject(new KernelError('bridge_closed', reason));
    }
    this.pending.clear();
  }

  request(op: string, params: Record<string, unknown> = {}): Promise<Record<string, unknown>> {
    if (this.closed) {
      return Promise.reject(new KernelError('bridge_closed', 'bridge already closed'));
    }
    const id = this.nextId++;
    const payload = JSON.stringify({ id, op, ...params });
    return new Promise((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
      this.child.stdin.write(payload + '\n', (err) => {
        if (err) {
          this.pending.delete(id);
          reject(new KernelError('bridge_closed', String(err)));
        }
      });
    });
  }

  async close(): Promise<void> {
    if (this.closed) return;
    this.closed = true;
    const survivors = new Map(this.pending);
    this.pending.clear();
    try {
      this.child.stdin.write(JSON.stringify({ id: 0, op: 'shutdown' }) + '\n');
      this.child.stdin.end();
    } catch {
      // already gone
    }
    for (const [, entry] of survivors) {
      entry.reject(new KernelError('bridge_closed', 'bridge closed'));
    }
    await new Promise<void>((resolve) => {
      const timer = setTimeout(() => {
        this.child.kill();
        resolve();
      }, 2000);
      this.child.on('exit', () => {
        clearTimeout(timer);
        resolve();
      });
    });
  }
}
