// Vocabulary extension as a pass-through to the seatok CLI: the bindings
// never reimplement the merge loop, they drive the tool that owns it, so
// output files are identical to a direct CLI run by construction.

import { spawnSync } from 'node:child_process';
import { mkdtempSync, readFileSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

export class CliRunError extends Error {
  constructor(readonly exitCode: number, readonly stderr: string) {
    super(`seatok exited ${exitCode}: ${stderr.trim()}`);
  }
}

/** Invoke one seatok subcommand; throws CliRunError on a nonzero exit. */
export function runSeatok(args: string[]): string {
  const child = spawnSync('python3', ['-m', 'seatok', ...args], {
    encoding: 'utf-8',
    maxBuffer: 64 * 1024 * 1024,
  });
  if (child.error) throw child.error;
  if (child.status !== 0) {
    throw new CliRunError(child.status ?? -1, child.stderr ?? '');
  }
  return child.stdout ?? '';
}

export interface ExtendOptions {
  base: string;
  target: string;
  corpus: string;
  minFreq: number;
  out: string;
  /** Extension report JSON; written to a temp file when omitted. */
  report?: string;
  /** Candidate frequency TSV; skipped when omitted. */
  freqOut?: string;
}

export interface ExtendSummary {
  kept: number;
  pruned: number;
  baseSize: number;
  finalSize: number;
  keptTokens: string[];
}

/**
 * Run a vocabulary extension and return its summary. Writes exactly the
 * files the CLI would write for the same flags.
 */
export function extendVocabulary(options: ExtendOptions): ExtendSummary {
  let reportPath = options.report;
  let scratch: string | null = null;
  if (!reportPath) {
    scratch = mkdtempSync(join(tmpdir(), 'seatok-extend-'));
    reportPath = join(scratch, 'report.json');
  }
  try {
    const args = [
      'vocab', 'extend',
      '--base', options.base,
      '--target', options.target,
      '--corpus', options.corpus,
      '--min-freq', String(options.minFreq),
      '--out', options.out,
      '--report', reportPath,
    ];
    if (options.freqOut) args.push('--freq-out', options.freqOut);
    runSeatok(args);
    const report = JSON.parse(readFileSync(reportPath, 'utf-8')) as {
      base_size: number;
      final_size: number;
      kept: string[];
      pruned: string[];
    };
    return {
      kept: report.kept.length,
      pruned: report.pruned.length,
      baseSize: report.base_size,
      finalSize: report.final_size,
      keptTokens: report.kept,
    };
  } finally {
    if (scratch) rmSync(scratch, { recursive: true, force: true });
  }
}
