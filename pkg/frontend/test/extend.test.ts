import { describe, it, expect, beforeAll, afterAll } from 'vitest';
import { mkdtempSync, mkdirSync, readFileSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { CliRunError, extendVocabulary, runSeatok } from '../src/extend.js';
import { loadVocab } from '../src/vocab.js';

const FIXTURES = fileURLToPath(new URL('../../tests/fixtures/', import.meta.url));

let scratch: string;
let basePath: string;
let targetPath: string;
let corpusPath: string;

beforeAll(() => {
  scratch = mkdtempSync(join(tmpdir(), 'seatok-extend-test-'));
  const baseTokens = join(scratch, 'base.txt');
  const targetTokens = join(scratch, 'target.txt');
  writeFileSync(baseTokens, 'a\nb\n');
  writeFileSync(targetTokens, 'a\nb\nab\n');
  basePath = join(scratch, 'base.json');
  targetPath = join(scratch, 'target.json');
  runSeatok(['vocab', 'build', '--tokens', baseTokens, '--out', basePath]);
  runSeatok([
    'vocab', 'build', '--tokens', targetTokens, '--no-byte-fallback',
    '--out', targetPath,
  ]);
  corpusPath = join(scratch, 'corpus.jsonl');
  writeFileSync(corpusPath, '{"text": "ab"}\n{"text": "ab"}\n');
});

afterAll(() => {
  rmSync(scratch, { recursive: true, force: true });
});

describe('extension pass-through', () => {
  it('keeps one token on the two-document "ab" corpus at threshold 2', () => {
    const summary = extendVocabulary({
      base: basePath,
      target: targetPath,
      corpus: corpusPath,
      minFreq: 2,
      out: join(scratch, 'm2.json'),
    });
    expect(summary.kept).toBe(1);
    expect(summary.keptTokens).toEqual(['ab']);
    expect(summary.finalSize).toBe(summary.baseSize + 1);
    expect(loadVocab(join(scratch, 'm2.json')).extensionTexts()).toEqual(['ab']);
  });

  it('keeps nothing at threshold 3', () => {
    const summary = extendVocabulary({
      base: basePath,
      target: targetPath,
      corpus: corpusPath,
      minFreq: 3,
      out: join(scratch, 'm3.json'),
    });
    expect(summary.kept).toBe(0);
    expect(summary.pruned).toBe(1);
    expect(loadVocab(join(scratch, 'm3.json')).extensionTexts()).toEqual([]);
  });

  it('keeps nothing on an empty corpus', () => {
    const empty = join(scratch, 'empty.jsonl');
    writeFileSync(empty, '');
    const summary = extendVocabulary({
      base: basePath,
      target: targetPath,
      corpus: empty,
      minFreq: 2,
      out: join(scratch, 'empty.json'),
    });
    expect(summary.kept).toBe(0);
    expect(summary.pruned).toBe(0);
  });

  it('writes byte-identical files versus a direct CLI run', () => {
    const viaBindings = join(scratch, 'via-bindings');
    const viaCli = join(scratch, 'via-cli');
    mkdirSync(viaBindings);
    mkdirSync(viaCli);

    extendVocabulary({
      base: join(FIXTURES, 'base_vocab.json'),
      target: join(FIXTURES, 'target_vocab.json'),
      corpus: join(FIXTURES, 'corpus.jsonl'),
      minFreq: 2,
      out: join(viaBindings, 'extended.json'),
      report: join(viaBindings, 'report.json'),
      freqOut: join(viaBindings, 'freq.tsv'),
    });
    runSeatok([
      'vocab', 'extend',
      '--base', join(FIXTURES, 'base_vocab.json'),
      '--target', join(FIXTURES, 'target_vocab.json'),
      '--corpus', join(FIXTURES, 'corpus.jsonl'),
      '--min-freq', '2',
      '--out', join(viaCli, 'extended.json'),
      '--report', join(viaCli, 'report.json'),
      '--freq-out', join(viaCli, 'freq.tsv'),
    ]);

    for (const name of ['extended.json', 'report.json', 'freq.tsv']) {
      expect(readFileSync(join(viaBindings, name))).toEqual(
        readFileSync(join(viaCli, name)),
      );
    }
  });

  it('surfaces CLI failures with their exit code and message', () => {
    expect(() =>
      extendVocabulary({
        base: join(scratch, 'does-not-exist.json'),
        target: targetPath,
        corpus: corpusPath,
        minFreq: 2,
        out: join(scratch, 'never.json'),
      }),
    ).toThrow(CliRunError);
    try {
      runSeatok(['vocab', 'inspect', '--vocab', join(scratch, 'nope.json')]);
      expect.unreachable('runSeatok should have thrown');
    } catch (e) {
      expect(e).toBeInstanceOf(CliRunError);
      expect((e as CliRunError).exitCode).toBe(1);
      expect((e as CliRunError).stderr).toMatch(/^error: E_PATH:/);
    }
  });
});
