// Vocabulary loading and greedy longest-match encode/decode.
// Mirrors the Python core exactly; parity is enforced by the test suite
// comparing against CLI output on identical inputs.

import { readFileSync } from 'node:fs';

export const VOCAB_FORMAT_VERSION = 1;
export const DEFAULT_MARKER = '▁';

const BYTE_TOKEN_RE = /^<0x([0-9A-Fa-f]{2})>$/;

export type TokenKind = 'normal' | 'byte_fallback' | 'special';

export class VocabError extends Error {}

export class VocabFormatError extends VocabError {}

export class InvalidTokenIdError extends VocabError {
  constructor(readonly tokenId: number, vocabSize: number) {
    super(`token id ${tokenId} out of range for vocabulary of size ${vocabSize}`);
  }
}

export class UnencodableTextError extends VocabError {
  constructor(readonly char: string, readonly byteOffset: number) {
    super(
      `no token covers ${JSON.stringify(char)} at byte offset ${byteOffset} ` +
      'and byte fallback is disabled',
    );
  }
}

/** Surface form of the byte-fallback token for a byte value 0..255. */
export function byteTokenText(byte: number): string {
  return `<0x${byte.toString(16).toUpperCase().padStart(2, '0')}>`;
}

/** Byte value if `text` is a byte-fallback surface form, else null. */
export function parseByteToken(text: string): number | null {
  const m = BYTE_TOKEN_RE.exec(text);
  return m ? parseInt(m[1]!, 16) : null;
}

// All positions and lengths are in Unicode code points, not UTF-16 units,
// so astral characters count as one like they do on the Python side.
function codePoints(text: string): string[] {
  return Array.from(text);
}

class GreedyMatcher {
  private readonly byLen = new Map<number, Set<string>>();
  private lengths: number[] = []; // descending

  constructor(texts: Iterable<string>, readonly marker: string) {
    for (const t of texts) this.add(t);
  }

  add(text: string): void {
    const n = codePoints(text).length;
    let bucket = this.byLen.get(n);
    if (!bucket) {
      bucket = new Set();
      this.byLen.set(n, bucket);
      this.lengths = [...this.byLen.keys()].sort((a, b) => b - a);
    }
    bucket.add(text);
  }

  /**
   * Split text into [piece, matched] pairs. Matched pieces are token texts
   * (with spaces already mapped to the marker); unmatched pieces are single
   * original characters the caller byte-encodes.
   */
  segment(text: string): Array<[string, boolean]> {
    if (text === '') return [];
    const chars = codePoints(text);
    const view = chars.map((c) => (c === ' ' ? this.marker : c));
    const n = chars.length;
    // spans crossing a literal marker can never match: the token would need
    // a marker there, which only spaces are allowed to satisfy
    const literalPositions: number[] = [];
    for (let i = 0; i < n; i++) {
      if (chars[i] === this.marker) literalPositions.push(i);
    }
    literalPositions.push(n);
    let nextLiteral = 0;

    const out: Array<[string, boolean]> = [];
    let i = 0;
    while (i < n) {
      if (chars[i] === this.marker) {
        out.push([this.marker, false]);
        i += 1;
        continue;
      }
      while (literalPositions[nextLiteral]! < i) nextLiteral += 1;
      const limit = literalPositions[nextLiteral]! - i;
      let matched = false;
      for (const length of this.lengths) {
        if (length > limit) continue;
        const candidate = view.slice(i, i + length).join('');
        if (this.byLen.get(length)!.has(candidate)) {
          out.push([candidate, true]);
          i += length;
          matched = true;
          break;
        }
      }
      if (!matched) {
        out.push([chars[i]!, false]);
        i += 1;
      }
    }
    return out;
  }
}

/**
 * An immutable loaded vocabulary: ordered token texts with dense ids,
 * special and byte-fallback classification, and a lazily built matcher.
 */
export class BoundVocabulary {
  readonly index = new Map<string, number>();
  private readonly fallbackIds = new Map<number, number>();
  private matcherCache: GreedyMatcher | null = null;

  constructor(
    readonly tokens: string[],
    readonly kinds: TokenKind[],
    readonly baseSize: number,
    readonly marker: string,
    readonly byteFallback: boolean,
  ) {
    tokens.forEach((text, id) => {
      this.index.set(text, id);
      if (kinds[id] === 'byte_fallback') {
        this.fallbackIds.set(parseByteToken(text)!, id);
      }
    });
  }

  get size(): number {
    return this.tokens.length;
  }

  /** Token texts appended after the base partition, in id order. */
  extensionTexts(): string[] {
    return this.tokens.slice(this.baseSize);
  }

  private get matcher(): GreedyMatcher {
    if (!this.matcherCache) {
      this.matcherCache = new GreedyMatcher(
        this.tokens.filter((_, id) => this.kinds[id] === 'normal'),
        this.marker,
      );
    }
    return this.matcherCache;
  }

  /**
   * Encode text as token ids: greedy longest match at every position, with
   * uncovered characters emitted as the byte tokens of their UTF-8 bytes.
   */
  encode(text: string): number[] {
    const ids: number[] = [];
    const encoder = new TextEncoder();
    let bytePos = 0; // offset into the original text, for error reporting
    for (const [piece, matched] of this.matcher.segment(text)) {
      if (matched) {
        ids.push(this.index.get(piece)!);
        // markers inside a matched piece stand for original 1-byte spaces
        bytePos += encoder.encode(piece.split(this.marker).join(' ')).length;
        continue;
      }
      if (!this.byteFallback) {
        throw new UnencodableTextError(piece, bytePos);
      }
      const cp = piece.codePointAt(0)!;
      if (cp >= 0xd800 && cp <= 0xdfff) {
        // lone surrogate: not encodable as UTF-8
        throw new UnencodableTextError(piece, bytePos);
      }
      for (const b of encoder.encode(piece)) {
        ids.push(this.fallbackIds.get(b)!);
      }
      bytePos += encoder.encode(piece).length;
    }
    return ids;
  }

  /**
   * Decode token ids back to text; the exact inverse of encode. Byte runs
   * decode as strict UTF-8; markers in normal tokens map back to spaces
   * unless markerToSpace is false.
   */
  decode(ids: Iterable<number>, markerToSpace = true): string {
    const parts: string[] = [];
    let pending: number[] = [];
    const decoder = new TextDecoder('utf-8', { fatal: true });
    const flush = () => {
      if (pending.length) {
        try {
          parts.push(decoder.decode(Uint8Array.from(pending)));
        } catch {
          throw new VocabError(`byte-fallback run is not valid UTF-8: [${pending}]`);
        }
        pending = [];
      }
    };
    for (const id of ids) {
      if (!Number.isInteger(id) || id < 0 || id >= this.size) {
        throw new InvalidTokenIdError(id, this.size);
      }
      const kind = this.kinds[id]!;
      if (kind === 'byte_fallback') {
        pending.push(parseByteToken(this.tokens[id]!)!);
        continue;
      }
      flush();
      const text = this.tokens[id]!;
      parts.push(
        kind === 'normal' && markerToSpace ? text.split(this.marker).join(' ') : text,
      );
    }
    flush();
    return parts.join('');
  }
}

function requireField<T>(doc: Record<string, unknown>, name: string, check: (v: unknown) => v is T): T {
  if (!(name in doc)) {
    throw new VocabFormatError(`vocabulary file is missing field: ${name}`);
  }
  const value = doc[name];
  if (!check(value)) {
    throw new VocabFormatError(`vocabulary field ${name} has the wrong type`);
  }
  return value;
}

const isInt = (v: unknown): v is number => Number.isInteger(v);
const isStr = (v: unknown): v is string => typeof v === 'string';
const isBool = (v: unknown): v is boolean => typeof v === 'boolean';
const isStrList = (v: unknown): v is string[] =>
  Array.isArray(v) && v.every((x) => typeof x === 'string');

/** Load a vocabulary JSON file written by the CLI. */
export function loadVocab(path: string): BoundVocabulary {
  let doc: unknown;
  try {
    doc = JSON.parse(readFileSync(path, 'utf-8'));
  } catch (e) {
    if (e instanceof SyntaxError) {
      throw new VocabFormatError(`not a valid vocabulary file: ${e.message}`);
    }
    throw e;
  }
  if (typeof doc !== 'object' || doc === null || Array.isArray(doc)) {
    throw new VocabFormatError('vocabulary file must contain a JSON object');
  }
  const obj = doc as Record<string, unknown>;
  const version = requireField(obj, 'version', isInt);
  if (version !== VOCAB_FORMAT_VERSION) {
    throw new VocabFormatError(
      `unsupported vocabulary version ${version} (expected ${VOCAB_FORMAT_VERSION})`,
    );
  }
  const baseSize = requireField(obj, 'base_size', isInt);
  const marker = requireField(obj, 'marker', isStr);
  const byteFallback = requireField(obj, 'byte_fallback', isBool);
  const specials = requireField(obj, 'specials', isStrList);
  const tokens = requireField(obj, 'tokens', isStrList);
  const specialSet = new Set(specials);
  for (const s of specialSet) {
    if (!tokens.includes(s)) {
      throw new VocabFormatError(`specials not present in token list: ${s}`);
    }
  }
  if (baseSize < 0 || baseSize > tokens.length) {
    throw new VocabFormatError(`base_size ${baseSize} out of range for ${tokens.length} tokens`);
  }
  if (codePoints(marker).length !== 1) {
    throw new VocabFormatError(`marker must be a single character, got ${JSON.stringify(marker)}`);
  }
  const seen = new Set<string>();
  const kinds: TokenKind[] = tokens.map((text) => {
    if (text === '') throw new VocabFormatError('token text must be non-empty');
    if (seen.has(text)) throw new VocabFormatError(`duplicate token text: ${text}`);
    seen.add(text);
    if (specialSet.has(text)) return 'special';
    return parseByteToken(text) !== null ? 'byte_fallback' : 'normal';
  });
  return new BoundVocabulary(tokens, kinds, baseSize, marker, byteFallback);
}
