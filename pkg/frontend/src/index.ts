export {
  BoundVocabulary,
  DEFAULT_MARKER,
  InvalidTokenIdError,
  UnencodableTextError,
  VOCAB_FORMAT_VERSION,
  VocabError,
  VocabFormatError,
  byteTokenText,
  loadVocab,
  parseByteToken,
  type TokenKind,
} from './vocab.js';

export {
  CliRunError,
  extendVocabulary,
  runSeatok,
  type ExtendOptions,
  type ExtendSummary,
} from './extend.js';
