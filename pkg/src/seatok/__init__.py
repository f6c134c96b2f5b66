"""Subword vocabulary extension, encoding-efficiency metrics, and multilingual
data pipeline tools."""

from .vocab import (
    DEFAULT_MARKER,
    DuplicateTokenError,
    GreedyMatcher,
    InvalidTokenIdError,
    Token,
    UnencodableTextError,
    Vocabulary,
    VocabError,
    VocabFormatError,
    append_extension,
    build_vocabulary,
    byte_token_text,
    detokenize,
    import_external_vocab,
    load_vocab,
    parse_byte_token,
    save_vocab,
    tokenize,
)
from .extend import (
    ExtendError,
    ExtensionReport,
    FilterConfig,
    FrequencyTable,
    MergeResult,
    exhaustive_merge,
    load_frequencies,
    prune_candidates,
    quality_filter,
    save_frequencies,
    save_report,
    vocab_extend,
)
from .metrics import (
    CompressionReport,
    MetricsError,
    ParallelCorpus,
    ParallelPair,
    TokenStats,
    compression_ratio,
    corpus_token_stats,
    format_table,
    load_parallel_corpus,
    save_compression_report,
)
from .corpus import CorpusError, Document, load_corpus, save_corpus
from .langid import (
    LangIdError,
    LanguageProfile,
    SubprocessLanguageDetector,
    detect_language,
    filter_corpus,
    load_profiles,
    save_profiles,
    train_profiles,
)
from .sampling import Phase, SampleError, SamplingSchedule, sample_stream
from .packing import (
    PackedSequence,
    PackError,
    load_packed_binary,
    load_packed_jsonl,
    pack_documents,
    pack_hybrid,
    save_packed_binary,
    save_packed_jsonl,
)
from .multiturn import (
    Conversation,
    MultiturnError,
    encode_conversation,
    join_multiturn,
    load_conversations,
    render_conversation,
    save_conversations,
)
from .preference import (
    AlwaysFirstJudge,
    DroppedPair,
    HttpJudge,
    JudgeError,
    LexicographicJudge,
    LongerWinsJudge,
    PreferenceRecord,
    SubprocessJudge,
    build_preference_dataset,
    export_dpo,
    judge_pair,
    load_dpo,
    load_records,
    save_dropped,
    save_records,
)

__version__ = "0.1.0"
