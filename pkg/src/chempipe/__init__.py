"""Offset-exact core of a chemical NER, entity-linking, and topic-indexing
pipeline. Neural models stay out of process; their token probabilities,
embedding vectors, and generated answers enter through the file formats
documented in each module."""

from .corpus import (
    Annotation,
    CorpusFormatError,
    CorpusValidationError,
    Document,
    Passage,
    load_corpus,
    validate_document,
    write_corpus,
)
from .linker import (
    ConceptIndex,
    ConceptRecord,
    EmbeddingTable,
    LinkResult,
    PairBatch,
    RefineConfig,
    build_index,
    link_mention,
    mine_hard_triplets,
    nearest,
    refine_embeddings,
    sap_loss,
    sap_loss_grad,
)
from .metrics import (
    MatchCounts,
    MetricReport,
    evaluate_indexing,
    evaluate_linking,
    evaluate_ner,
    harmonic_f1,
    match_spans,
    prf,
)
from .sentences import SentenceSpan, boundary_conflicts, document_sentences, split_sentences
from .tagging import (
    EnsembleSpec,
    TaggedSpan,
    TokenProbMatrix,
    argmax_decode,
    decode_spans,
    encode_bio,
    ensemble_probs,
)
from .text2text import (
    IndexWindow,
    PromptExample,
    RecoveryReport,
    UnsupportedTaskStyleError,
    aggregate_topics,
    index_windows,
    make_prompt,
    parse_answer,
    recover_spans,
)

__version__ = "0.1.0"
