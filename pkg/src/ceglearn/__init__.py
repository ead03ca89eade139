"""ceglearn: online pattern learning for cause-effect extraction.

Detects causal sentences by lexico-syntactic pattern compliance over
constituency parses, extracts cause/effect phrases via learned tree-path
selectors, and improves interactively from human corrections.
"""

from .corpus import Artifact, ArtifactError, ArtifactRecord, load_artifact, load_corpus
from .engine import (
    CorpusEntry,
    CreationFailure,
    DetectionResult,
    EngineState,
    SpecOutcome,
    TrainOutcome,
    Violation,
    check_invariants,
    create_pattern,
    detect,
    specify,
    train_causal,
    train_noncausal,
)
from .harness import (
    ExperimentReport,
    Flag,
    FlagCounts,
    Measures,
    PrecisionRecallF1,
    RunReport,
    UndefinedMeasuresError,
    aggregate_prf,
    compute_measures,
    full_train,
    report_to_csv,
    report_to_doc,
    run_rq1,
    run_rq2,
)
from .patterns import (
    CauseEffectGraph,
    ExtractionFailure,
    GenerationFailure,
    LexicalConstraint,
    Pattern,
    Phrase,
    PhraseExtractor,
    Selector,
    Signature,
    apply_extractor,
    generate_extractor,
    is_applicable,
    is_compliant,
    make_ceg,
    validate_ceg,
)
from .store import (
    PrincipleViolationError,
    StoreFormatError,
    StoreVersionError,
    load_store,
    save_store,
)
from .trees import (
    BracketParseError,
    ConstituencyNode,
    DependencyEdge,
    DependencyParseError,
    ParsedSentence,
    RootLabelError,
    Token,
    TreePath,
    detokenize,
    node_at,
    normalize_ws,
    parse_bracketed_tree,
    parse_dependencies,
    to_bracketed,
    yield_of,
)

__version__ = "0.1.0"
