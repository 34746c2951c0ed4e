"""Table-text hybrid question answering toolkit.

Pipeline: retrieve evidence over paragraphs and table descriptions,
reconstruct evidence-bearing hierarchical tables into minimal sub-tables,
prompt a completion model with retrieval-of-thought triggers, evaluate with
EM / token F1 and recall@k.
"""

from .corpus import (
    AnswerValue,
    Corpus,
    Document,
    Paragraph,
    Question,
    ingest_corpus,
    read_jsonl,
    write_corpus,
    write_jsonl,
)
from .errors import (
    BackendError,
    ConfigError,
    DataError,
    ProgramEvalError,
    ProgramParseError,
    TtqaError,
)
from .evalmetrics import (
    MetricsReport,
    PredictionRecord,
    build_report,
    score_em,
    score_f1,
)
from .llmgateway import (
    CompletionCache,
    CompletionRequest,
    CompletionResult,
    HttpBackend,
    LlmGateway,
    MockBackend,
)
from .pipeline import RunConfig, run_pipeline
from .programdsl import (
    NormalizedAnswer,
    Program,
    eval_program,
    extract_answer,
    parse_program,
    render_program,
)
from .promptkit import (
    ANSWER_TRIGGER,
    COT_TRIGGER,
    FEW_SHOT_TRIGGER,
    ZERO_SHOT_TRIGGER,
    Demonstration,
    PreparedEvidence,
    PromptBundle,
    answer_trigger,
    build_few_shot,
    build_zero_shot,
    select_demos,
)
from .reconstruct import (
    ReconstructedTable,
    ReservationSets,
    reconstruct_tables,
    reserve,
)
from .retrieval import (
    CandidateSet,
    Evidence,
    RelevanceScore,
    RetrievalConfig,
    build_candidates,
    classify_question,
    recall_at_k,
    score_candidates,
    select_topk,
)
from .tabletree import (
    Cell,
    CellRef,
    HierTable,
    TableDescription,
    TableSpanList,
    compute_span_list,
    header_paths,
    linearize,
    parse_numeric,
    render_table,
)

__version__ = "0.1.0"
