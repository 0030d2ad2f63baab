"""sifkit: standard-item-format toolkit for educational resources.

Validation and conversion of item text, component segmentation, text and
LaTeX tokenization (linear and AST-based), vocabulary/dataset/batching
machinery, embedding backends with item/token vector interfaces, task
metric suites, and a configurable preprocessing + task pipeline.
"""

from .errors import SifkitError
from .items import (
    Segment,
    SegmentKind,
    SegmentList,
    SifItem,
    item_to_record,
    parse_record,
    render,
)
from .sif import ValidationReport, Violation, ViolationCode, is_sif, to_sif, validate
from .segment import filter_segments, seg
from .formula import (
    AstNode,
    FormulaForest,
    FormulaGraph,
    FormulaToken,
    ast_tokenize,
    build_graph,
    detokenize,
    graph_to_json,
    group_parse,
    linear_tokenize,
    parse_formula,
)
from .text import TextTokConfig, load_stopwords, tokenize_text
from .tokenizer import (
    Batch,
    TokenSeq,
    TokenizerConfig,
    Vocab,
    build_vocab,
    collate,
    encode,
    load_vocab,
    save_vocab,
    tokenize_item,
)
from .dataset import (
    EduDataset,
    build_dataset,
    iterate_batches,
    read_jsonl,
    resolve_figure,
    write_jsonl,
)
from .embedding import (
    EmbeddingModel,
    TrainConfig,
    hashed_baseline,
    i2v,
    load_model,
    save_model,
    t2v,
    train_skipgram,
)
from .metrics import (
    MetricReport,
    ResponseRecord,
    accuracy,
    cosine,
    difficulty_from_responses,
    discrimination_from_responses,
    mae,
    mse,
    multilabel_prf,
    ndcg,
    pearson,
    r2_score,
    regression_metrics,
    rmse,
    similarity_task,
    spearman,
)
from .pipeline import (
    Pipeline,
    PipelineConfig,
    StepSpec,
    add_pipe,
    pipeline_build,
    run,
)

__version__ = "0.1.0"
