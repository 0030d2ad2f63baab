"""Configurable preprocess/task pipeline over streams of items.

A pipeline is an immutable value built from a config; construction
validates every step and loads task resources up front, so a pipeline
that builds will not fail on configuration once data starts flowing.
add_pipe returns a new pipeline with the step inserted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    BadParams,
    BadPosition,
    NotSif,
    SifkitError,
    UnknownStep,
)
from .items import SifItem, parse_record
from .metrics import (
    MetricReport,
    accuracy,
    mae,
    mse,
    ndcg,
    pearson,
    r2_score,
    rmse,
    similarity_task,
    spearman,
)
from .segment import seg
from .sif import to_sif, validate
from .text import TextTokConfig, load_stopwords
from .tokenizer import TokenizerConfig, encode, load_vocab, tokenize_item

_REQUIRED = object()

_TOKENIZER_PARAMS = {
    "tokenizer": "pure_text",
    "formula": None,
    "symbol": "",
    "distinct_marks": False,
    "lowercase": True,
    "keep_punct": True,
    "stopwords": None,
}

STEP_SCHEMAS = {
    "to_sif": {},
    "validate": {},
    "seg": {"symbol": ""},
    "tokenize": dict(_TOKENIZER_PARAMS),
    "encode": {"vocab": _REQUIRED, "add_bos_eos": False},
}

TASK_SCHEMAS = {
    "similarity": {"model": _REQUIRED, "pairs": None, **_TOKENIZER_PARAMS},
    "embed": {"model": _REQUIRED, **_TOKENIZER_PARAMS},
    "metrics": {"pred": _REQUIRED, "gold": _REQUIRED, "metrics": ["mae", "mse", "rmse"]},
}

METRIC_FUNCS = {
    "mae": mae,
    "mse": mse,
    "rmse": rmse,
    "r2": r2_score,
    "ndcg": lambda pred, gold: ndcg(pred, gold),
    "pcc": pearson,
    "scc": spearman,
    "acc": accuracy,
}


def tokenizer_config_from_params(params: dict, index=None) -> TokenizerConfig:
    """Shared translation of step/CLI parameters into a TokenizerConfig."""
    stopwords = frozenset()
    if params.get("stopwords"):
        stopwords = load_stopwords(params["stopwords"])
    text = TextTokConfig(
        lowercase=params.get("lowercase", True),
        keep_punct=params.get("keep_punct", True),
        stopwords=stopwords,
    )
    name = params.get("tokenizer", "pure_text")
    symbol = params.get("symbol", "") or ""
    try:
        if name == "pure_text":
            if params.get("formula") not in (None, "linear"):
                raise ValueError("pure_text tokenizer implies linear formulas")
            return TokenizerConfig.pure_text(symbol=symbol, text=text)
        if name == "ast_formula":
            if params.get("formula") not in (None, "ast"):
                raise ValueError("ast_formula tokenizer implies AST formulas")
            return TokenizerConfig.ast_formula(symbol=symbol, text=text)
        if name == "custom":
            return TokenizerConfig.custom(
                formula=params.get("formula") or "linear",
                symbol=symbol,
                text=text,
                distinct_marks=params.get("distinct_marks", False),
            )
    except ValueError as exc:
        raise BadParams(str(exc), index=index) from exc
    raise BadParams(f"unknown tokenizer {name!r}", index=index)


def _materialize(params: dict, schema: dict, index, where: str) -> dict:
    for key in params:
        if key not in schema:
            raise BadParams(f"unknown parameter {key!r} for {where}", index=index)
    filled = {}
    for key, default in schema.items():
        if key in params:
            filled[key] = params[key]
        elif default is _REQUIRED:
            raise BadParams(f"{where} requires parameter {key!r}", index=index)
        else:
            filled[key] = default
    return filled


@dataclass(frozen=True)
class StepSpec:
    name: str
    params: dict

    def to_dict(self) -> dict:
        return {"name": self.name, "params": dict(self.params)}


@dataclass(frozen=True)
class PipelineConfig:
    preprocess: tuple[StepSpec, ...] = ()
    task: StepSpec | None = None
    fail_fast: bool = True

    @classmethod
    def from_dict(cls, obj: dict) -> "PipelineConfig":
        steps = tuple(
            StepSpec(s.get("name", ""), dict(s.get("params", {})))
            for s in obj.get("preprocess", [])
        )
        task = None
        if obj.get("task") is not None:
            t = obj["task"]
            task = StepSpec(t.get("name", ""), dict(t.get("params", {})))
        return cls(steps, task, bool(obj.get("fail_fast", True)))

    def to_dict(self) -> dict:
        return {
            "preprocess": [s.to_dict() for s in self.preprocess],
            "task": self.task.to_dict() if self.task else None,
            "fail_fast": self.fail_fast,
        }


class Pipeline:
    """Validated, resource-loaded pipeline; treat as immutable."""

    def __init__(self, config: PipelineConfig, step_runners, task_runner):
        self.config = config
        self._step_runners = tuple(step_runners)
        self._task_runner = task_runner

    def __len__(self):
        return len(self._step_runners)

    def to_dict(self) -> dict:
        return self.config.to_dict()


def _make_step_runner(name: str, params: dict, index: int):
    if name == "to_sif":
        def run_to_sif(record):
            record["content"] = to_sif(record["content"])
            return record
        return run_to_sif

    if name == "validate":
        def run_validate(record):
            report = validate(record["content"])
            record["valid"] = report.valid
            record["violations"] = [
                {"code": v.code.value, "span": list(v.span), "message": v.message}
                for v in report.violations
            ]
            if not report.valid and record.get("_fail_fast", True):
                first = report.violations[0]
                raise NotSif(f"{first.code.value}: {first.message}", report=report)
            return record
        return run_validate

    if name == "seg":
        symbol = params["symbol"]
        def run_seg(record):
            segments = seg(record["content"], symbol)
            record["segments"] = [
                {"kind": s.kind.value, "payload": s.payload} for s in segments
            ]
            return record
        return run_seg

    if name == "tokenize":
        cfg = tokenizer_config_from_params(params, index=index)
        def run_tokenize(record):
            item = record["item"]
            if item.content != record["content"]:
                item = SifItem(content=record["content"], id=item.id)
            record["tokens"] = list(tokenize_item(item, cfg).tokens)
            return record
        return run_tokenize

    if name == "encode":
        vocab = load_vocab(params["vocab"])
        add_bos_eos = bool(params["add_bos_eos"])
        def run_encode(record):
            if "tokens" not in record:
                raise BadParams("encode step requires a tokenize step before it",
                                index=index)
            seq = encode(tuple(record["tokens"]), vocab, add_bos_eos=add_bos_eos)
            record["tokens"] = list(seq.tokens)
            record["ids"] = list(seq.ids)
            return record
        return run_encode

    raise UnknownStep(name, index)


def load_pairs(path):
    """Similarity pairs file: {"content1", "content2", "similarity"} per line."""
    pairs, gold = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            rec = json.loads(line)
            pairs.append((SifItem(content=rec["content1"], id=f"{lineno}a"),
                          SifItem(content=rec["content2"], id=f"{lineno}b")))
            gold.append(float(rec["similarity"]))
    return pairs, gold


def _read_value_file(path) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            values[str(rec["id"])] = float(rec["value"])
    return values


def _make_task_runner(task: StepSpec | None):
    if task is None:
        return None
    name, params = task.name, task.params

    if name == "embed":
        from .embedding import i2v, load_model

        model = load_model(params["model"])
        cfg = tokenizer_config_from_params(params)

        def run_embed(records):
            for record in records:
                vec = i2v(model, record["item"], cfg)
                yield {"id": record.get("id"), "vector": [float(x) for x in vec]}
        return run_embed

    if name == "similarity":
        from .embedding import load_model

        model = load_model(params["model"])
        cfg = tokenizer_config_from_params(params)

        def run_similarity(records):
            if params["pairs"] is None:
                raise BadParams("similarity task needs a 'pairs' file path")
            for _ in records or ():  # preprocess output is not consumed further
                pass
            pairs, gold = load_pairs(params["pairs"])
            report = similarity_task(model, pairs, gold, cfg)
            out = {"task": "similarity", "sample_count": report.sample_count,
                   "excluded": report.excluded, **report.values}
            if report.error:
                out["error"] = report.error
            yield out
        return run_similarity

    if name == "metrics":
        metric_names = [m.lower() for m in params["metrics"]]
        for m in metric_names:
            if m not in METRIC_FUNCS:
                raise BadParams(f"unknown metric {m!r}; choose from "
                                f"{sorted(METRIC_FUNCS)}")

        def run_metrics(records):
            for _ in records or ():
                pass
            pred = _read_value_file(params["pred"])
            gold = _read_value_file(params["gold"])
            if set(pred) != set(gold):
                raise BadParams("pred and gold files must cover the same ids")
            ids = sorted(pred)
            p = [pred[i] for i in ids]
            g = [gold[i] for i in ids]
            out = {"task": "metrics", "sample_count": len(ids)}
            for m in metric_names:
                out[m] = METRIC_FUNCS[m](p, g)
            yield out
        return run_metrics

    raise UnknownStep(name, -1)


def pipeline_build(cfg: PipelineConfig | dict) -> Pipeline:
    """Validate the whole config and load task resources before any data."""
    if isinstance(cfg, dict):
        cfg = PipelineConfig.from_dict(cfg)
    materialized_steps = []
    runners = []
    for index, step in enumerate(cfg.preprocess):
        if step.name not in STEP_SCHEMAS:
            raise UnknownStep(step.name, index)
        params = _materialize(step.params, STEP_SCHEMAS[step.name], index,
                              f"step {step.name!r}")
        materialized_steps.append(StepSpec(step.name, params))
        runners.append(_make_step_runner(step.name, params, index))
    task = None
    if cfg.task is not None:
        if cfg.task.name not in TASK_SCHEMAS:
            raise UnknownStep(cfg.task.name, len(materialized_steps))
        params = _materialize(cfg.task.params, TASK_SCHEMAS[cfg.task.name],
                              len(materialized_steps), f"task {cfg.task.name!r}")
        task = StepSpec(cfg.task.name, params)
    task_runner = _make_task_runner(task)
    final = PipelineConfig(tuple(materialized_steps), task, cfg.fail_fast)
    return Pipeline(final, runners, task_runner)


def add_pipe(pipeline: Pipeline, step: StepSpec | dict,
             position: int | None = None) -> Pipeline:
    """New pipeline with the step inserted (appended when position is absent)."""
    if isinstance(step, dict):
        step = StepSpec(step.get("name", ""), dict(step.get("params", {})))
    steps = list(pipeline.config.preprocess)
    if position is None:
        position = len(steps)
    if not 0 <= position <= len(steps):
        raise BadPosition(
            f"position {position} outside [0, {len(steps)}]")
    steps.insert(position, step)
    return pipeline_build(
        PipelineConfig(tuple(steps), pipeline.config.task, pipeline.config.fail_fast))


class _RunStream:
    """Iterates pipeline outputs; tolerant-mode failures collect in .errors."""

    _OUTPUT_KEYS = ("id", "content", "valid", "violations", "segments",
                    "tokens", "ids")

    def __init__(self, pipeline: Pipeline, items):
        self.pipeline = pipeline
        self.items = items
        self.errors: list[tuple[str | None, str, str]] = []

    def _preprocessed(self):
        for item in self.items or ():
            record = {"item": item, "id": item.id, "content": item.content,
                      "_fail_fast": self.pipeline.config.fail_fast}
            step_name = None
            try:
                for spec, runner in zip(self.pipeline.config.preprocess,
                                        self.pipeline._step_runners):
                    step_name = spec.name
                    record = runner(record)
            except SifkitError as exc:
                if self.pipeline.config.fail_fast:
                    raise SifkitError(
                        f"item {item.id!r}, step {step_name!r}: {exc}") from exc
                self.errors.append((item.id, step_name or "", str(exc)))
                continue
            yield record

    def __iter__(self):
        records = self._preprocessed()
        if self.pipeline._task_runner is not None:
            yield from self.pipeline._task_runner(records)
            return
        for record in records:
            yield {k: record[k] for k in self._OUTPUT_KEYS if k in record}


def run(pipeline: Pipeline, items) -> _RunStream:
    """Apply the preprocess steps per item, then the task stage if any."""
    return _RunStream(pipeline, items)
