"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data/IO error, 3 validation
failures present. All commands read and write JSONL unless noted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dataset import read_jsonl, write_jsonl
from .embedding import (
    TrainConfig,
    hashed_baseline,
    i2v,
    load_model,
    save_model,
    train_skipgram,
)
from .errors import BadParams, SifkitError, Unconvertible, UnknownStep
from .formula import build_graph, graph_to_json, group_parse
from .items import item_to_record
from .metrics import (
    difficulty_from_responses,
    discrimination_from_responses,
    multilabel_prf,
    similarity_task,
)
from .pipeline import (
    METRIC_FUNCS,
    PipelineConfig,
    load_pairs,
    pipeline_build,
    run,
    tokenizer_config_from_params,
)
from .sif import to_sif, validate
from .tokenizer import build_vocab, load_vocab, save_vocab, tokenize_item


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_tokenizer_args(parser):
    parser.add_argument("--tokenizer", default="pure_text",
                        choices=["pure_text", "ast_formula", "custom"])
    parser.add_argument("--symbol", default="",
                        help="mask flags, subset of 'tfgm'")
    parser.add_argument("--formula", default=None, choices=["linear", "ast"],
                        help="formula token style (custom tokenizer)")
    parser.add_argument("--distinct-marks", action="store_true",
                        help="emit [BLANK]/[CHOICE]/[TAG]/[SEP] instead of [MARK]")
    parser.add_argument("--no-lowercase", action="store_true")
    parser.add_argument("--drop-punct", action="store_true")
    parser.add_argument("--stopwords", default=None, help="stopword file path")


def _tokenizer_cfg(args):
    return tokenizer_config_from_params({
        "tokenizer": args.tokenizer,
        "symbol": args.symbol,
        "formula": args.formula,
        "distinct_marks": args.distinct_marks,
        "lowercase": not args.no_lowercase,
        "keep_punct": not args.drop_punct,
        "stopwords": args.stopwords,
    })


def _print_json(obj, output=None):
    text = json.dumps(obj, ensure_ascii=False, indent=2)
    if output:
        Path(output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


# --- command handlers -------------------------------------------------------

def cmd_validate(args) -> int:
    rows = []
    invalid = 0
    for item in read_jsonl(args.input):
        report = validate(item.content)
        if not report.valid:
            invalid += 1
        rows.append({
            "id": item.id,
            "valid": report.valid,
            "violations": [
                {"code": v.code.value, "span": list(v.span), "message": v.message}
                for v in report.violations
            ],
        })
    if args.report:
        write_jsonl(args.report, rows)
    print(f"{len(rows)} item(s), {invalid} invalid", file=sys.stderr)
    return 3 if invalid else 0


def cmd_convert(args) -> int:
    reader = read_jsonl(args.input, skip_bad=args.skip_bad)
    records = []
    skipped = 0
    for item in reader:
        try:
            converted = to_sif(item.content)
        except Unconvertible as exc:
            if args.skip_bad:
                skipped += 1
                continue
            raise SifkitError(f"item {item.id!r}: {exc}") from exc
        rec = item_to_record(item)
        rec["content"] = converted
        records.append(rec)
    write_jsonl(args.output, records)
    skipped += reader.rejected
    print(f"converted {len(records)} item(s), skipped {skipped}", file=sys.stderr)
    return 0


def cmd_tokenize(args) -> int:
    cfg = _tokenizer_cfg(args)
    rows = ({"id": item.id, "tokens": list(tokenize_item(item, cfg).tokens)}
            for item in read_jsonl(args.input))
    write_jsonl(args.output, rows)
    return 0


def cmd_vocab_build(args) -> int:
    cfg = _tokenizer_cfg(args)
    seqs = (tokenize_item(item, cfg) for item in read_jsonl(args.input))
    vocab = build_vocab(seqs, min_count=args.min_count)
    save_vocab(vocab, args.output)
    print(f"vocab of {len(vocab)} tokens written to {args.output}", file=sys.stderr)
    return 0


def cmd_train_w2v(args) -> int:
    cfg = _tokenizer_cfg(args)
    corpus = [tokenize_item(item, cfg) for item in read_jsonl(args.input)]
    train_cfg = TrainConfig(
        dim=args.dim, window=args.window, min_count=args.min_count,
        negatives=args.negatives, epochs=args.epochs,
        learning_rate=args.learning_rate, seed=args.seed,
    )
    model = train_skipgram(corpus, train_cfg)
    save_model(model, args.output)
    losses = ", ".join(f"{x:.4f}" for x in model.meta["epoch_losses"])
    print(f"trained on {len(corpus)} item(s); epoch losses: {losses}", file=sys.stderr)
    return 0


def cmd_baseline_hashed(args) -> int:
    if args.vocab:
        vocab = load_vocab(args.vocab)
    else:
        cfg = _tokenizer_cfg(args)
        seqs = (tokenize_item(item, cfg) for item in read_jsonl(args.input))
        vocab = build_vocab(seqs, min_count=args.min_count)
    model = hashed_baseline(vocab, dim=args.dim, seed=args.seed)
    save_model(model, args.output)
    print(f"hashed baseline over {len(vocab)} tokens written to {args.output}",
          file=sys.stderr)
    return 0


def cmd_embed(args) -> int:
    model = load_model(args.model)
    cfg = _tokenizer_cfg(args)
    rows = ({"id": item.id, "vector": [float(x) for x in i2v(model, item, cfg)]}
            for item in read_jsonl(args.input))
    write_jsonl(args.output, rows)
    return 0


def cmd_formula_graph(args) -> int:
    formulas = [line.strip() for line in
                Path(args.input).read_text(encoding="utf-8").splitlines()
                if line.strip()]
    graph = build_graph(group_parse(formulas))
    _print_json(graph_to_json(graph), args.output)
    return 0


def cmd_eval_similarity(args) -> int:
    model = load_model(args.model)
    cfg = _tokenizer_cfg(args)
    pairs, gold = load_pairs(args.pairs)
    report = similarity_task(model, pairs, gold, cfg)
    out = {"sample_count": report.sample_count, "excluded": report.excluded,
           **report.values}
    if report.error:
        out["error"] = report.error
    _print_json(out, args.output)
    return 0


def _read_value_rows(path):
    values = {}
    for item_rec in _iter_jsonl_dicts(path):
        values[str(item_rec["id"])] = float(item_rec["value"])
    return values


def _iter_jsonl_dicts(path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield json.loads(line)


def cmd_eval_regression(args) -> int:
    names = [m.strip().lower() for m in args.metrics.split(",") if m.strip()]
    for name in names:
        if name not in METRIC_FUNCS:
            raise _UsageError(f"unknown metric {name!r}; choose from "
                              f"{','.join(sorted(METRIC_FUNCS))}")
    pred = _read_value_rows(args.pred)
    gold = _read_value_rows(args.gold)
    if set(pred) != set(gold):
        raise SifkitError("pred and gold files must cover the same ids")
    ids = sorted(pred)
    p = [pred[i] for i in ids]
    g = [gold[i] for i in ids]
    out = {"sample_count": len(ids)}
    for name in names:
        out[name] = METRIC_FUNCS[name](p, g)
    _print_json(out, args.output)
    return 0


def cmd_eval_knowledge(args) -> int:
    def read_labels(path):
        return {str(rec["id"]): frozenset(rec["knowledge"])
                for rec in _iter_jsonl_dicts(path)}

    pred = read_labels(args.pred)
    gold = read_labels(args.gold)
    if set(pred) != set(gold):
        raise SifkitError("pred and gold files must cover the same ids")
    ids = sorted(pred)
    precision, recall, f1 = multilabel_prf(
        [gold[i] for i in ids], [pred[i] for i in ids], average=args.average)
    _print_json({"sample_count": len(ids), "precision": precision,
                 "recall": recall, "f1": f1}, args.output)
    return 0


def cmd_stats(args) -> int:
    from .metrics import ResponseRecord

    log = [ResponseRecord(str(rec["item_id"]), str(rec["student_id"]),
                          bool(rec["correct"]))
           for rec in _iter_jsonl_dicts(args.responses)]
    item_ids = sorted({r.item_id for r in log})
    if args.stat == "difficulty":
        rows = [{"item_id": i, "difficulty": difficulty_from_responses(log, i)}
                for i in item_ids]
    else:
        rows = [{"item_id": i,
                 "discrimination": discrimination_from_responses(
                     log, i, fraction=args.fraction)}
                for i in item_ids]
    write_jsonl(args.output, rows)
    return 0


def cmd_pipeline(args) -> int:
    cfg_obj = json.loads(Path(args.config).read_text(encoding="utf-8"))
    cfg = PipelineConfig.from_dict(cfg_obj)
    if (cfg.task is not None and cfg.task.name == "similarity"
            and not cfg.task.params.get("pairs")):
        cfg.task.params["pairs"] = args.input
    pipeline = pipeline_build(cfg)
    items = list(read_jsonl(args.input)) if args.input else []
    stream = run(pipeline, items)
    rows = list(stream)
    if pipeline.config.task is not None and pipeline.config.task.name in (
            "similarity", "metrics"):
        _print_json(rows[0] if rows else {}, args.output)
    else:
        write_jsonl(args.output, rows)
    if stream.errors:
        print(f"{len(stream.errors)} item(s) failed", file=sys.stderr)
    return 0


# --- parser ------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="sifkit",
                     description="Standard-item-format toolkit for educational resources")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check items against the SIF grammar")
    p.add_argument("--input", required=True)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert raw items into SIF form")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--skip-bad", action="store_true")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("tokenize", help="tokenize items")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_tokenizer_args(p)
    p.set_defaults(func=cmd_tokenize)

    vocab = sub.add_parser("vocab", help="vocabulary commands")
    vocab_sub = vocab.add_subparsers(dest="vocab_command", required=True)
    p = vocab_sub.add_parser("build", help="build a vocabulary file")
    p.add_argument("--input", required=True)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--output", required=True)
    _add_tokenizer_args(p)
    p.set_defaults(func=cmd_vocab_build)

    train = sub.add_parser("train", help="train embedding models")
    train_sub = train.add_subparsers(dest="train_command", required=True)
    p = train_sub.add_parser("w2v", help="skip-gram with negative sampling")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--dim", type=int, default=128)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--min-count", type=int, default=20)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--learning-rate", type=float, default=0.025)
    p.add_argument("--seed", type=int, default=0)
    _add_tokenizer_args(p)
    p.set_defaults(func=cmd_train_w2v)

    baseline = sub.add_parser("baseline", help="deterministic reference backends")
    baseline_sub = baseline.add_subparsers(dest="baseline_command", required=True)
    p = baseline_sub.add_parser("hashed", help="hash-seeded embedding rows")
    p.add_argument("--input", default=None, help="items to build the vocab from")
    p.add_argument("--vocab", default=None, help="existing vocab file")
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--dim", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    _add_tokenizer_args(p)
    p.set_defaults(func=cmd_baseline_hashed)

    p = sub.add_parser("embed", help="item vectors via a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_tokenizer_args(p)
    p.set_defaults(func=cmd_embed)

    formula = sub.add_parser("formula", help="formula engine commands")
    formula_sub = formula.add_subparsers(dest="formula_command", required=True)
    p = formula_sub.add_parser("graph", help="AST forest to relation graph")
    p.add_argument("--input", required=True, help="one LaTeX formula per line")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_formula_graph)

    evalp = sub.add_parser("eval", help="task evaluations")
    eval_sub = evalp.add_subparsers(dest="eval_command", required=True)
    p = eval_sub.add_parser("similarity", help="zero-shot similarity vs gold labels")
    p.add_argument("--model", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--output", default=None)
    _add_tokenizer_args(p)
    p.set_defaults(func=cmd_eval_similarity)
    p = eval_sub.add_parser("regression", help="regression/ranking metrics")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--metrics", default="mae,mse,rmse")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_eval_regression)
    p = eval_sub.add_parser("knowledge", help="multi-label precision/recall/F1")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--average", default="micro", choices=["micro", "macro"])
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_eval_knowledge)

    stats = sub.add_parser("stats", help="labels from student response logs")
    stats_sub = stats.add_subparsers(dest="stat", required=True)
    for stat_name in ("difficulty", "discrimination"):
        p = stats_sub.add_parser(stat_name)
        p.add_argument("--responses", required=True)
        p.add_argument("--output", required=True)
        if stat_name == "discrimination":
            p.add_argument("--fraction", type=float, default=0.27)
        p.set_defaults(func=cmd_stats, stat=stat_name)

    p = sub.add_parser("pipeline", help="run a configured pipeline")
    p.add_argument("--config", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"sifkit: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"sifkit: {exc}", file=sys.stderr)
        return 1
    except (UnknownStep, BadParams) as exc:
        print(f"sifkit: {exc}", file=sys.stderr)
        return 1
    except (SifkitError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"sifkit: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
