"""Task metric suites and response-log label construction.

Covers the five downstream tasks: multi-label precision/recall/F1 for
knowledge prediction, regression errors plus NDCG and rank correlations
for difficulty/discrimination, accuracy for quality scenarios, and the
zero-shot similarity harness. Difficulty is the failure rate of an item
over a response log; discrimination is the correct-rate gap between the
top and bottom ability groups (27% split by default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DimMismatch,
    InsufficientStudents,
    LengthMismatch,
    NoRecords,
    ZeroNorm,
    ZeroVariance,
)
from .items import SifItem
from .tokenizer import TokenizerConfig


@dataclass(frozen=True)
class ResponseRecord:
    item_id: str
    student_id: str
    correct: bool


@dataclass(frozen=True)
class MetricReport:
    values: dict
    sample_count: int
    excluded: int = 0
    error: Optional[str] = None


def _check_lengths(a, b, minimum=1):
    if len(a) != len(b):
        raise LengthMismatch(f"length {len(a)} vs {len(b)}")
    if len(a) < minimum:
        raise LengthMismatch(f"need at least {minimum} element(s), got {len(a)}")


# --- classification ----------------------------------------------------------------

def multilabel_prf(gold, pred, average: str = "micro"):
    """Precision/recall/F1 over label sets; micro by default, macro optional.

    Empty denominators follow the zero convention.
    """
    _check_lengths(gold, pred)
    gold_sets = [frozenset(g) for g in gold]
    pred_sets = [frozenset(p) for p in pred]
    if average == "micro":
        tp = sum(len(g & p) for g, p in zip(gold_sets, pred_sets))
        pred_total = sum(len(p) for p in pred_sets)
        gold_total = sum(len(g) for g in gold_sets)
        precision = tp / pred_total if pred_total else 0.0
        recall = tp / gold_total if gold_total else 0.0
    elif average == "macro":
        labels = sorted(set().union(*gold_sets, *pred_sets))
        if not labels:
            return 0.0, 0.0, 0.0
        precisions, recalls = [], []
        for label in labels:
            tp = sum(1 for g, p in zip(gold_sets, pred_sets) if label in g and label in p)
            np_ = sum(1 for p in pred_sets if label in p)
            ng = sum(1 for g in gold_sets if label in g)
            precisions.append(tp / np_ if np_ else 0.0)
            recalls.append(tp / ng if ng else 0.0)
        precision = sum(precisions) / len(labels)
        recall = sum(recalls) / len(labels)
    else:
        raise ValueError(f"unknown average {average!r}")
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def accuracy(pred, gold) -> float:
    _check_lengths(pred, gold)
    return sum(1 for p, g in zip(pred, gold) if p == g) / len(pred)


# --- regression -----------------------------------------------------------------------

def mae(pred, gold) -> float:
    _check_lengths(pred, gold)
    return float(np.mean(np.abs(np.asarray(pred, float) - np.asarray(gold, float))))


def mse(pred, gold) -> float:
    _check_lengths(pred, gold)
    diff = np.asarray(pred, float) - np.asarray(gold, float)
    return float(np.mean(diff * diff))


def rmse(pred, gold) -> float:
    return math.sqrt(mse(pred, gold))


def r2_score(pred, gold) -> float:
    _check_lengths(pred, gold)
    g = np.asarray(gold, float)
    p = np.asarray(pred, float)
    ss_tot = float(np.sum((g - g.mean()) ** 2))
    if ss_tot == 0.0:
        raise ZeroVariance("R2 is undefined when gold values are constant")
    ss_res = float(np.sum((g - p) ** 2))
    return 1.0 - ss_res / ss_tot


def regression_metrics(pred, gold) -> dict:
    """MAE/MSE/RMSE/R2 in one report; raises ZeroVariance when R2 is undefined."""
    return {
        "MAE": mae(pred, gold),
        "MSE": mse(pred, gold),
        "RMSE": rmse(pred, gold),
        "R2": r2_score(pred, gold),
    }


# --- ranking ---------------------------------------------------------------------------

def ndcg(pred_scores, gold_rels, k: int | None = None) -> float:
    """Normalized DCG with gain 2^rel - 1 and log2(rank+1) discount.

    Items are ranked by predicted score descending, ties broken by the
    original index ascending; returns 1.0 when the ideal DCG is zero.
    """
    _check_lengths(pred_scores, gold_rels)
    n = len(pred_scores)
    if k is None:
        k = n
    order = sorted(range(n), key=lambda i: (-pred_scores[i], i))

    def dcg(rels):
        return sum((2.0 ** rel - 1.0) / math.log2(rank + 2)
                   for rank, rel in enumerate(rels[:k]))

    actual = dcg([gold_rels[i] for i in order])
    ideal = dcg(sorted(gold_rels, reverse=True))
    if ideal == 0.0:
        return 1.0
    return actual / ideal


# --- correlation -------------------------------------------------------------------------

def pearson(x, y) -> float:
    _check_lengths(x, y, minimum=2)
    ax = np.asarray(x, float)
    ay = np.asarray(y, float)
    dx = ax - ax.mean()
    dy = ay - ay.mean()
    vx = float(np.sum(dx * dx))
    vy = float(np.sum(dy * dy))
    if vx == 0.0 or vy == 0.0:
        raise ZeroVariance("correlation is undefined for a constant sequence")
    return float(np.sum(dx * dy) / math.sqrt(vx * vy))


def _average_ranks(values) -> list[float]:
    """1-based ranks; tied values share the average of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for pos in range(i, j + 1):
            ranks[order[pos]] = avg
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Pearson correlation of average-rank vectors."""
    _check_lengths(x, y, minimum=2)
    return pearson(_average_ranks(list(x)), _average_ranks(list(y)))


def cosine(u, v) -> float:
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    if u.shape != v.shape:
        raise DimMismatch(f"dims {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroNorm("cosine is undefined for a zero vector")
    return float(np.dot(u, v) / (nu * nv))


# --- similarity harness ---------------------------------------------------------------------

def similarity_task(model, pairs, gold, cfg: TokenizerConfig = TokenizerConfig()) -> MetricReport:
    """Zero-shot similarity: cosine of item vectors vs expert labels.

    Pairs whose item vector has zero norm are excluded and counted; a
    degenerate (constant) prediction or gold column is reported in the
    ``error`` field rather than raised.
    """
    from .embedding import i2v

    _check_lengths(pairs, gold, minimum=2)
    for value in gold:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"gold similarity {value} outside [0, 1]")
    preds, kept_gold = [], []
    excluded = 0
    for (item_a, item_b), g in zip(pairs, gold):
        va = i2v(model, item_a, cfg)
        vb = i2v(model, item_b, cfg)
        try:
            preds.append(cosine(va, vb))
        except ZeroNorm:
            excluded += 1
            continue
        kept_gold.append(g)
    if len(preds) < 2:
        return MetricReport({}, sample_count=len(preds), excluded=excluded,
                            error="fewer than 2 usable pairs")
    try:
        values = {"PCC": pearson(preds, kept_gold), "SCC": spearman(preds, kept_gold)}
        return MetricReport(values, sample_count=len(preds), excluded=excluded)
    except ZeroVariance as exc:
        return MetricReport({}, sample_count=len(preds), excluded=excluded,
                            error=f"ZeroVariance: {exc}")


# --- response-log labels ----------------------------------------------------------------------

def difficulty_from_responses(log, item_id) -> float:
    """1 - pass rate of the item, computed as failures/attempts."""
    attempts = [r for r in log if r.item_id == item_id]
    if not attempts:
        raise NoRecords(f"no responses for item {item_id!r}")
    failures = sum(1 for r in attempts if not r.correct)
    return failures / len(attempts)


def discrimination_from_responses(log, item_id, fraction: float = 0.27) -> float:
    """Correct-rate gap between high- and low-ability groups on one item.

    Students are ranked by total correct count over the whole log (ties by
    student id); the top and bottom ceil(fraction * n) students form the
    groups.
    """
    if not 0.0 < fraction <= 0.5:
        raise ValueError(f"fraction must be in (0, 0.5], got {fraction}")
    totals: dict[str, int] = {}
    for r in log:
        totals[r.student_id] = totals.get(r.student_id, 0) + (1 if r.correct else 0)
    if len(totals) < 2:
        raise InsufficientStudents(
            f"need at least 2 students, got {len(totals)}")
    item_records = [r for r in log if r.item_id == item_id]
    if not item_records:
        raise NoRecords(f"no responses for item {item_id!r}")

    group_size = math.ceil(fraction * len(totals))
    by_score_desc = sorted(totals, key=lambda s: (-totals[s], s))
    by_score_asc = sorted(totals, key=lambda s: (totals[s], s))
    upper = set(by_score_desc[:group_size])
    lower = set(by_score_asc[:group_size])

    def group_rate(group):
        attempts = [r for r in item_records if r.student_id in group]
        if not attempts:
            raise NoRecords(
                f"no responses for item {item_id!r} within an ability group")
        return sum(1 for r in attempts if r.correct) / len(attempts)

    return group_rate(upper) - group_rate(lower)
