"""Brute-force reference implementations used as independent oracles.

Deliberately written with plain loops and a different structure from the
library code; these stay independent of the implementations they check.
"""

import math


def ref_mae(pred, gold):
    return sum(abs(p - g) for p, g in zip(pred, gold)) / len(pred)


def ref_mse(pred, gold):
    return sum((p - g) ** 2 for p, g in zip(pred, gold)) / len(pred)


def ref_rmse(pred, gold):
    return math.sqrt(ref_mse(pred, gold))


def ref_r2(pred, gold):
    mean_g = sum(gold) / len(gold)
    ss_tot = sum((g - mean_g) ** 2 for g in gold)
    ss_res = sum((g - p) ** 2 for p, g in zip(pred, gold))
    return 1 - ss_res / ss_tot


def ref_pearson(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y))
    vx = sum((a - mx) ** 2 for a in x)
    vy = sum((b - my) ** 2 for b in y)
    return cov / math.sqrt(vx * vy)


def ref_ranks(values):
    ranks = []
    ordered = sorted(values)
    for v in values:
        first = ordered.index(v) + 1
        count = ordered.count(v)
        ranks.append((first + first + count - 1) / 2)
    return ranks


def ref_spearman(x, y):
    return ref_pearson(ref_ranks(list(x)), ref_ranks(list(y)))


def ref_ndcg(pred, gold, k=None):
    n = len(pred)
    if k is None:
        k = n
    order = sorted(range(n), key=lambda i: (-pred[i], i))
    dcg = 0.0
    for rank, idx in enumerate(order[:k], start=1):
        dcg += (2 ** gold[idx] - 1) / math.log2(rank + 1)
    idcg = 0.0
    for rank, rel in enumerate(sorted(gold, reverse=True)[:k], start=1):
        idcg += (2 ** rel - 1) / math.log2(rank + 1)
    return 1.0 if idcg == 0 else dcg / idcg


def ref_prf_micro(gold, pred):
    tp = fp = fn = 0
    for g, p in zip(gold, pred):
        g, p = set(g), set(p)
        tp += len(g & p)
        fp += len(p - g)
        fn += len(g - p)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return precision, recall, f1


def ref_accuracy(pred, gold):
    return sum(p == g for p, g in zip(pred, gold)) / len(pred)


def ref_cosine(u, v):
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    return dot / (nu * nv)


def ref_difficulty(log, item_id):
    hits = [r.correct for r in log if r.item_id == item_id]
    return sum(1 for c in hits if not c) / len(hits)


def ref_discrimination(log, item_id, fraction=0.27):
    scores = {}
    for r in log:
        scores.setdefault(r.student_id, 0)
        if r.correct:
            scores[r.student_id] += 1
    k = math.ceil(fraction * len(scores))
    ranked = sorted(scores, key=lambda s: (-scores[s], s))
    upper = ranked[:k]
    lower = sorted(scores, key=lambda s: (scores[s], s))[:k]

    def rate(group):
        rs = [r.correct for r in log
              if r.item_id == item_id and r.student_id in set(group)]
        return sum(rs) / len(rs)

    return rate(upper) - rate(lower)
