"""Binary classification metrics: confusion counts, rates, ranking AUC.

Label convention: 1 is the positive class.  Degenerate denominators
follow fixed rules so every metric is always defined: precision and
sensitivity are 0 when their denominator vanishes, specificity is 1
when there are no negatives, F1 is 0 when 2*tp + fp + fn = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricSet:
    """The six scores used throughout: AUC, accuracy, precision,
    sensitivity, F1, specificity."""

    auc: float
    acc: float
    pre: float
    sen: float
    f1: float
    spe: float

    def as_tuple(self):
        return (self.auc, self.acc, self.pre, self.sen, self.f1, self.spe)

    def avg(self) -> float:
        """Unweighted mean of all six scores."""
        return float(sum(self.as_tuple())) / 6.0


def confusion(y_true, y_pred) -> ConfusionCounts:
    """Tally the 2x2 confusion table for 0/1 label vectors."""
    t = np.asarray(y_true)
    p = np.asarray(y_pred)
    if t.shape != p.shape or t.ndim != 1:
        raise DataError("y_true and y_pred must be equal-length vectors")
    if t.size == 0:
        raise DataError("empty label vectors")
    for name, v in (("y_true", t), ("y_pred", p)):
        if not np.isin(v, (0, 1)).all():
            raise DataError("%s must contain only 0 and 1" % name)
    tp = int(np.sum((t == 1) & (p == 1)))
    tn = int(np.sum((t == 0) & (p == 0)))
    fp = int(np.sum((t == 0) & (p == 1)))
    fn = int(np.sum((t == 1) & (p == 0)))
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)


def accuracy(c: ConfusionCounts) -> float:
    return (c.tp + c.tn) / c.total


def precision(c: ConfusionCounts) -> float:
    den = c.tp + c.fp
    return c.tp / den if den else 0.0


def sensitivity(c: ConfusionCounts) -> float:
    den = c.tp + c.fn
    return c.tp / den if den else 0.0


def f1_score(c: ConfusionCounts) -> float:
    den = 2 * c.tp + c.fp + c.fn
    return 2 * c.tp / den if den else 0.0


def specificity(c: ConfusionCounts) -> float:
    den = c.tn + c.fp
    return c.tn / den if den else 1.0


def auc(y_true, scores) -> float:
    """Area under the ROC curve via the rank-sum statistic.

    Equivalent to the probability that a random positive outscores a
    random negative, with ties counted half.  Requires both classes to
    be present.
    """
    t = np.asarray(y_true)
    s = np.asarray(scores, dtype=np.float64)
    if t.shape != s.shape or t.ndim != 1:
        raise DataError("y_true and scores must be equal-length vectors")
    if not np.isin(t, (0, 1)).all():
        raise DataError("y_true must contain only 0 and 1")
    n_pos = int(np.sum(t == 1))
    n_neg = t.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("auc needs both classes present")
    ranks = _average_ranks(s)
    rank_sum = float(ranks[t == 1].sum())
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def _average_ranks(s):
    # 1-based ranks; tied values share the mean of their rank block.
    order = np.argsort(s, kind="stable")
    ranks = np.empty(s.size, dtype=np.float64)
    sorted_s = s[order]
    i = 0
    while i < s.size:
        j = i
        while j + 1 < s.size and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def score_set(y_true, y_pred, margin_scores) -> MetricSet:
    """All six metrics at once: threshold metrics from the 0/1
    predictions, AUC from the continuous margins."""
    c = confusion(y_true, y_pred)
    return MetricSet(
        auc=auc(y_true, margin_scores),
        acc=accuracy(c),
        pre=precision(c),
        sen=sensitivity(c),
        f1=f1_score(c),
        spe=specificity(c),
    )
