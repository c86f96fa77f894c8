"""Wrapper feature selection: swarm positions become feature masks.

A continuous position in [0,1]^d discretizes at 0.5 into a 0/1 mask
(the boundary itself selects), a repair step flips zero bits on until
the mask keeps at least lambda = ceil(lambda_fraction * d) features,
and the objective is the negated sum of six test-set metrics of an
AdaBoost model trained on the masked columns.  Every evaluated mask
also bumps a per-feature importance counter.

The ANOVA-based select-k-best filter lives here too as the
non-wrapper baseline.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass

import numpy as np

from . import boosting, metrics, swarm
from .data import Dataset, SplitPair, stratified_split
from .errors import ConfigError, DataError, InvariantError


@dataclass(frozen=True)
class SelectionConfig:
    """Wrapper-run parameters around one SwarmConfig.

    ``holdout_fraction`` > 0 carves an extra untouched slice off the
    data first; the search never sees it and the result reports metrics
    on it separately.  The default 0 mirrors the two-way protocol where
    the split that scores candidate masks also grades the final model.
    """

    swarm: swarm.SwarmConfig
    lambda_fraction: float = 0.2
    classifier_rounds: int = 50
    test_fraction: float = 0.3
    split_seed: int = 0
    holdout_fraction: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.lambda_fraction < 1.0:
            raise ConfigError("lambda_fraction must lie in (0, 1)")
        if self.classifier_rounds < 1:
            raise ConfigError("classifier_rounds must be >= 1")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("test_fraction must lie in (0, 1)")
        if not 0.0 <= self.holdout_fraction < 1.0:
            raise ConfigError("holdout_fraction must lie in [0, 1)")


@dataclass
class ImportanceTracker:
    """Per-feature counters: +1 for each evaluated mask selecting the
    feature.  Counts never exceed the evaluation total."""

    counts: np.ndarray
    evaluations: int = 0

    @classmethod
    def for_dimensions(cls, d: int) -> "ImportanceTracker":
        return cls(counts=np.zeros(d, dtype=np.int64))

    def record(self, mask) -> None:
        mask = np.asarray(mask)
        if mask.shape != self.counts.shape:
            raise DataError(
                "mask length %d does not match tracker length %d"
                % (mask.size, self.counts.size)
            )
        self.counts += mask
        self.evaluations += 1


@dataclass(frozen=True, eq=False)
class SelectionResult:
    algorithm: str
    best_mask: np.ndarray
    best_metrics: metrics.MetricSet
    loss: float
    importance: np.ndarray
    evaluations: int
    min_popcount: int
    model: boosting.AdaBoostModel
    fitness_trace: np.ndarray
    holdout_metrics: metrics.MetricSet | None = None


def discretize(x) -> np.ndarray:
    """Position to mask: bit j is 0 iff x_j < 0.5 (so 0.5 itself selects)."""
    return (np.asarray(x) >= 0.5).astype(np.int64)


def repair(mask, lam: int, rng) -> np.ndarray:
    """Flip uniformly chosen zero bits to one until the mask keeps
    lam features.  Masks already at or above lam pass unchanged; set
    bits are never cleared."""
    mask = np.asarray(mask).copy()
    if lam > mask.size:
        raise ConfigError("lambda %d exceeds dimension %d" % (lam, mask.size))
    deficit = lam - int(mask.sum())
    if deficit > 0:
        zeros = np.flatnonzero(mask == 0)
        picked = rng.permutation(zeros.size)[:deficit]
        mask[zeros[picked]] = 1
    return mask


def _mask_rng(seed: int, mask) -> np.random.Generator:
    # keyed by mask content so repair is a pure function of the position
    bits = int.from_bytes(np.packbits(np.asarray(mask, dtype=np.uint8)).tobytes(), "little")
    ss = np.random.SeedSequence((int(seed), 0x5EED, bits))
    return np.random.Generator(np.random.Philox(ss))


def _fit_mask(mask, split: SplitPair, cfg: SelectionConfig):
    cols = np.flatnonzero(mask)
    if cols.size == 0:
        raise InvariantError("mask selects zero columns")
    model = boosting.train(
        split.train.features[:, cols],
        split.train.labels,
        rounds=cfg.classifier_rounds,
        seed=cfg.swarm.seed,
    )
    test_x = split.test.features[:, cols]
    mset = metrics.score_set(
        split.test.labels, model.predict(test_x), model.margins(test_x)
    )
    loss = -float(sum(mset.as_tuple()))
    return loss, mset, model


def fitness(mask, split: SplitPair, cfg: SelectionConfig):
    """Mask quality: train on masked train columns, score the test
    side, return (loss, metrics) with loss = -(sum of the six metrics).
    Lower is better; the range is [-6, 0]."""
    loss, mset, _ = _fit_mask(mask, split, cfg)
    return loss, mset


def select_features(ds: Dataset, cfg: SelectionConfig, threads: int = 1) -> SelectionResult:
    """Run the configured swarm over feature masks of ``ds``.

    The swarm explores [0,1]^d; each evaluation discretizes, repairs to
    the lambda floor, asserts the constraint, trains the classifier, and
    scores the held-out side.  Importance counts accumulate over every
    evaluation.  Equal (ds, cfg) gives a bit-identical result for any
    ``threads``.
    """
    if cfg.swarm.dimensions != ds.d:
        raise ConfigError(
            "swarm.dimensions=%d but dataset has %d features"
            % (cfg.swarm.dimensions, ds.d)
        )
    work = ds
    holdout = None
    if cfg.holdout_fraction > 0.0:
        carved = stratified_split(ds, cfg.holdout_fraction, cfg.split_seed + 1)
        work, holdout = carved.train, carved.test
    split = stratified_split(work, cfg.test_fraction, cfg.split_seed)

    lam = math.ceil(cfg.lambda_fraction * ds.d)
    tracker = ImportanceTracker.for_dimensions(ds.d)
    lock = threading.Lock()
    min_popcount = [ds.d + 1]

    def objective(x):
        raw = discretize(x)
        mask = repair(raw, lam, _mask_rng(cfg.swarm.seed, raw))
        pop = int(mask.sum())
        if pop < lam:
            raise InvariantError("repaired mask popcount %d < lambda %d" % (pop, lam))
        loss, _ = fitness(mask, split, cfg)
        with lock:
            tracker.record(mask)
            if pop < min_popcount[0]:
                min_popcount[0] = pop
        return loss

    opt = swarm.optimize(objective, cfg.swarm, threads=threads)
    if tracker.evaluations != opt.evaluations_used:
        raise InvariantError(
            "importance tracker saw %d evaluations, swarm reports %d"
            % (tracker.evaluations, opt.evaluations_used)
        )

    best_raw = discretize(opt.best_x)
    best_mask = repair(best_raw, lam, _mask_rng(cfg.swarm.seed, best_raw))
    loss, mset, model = _fit_mask(best_mask, split, cfg)
    holdout_metrics = None
    if holdout is not None:
        cols = np.flatnonzero(best_mask)
        hx = holdout.features[:, cols]
        holdout_metrics = metrics.score_set(
            holdout.labels, model.predict(hx), model.margins(hx)
        )
    return SelectionResult(
        algorithm=cfg.swarm.algorithm,
        best_mask=best_mask,
        best_metrics=mset,
        loss=loss,
        importance=tracker.counts.copy(),
        evaluations=opt.evaluations_used,
        min_popcount=min_popcount[0],
        model=model,
        fitness_trace=opt.fitness_trace,
        holdout_metrics=holdout_metrics,
    )


def anova_f(ds: Dataset) -> np.ndarray:
    """One-way ANOVA F-statistic of each feature between the two
    classes.  Constant columns score 0; zero within-class variance with
    real between-class separation scores +inf."""
    y = ds.labels
    if not ((y == 0).any() and (y == 1).any()):
        raise DataError("anova_f needs both classes present")
    X = ds.features
    n = X.shape[0]
    overall = X.mean(axis=0)
    f_stats = np.zeros(ds.d)
    ss_between = np.zeros(ds.d)
    ss_within = np.zeros(ds.d)
    for cls in (0, 1):
        grp = X[y == cls]
        gm = grp.mean(axis=0)
        ss_between += grp.shape[0] * (gm - overall) ** 2
        ss_within += ((grp - gm) ** 2).sum(axis=0)
    total = ss_between + ss_within
    live = total > 0.0
    sep = live & (ss_within == 0.0)
    ordinary = live & (ss_within > 0.0)
    f_stats[sep] = np.inf
    f_stats[ordinary] = ss_between[ordinary] / (ss_within[ordinary] / (n - 2))
    return f_stats


def skb(ds: Dataset, k: int) -> np.ndarray:
    """Filter baseline: mask of the k features with the highest ANOVA
    F-statistic, ties resolved toward the lower index."""
    if not 1 <= k <= ds.d:
        raise ConfigError("k must lie in [1, %d]" % ds.d)
    f_stats = anova_f(ds)
    order = np.lexsort((np.arange(ds.d), -f_stats))
    mask = np.zeros(ds.d, dtype=np.int64)
    mask[order[:k]] = 1
    return mask


def result_dict(result: SelectionResult, config_echo: dict, wall_time_s: float) -> dict:
    """SelectionResult as a JSON-ready record for reports."""
    return {
        "algorithm": result.algorithm,
        "config": config_echo,
        "best_mask": [int(b) for b in result.best_mask],
        "metrics": {
            "auc": result.best_metrics.auc,
            "acc": result.best_metrics.acc,
            "pre": result.best_metrics.pre,
            "sen": result.best_metrics.sen,
            "f1": result.best_metrics.f1,
            "spe": result.best_metrics.spe,
            "avg": result.best_metrics.avg(),
        },
        "loss": result.loss,
        "importance": [int(c) for c in result.importance],
        "evaluations": int(result.evaluations),
        "wall_time_s": wall_time_s,
    }


def result_json(result: SelectionResult, config_echo: dict, wall_time_s: float) -> str:
    """Serialize a SelectionResult for reports."""
    return json.dumps(
        result_dict(result, config_echo, wall_time_s), indent=2, sort_keys=True
    )
