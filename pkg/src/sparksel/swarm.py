"""Swarm optimizers minimizing a black-box objective over [0,1]^d.

Four algorithms share one interface: the fireworks algorithm (FA), an
improved variant (IFA) that scales each explosion radius by
personal-best fitness history and re-centers the best firework's
sparks with multiplicative Gaussian spread, global-best PSO with
inertia, and the standard bat algorithm (BA).

Determinism: every random draw comes from a counter-based stream keyed
by (seed, generation, firework, spark), and all draws happen on the
coordinating thread between generations.  Worker threads only evaluate
the objective, so results are bit-identical for any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

ALGORITHMS = ("ifa", "fa", "pso", "ba")


@dataclass(frozen=True)
class SwarmConfig:
    """Parameters for one optimizer run.

    ``r_max`` is the largest explosion radius as a fraction of the unit
    cube edge; ``epsilon`` guards the radius and spark-count ratios
    against zero denominators; ``s_min``/``s_max`` bound per-firework
    spark counts.  PSO and BA fields carry the usual textbook meanings
    and are ignored by the fireworks variants.
    """

    dimensions: int
    algorithm: str = "ifa"
    population: int = 10
    s_max: int = 20
    s_min: int = 1
    r_max: float = 0.4
    epsilon: float = 1e-12
    gaussian_sparks: int = 5
    max_evaluations: int = 10000
    seed: int = 0
    pso_inertia: float = 0.729
    pso_cognitive: float = 1.49445
    pso_social: float = 1.49445
    pso_velocity_clamp: float = 0.5
    ba_freq_min: float = 0.0
    ba_freq_max: float = 2.0
    ba_loudness: float = 1.0
    ba_loudness_decay: float = 0.9
    ba_pulse_rate: float = 0.5
    ba_pulse_growth: float = 0.9

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError("algorithm must be one of %s" % (ALGORITHMS,))
        if self.dimensions < 1:
            raise ConfigError("dimensions must be >= 1")
        if self.population < 2:
            raise ConfigError("population must be >= 2")
        if self.s_min < 1 or self.s_max < self.s_min:
            raise ConfigError("need 1 <= s_min <= s_max")
        if not 0.0 < self.r_max <= 1.0:
            raise ConfigError("r_max must lie in (0, 1]")
        if self.epsilon <= 0.0:
            raise ConfigError("epsilon must be > 0")
        if self.gaussian_sparks < 0:
            raise ConfigError("gaussian_sparks must be >= 0")
        if self.max_evaluations < 1:
            raise ConfigError("max_evaluations must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        if not self.ba_freq_min < self.ba_freq_max:
            raise ConfigError("need ba_freq_min < ba_freq_max")


@dataclass(frozen=True, eq=False)
class OptResult:
    best_x: np.ndarray
    best_fitness: float
    evaluations_used: int
    fitness_trace: np.ndarray
    algorithm: str


def child_rng(seed: int, *path: int) -> np.random.Generator:
    """Independent counter-based stream for one (generation, role) slot."""
    ss = np.random.SeedSequence((int(seed),) + tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


# --- benchmark objectives ------------------------------------------------

def sphere(x) -> float:
    """Sum of squares; minimum 0 at the origin corner of the unit cube."""
    x = np.asarray(x)
    return float(np.dot(x, x))


def rastrigin(x) -> float:
    """Rastrigin evaluated directly on the unit cube; like sphere its
    minimum 0 sits at the origin corner."""
    x = np.asarray(x)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


BENCHMARKS = {"sphere": sphere, "rastrigin": rastrigin}


# --- fireworks operators -------------------------------------------------

def spark_count(fitnesses, cfg: SwarmConfig):
    """Sparks per firework, more for better (lower) fitness.

    S_i = clamp(round(s_max * (Y_max - f_i + eps) / (sum_k(Y_max - f_k) + eps)),
    s_min, s_max) where Y_max is the worst fitness in the population.
    The best firework always holds the population maximum.
    """
    f = np.asarray(fitnesses, dtype=np.float64)
    y_max = f.max()
    share = (y_max - f + cfg.epsilon) / ((y_max - f).sum() + cfg.epsilon)
    s = np.floor(cfg.s_max * share + 0.5)
    s = np.clip(s, cfg.s_min, cfg.s_max).astype(np.int64)
    s[int(np.argmin(f))] = s.max()
    return s


def fa_radius(fitnesses, cfg: SwarmConfig):
    """Classic explosion radii from current fitness: better fireworks
    explode tighter, and the best one's radius collapses toward 0."""
    f = np.asarray(fitnesses, dtype=np.float64)
    y_min = f.min()
    return cfg.r_max * (f - y_min + cfg.epsilon) / ((f - y_min).sum() + cfg.epsilon)


def ifa_radius(pbest_fitnesses, spark_counts, cfg: SwarmConfig):
    """Radius description for the improved variant.

    Scalar radii are computed from personal-best fitness instead of
    current fitness.  Fireworks holding the population-maximum spark
    count (the best firework and any count ties) are flagged for the
    multiplicative-Gaussian branch around the core firework; callers
    build those sparks with ``explode_around_best``.

    Returns (radii, around_best) where ``around_best`` marks the
    flagged fireworks.
    """
    pb = np.asarray(pbest_fitnesses, dtype=np.float64)
    s = np.asarray(spark_counts)
    y_min = pb.min()
    radii = cfg.r_max * (pb - y_min + cfg.epsilon) / ((pb - y_min).sum() + cfg.epsilon)
    return radii, s == s.max()


def update_pbest(pbest_x, pbest_f, x, f):
    """Personal-best update: replace only on strictly smaller fitness."""
    better = np.asarray(f) < np.asarray(pbest_f)
    new_x = np.where(better[:, None], x, pbest_x)
    new_f = np.where(better, f, pbest_f)
    return new_x, new_f


def _nonempty_dim_subsets(count, d, rng):
    """Each row drawn uniformly over the nonempty subsets of {1..d}."""
    m = rng.integers(0, 2, size=(count, d)).astype(bool)
    while True:
        empty = ~m.any(axis=1)
        if not empty.any():
            return m
        m[empty] = rng.integers(0, 2, size=(int(empty.sum()), d)).astype(bool)


def map_to_bounds(x, rng):
    """Redraw every out-of-range coordinate uniformly in [0,1];
    in-range coordinates pass through untouched."""
    x = np.array(x, dtype=np.float64)
    bad = (x < 0.0) | (x > 1.0)
    n_bad = int(bad.sum())
    if n_bad:
        x[bad] = rng.uniform(0.0, 1.0, size=n_bad)
    return x


def explode(x, radius, count, rng):
    """Scalar-radius explosion: ``count`` sparks, each offsetting a
    uniformly chosen nonempty dimension subset by radius*U(-1,1) per
    chosen dimension, then bound-mapped."""
    x = np.asarray(x, dtype=np.float64)
    d = x.size
    chosen = _nonempty_dim_subsets(count, d, rng)
    offsets = radius * rng.uniform(-1.0, 1.0, size=(count, d))
    sparks = x[None, :] + np.where(chosen, offsets, 0.0)
    return map_to_bounds(sparks, rng)


def explode_around_best(best_x, count, rng):
    """Explosion branch for the top spark earner: sparks at
    best_x*(1+g) with g drawn N(0,1) independently per dimension per
    spark, then bound-mapped."""
    best_x = np.asarray(best_x, dtype=np.float64)
    g = rng.standard_normal(size=(count, best_x.size))
    return map_to_bounds(best_x[None, :] * (1.0 + g), rng)


def gaussian_mutate(x, rng):
    """Gaussian mutation spark: one draw g~N(1,1) scales a uniformly
    chosen nonempty dimension subset, then bound-mapping."""
    x = np.array(x, dtype=np.float64)
    chosen = _nonempty_dim_subsets(1, x.size, rng)[0]
    g = 1.0 + rng.standard_normal()
    x[chosen] *= g
    return map_to_bounds(x, rng)


def select_next(fitnesses, n_keep, rng):
    """Elitist selection: index of the best candidate (first on ties)
    plus n_keep - 1 drawn uniformly without replacement from the rest.

    Returns candidate indices; slot 0 is the elite.
    """
    f = np.asarray(fitnesses)
    if f.size < n_keep:
        raise ConfigError("selection needs at least %d candidates" % n_keep)
    best = int(np.argmin(f))
    others = np.concatenate([np.arange(best), np.arange(best + 1, f.size)])
    picked = rng.permutation(others.size)[: n_keep - 1]
    return np.concatenate([[best], others[picked]])


# --- shared run machinery ------------------------------------------------

class _Budget:
    """Counts objective calls, tracks the global best, and truncates
    batches to the remaining budget.  Ties keep the earlier candidate."""

    def __init__(self, objective, max_evaluations, pool):
        self.objective = objective
        self.limit = max_evaluations
        self.used = 0
        self.best_f = math.inf
        self.best_x = None
        self.pool = pool

    @property
    def remaining(self):
        return self.limit - self.used

    def eval_batch(self, X):
        m = min(len(X), self.remaining)
        X = X[:m]
        if self.pool is not None and m > 1:
            f = np.fromiter(self.pool.map(self.objective, X), np.float64, count=m)
        else:
            f = np.fromiter((self.objective(x) for x in X), np.float64, count=m)
        self.used += m
        if m:
            k = int(np.argmin(f))
            if f[k] < self.best_f:
                self.best_f = float(f[k])
                self.best_x = X[k].copy()
        return f


def optimize(objective, cfg: SwarmConfig, threads: int = 1) -> OptResult:
    """Minimize ``objective`` over [0,1]^d under cfg.max_evaluations.

    Parameters
    ----------
    objective : callable
        Maps a length-d vector in [0,1]^d to a finite float.  Must be
        pure; with threads > 1 it is called concurrently.
    cfg : SwarmConfig
        Algorithm choice and parameters; cfg.seed fixes the run exactly.
    threads : int
        Worker threads for objective evaluation.  Any value yields the
        same OptResult bit for bit.

    Returns
    -------
    OptResult
        Best point found, its fitness, exact evaluation count, and the
        per-generation best-so-far trace.
    """
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    runner = {
        "ifa": _run_fireworks,
        "fa": _run_fireworks,
        "pso": _run_pso,
        "ba": _run_bat,
    }[cfg.algorithm]
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        budget = _Budget(objective, cfg.max_evaluations, pool)
        trace = runner(cfg, budget)
    finally:
        if pool is not None:
            pool.shutdown()
    return OptResult(
        best_x=budget.best_x,
        best_fitness=budget.best_f,
        evaluations_used=budget.used,
        fitness_trace=np.asarray(trace),
        algorithm=cfg.algorithm,
    )


def _init_population(cfg, budget):
    rng = child_rng(cfg.seed, 0, 0)
    X = rng.uniform(size=(cfg.population, cfg.dimensions))
    f = budget.eval_batch(X)
    return X[: f.size], f


def _run_fireworks(cfg, budget):
    improved = cfg.algorithm == "ifa"
    n = cfg.population
    X, f = _init_population(cfg, budget)
    trace = [budget.best_f]
    if f.size < n:
        return trace
    pbest_x, pbest_f = X.copy(), f.copy()

    gen = 0
    while budget.remaining > 0:
        gen += 1
        pbest_x, pbest_f = update_pbest(pbest_x, pbest_f, X, f)
        counts = spark_count(f, cfg)
        if improved:
            radii, around_best = ifa_radius(pbest_f, counts, cfg)
            core = X[int(np.argmin(f))]
        else:
            radii = fa_radius(f, cfg)
            around_best = np.zeros(n, dtype=bool)

        groups = []
        for i in range(n):
            # one stream per (generation, firework, spark) tuple
            for j in range(int(counts[i])):
                rng_ij = child_rng(cfg.seed, gen, i + 1, j)
                if around_best[i]:
                    groups.append(explode_around_best(core, 1, rng_ij))
                else:
                    groups.append(explode(X[i], float(radii[i]), 1, rng_ij))
        for j in range(cfg.gaussian_sparks):
            rng_mj = child_rng(cfg.seed, gen, n + 1, j)
            donor = int(rng_mj.integers(n))
            groups.append(gaussian_mutate(X[donor], rng_mj)[None, :])

        sparks = np.vstack(groups)
        f_sparks = budget.eval_batch(sparks)
        pool_x = np.vstack([X, sparks[: f_sparks.size]])
        pool_f = np.concatenate([f, f_sparks])
        sel = select_next(pool_f, n, child_rng(cfg.seed, gen, n + 2))
        X, f = pool_x[sel], pool_f[sel]
        trace.append(budget.best_f)
    return trace


def _run_pso(cfg, budget):
    n, d = cfg.population, cfg.dimensions
    X, f = _init_population(cfg, budget)
    trace = [budget.best_f]
    if f.size < n:
        return trace
    V = np.zeros((n, d))
    pb_x, pb_f = X.copy(), f.copy()
    gb = int(np.argmin(pb_f))
    gb_x = pb_x[gb].copy()

    gen = 0
    while budget.remaining > 0:
        gen += 1
        rng = child_rng(cfg.seed, gen, 0)
        r1 = rng.uniform(size=(n, d))
        r2 = rng.uniform(size=(n, d))
        V = (
            cfg.pso_inertia * V
            + cfg.pso_cognitive * r1 * (pb_x - X)
            + cfg.pso_social * r2 * (gb_x - X)
        )
        V = np.clip(V, -cfg.pso_velocity_clamp, cfg.pso_velocity_clamp)
        X = map_to_bounds(X + V, rng)
        f = budget.eval_batch(X)
        m = f.size
        better = f < pb_f[:m]
        pb_x[:m][better] = X[:m][better]
        pb_f[:m][better] = f[better]
        gb = int(np.argmin(pb_f))
        gb_x = pb_x[gb].copy()
        trace.append(budget.best_f)
        if m < n:
            break
    return trace


def _run_bat(cfg, budget):
    n, d = cfg.population, cfg.dimensions
    X, f = _init_population(cfg, budget)
    trace = [budget.best_f]
    if f.size < n:
        return trace
    V = np.zeros((n, d))
    loud = np.full(n, cfg.ba_loudness)
    gb = int(np.argmin(f))
    gb_x = X[gb].copy()

    gen = 0
    while budget.remaining > 0:
        gen += 1
        rng = child_rng(cfg.seed, gen, 0)
        beta = rng.uniform(size=n)
        freq = cfg.ba_freq_min + (cfg.ba_freq_max - cfg.ba_freq_min) * beta
        V = V + (X - gb_x) * freq[:, None]
        cand = X + V
        pulse = cfg.ba_pulse_rate * (1.0 - math.exp(-cfg.ba_pulse_growth * gen))
        local = rng.uniform(size=n) > pulse
        walk = gb_x + rng.uniform(-1.0, 1.0, size=(n, d)) * loud.mean()
        cand[local] = walk[local]
        cand = map_to_bounds(cand, rng)
        accept_draw = rng.uniform(size=n)
        f_cand = budget.eval_batch(cand)
        m = f_cand.size
        accept = (accept_draw[:m] < loud[:m]) & (f_cand <= f[:m])
        X[:m][accept] = cand[:m][accept]
        f[:m][accept] = f_cand[accept]
        loud[:m][accept] *= cfg.ba_loudness_decay
        gb = int(np.argmin(f))
        gb_x = X[gb].copy()
        trace.append(budget.best_f)
        if m < n:
            break
    return trace
