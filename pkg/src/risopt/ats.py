"""Adaptive tabu search over binary topology masks (the joint outer loop).

Each candidate mask is scored by a full inner phase optimization (NECE by
default, successive refinement for baseline comparisons). The walk always
moves to the best candidate of the iteration, tabu excluded, while the
incumbent tracks the best configuration ever seen.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from risopt.channel import ChannelSet
from risopt.config import SystemConfig, subrng
from risopt.nece import NeceResult, nece_optimize


def random_topology(n: int, n_s: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform mask with exactly n ones over n_s grid points."""
    if n > n_s:
        raise ValueError("n must not exceed n_s")
    z = np.zeros(n_s, dtype=np.int8)
    z[rng.permutation(n_s)[:n]] = 1
    return z


def swap_distance_schedule(cfg: SystemConfig):
    """Per-iteration swap distance p(i), 1-based i in 1..i_t, nonincreasing.

    The two-step 3/2 schedule is used at the n=32, n_s=64 operating point;
    otherwise p scales with n and shrinks over the run. An explicit schedule
    in the config overrides both.
    """
    i_t = cfg.ats.i_t
    p_cap = min(cfg.n, cfg.n_s - cfg.n)

    if cfg.ats.p_schedule is not None:
        sched = cfg.ats.p_schedule

        def from_table(i):
            return max(1, min(sched[min(i - 1, len(sched) - 1)], p_cap))

        return from_table

    if cfg.n == 32 and cfg.n_s == 64:
        def two_step(i):
            return 3 if i < i_t / 2 else 2

        return two_step

    def default(i):
        p = round(3 * cfg.n / 32 * min(1.0, 2.0 * (1.0 - i / i_t)))
        return max(1, min(p, p_cap))

    return default


def generate_neighbors(z: np.ndarray, p: int, q: int, tabu,
                       rng: np.random.Generator, max_tries: int | None = None):
    """Up to q distinct non-tabu masks at swap distance p from z.

    Each neighbor deactivates p ones and activates p zeros, so the popcount
    is preserved. Rejection sampling stops after the retry budget and may
    return fewer than q masks (short flag set).
    """
    ones = np.flatnonzero(z)
    zeros = np.flatnonzero(z == 0)
    if p < 1 or p > min(len(ones), len(zeros)):
        raise ValueError("p must satisfy 1 <= p <= min(n, n_s - n)")
    if max_tries is None:
        max_tries = 50 * q
    tabu_set = set(tabu)
    found = {}
    tries = 0
    while len(found) < q and tries < max_tries:
        tries += 1
        cand = z.copy()
        cand[rng.choice(ones, size=p, replace=False)] = 0
        cand[rng.choice(zeros, size=p, replace=False)] = 1
        key = cand.tobytes()
        if key in tabu_set or key in found:
            continue
        found[key] = cand
    return list(found.values()), len(found) < q


@dataclass
class AtsResult:
    z: np.ndarray
    theta_idx: np.ndarray
    score: float
    wsr: float
    p_tx: float
    sinr: np.ndarray
    degenerate: bool
    evals: int
    # per-iteration records: (iteration, p, best candidate score, incumbent score)
    trace: list[tuple[int, int, float, float]] = field(default_factory=list)


def ats_optimize(cfg: SystemConfig, ch: ChannelSet, seed_key: tuple = (),
                 mode: str = "wsr", mu: np.ndarray | None = None,
                 inner=None) -> AtsResult:
    """Joint topology and phase optimization.

    `inner(cfg, ch, z, seed_key, mode, mu) -> NeceResult` defaults to
    :func:`nece_optimize`; any solver with the same contract (e.g. successive
    refinement) can be substituted for baseline comparisons.
    """
    if inner is None:
        inner = _nece_inner
    key = tuple(int(k) for k in seed_key)
    par = cfg.ats

    z = random_topology(cfg.n, cfg.n_s, subrng(cfg.seed, "ats-init", *key))
    res = inner(cfg, ch, z, key + (0, 0), mode, mu)
    evals = res.evals
    best = (res.score, z, res)
    trace = []

    if cfg.n_s > cfg.n and cfg.n > 0:
        schedule = swap_distance_schedule(cfg)
        tabu = deque(maxlen=par.h_size)
        for i in range(1, par.i_t + 1):
            p = schedule(i)
            cands, _short = generate_neighbors(
                z, p, par.q, tabu, subrng(cfg.seed, "ats-neigh", *key, i))
            if not cands:
                tabu.append(z.tobytes())
                continue
            results = [inner(cfg, ch, zc, key + (i, qi), mode, mu)
                       for qi, zc in enumerate(cands)]
            evals += sum(r.evals for r in results)
            qbest = max(range(len(results)), key=lambda qi: (results[qi].score, -qi))
            if results[qbest].score > best[0]:
                best = (results[qbest].score, cands[qbest], results[qbest])
            trace.append((i, p, results[qbest].score, best[0]))
            tabu.append(z.tobytes())
            z = cands[qbest]

    score, z_opt, r = best
    return AtsResult(z_opt, r.theta_idx, score, r.wsr, r.p_tx, r.sinr,
                     r.degenerate, evals, trace)


def _nece_inner(cfg: SystemConfig, ch: ChannelSet, z, seed_key, mode, mu) -> NeceResult:
    return nece_optimize(cfg, ch, z, seed_key=seed_key, mode=mode, mu=mu)
