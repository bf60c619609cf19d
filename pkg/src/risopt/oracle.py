"""Exhaustive ground-truth search over (mask, phases) and search-complexity accounting."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from risopt.channel import ChannelSet
from risopt.config import SystemConfig
from risopt.kernels import Scorer

SEARCH_CAP = 10**8


class BudgetExceededError(ValueError):
    """Predicted search count above the hard cap; refuse rather than run for days."""

    def __init__(self, c_opt: int):
        super().__init__(f"exhaustive search would take {c_opt} evaluations (cap {SEARCH_CAP})")
        self.c_opt = c_opt


def predict_complexity(cfg: SystemConfig) -> tuple[int, int]:
    """Exact integer search counts: exhaustive (c_opt) and joint algorithm (c_p)."""
    c_opt = math.comb(cfg.n_s, cfg.n) * 2 ** (cfg.b * cfg.n)
    c_p = cfg.ats.q * cfg.ats.i_t * cfg.nece.i_n * (cfg.nece.c + cfg.n * (2**cfg.b - 1))
    return c_opt, c_p


@dataclass
class OracleResult:
    z: np.ndarray
    theta_idx: np.ndarray
    score: float
    wsr: float
    p_tx: float
    sinr: np.ndarray
    topologies_searched: int
    phase_combos_searched: int
    evals: int = 0


def _phase_batches(n_s, active, levels, n, batch=4096):
    """Yield (rows, n_s) index arrays covering all levels^n assignments.

    Enumeration is lexicographic over the active entries; inactive entries are
    pinned to level 0 (they cannot affect the objective).
    """
    it = itertools.product(range(levels), repeat=n)
    while True:
        chunk = list(itertools.islice(it, batch))
        if not chunk:
            return
        idx = np.zeros((len(chunk), n_s), dtype=np.int64)
        idx[:, active] = np.asarray(chunk, dtype=np.int64)
        yield idx


def exhaustive_search(cfg: SystemConfig, ch: ChannelSet, mode: str = "wsr",
                      mu: np.ndarray | None = None, cap: int = SEARCH_CAP) -> OracleResult:
    """Enumerate every mask and every phase assignment; return the global best.

    Ties break to the first configuration in enumeration order. Uses the same
    ZF evaluator family as the main algorithm, so its optimum is an upper
    bound for the joint search on identical channels.
    """
    c_opt, _ = predict_complexity(cfg)
    if c_opt > cap:
        raise BudgetExceededError(c_opt)
    levels = 2**cfg.b

    best = None  # (score, global_index, z, theta_idx, wsr, p_tx, sinr)
    topo_count = 0
    combo_count = 0
    for combo in itertools.combinations(range(cfg.n_s), cfg.n):
        topo_count += 1
        z = np.zeros(cfg.n_s, dtype=np.int8)
        active = np.asarray(combo, dtype=np.int64)
        z[active] = 1
        scorer = Scorer(cfg, ch, z, mode=mode, mu=mu)
        for idx in _phase_batches(cfg.n_s, active, levels, cfg.n):
            scores = scorer.score(idx)[0]
            i = int(np.argmax(scores))
            if best is None or scores[i] > best[0]:
                _, wsr_a, ptx_a, sinr_a, _ = scorer.score(idx[i : i + 1])
                best = (float(scores[i]), combo_count + i, z.copy(), idx[i].copy(),
                        float(wsr_a[0]), float(ptx_a[0]), sinr_a[0].copy())
            combo_count += idx.shape[0]

    return OracleResult(best[2], best[3], best[0], best[4], best[5], best[6],
                        topo_count, combo_count, evals=combo_count)
