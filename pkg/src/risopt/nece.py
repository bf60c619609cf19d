"""Neighbor-extraction cross-entropy optimization of the discrete phases.

Optimizes the quantized phase vector for a fixed topology mask: sample
candidates from a per-point categorical distribution, pick elites (top
primaries plus any single-flip neighbors of the best that beat it), and move
the distribution toward a WSR-weighted empirical frequency of the elites.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from risopt.channel import ChannelSet
from risopt.config import SystemConfig, subrng
from risopt.kernels import Scorer


def indicator(t) -> int:
    """1 iff t == 0. Callers compare quantized level indices, never float angles."""
    return 1 if t == 0 else 0


def init_probability(b: int, n_s: int) -> np.ndarray:
    """Uniform (2^b, n_s) probability matrix; column n is the pmf of theta_n."""
    return np.full((2**b, n_s), 1.0 / 2**b)


def sample_candidates(prob: np.ndarray, c: int, rng: np.random.Generator) -> np.ndarray:
    """Draw c phase-index vectors, each entry independently from its column pmf."""
    levels, n_s = prob.shape
    cdf = np.cumsum(prob, axis=0)
    cdf[-1, :] = 1.0
    u = rng.random((c, n_s))
    # index = number of cdf levels at or below u
    return (u[:, :, None] >= cdf.T[None, :, :]).sum(axis=2)


def neighbor_extraction(best: np.ndarray, active: np.ndarray, b: int) -> np.ndarray:
    """All n*(2^b - 1) single-entry variants of `best` on the active points."""
    levels = 2**b
    out = np.empty((len(active) * (levels - 1), best.shape[0]), dtype=best.dtype)
    row = 0
    for n in active:
        for d in range(1, levels):
            out[row] = best
            out[row, n] = (best[n] + d) % levels
            row += 1
    return out


def elite_weights(scores: np.ndarray) -> np.ndarray:
    """Per-elite weights: score relative to the elite average.

    Falls back to uniform when scores are not all positive (all-zero WSR, or
    power-mode scores which are negative by construction).
    """
    scores = np.asarray(scores, dtype=np.float64)
    total = scores.sum()
    if total > 0 and np.all(scores >= 0):
        return scores * len(scores) / total
    return np.ones(len(scores))


def update_probability(prob_old: np.ndarray, configs: np.ndarray,
                       weights: np.ndarray, eps: float = 1e-3) -> np.ndarray:
    """Closed-form cross-entropy update: weighted empirical elite frequencies.

    Maximizes the weighted log-likelihood over column simplices, then applies
    an eps floor and renormalizes to avoid premature lock-in.
    """
    levels, n_s = prob_old.shape
    pnew = np.zeros((levels, n_s))
    cols = np.broadcast_to(np.arange(n_s), configs.shape)
    np.add.at(pnew, (configs, cols), weights[:, None])
    pnew /= weights.sum()
    pnew = np.maximum(pnew, eps)
    return pnew / pnew.sum(axis=0, keepdims=True)


@dataclass
class NeceResult:
    theta_idx: np.ndarray  # (n_s,) phase level indices
    score: float
    wsr: float
    p_tx: float
    sinr: np.ndarray
    degenerate: bool
    evals: int
    trace: list[float] = field(default_factory=list)  # incumbent score per iteration


def _dedup_score(scorer: Scorer, cand: np.ndarray):
    """Score each distinct candidate once; map results back to all rows."""
    arr = np.ascontiguousarray(cand)
    row_bytes = arr.dtype.itemsize * arr.shape[1]
    buf = arr.tobytes()
    seen: dict[bytes, int] = {}
    inv = np.empty(len(arr), dtype=np.intp)
    first_rows = []
    for i in range(len(arr)):
        key = buf[i * row_bytes:(i + 1) * row_bytes]
        j = seen.get(key)
        if j is None:
            j = len(first_rows)
            seen[key] = j
            first_rows.append(i)
        inv[i] = j
    scores, wsr, ptx, sinr, degen = scorer.score(arr[first_rows])
    return scores[inv], wsr[inv], ptx[inv], sinr[inv], degen[inv]


def nece_optimize(cfg: SystemConfig, ch: ChannelSet, z: np.ndarray,
                  seed_key: tuple = (), mode: str = "wsr",
                  mu: np.ndarray | None = None) -> NeceResult:
    """Run the full cross-entropy loop for a fixed topology.

    Returns the best configuration ever scored, including extraction
    neighbors, so the incumbent score is nondecreasing across iterations.
    """
    par = cfg.nece
    z = np.asarray(z)
    active = np.flatnonzero(z)
    scorer = Scorer(cfg, ch, z, mode=mode, mu=mu)
    rng = subrng(cfg.seed, "nece", *[int(k) for k in seed_key])
    prob = init_probability(cfg.b, cfg.n_s)

    best = None  # (score, theta_idx, wsr, p_tx, sinr, degen)
    trace = []

    def consider(scores, cand, wsr, ptx, sinr, degen):
        nonlocal best
        i = int(np.argmax(scores))
        if best is None or scores[i] > best[0]:
            best = (float(scores[i]), cand[i].copy(), float(wsr[i]),
                    float(ptx[i]), sinr[i].copy(), bool(degen[i]))

    for _ in range(par.i_n):
        cand = sample_candidates(prob, par.c, rng)
        scores, wsr, ptx, sinr, degen = _dedup_score(scorer, cand)
        consider(scores, cand, wsr, ptx, sinr, degen)

        order = np.argsort(-scores, kind="stable")
        n_pr = min(par.c_pr, len(order))
        primary_idx = order[:n_pr]
        top = cand[order[0]]
        top_score = scores[order[0]]

        elite_cfgs = [cand[primary_idx]]
        elite_scores = [scores[primary_idx]]
        if len(active) > 0 and cfg.b >= 1:
            neigh = neighbor_extraction(top, active, cfg.b)
            if len(neigh) > 0:
                ns, nw, np_tx, nsinr, ndeg = _dedup_score(scorer, neigh)
                consider(ns, neigh, nw, np_tx, nsinr, ndeg)
                sup = ns > top_score
                if np.any(sup):
                    elite_cfgs.append(neigh[sup])
                    elite_scores.append(ns[sup])

        configs = np.concatenate(elite_cfgs, axis=0)
        escores = np.concatenate(elite_scores)
        finite = np.isfinite(escores)
        if np.any(finite) and not np.all(finite):
            configs, escores = configs[finite], escores[finite]
        weights = elite_weights(escores)
        prob = update_probability(prob, configs, weights, par.eps)
        trace.append(best[0])

    return NeceResult(best[1], best[0], best[2], best[3], best[4], best[5],
                      scorer.evals, trace)
