"""Successive-refinement phase baseline: coordinate descent over active points."""

from __future__ import annotations

import numpy as np

from risopt.channel import ChannelSet
from risopt.config import SystemConfig
from risopt.kernels import Scorer
from risopt.nece import NeceResult

MAX_PASSES = 20


def sr_optimize(cfg: SystemConfig, ch: ChannelSet, z: np.ndarray,
                seed_key: tuple = (), mode: str = "wsr",
                mu: np.ndarray | None = None) -> NeceResult:
    """Cycle through active grid points, setting each phase to its best level
    with the others held fixed, until a full pass brings no improvement or the
    pass cap is hit. Accepted probes are strictly improving, so the score is
    monotone. Deterministic: starts from the all-zero phase vector.
    """
    z = np.asarray(z)
    active = np.flatnonzero(z)
    levels = 2**cfg.b
    scorer = Scorer(cfg, ch, z, mode=mode, mu=mu)

    theta = np.zeros(cfg.n_s, dtype=np.int64)
    scores, wsr, ptx, sinr, degen = scorer.score(theta[None])
    cur = (float(scores[0]), float(wsr[0]), float(ptx[0]), sinr[0], bool(degen[0]))
    trace = [cur[0]]

    for _ in range(MAX_PASSES):
        improved = False
        for n in active:
            batch = np.tile(theta, (levels, 1))
            batch[:, n] = np.arange(levels)
            s, w, p, si, dg = scorer.score(batch)
            i = int(np.argmax(s))
            if s[i] > cur[0]:
                theta[n] = i
                cur = (float(s[i]), float(w[i]), float(p[i]), si[i], bool(dg[i]))
                improved = True
        trace.append(cur[0])
        if not improved:
            break

    return NeceResult(theta, cur[0], cur[1], cur[2], cur[3], cur[4],
                      scorer.evals, trace)
