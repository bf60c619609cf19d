"""Transmit-power minimization under per-user SINR targets.

Reuses the joint topology + phase machinery with a -P_T score. Within the ZF
family the per-user allocation meeting target mu_k exactly is p_k = mu_k *
sigma^2, so the search space stays (mask, phases).
"""

from __future__ import annotations

import numpy as np

from risopt.ats import AtsResult, ats_optimize
from risopt.channel import ChannelSet
from risopt.config import SystemConfig
from risopt.model import RankDeficientError, zf_precoder


def min_power_allocation(h_eq: np.ndarray, mu: np.ndarray, sigma2: float):
    """ZF precoder meeting each SINR target exactly; returns (W, P_T).

    Rank-deficient equivalent channels are infeasible: (None, inf).
    """
    mu = np.asarray(mu, dtype=np.float64)
    if np.any(mu <= 0):
        raise ValueError("targets must be positive")
    p = mu * sigma2
    try:
        w = zf_precoder(h_eq, p)
    except (RankDeficientError, np.linalg.LinAlgError):
        return None, np.inf
    return w, float(np.sum(np.abs(w) ** 2))


def joint_power_minimize(cfg: SystemConfig, ch: ChannelSet, mu: np.ndarray,
                         seed_key: tuple = (), inner=None) -> AtsResult:
    """Lowest-power feasible (mask, phases, precoder) found by ATS + NECE.

    The result's `degenerate` flag set (p_tx = inf) means no feasible
    configuration was found.
    """
    return ats_optimize(cfg, ch, seed_key=seed_key, mode="power", mu=mu, inner=inner)
