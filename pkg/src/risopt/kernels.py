"""Batched configuration scoring, the hot loop of every optimizer.

Two interchangeable implementations of the same arithmetic:

* a numba ``@njit`` kernel looping over candidates (default), and
* a vectorized pure-numpy fallback.

Set ``RISOPT_FORCE_NUMPY=1`` to select the fallback (also used when numba is
unavailable). ``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

from risopt.channel import ChannelSet
from risopt.config import SystemConfig
from risopt.model import COND_LIMIT

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


def numba_enabled() -> bool:
    return HAS_NUMBA and os.environ.get("RISOPT_FORCE_NUMPY", "0") != "1"


@njit(cache=True)
def _score_batch_numba(phases, a, bm, hd, sigma2, weights, p_total, mu, power_mode):
    """Score a batch of phase candidates on the active grid points.

    phases: (c, n) unit phasors of the n active points
    a:      (k, n) H_r^H columns of the active points
    bm:     (n, m) G rows of the active points
    hd:     (k, m) H_d^H
    mu:     (k,) target SINRs (power mode only)

    Returns (wsr, p_tx, sinr, degenerate) arrays.
    """
    cnum = phases.shape[0]
    kk, mm = hd.shape
    nn = a.shape[1]
    wsr = np.zeros(cnum)
    ptx = np.zeros(cnum)
    sinr = np.zeros((cnum, kk))
    degen = np.zeros(cnum, np.bool_)
    heq = np.empty((kk, mm), np.complex128)
    gram = np.empty((kk, kk), np.complex128)
    for c in range(cnum):
        ph = phases[c]
        for i in range(kk):
            for j in range(mm):
                acc = hd[i, j]
                for n in range(nn):
                    acc += a[i, n] * ph[n] * bm[n, j]
                heq[i, j] = acc
        for i in range(kk):
            for j in range(kk):
                acc = 0.0 + 0.0j
                for m in range(mm):
                    acc += heq[i, m] * np.conj(heq[j, m])
                gram[i, j] = acc
        ev = np.linalg.eigvalsh(gram)
        if ev[0] <= 0.0 or ev[kk - 1] / ev[0] > COND_LIMIT:
            degen[c] = True
            if power_mode:
                ptx[c] = np.inf
            continue
        gi = np.linalg.inv(gram)
        # squared norms of the unit-power ZF directions: diag of gram^-1
        g = np.zeros(kk)
        for j in range(kk):
            g[j] = gi[j, j].real
        if power_mode:
            p = mu * sigma2
        else:
            p = np.full(kk, p_total / np.sum(g))
        # H_eq W = (gram gram^-1) diag(sqrt p); off-diagonal residual kept for
        # the general SINR formula
        sm = gram @ gi
        tot = 0.0
        for k in range(kk):
            sig = (sm[k, k].real ** 2 + sm[k, k].imag ** 2) * p[k]
            interf = 0.0
            for i in range(kk):
                if i != k:
                    interf += (sm[k, i].real ** 2 + sm[k, i].imag ** 2) * p[i]
            sk = sig / (interf + sigma2)
            sinr[c, k] = sk
            tot += weights[k] * np.log2(1.0 + sk)
        wsr[c] = tot
        ptx[c] = np.sum(p * g)
    return wsr, ptx, sinr, degen


def _score_batch_numpy(phases, a, bm, hd, sigma2, weights, p_total, mu, power_mode):
    """Vectorized fallback with identical semantics to the numba kernel."""
    cnum = phases.shape[0]
    kk = hd.shape[0]
    heq = np.einsum("kn,cn,nm->ckm", a, phases, bm, optimize=True) + hd[None]
    gram = heq @ heq.conj().transpose(0, 2, 1)
    ev = np.linalg.eigvalsh(gram)
    degen = (ev[:, 0] <= 0.0) | (ev[:, -1] > COND_LIMIT * ev[:, 0])

    wsr = np.zeros(cnum)
    ptx = np.full(cnum, np.inf if power_mode else 0.0)
    sinr = np.zeros((cnum, kk))
    ok = ~degen
    if np.any(ok):
        gi = np.linalg.inv(gram[ok])
        g = np.real(np.diagonal(gi, axis1=1, axis2=2))
        if power_mode:
            p = np.broadcast_to(mu * sigma2, g.shape)
        else:
            p = np.broadcast_to((p_total / g.sum(axis=1))[:, None], g.shape)
        sm_pow = np.abs(gram[ok] @ gi) ** 2 * p[:, None, :]
        signal = np.diagonal(sm_pow, axis1=1, axis2=2)
        interf = sm_pow.sum(axis=2) - signal
        s = signal / (interf + sigma2)
        sinr[ok] = s
        wsr[ok] = np.sum(weights[None, :] * np.log2(1.0 + s), axis=1)
        ptx[ok] = np.sum(p * g, axis=1)
    return wsr, ptx, sinr, degen


def score_batch(phases, a, bm, hd, sigma2, weights, p_total, mu, power_mode):
    args = (
        np.ascontiguousarray(phases, dtype=np.complex128),
        np.ascontiguousarray(a, dtype=np.complex128),
        np.ascontiguousarray(bm, dtype=np.complex128),
        np.ascontiguousarray(hd, dtype=np.complex128),
        float(sigma2),
        np.ascontiguousarray(weights, dtype=np.float64),
        float(p_total),
        np.ascontiguousarray(mu, dtype=np.float64),
        bool(power_mode),
    )
    if numba_enabled():
        return _score_batch_numba(*args)
    return _score_batch_numpy(*args)


class Scorer:
    """Scores batches of phase-index vectors for a fixed mask and channels.

    In WSR mode the score is the weighted sum-rate (degenerate -> 0). In power
    mode the score is -P_T with SINR targets met exactly under ZF
    (degenerate -> -inf).
    """

    def __init__(self, cfg: SystemConfig, ch: ChannelSet, z: np.ndarray,
                 mode: str = "wsr", mu: np.ndarray | None = None):
        if mode not in ("wsr", "power"):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "power":
            mu = np.asarray(mu, dtype=np.float64)
            if mu.shape != (cfg.k,) or np.any(mu <= 0):
                raise ValueError("mu must be k positive target SINRs")
        else:
            mu = np.ones(cfg.k)
        self.cfg = cfg
        self.mode = mode
        self.mu = mu
        self.active = np.flatnonzero(np.asarray(z))
        self.a = np.ascontiguousarray(ch.h_r.conj().T[:, self.active])
        self.bm = np.ascontiguousarray(ch.g[self.active, :])
        self.hd = np.ascontiguousarray(ch.h_d.conj().T)
        self.levels = 2**cfg.b
        self.evals = 0

    def score(self, idx_batch: np.ndarray):
        """idx_batch: (c, n_s) integer phase levels. Returns (scores, wsr, p_tx, sinr, degen)."""
        idx_batch = np.atleast_2d(idx_batch)
        phases = np.exp(2j * np.pi * idx_batch[:, self.active] / self.levels)
        wsr, ptx, sinr, degen = score_batch(
            phases, self.a, self.bm, self.hd, self.cfg.sigma2,
            self.cfg.weight_array, self.cfg.p_max, self.mu, self.mode == "power")
        self.evals += idx_batch.shape[0]
        if self.mode == "power":
            scores = np.where(degen, -np.inf, -ptx)
        else:
            scores = wsr
        return scores, wsr, ptx, sinr, degen
