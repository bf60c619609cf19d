"""Closed-form physical-layer metrics: equivalent channel, ZF precoding, SINR, WSR.

This is the reference (single-configuration) path. Optimizers score batches of
candidates through :mod:`risopt.kernels`, which must agree with these
definitions to numerical tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from risopt.channel import ChannelSet
from risopt.config import SystemConfig

COND_LIMIT = 1e12  # on H_eq H_eq^H; above it the configuration scores WSR = 0


class RankDeficientError(ValueError):
    """Equivalent channel too ill-conditioned for zero forcing."""


def quantized_phase_set(b: int) -> np.ndarray:
    """The 2^b equally spaced phase levels {2*pi*k / 2^b}, ascending."""
    if b < 1:
        raise ValueError("b must be at least 1")
    return 2.0 * np.pi * np.arange(2**b) / 2**b


def phase_indices_to_angles(idx: np.ndarray, b: int) -> np.ndarray:
    return 2.0 * np.pi * np.asarray(idx) / 2**b


def equivalent_channel(ch: ChannelSet, z: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """H_eq = H_r^H Z Theta G + H_d^H, shape (k, m).

    Grid points with z_n = 0 contribute nothing regardless of theta_n.
    """
    z = np.asarray(z)
    theta = np.asarray(theta, dtype=np.float64)
    if z.shape[0] != ch.n_s or theta.shape[0] != ch.n_s:
        raise ValueError("mask/phase length must equal the grid size")
    coeff = z * np.exp(1j * theta)
    return (ch.h_r.conj().T * coeff[None, :]) @ ch.g + ch.h_d.conj().T


def zf_precoder(h_eq: np.ndarray, p_alloc: np.ndarray) -> np.ndarray:
    """W = H_eq^H (H_eq H_eq^H)^-1 P_B^(1/2) with per-user powers p_alloc."""
    h_eq = np.asarray(h_eq)
    p_alloc = np.asarray(p_alloc, dtype=np.float64)
    if np.any(p_alloc < 0):
        raise ValueError("power allocation must be nonnegative")
    gram = h_eq @ h_eq.conj().T
    ev = np.linalg.eigvalsh(gram)
    if ev[0] <= 0 or ev[-1] / ev[0] > COND_LIMIT:
        raise RankDeficientError("H_eq H_eq^H singular or condition number above 1e12")
    return h_eq.conj().T @ np.linalg.inv(gram) * np.sqrt(p_alloc)[None, :]


def equal_power_allocation(h_eq: np.ndarray, p_max: float) -> np.ndarray:
    """Equal per-user powers rescaled so the realized ZF transmit power is p_max."""
    gram = h_eq @ h_eq.conj().T
    gi = np.linalg.inv(gram)
    # ||u_k||^2 of the unit-power ZF directions equals the diagonal of gram^-1
    g = np.real(np.diag(gi))
    return np.full(h_eq.shape[0], p_max / g.sum())


def sinr(h_eq: np.ndarray, w: np.ndarray, sigma2: float) -> np.ndarray:
    """Per-user SINR from the general formula (valid for any precoder)."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    s = h_eq @ w  # s[k, i] = row_k(H_eq) . w_i
    power = np.abs(s) ** 2
    signal = np.diag(power)
    interference = power.sum(axis=1) - signal
    return signal / (interference + sigma2)


def wsr(sinr_vals: np.ndarray, weights: np.ndarray) -> float:
    """Weighted sum-rate sum_k w_k log2(1 + sinr_k) in bits/s/Hz."""
    sinr_vals = np.asarray(sinr_vals, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if np.any(sinr_vals < 0):
        raise ValueError("SINR must be nonnegative")
    if np.any(weights <= 0):
        raise ValueError("weights must be positive")
    return float(np.sum(weights * np.log2(1.0 + sinr_vals)))


def transmit_power(w: np.ndarray) -> float:
    """Total transmit power sum_k ||w_k||^2 (squared Frobenius norm)."""
    return float(np.sum(np.abs(w) ** 2))


@dataclass(frozen=True)
class EvaluationResult:
    """Score of one (mask, phase) configuration."""

    wsr: float
    sinr: np.ndarray
    p_tx: float
    degenerate: bool = False
    evals: int = 1
    w: np.ndarray | None = None


def evaluate(cfg: SystemConfig, ch: ChannelSet, z: np.ndarray, theta: np.ndarray) -> EvaluationResult:
    """Full pipeline: equivalent channel -> equal power ZF -> SINR -> WSR.

    A rank-deficient equivalent channel scores WSR = 0 with the degenerate
    flag set instead of raising, so searches never abort mid-run.
    """
    h_eq = equivalent_channel(ch, z, theta)
    try:
        p = equal_power_allocation(h_eq, cfg.p_max)
        w = zf_precoder(h_eq, p)
    except (RankDeficientError, np.linalg.LinAlgError):
        return EvaluationResult(0.0, np.zeros(cfg.k), 0.0, degenerate=True)
    gamma = sinr(h_eq, w, cfg.sigma2)
    return EvaluationResult(wsr(gamma, cfg.weight_array), gamma, transmit_power(w), w=w)
