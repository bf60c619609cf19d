"""Scenario configuration: system dimensions, powers, geometry, algorithm knobs."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np


def dbm_to_watt(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watt_to_dbm(p_watt: float) -> float:
    return 10.0 * np.log10(p_watt) + 30.0


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class Geometry:
    """Planar deployment geometry, all coordinates in meters."""

    bs: tuple[float, float] = (0.0, 0.0)
    ris: tuple[float, float] = (50.0, 2.0)
    ue_center: tuple[float, float] = (50.0, 0.0)
    ue_radius: float = 3.0

    def __post_init__(self):
        if self.ue_radius <= 0:
            raise ValueError("ue_radius must be positive")

    @property
    def d_br(self) -> float:
        return float(np.hypot(self.ris[0] - self.bs[0], self.ris[1] - self.bs[1]))


@dataclass(frozen=True)
class PathLossParams:
    """Distance power-law parameters; c_r / c_d are linear reference gains."""

    c_r: float = 1e-6  # -60 dB
    c_d: float = 1e-3  # -30 dB
    alpha_br: float = 2.0
    alpha_ru: float = 2.0
    alpha_bu: float = 3.5


@dataclass(frozen=True)
class AtsParams:
    """Tabu-search knobs for the topology outer loop."""

    q: int = 15
    i_t: int = 40
    h_size: int = 1
    # optional explicit per-iteration swap distance; None selects the default schedule
    p_schedule: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.q < 1 or self.i_t < 0 or self.h_size < 1:
            raise ValueError("invalid ATS parameters")


@dataclass(frozen=True)
class NeceParams:
    """Cross-entropy knobs for the phase inner loop."""

    i_n: int = 15
    c: int = 200
    c_pr: int = 40
    eps: float = 1e-3  # probability floor applied after each update

    def __post_init__(self):
        if self.i_n < 1 or self.c < 1 or self.c_pr < 1:
            raise ValueError("invalid NECE parameters")
        if self.c_pr > self.c:
            raise ValueError("c_pr must not exceed c")


@dataclass(frozen=True)
class SystemConfig:
    """Full scenario description for one irregular-RIS downlink instance."""

    m: int = 4
    k: int = 2
    n: int = 8
    n_s: int = 16
    b: int = 1
    p_max: float = dbm_to_watt(10.0)
    sigma2: float = 1e-12  # -90 dBm noise floor
    weights: tuple[float, ...] | None = None
    geometry: Geometry = field(default_factory=Geometry)
    pathloss: PathLossParams = field(default_factory=PathLossParams)
    ats: AtsParams = field(default_factory=AtsParams)
    nece: NeceParams = field(default_factory=NeceParams)
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.k < 1 or self.n < 0 or self.b < 1:
            raise ValueError("invalid system dimensions")
        if self.n > self.n_s:
            raise ValueError("n must not exceed n_s")
        if self.k > self.m:
            raise ValueError("k must not exceed m (ZF feasibility)")
        if self.p_max <= 0 or self.sigma2 <= 0:
            raise ValueError("p_max and sigma2 must be positive")
        if self.weights is None:
            object.__setattr__(self, "weights", (1.0,) * self.k)
        if len(self.weights) != self.k or any(w <= 0 for w in self.weights):
            raise ValueError("weights must be k positive values")

    @property
    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.float64)

    def replace(self, **kwargs) -> "SystemConfig":
        from dataclasses import replace

        return replace(self, **kwargs)


def _key_int(key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode())
    return int(key)


def subrng(seed: int, *keys) -> np.random.Generator:
    """Counter-based sub-stream: a generator keyed by (seed, *keys).

    Deterministic and independent of call order, so parallel workers replay
    exactly.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_key_int(k) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))
