"""Monte Carlo channel generation: geometry, path loss, Rayleigh fading."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from risopt.config import PathLossParams, SystemConfig, subrng


@dataclass(frozen=True)
class ChannelSet:
    """One channel realization.

    g     : (n_s, m) BS -> RIS grid
    h_r   : (n_s, k) RIS grid -> users (column k is user k)
    h_d   : (m, k)   BS -> users
    ue_pos: (k, 2)   user coordinates in meters
    """

    g: np.ndarray
    h_r: np.ndarray
    h_d: np.ndarray
    ue_pos: np.ndarray

    def __post_init__(self):
        if self.g.shape[0] != self.h_r.shape[0]:
            raise ValueError("g and h_r disagree on grid size")
        if self.g.shape[1] != self.h_d.shape[0]:
            raise ValueError("g and h_d disagree on antenna count")
        if self.h_r.shape[1] != self.h_d.shape[1]:
            raise ValueError("h_r and h_d disagree on user count")

    @property
    def n_s(self) -> int:
        return self.g.shape[0]

    def restrict(self, indices: np.ndarray) -> "ChannelSet":
        """Keep only the given grid points (regular-RIS baseline uses the first n)."""
        idx = np.asarray(indices)
        return ChannelSet(self.g[idx, :], self.h_r[idx, :], self.h_d, self.ue_pos)


def place_users(center, radius: float, k: int, rng: np.random.Generator) -> np.ndarray:
    """Draw k user positions area-uniform over a disc."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    r = radius * np.sqrt(rng.random(k))
    phi = 2.0 * np.pi * rng.random(k)
    return np.column_stack((center[0] + r * np.cos(phi), center[1] + r * np.sin(phi)))


def path_loss_ris(d_br: float, d_ru, pl: PathLossParams):
    """Cascaded BS-RIS-UE linear gain: c_r * d_br^-a_br * d_ru^-a_ru."""
    d_ru = np.asarray(d_ru, dtype=np.float64)
    if d_br <= 0 or np.any(d_ru <= 0):
        raise ValueError("distances must be positive")
    return pl.c_r * d_br ** (-pl.alpha_br) * d_ru ** (-pl.alpha_ru)


def path_loss_direct(d_bu, pl: PathLossParams):
    """Direct BS-UE linear gain: c_d * d_bu^-a_bu."""
    d_bu = np.asarray(d_bu, dtype=np.float64)
    if np.any(d_bu <= 0):
        raise ValueError("distances must be positive")
    return pl.c_d * d_bu ** (-pl.alpha_bu)


def _crandn(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance circularly-symmetric complex Gaussian entries.

    Real/imaginary parts are drawn interleaved per entry so that a draw of
    shape (n, m) is a row-prefix of a draw of shape (n' > n, m) from the same
    stream: grid-size sweeps then share fading on common grid points (common
    random numbers), which pairs Monte Carlo comparisons across sizes.
    """
    arr = rng.standard_normal(tuple(shape) + (2,))
    return (arr[..., 0] + 1j * arr[..., 1]) / np.sqrt(2.0)


def draw_channels(cfg: SystemConfig, drop: int = 0, redraw_positions: bool = True) -> ChannelSet:
    """One seeded drop of (g, h_r, h_d).

    The cascaded gain is split square-rooted between g (BS-RIS leg) and h_r
    (RIS-UE leg) so any mask/phase recombination carries the correct loss.
    """
    geo = cfg.geometry
    pl = cfg.pathloss
    pos_drop = drop if redraw_positions else 0
    ue_pos = place_users(geo.ue_center, geo.ue_radius, cfg.k,
                         subrng(cfg.seed, "ue-pos", pos_drop))
    d_ru = np.hypot(ue_pos[:, 0] - geo.ris[0], ue_pos[:, 1] - geo.ris[1])
    d_bu = np.hypot(ue_pos[:, 0] - geo.bs[0], ue_pos[:, 1] - geo.bs[1])

    # one substream per matrix: h_d is invariant to the grid size, and g/h_r
    # keep the row-prefix pairing property documented on _crandn
    g = _crandn(subrng(cfg.seed, "fading-g", drop), (cfg.n_s, cfg.m)) \
        * np.sqrt(pl.c_r * geo.d_br ** (-pl.alpha_br))
    h_r = _crandn(subrng(cfg.seed, "fading-hr", drop), (cfg.n_s, cfg.k)) \
        * np.sqrt(d_ru ** (-pl.alpha_ru))[None, :]
    h_d = _crandn(subrng(cfg.seed, "fading-hd", drop), (cfg.m, cfg.k)) \
        * np.sqrt(path_loss_direct(d_bu, pl))[None, :]
    return ChannelSet(g, h_r, h_d, ue_pos)
