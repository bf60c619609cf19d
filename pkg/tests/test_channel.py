import numpy as np
import pytest
from scipy import stats

from risopt.channel import draw_channels, path_loss_direct, path_loss_ris, place_users
from risopt.config import Geometry, PathLossParams, SystemConfig, subrng


def test_place_users_zero_radius_limit():
    rng = np.random.default_rng(0)
    pos = place_users((5.0, 1.0), 1e-12, 4, rng)
    assert np.allclose(pos, [5.0, 1.0], atol=1e-6)


def test_place_users_mean_distance():
    # area-uniform disc: E[r] = 2/3 * radius
    rng = np.random.default_rng(1)
    pos = place_users((0.0, 0.0), 3.0, 100_000, rng)
    r = np.hypot(pos[:, 0], pos[:, 1])
    assert r.mean() == pytest.approx(2.0, rel=0.01)
    assert r.max() <= 3.0


def test_place_users_deterministic():
    a = place_users((0, 0), 2.0, 5, subrng(42, "ue-pos", 0))
    b = place_users((0, 0), 2.0, 5, subrng(42, "ue-pos", 0))
    assert np.array_equal(a, b)


def test_path_loss_ris_unit_distances():
    pl = PathLossParams()
    assert path_loss_ris(1.0, 1.0, pl) == pytest.approx(1e-6)


def test_path_loss_ris_power_law():
    pl = PathLossParams()
    assert path_loss_ris(2.0, 4.0, pl) == pytest.approx(path_loss_ris(2.0, 2.0, pl) / 4)


def test_path_loss_ris_reference_geometry():
    # d_BR for BS (0,0) and RIS (50,2): sqrt(50^2 + 2^2), squared 2504
    pl = PathLossParams()
    d_br = np.sqrt(50**2 + 2**2)
    assert path_loss_ris(d_br, 1.5, pl) == pytest.approx(1e-6 / 2504 * 1.5**-2)


def test_path_loss_direct_values():
    pl = PathLossParams()
    assert path_loss_direct(1.0, pl) == pytest.approx(1e-3)
    assert path_loss_direct(10.0, pl) == pytest.approx(1e-3 * 10 ** -3.5)
    d = np.linspace(1, 100, 50)
    gains = path_loss_direct(d, pl)
    assert np.all(np.diff(gains) < 0)


def test_path_loss_rejects_nonpositive():
    pl = PathLossParams()
    with pytest.raises(ValueError):
        path_loss_ris(0.0, 1.0, pl)
    with pytest.raises(ValueError):
        path_loss_direct(-1.0, pl)


def test_draw_channels_deterministic_per_seed():
    cfg = SystemConfig(m=4, k=2, n=8, n_s=16, seed=9)
    a = draw_channels(cfg, drop=3)
    b = draw_channels(cfg, drop=3)
    assert np.array_equal(a.g, b.g)
    assert np.array_equal(a.h_r, b.h_r)
    assert np.array_equal(a.h_d, b.h_d)
    c = draw_channels(cfg, drop=4)
    assert not np.array_equal(a.g, c.g)


def test_draw_channels_fixed_positions_mode():
    cfg = SystemConfig(m=2, k=2, n=2, n_s=4, seed=10)
    a = draw_channels(cfg, drop=0, redraw_positions=False)
    b = draw_channels(cfg, drop=5, redraw_positions=False)
    assert np.array_equal(a.ue_pos, b.ue_pos)
    assert not np.array_equal(a.g, b.g)
    c = draw_channels(cfg, drop=5, redraw_positions=True)
    assert not np.array_equal(b.ue_pos, c.ue_pos)


def test_small_scale_statistics():
    # unit-variance circularly-symmetric entries before path-loss scaling
    rng = subrng(0, "stats")
    n = 100_000
    x = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
    assert np.var(x.real) + np.var(x.imag) == pytest.approx(1.0, rel=0.02)
    assert np.abs(x).mean() == pytest.approx(np.sqrt(np.pi) / 2, rel=0.02)


def test_fading_entry_statistics_through_scaling():
    # divide out the deterministic gain and check unit variance + Rayleigh mean
    cfg = SystemConfig(m=10, k=2, n=8, n_s=100, seed=11)
    ch = draw_channels(cfg, drop=0)
    gain = np.sqrt(cfg.pathloss.c_r * cfg.geometry.d_br ** -cfg.pathloss.alpha_br)
    x = (ch.g / gain).ravel()
    assert np.var(x.real) + np.var(x.imag) == pytest.approx(1.0, rel=0.1)
    assert np.abs(x).mean() == pytest.approx(np.sqrt(np.pi) / 2, rel=0.1)


def test_entry_phases_uniform_ks():
    cfg = SystemConfig(m=10, k=2, n=8, n_s=1000, seed=12)
    ch = draw_channels(cfg, drop=0)
    phases = np.angle(ch.g).ravel() % (2 * np.pi)
    res = stats.kstest(phases, stats.uniform(loc=0, scale=2 * np.pi).cdf)
    assert res.pvalue > 0.01


def test_cascade_power_law():
    # mean cascaded power per grid point reproduces f_r = C_r d_BR^-2 d_RU^-2
    cfg = SystemConfig(m=1, k=1, n=1, n_s=10_000, seed=13,
                       geometry=Geometry(ue_radius=1e-9))
    ch = draw_channels(cfg, drop=0)
    cascade = ch.h_r.conj()[:, 0] * ch.g[:, 0]  # per-point product channel
    d_ru = np.hypot(ch.ue_pos[0, 0] - 50.0, ch.ue_pos[0, 1] - 2.0)
    expect = path_loss_ris(cfg.geometry.d_br, d_ru, cfg.pathloss)
    assert np.mean(np.abs(cascade) ** 2) == pytest.approx(expect, rel=0.05)


def test_restrict_takes_leading_grid_points():
    cfg = SystemConfig(m=3, k=2, n=4, n_s=8, seed=14)
    ch = draw_channels(cfg)
    sub = ch.restrict(np.arange(4))
    assert sub.n_s == 4
    assert np.array_equal(sub.g, ch.g[:4])
    assert np.array_equal(sub.h_r, ch.h_r[:4])
    assert np.array_equal(sub.h_d, ch.h_d)
