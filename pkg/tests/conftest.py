import numpy as np
import pytest

from risopt.channel import draw_channels
from risopt.config import AtsParams, NeceParams, SystemConfig


def tiny_config(seed=0, **kw):
    """M=2, K=2, N=2, N_s=4, b=1 instance with small search budgets."""
    defaults = dict(m=2, k=2, n=2, n_s=4, b=1, seed=seed,
                    ats=AtsParams(q=4, i_t=8), nece=NeceParams(i_n=6, c=16, c_pr=4))
    defaults.update(kw)
    return SystemConfig(**defaults)


@pytest.fixture
def cfg():
    return SystemConfig(m=4, k=2, n=8, n_s=16, seed=7)


@pytest.fixture
def channels(cfg):
    return draw_channels(cfg, drop=0)


def random_channelset(cfg, seed=0):
    """Unscaled random channels, handy for pure linear-algebra tests."""
    from risopt.channel import ChannelSet

    rng = np.random.default_rng(seed)

    def crandn(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)

    return ChannelSet(crandn(cfg.n_s, cfg.m), crandn(cfg.n_s, cfg.k),
                      crandn(cfg.m, cfg.k), np.zeros((cfg.k, 2)))
