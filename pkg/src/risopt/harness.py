"""Experiment orchestration: spec files, Monte Carlo sweeps, baselines, persistence.

A spec is a flat key=value text file (dotted keys). Named presets fig4..fig9
encode the reference scenarios. Results are written as a raw per-drop CSV
(header: sweep,baseline,drop,wsr,p_tx,seconds,evals) plus an aggregated JSON
summary; topology bitmaps are exported on request.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from risopt.ats import ats_optimize
from risopt.channel import ChannelSet, draw_channels
from risopt.config import (
    AtsParams,
    Geometry,
    NeceParams,
    SystemConfig,
    db_to_linear,
    dbm_to_watt,
)
from risopt.nece import nece_optimize
from risopt.oracle import exhaustive_search
from risopt.sr import sr_optimize

BASELINES = ("irregular-nece", "regular-nece", "irregular-sr", "regular-sr", "exhaustive")
SWEEP_AXES = ("power_dbm", "n_s", "n", "mu_db")

CSV_HEADER = "sweep,baseline,drop,wsr,p_tx,seconds,evals"


@dataclass
class ExperimentSpec:
    """One experiment: a scenario, exactly one sweep axis, drops, baselines."""

    m: int = 4
    k: int = 2
    n: int = 8
    n_s: int = 16
    b: int = 1
    p_dbm: float = 10.0
    sigma2_dbm: float = -90.0
    ue_radius: float = 3.0
    q: int = 15
    i_t: int = 40
    h_size: int = 1
    i_n: int = 15
    c: int = 200
    c_pr: int = 40
    mode: str = "wsr"  # "wsr" or "power"
    mu_db: float = 10.0  # fixed target when mode=power and mu is not the sweep axis
    sweep_axis: str = "power_dbm"
    sweep_values: tuple = (10.0,)
    drops: int = 100
    baselines: tuple = ("irregular-nece", "regular-nece")
    seed: int = 0
    redraw_positions: bool = True
    export_topology: bool = False
    output: str = "out"

    def __post_init__(self):
        if self.sweep_axis not in SWEEP_AXES:
            raise ValueError(f"sweep.axis must be one of {SWEEP_AXES}, got {self.sweep_axis!r}")
        if len(self.sweep_values) < 1:
            raise ValueError("sweep.values must be nonempty")
        if self.drops < 1:
            raise ValueError("drops must be at least 1")
        for bl in self.baselines:
            if bl not in BASELINES:
                raise ValueError(f"unknown baseline {bl!r}; choose from {BASELINES}")
        if self.mode not in ("wsr", "power"):
            raise ValueError(f"mode must be 'wsr' or 'power', got {self.mode!r}")
        if self.sweep_axis == "mu_db" and self.mode != "power":
            raise ValueError("sweep.axis=mu_db requires mode=power")

    def config_at(self, value) -> SystemConfig:
        """SystemConfig for one sweep value."""
        n, n_s, p_dbm = self.n, self.n_s, self.p_dbm
        if self.sweep_axis == "power_dbm":
            p_dbm = float(value)
        elif self.sweep_axis == "n_s":
            n_s = int(value)
        elif self.sweep_axis == "n":
            n = int(value)
        return SystemConfig(
            m=self.m, k=self.k, n=n, n_s=n_s, b=self.b,
            p_max=dbm_to_watt(p_dbm),
            sigma2=dbm_to_watt(self.sigma2_dbm),
            geometry=Geometry(ue_radius=self.ue_radius),
            ats=AtsParams(q=self.q, i_t=self.i_t, h_size=self.h_size),
            nece=NeceParams(i_n=self.i_n, c=self.c, c_pr=self.c_pr),
            seed=self.seed,
        )

    def mu_at(self, value) -> np.ndarray | None:
        if self.mode != "power":
            return None
        mu_db = float(value) if self.sweep_axis == "mu_db" else self.mu_db
        return np.full(self.k, db_to_linear(mu_db))


def parse_spec(text: str) -> ExperimentSpec:
    """Parse the flat key=value spec format ('#' starts a comment)."""
    keymap = {
        "scenario.m": ("m", int), "scenario.k": ("k", int),
        "scenario.n": ("n", int), "scenario.n_s": ("n_s", int),
        "scenario.b": ("b", int),
        "scenario.p_dbm": ("p_dbm", float),
        "scenario.sigma2_dbm": ("sigma2_dbm", float),
        "scenario.ue_radius": ("ue_radius", float),
        "ats.q": ("q", int), "ats.i_t": ("i_t", int), "ats.h_size": ("h_size", int),
        "nece.i_n": ("i_n", int), "nece.c": ("c", int), "nece.c_pr": ("c_pr", int),
        "mode": ("mode", str),
        "mu_db": ("mu_db", float),
        "sweep.axis": ("sweep_axis", str),
        "sweep.values": ("sweep_values", lambda s: tuple(float(v) for v in s.split(","))),
        "drops": ("drops", int),
        "baselines": ("baselines", lambda s: tuple(v.strip() for v in s.split(","))),
        "seed": ("seed", int),
        "redraw_positions": ("redraw_positions", lambda s: s.lower() in ("1", "true", "yes")),
        "export_topology": ("export_topology", lambda s: s.lower() in ("1", "true", "yes")),
        "output": ("output", str),
    }
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in keymap:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        attr, conv = keymap[key]
        try:
            kwargs[attr] = conv(val)
        except ValueError as e:
            raise ValueError(f"line {lineno}: bad value for {key!r}: {e}") from e
    return ExperimentSpec(**kwargs)


def format_spec(spec: ExperimentSpec) -> str:
    inv = {
        "m": "scenario.m", "k": "scenario.k", "n": "scenario.n", "n_s": "scenario.n_s",
        "b": "scenario.b", "p_dbm": "scenario.p_dbm", "sigma2_dbm": "scenario.sigma2_dbm",
        "ue_radius": "scenario.ue_radius",
        "q": "ats.q", "i_t": "ats.i_t", "h_size": "ats.h_size",
        "i_n": "nece.i_n", "c": "nece.c", "c_pr": "nece.c_pr",
        "mode": "mode", "mu_db": "mu_db",
        "sweep_axis": "sweep.axis", "sweep_values": "sweep.values",
        "drops": "drops", "baselines": "baselines", "seed": "seed",
        "redraw_positions": "redraw_positions", "export_topology": "export_topology",
        "output": "output",
    }
    lines = []
    for attr, key in inv.items():
        val = getattr(spec, attr)
        if attr in ("sweep_values", "baselines"):
            val = ",".join(str(v) for v in val)
        lines.append(f"{key}={val}")
    return "\n".join(lines) + "\n"


def preset(name: str) -> ExperimentSpec:
    """Named experiment definitions matching the reference scenarios."""
    presets = {
        "fig4": dict(m=4, n=8, n_s=16, k=2, sweep_axis="power_dbm",
                     sweep_values=tuple(float(p) for p in range(0, 21, 2)), drops=100,
                     baselines=("irregular-nece", "regular-nece", "irregular-sr", "regular-sr")),
        "fig5": dict(m=4, n=32, n_s=64, k=4, sweep_axis="power_dbm",
                     sweep_values=(10.0,), drops=1,
                     baselines=("irregular-nece",), export_topology=True),
        "fig6": dict(m=4, n=32, n_s=64, k=4, sweep_axis="power_dbm",
                     sweep_values=(0.0, 5.0, 10.0, 15.0, 20.0), drops=30,
                     baselines=("irregular-nece", "regular-nece", "irregular-sr", "regular-sr")),
        "fig7": dict(m=4, n=20, k=4, p_dbm=10.0, sweep_axis="n_s",
                     sweep_values=(20.0, 40.0, 60.0, 80.0), n_s=80, drops=30,
                     baselines=("irregular-nece", "regular-nece")),
        "fig8": dict(m=4, n_s=120, k=4, p_dbm=10.0, sweep_axis="n",
                     sweep_values=(20.0, 40.0, 60.0, 80.0), n=20, drops=30,
                     baselines=("irregular-nece", "regular-nece")),
        "fig9": dict(m=4, n=32, n_s=64, k=4, mode="power", sweep_axis="mu_db",
                     sweep_values=(0.0, 5.0, 10.0, 15.0, 20.0), drops=30,
                     baselines=("irregular-nece", "regular-nece", "irregular-sr", "regular-sr")),
    }
    if name not in presets:
        raise ValueError(f"unknown preset {name!r}; available: {sorted(presets)}")
    return ExperimentSpec(**presets[name])


@dataclass
class ResultRow:
    sweep: float
    baseline: str
    drop: int
    wsr: float
    p_tx: float
    seconds: float
    evals: int
    z: tuple | None = None  # irregular mask, kept for topology export

    def csv(self) -> str:
        return (f"{self.sweep:g},{self.baseline},{self.drop},"
                f"{self.wsr!r},{self.p_tx!r},{self.seconds:.3f},{self.evals}")


def _regular_view(cfg: SystemConfig, ch: ChannelSet):
    """Regular-RIS baseline: the first n grid points of the shared drop, all active."""
    cfg_reg = cfg.replace(n_s=cfg.n)
    return cfg_reg, ch.restrict(np.arange(cfg.n)), np.ones(cfg.n, dtype=np.int8)


def run_baseline(baseline: str, cfg: SystemConfig, ch: ChannelSet,
                 mode: str, mu, seed_key: tuple):
    if baseline == "irregular-nece":
        return ats_optimize(cfg, ch, seed_key=seed_key, mode=mode, mu=mu)
    if baseline == "irregular-sr":
        return ats_optimize(cfg, ch, seed_key=seed_key, mode=mode, mu=mu,
                            inner=lambda c, h, z, sk, md, m_: sr_optimize(c, h, z, sk, md, m_))
    if baseline == "regular-nece":
        cfg_r, ch_r, z = _regular_view(cfg, ch)
        return nece_optimize(cfg_r, ch_r, z, seed_key=seed_key, mode=mode, mu=mu)
    if baseline == "regular-sr":
        cfg_r, ch_r, z = _regular_view(cfg, ch)
        return sr_optimize(cfg_r, ch_r, z, seed_key=seed_key, mode=mode, mu=mu)
    if baseline == "exhaustive":
        return exhaustive_search(cfg, ch, mode=mode, mu=mu)
    raise ValueError(f"unknown baseline {baseline!r}")


def _run_drop(spec: ExperimentSpec, sweep_idx: int, drop: int) -> list[ResultRow]:
    """All baselines for one (sweep value, drop), sharing the same channels."""
    value = spec.sweep_values[sweep_idx]
    cfg = spec.config_at(value)
    mu = spec.mu_at(value)
    ch = draw_channels(cfg, drop=drop, redraw_positions=spec.redraw_positions)
    rows = []
    for baseline in spec.baselines:
        t0 = time.perf_counter()
        res = run_baseline(baseline, cfg, ch, spec.mode, mu, (sweep_idx, drop))
        dt = time.perf_counter() - t0
        z = tuple(int(v) for v in res.z) if hasattr(res, "z") else None
        rows.append(ResultRow(float(value), baseline, drop, res.wsr, res.p_tx,
                              dt, res.evals, z))
    return rows


def run_experiment(spec: ExperimentSpec, workers: int = 1,
                   out_dir: str | Path | None = None) -> list[ResultRow]:
    """Execute the sweep, write results.csv / summary.json, return the rows.

    Output is deterministic per (spec, seed) and independent of the worker
    count (the wall-time column excepted).
    """
    tasks = [(si, d) for si in range(len(spec.sweep_values)) for d in range(spec.drops)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_drop, [spec] * len(tasks),
                                   [t[0] for t in tasks], [t[1] for t in tasks]))
    else:
        chunks = [_run_drop(spec, si, d) for si, d in tasks]

    rows = [row for chunk in chunks for row in chunk]
    order = {bl: i for i, bl in enumerate(spec.baselines)}
    values = list(spec.sweep_values)
    rows.sort(key=lambda r: (values.index(r.sweep), r.drop, order[r.baseline]))

    out = Path(out_dir if out_dir is not None else spec.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(
        CSV_HEADER + "\n" + "".join(r.csv() + "\n" for r in rows))
    (out / "summary.json").write_text(json.dumps(summarize(rows), indent=2) + "\n")
    (out / "spec.txt").write_text(format_spec(spec))
    if spec.export_topology:
        for r in rows:
            if r.z is not None and r.baseline.startswith("irregular"):
                cfg = spec.config_at(r.sweep)
                grid = default_grid(cfg.n_s)
                stem = f"topology_s{values.index(r.sweep)}_d{r.drop}_{r.baseline}"
                export_topology(np.asarray(r.z), grid, out / stem)
    return rows


def summarize(rows: list[ResultRow]) -> list[dict]:
    """Mean / standard error per (sweep value, baseline); recomputable from the raw rows."""
    groups: dict[tuple, list[ResultRow]] = {}
    keys_in_order = []
    for r in rows:
        key = (r.sweep, r.baseline)
        if key not in groups:
            groups[key] = []
            keys_in_order.append(key)
        groups[key].append(r)
    out = []
    for sweep, baseline in keys_in_order:
        grp = groups[(sweep, baseline)]
        wsr = np.array([g.wsr for g in grp])
        ptx = np.array([g.p_tx for g in grp])
        n = len(grp)

        def sem(x):
            return float(np.std(x, ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0

        finite = np.isfinite(ptx)
        out.append({
            "sweep": sweep,
            "baseline": baseline,
            "drops": n,
            "mean_wsr": float(wsr.mean()),
            "stderr_wsr": sem(wsr),
            "mean_p_tx": float(ptx[finite].mean()) if finite.any() else None,
            "stderr_p_tx": sem(ptx[finite]) if finite.sum() > 1 else 0.0,
            "infeasible_drops": int((~finite).sum()),
            "total_evals": int(sum(g.evals for g in grp)),
        })
    return out


def default_grid(n_s: int) -> tuple[int, int]:
    root = math.isqrt(n_s)
    if root * root == n_s:
        return root, root
    return 1, n_s


def export_topology(z: np.ndarray, grid: tuple[int, int], stem: Path) -> None:
    """Write a row-major '1'/'0' text bitmap and a CSV of selected (row, col)."""
    rows, cols = grid
    if rows * cols != len(z):
        raise ValueError(f"grid {rows}x{cols} does not hold {len(z)} points")
    bitmap = z.reshape(rows, cols)
    stem = Path(stem)
    stem.with_suffix(".txt").write_text(
        "\n".join("".join(str(int(v)) for v in row) for row in bitmap) + "\n")
    sel = np.argwhere(bitmap == 1)
    stem.with_suffix(".csv").write_text(
        "row,col\n" + "".join(f"{r},{c}\n" for r, c in sel))


def parse_topology(text: str) -> np.ndarray:
    """Round-trip parse of the text bitmap back to a flat mask."""
    rows = [line for line in text.splitlines() if line]
    return np.array([int(c) for line in rows for c in line], dtype=np.int8)


def strip_timing(csv_text: str) -> str:
    """The CSV minus its wall-time column (the one nondeterministic field)."""
    out = []
    for line in csv_text.splitlines():
        parts = line.split(",")
        del parts[5]
        out.append(",".join(parts))
    return "\n".join(out)
