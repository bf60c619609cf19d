"""Command-line entry point.

Subcommands:
    run <spec-file>       run an experiment from a key=value spec file
    preset <fig4..fig9>   run a named preset scenario
    oracle <spec-file>    exhaustive ground truth for (tiny) scenarios
    complexity <spec-file> print exact search counts for both methods
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from risopt.harness import ExperimentSpec, parse_spec, preset, run_experiment, summarize
from risopt.oracle import BudgetExceededError, exhaustive_search, predict_complexity


def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=None, help="override the spec seed")
    p.add_argument("--drops", type=int, default=None, help="override the Monte Carlo drop count")
    p.add_argument("--out", type=str, default=None, help="output directory")
    p.add_argument("--workers", type=int, default=1, help="parallel drop workers")


def _load_spec(path: str) -> ExperimentSpec:
    try:
        return parse_spec(Path(path).read_text())
    except (OSError, ValueError) as e:
        sys.exit(f"error: {e}")


def _apply_overrides(spec: ExperimentSpec, args) -> ExperimentSpec:
    from dataclasses import replace

    kw = {}
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.drops is not None:
        kw["drops"] = args.drops
    if args.out is not None:
        kw["output"] = args.out
    return replace(spec, **kw) if kw else spec


def _run(spec: ExperimentSpec, workers: int):
    rows = run_experiment(spec, workers=workers)
    for entry in summarize(rows):
        metric = (f"mean WSR {entry['mean_wsr']:.4f} +- {entry['stderr_wsr']:.4f}"
                  if spec.mode == "wsr" else
                  f"mean P_T {entry['mean_p_tx']} W ({entry['infeasible_drops']} infeasible)")
        print(f"sweep={entry['sweep']:g} {entry['baseline']:>16}: {metric} "
              f"[{entry['drops']} drops, {entry['total_evals']} evals]")
    print(f"results written to {spec.output}/")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="risopt",
                                 description="Irregular-RIS topology and precoding optimization")
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment spec file")
    p_run.add_argument("spec")
    _common_flags(p_run)

    p_pre = sub.add_parser("preset", help="run a named preset (fig4..fig9)")
    p_pre.add_argument("name")
    _common_flags(p_pre)

    p_orc = sub.add_parser("oracle", help="exhaustive search on the spec scenario")
    p_orc.add_argument("spec")
    _common_flags(p_orc)

    p_cpx = sub.add_parser("complexity", help="print predicted search counts")
    p_cpx.add_argument("spec")

    args = ap.parse_args(argv)

    if args.command == "run":
        spec = _apply_overrides(_load_spec(args.spec), args)
        _run(spec, args.workers)
        return 0

    if args.command == "preset":
        try:
            spec = preset(args.name)
        except ValueError as e:
            sys.exit(f"error: {e}")
        if args.out is None:
            args.out = f"out-{args.name}"
        spec = _apply_overrides(spec, args)
        _run(spec, args.workers)
        return 0

    if args.command == "oracle":
        spec = _apply_overrides(_load_spec(args.spec), args)
        from risopt.channel import draw_channels

        for si, value in enumerate(spec.sweep_values):
            cfg = spec.config_at(value)
            for drop in range(spec.drops):
                ch = draw_channels(cfg, drop=drop, redraw_positions=spec.redraw_positions)
                try:
                    res = exhaustive_search(cfg, ch, mode=spec.mode, mu=spec.mu_at(value))
                except BudgetExceededError as e:
                    sys.exit(f"error: {e}")
                print(f"sweep={value:g} drop={drop}: optimum WSR {res.wsr:.6f}, "
                      f"P_T {res.p_tx:.6g} W, mask {''.join(str(int(v)) for v in res.z)}, "
                      f"{res.phase_combos_searched} combinations")
        return 0

    if args.command == "complexity":
        spec = _load_spec(args.spec)
        for value in spec.sweep_values:
            cfg = spec.config_at(value)
            c_opt, c_p = predict_complexity(cfg)
            print(f"sweep={value:g}: exhaustive C_opt = {c_opt} "
                  f"(~{float(c_opt):.4e}), joint algorithm C_p = {c_p}")
        return 0

    return 1


if __name__ == "__main__":
    raise SystemExit(main())
