"""Command-line interface.

Subcommands: solve (optimize a layout's sound placement), eval (virtual
listener comparison of strategies), synth-model (write the calibrated
synthetic confusion model), inspect-model (summary statistics of a model
file), bench (solver timings).

Exit codes: 0 success, 2 malformed input, 3 infeasible instance, 4 internal
error. Diagnostics go to stderr as single `error: <kind>: <message>` lines.
Emitted JSON is byte-stable for identical inputs: keys are sorted and
nothing time- or environment-dependent is written (solve timing goes to
stderr instead).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from statistics import fmean

import numpy as np

from . import __version__
from .angles import bin_count_for
from .confusion import (
    ConfusionModel,
    ModelFormatError,
    SyntheticModelParams,
    calibrated_params,
    diagonal_argmax_fraction,
    load_model,
    row_entropies,
    save_model,
    synthesize_model,
)
from .layout import Element, Layout, LayoutError, load_layout
from .placement import InfeasibleLayoutError, PlacementSolution, colocated_solution, solve
from .scoring import ScoreMatrix, Weights, build_score_matrix
from .simulate import dump_trials, expected_localization_errors, run_simulation, table1_statistics

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_INTERNAL = 4

BENCH_SIZES = (2, 5, 10, 20, 50, 100)


def _emit_json(obj, out: str) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _solution_dict(solution: PlacementSolution, scores: ScoreMatrix, max_disp) -> dict:
    d = {
        "solver": solution.solver,
        "objective": solution.objective,
        "cut_rotation": solution.cut_rotation,
        "bin_size_deg": scores.model.bin_size_deg,
        "weights": {"blur": scores.weights.blur, "cone": scores.weights.cone},
        "cone_rule": scores.cone_rule,
        "max_displacement_deg": max_disp,
        "per_element_score": list(solution.per_element_score),
        "assignments": [
            {
                "id": a.id,
                "visual_azimuth_deg": a.visual_azimuth_deg,
                "sound_azimuth_deg": a.sound_azimuth_deg,
                "bin": a.sound_bin,
                "elevation_deg": a.elevation_deg,
            }
            for a in solution.assignments
        ],
    }
    if solution.warning is not None:
        d["warning"] = solution.warning
    return d


def _parse_weights(text: str) -> Weights:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"weights must be 'blur,cone', got {text!r}")
    return Weights(blur=float(parts[0]), cone=float(parts[1]))


def _load_inputs(args) -> tuple[Layout, ConfusionModel]:
    layout = load_layout(args.layout)
    model = load_model(args.model) if args.model else synthesize_model(calibrated_params())
    return layout, model


def _cmd_solve(args) -> int:
    layout, model = _load_inputs(args)
    weights = _parse_weights(args.weights)
    scores = build_score_matrix(model, layout, weights, args.cone_rule)
    solution = solve(scores, max_displacement_deg=args.max_displacement)
    _emit_json(_solution_dict(solution, scores, args.max_displacement), args.out)
    print(f"solved n={len(layout)} in {solution.solve_time_s * 1e3:.2f} ms", file=sys.stderr)
    return EXIT_OK


def _cmd_eval(args) -> int:
    layout, model = _load_inputs(args)
    weights = _parse_weights(args.weights)
    scores = build_score_matrix(model, layout, weights, args.cone_rule)
    runs = [
        ("colocated", colocated_solution(scores)),
        ("optimized", solve(scores, max_displacement_deg=args.max_displacement)),
    ]
    reports = {
        name: run_simulation(sol, layout, model, args.trials, args.seed, strategy=name)
        for name, sol in runs
    }
    gap, se = reports["optimized"].accuracy_gap(reports["colocated"])
    out = {
        "trials": args.trials,
        "seed": args.seed,
        "bin_size_deg": model.bin_size_deg,
        "strategies": {
            name: {
                "accuracy": r.accuracy,
                "accuracy_stderr": r.accuracy_stderr,
                "mean_circular_error_deg": r.mean_circular_error_deg,
                "mean_adjusted_error_deg": r.mean_adjusted_error_deg,
                "mean_cone_effect_deg": r.mean_cone_effect_deg,
                "per_element_accuracy": dict(zip(layout.ids, r.per_element_accuracy)),
            }
            for name, r in reports.items()
        },
        "optimized_minus_colocated": {"accuracy_gap": gap, "combined_stderr": se},
    }
    _emit_json(out, args.out)
    if args.csv:
        lines = ["strategy,accuracy,stderr"]
        lines += [f"{n},{r.accuracy!r},{r.accuracy_stderr!r}" for n, r in sorted(reports.items())]
        Path(args.csv).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return EXIT_OK


def _cmd_synth_model(args) -> int:
    if args.params:
        params = SyntheticModelParams.from_dict(
            json.loads(Path(args.params).read_text(encoding="utf-8"))
        )
        if args.bin_size != params.bin_size_deg:
            raise ModelFormatError(
                f"--bin-size {args.bin_size} conflicts with params file "
                f"bin_size_deg={params.bin_size_deg}"
            )
    else:
        params = calibrated_params(bin_size_deg=args.bin_size)
    model = synthesize_model(params)
    save_model(model, args.out)
    if args.trials_csv:
        n = dump_trials(model, args.trials_csv, trials_per_bin=args.trials_per_bin, seed=args.seed)
        print(f"wrote {n} trials to {args.trials_csv}", file=sys.stderr)
    print(f"wrote {model.bin_count}x{model.bin_count} model to {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_inspect_model(args) -> int:
    model = load_model(args.model)
    sums = model.matrix.sum(axis=1)
    entropies = row_entropies(model)
    frac = diagonal_argmax_fraction(model)
    expected = expected_localization_errors(model)
    stats = {
        "bin_size_deg": model.bin_size_deg,
        "bin_count": model.bin_count,
        "provenance": model.provenance,
        "row_sum_min": float(sums.min()),
        "row_sum_max": float(sums.max()),
        "diagonal_argmax_fraction": frac,
        "row_entropy_bits": {
            "min": float(entropies.min()),
            "mean": float(entropies.mean()),
            "max": float(entropies.max()),
        },
        "expected_errors_deg": expected,
    }
    if args.json:
        _emit_json(stats, "-")
        return EXIT_OK
    print(f"bin_size_deg: {model.bin_size_deg}")
    print(f"bin_count: {model.bin_count}")
    print(f"provenance: {model.provenance}")
    print(f"row sums: [{sums.min():.12g}, {sums.max():.12g}]")
    print(
        f"diagonal argmax fraction: {frac:.4f} "
        f"({round(frac * model.bin_count)}/{model.bin_count})"
    )
    print(
        f"row entropy (bits): min={entropies.min():.3f} "
        f"mean={entropies.mean():.3f} max={entropies.max():.3f}"
    )
    print("expected localization errors (deg):")
    for region, e in expected.items():
        print(
            f"  {region}: circular={e['circular']:.2f} adjusted={e['adjusted']:.2f} "
            f"cone_effect={e['cone_effect']:.2f}"
        )
    return EXIT_OK


def _bench_bin_size(n: int) -> int:
    for size in (12, 10, 9, 8, 6, 5, 4, 3, 2, 1):
        if bin_count_for(size) >= n:
            return size
    raise InfeasibleLayoutError(f"no supported bin size fits {n} elements")


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else list(BENCH_SIZES)
    rng = np.random.default_rng(args.seed)
    rows = []
    print("n,bin_size_deg,bin_count,mean_ms,min_ms,max_ms,repeats")
    for n in sizes:
        bin_size = _bench_bin_size(n)
        model = synthesize_model(calibrated_params(bin_size_deg=bin_size))
        layout = Layout(
            tuple(
                Element(id=f"e{i}", visual_azimuth_deg=float(a))
                for i, a in enumerate(np.sort(rng.uniform(0.0, 360.0, size=n)))
            )
        )
        scores = build_score_matrix(model, layout)
        times = []
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            solve(scores)
            times.append((time.perf_counter() - t0) * 1e3)
        row = (
            f"{n},{bin_size},{bin_count_for(bin_size)},"
            f"{fmean(times):.3f},{min(times):.3f},{max(times):.3f},{args.repeats}"
        )
        rows.append(row)
        print(row)
    if args.out:
        header = "n,bin_size_deg,bin_count,mean_ms,min_ms,max_ms,repeats"
        Path(args.out).write_text("\n".join([header, *rows]) + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_table1(args) -> int:
    model = load_model(args.model) if args.model else synthesize_model(calibrated_params())
    stats = table1_statistics(model, trials_per_bin=args.trials_per_bin, seed=args.seed)
    out = {
        "trials_per_bin": args.trials_per_bin,
        "seed": args.seed,
        "regions": {
            name: {
                "circular_mean": s.circular_mean,
                "circular_sd": s.circular_sd,
                "adjusted_mean": s.adjusted_mean,
                "adjusted_sd": s.adjusted_sd,
                "cone_effect_mean": s.cone_effect_mean,
                "cone_effect_sd": s.cone_effect_sd,
                "trials": s.trials,
            }
            for name, s in stats.items()
        },
    }
    _emit_json(out, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cueplace",
        description="Optimize spatial-audio cue placement against a listener confusion model.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_args(p, required_model=False):
        p.add_argument("--model", required=required_model, help="confusion model CSV")
        p.add_argument("--weights", default="0.9,0.1", help="blur,cone weights")
        p.add_argument(
            "--cone-rule",
            choices=("point-plus-mirror", "mirror-only"),
            default="point-plus-mirror",
        )
        p.add_argument(
            "--max-displacement",
            type=float,
            default=None,
            help="forbid moving a sound farther than this many degrees from its element",
        )

    p = sub.add_parser("solve", help="compute the optimal sound placement for a layout")
    p.add_argument("--layout", required=True, help="layout JSON")
    add_model_args(p)
    p.add_argument("--out", default="-", help="solution JSON path, '-' for stdout")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("eval", help="simulate optimized vs colocated placement")
    p.add_argument("--layout", required=True)
    add_model_args(p)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.add_argument("--csv", default=None, help="plot-ready strategy,accuracy,stderr CSV")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("synth-model", help="write the calibrated synthetic confusion model")
    p.add_argument("--out", required=True, help="model CSV path")
    p.add_argument("--bin-size", type=int, default=12)
    p.add_argument("--params", default=None, help="JSON file of synthetic parameters")
    p.add_argument("--trials-csv", default=None, help="also dump raw simulated trials here")
    p.add_argument("--trials-per-bin", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_synth_model)

    p = sub.add_parser("inspect-model", help="summary statistics of a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_inspect_model)

    p = sub.add_parser("table1", help="simulated per-region localization-error statistics")
    p.add_argument("--model", default=None, help="model CSV; default: calibrated synthetic")
    p.add_argument("--trials-per-bin", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser("bench", help="solver timings over a range of layout sizes")
    p.add_argument("--sizes", default=None, help="comma-separated element counts")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write timings CSV here too")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleLayoutError as e:
        print(f"error: infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (LayoutError, ModelFormatError) as e:
        print(f"error: input: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError, json.JSONDecodeError) as e:
        print(f"error: input: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as e:  # pragma: no cover - defensive
        print(f"error: internal: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
