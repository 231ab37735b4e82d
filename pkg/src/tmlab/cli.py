"""Command-line experiment runner.

One binary, five subcommands: classify a program file, sample programs,
enumerate exact densities, run density convergence tables, and run walk
oracles.  Reports are deterministic for fixed flags; worker count and
engine choice never change output bytes.  Exit codes: 0 on success, 2 on
usage or domain errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .decide import (
    classify,
    conservative_halting,
    decide_halting_before_repeat,
    halts_or_falls_before_repeat,
    has_halt_transition,
)
from .density import (
    Event,
    EventKind,
    ExperimentSpec,
    IncompatibleModel,
    convergence_table,
    exact_density,
    parse_event,
)
from .machine import MachineModel, ParseError, parse, program_to_json, serialize
from .reports import (
    density_rows_csv,
    density_rows_json,
    exact_rows_csv,
    exact_rows_json,
    walk_rows_csv,
    walk_rows_json,
)
from .sampling import (
    DEFAULT_ENUMERATION_GUARD,
    TooManyPrograms,
    Xoshiro256StarStar,
    derive_trial_seed,
    sample_program,
)
from .walks import WalkSpec, falloff2d_mc, falloff_cdf, falloff_mc


def _parse_seed(text: str) -> int:
    try:
        value = int(text, 16) if text.lower().startswith("0x") else int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed {text!r}: expected decimal or 0x hex")
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be nonnegative, got {text}")
    return value


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty integer list")
    return values


def _parse_event_arg(text: str) -> Event:
    try:
        return parse_event(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _model_from_flag(name: str, a: int) -> MachineModel:
    if name == "oneway":
        return MachineModel.one_way(a)
    return MachineModel.two_way(a)


def _emit(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _cmd_classify(args: argparse.Namespace) -> int:
    with open(args.program, "r", encoding="utf-8") as fh:
        program = parse(fh.read())
    budget = 10 * program.n if args.budget is None else args.budget
    model = _model_from_flag(args.model, program.a)
    doc = {
        "program": program_to_json(program),
        "classification": classify(program).to_json(),
        "halts_or_falls_before_repeat": halts_or_falls_before_repeat(program),
        "halting_decision": decide_halting_before_repeat(program).value,
        "has_halt_transition": has_halt_transition(program),
        "conservative_verdict": conservative_halting(program, model, budget).to_json(),
        "conservative_budget": budget,
        "model": model.geometry.value,
    }
    _emit(json.dumps(doc, sort_keys=True, indent=2) + "\n", args.output)
    return 0


def _cmd_sample(args: argparse.Namespace) -> int:
    blocks = []
    for i in range(args.count):
        stream = Xoshiro256StarStar(derive_trial_seed(args.seed, args.trial + i))
        program = sample_program(args.n, args.a, stream)
        if args.format == "text":
            blocks.append(serialize(program))
        else:
            blocks.append(json.dumps(program_to_json(program), sort_keys=True) + "\n")
    _emit("\n".join(blocks) if args.format == "text" else "".join(blocks), args.output)
    return 0


def _cmd_enumerate(args: argparse.Namespace) -> int:
    result = exact_density(args.event, args.n, args.a, guard=args.guard)
    config = {
        "command": "enumerate",
        "event": args.event.token,
        "a": args.a,
        "n": args.n,
        "guard": args.guard,
        "format": args.format,
    }
    render = exact_rows_csv if args.format == "csv" else exact_rows_json
    _emit(render([result], config), args.output)
    return 0


def _cmd_density(args: argparse.Namespace) -> int:
    model = _model_from_flag(args.model, args.a)
    spec = ExperimentSpec(
        event=args.event,
        model=model,
        a=args.a,
        n_grid=args.n,
        trials=args.trials,
        master_seed=args.seed,
    )
    rows = convergence_table(spec, workers=args.workers, engine=args.engine)
    config = {
        "command": "density",
        "event": spec.event.token,
        "model": model.geometry.value,
        "a": spec.a,
        "n_grid": list(spec.n_grid),
        "trials": spec.trials,
        "master_seed": spec.master_seed,
        "format": args.format,
    }
    render = density_rows_csv if args.format == "csv" else density_rows_json
    _emit(render(rows, config), args.output)
    if args.plot is not None:
        from .figures import density_figure

        density_figure(rows, args.plot)
    return 0


def _cmd_walk(args: argparse.Namespace) -> int:
    points = []
    for index, k in enumerate(args.k):
        if k < 0:
            raise ValueError(f"horizon must be >= 0, got {k}")
        exact = falloff_cdf(k) if args.dim == 1 else None
        est = None
        if not args.exact_only:
            spec = WalkSpec(
                dimension=args.dim,
                steps=k,
                trials=args.trials,
                master_seed=derive_trial_seed(args.seed, index),
            )
            mc = falloff_mc if args.dim == 1 else falloff2d_mc
            est = mc(spec, workers=args.workers, engine=args.engine)
        points.append((k, exact, est))
    config = {
        "command": "walk",
        "dim": args.dim,
        "k": list(args.k),
        "trials": None if args.exact_only else args.trials,
        "master_seed": args.seed,
        "format": args.format,
    }
    render = walk_rows_csv if args.format == "csv" else walk_rows_json
    _emit(render(points, config), args.output)
    if args.plot is not None:
        from .figures import walk_figure

        walk_figure(points, args.plot)
    return 0


def _add_common_output(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--output", default=None, help="write report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tmlab",
        description="Turing machine density laboratory",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("classify", help="classify one program file")
    p.add_argument("program", help="path to a program in the text format")
    p.add_argument("--budget", type=int, default=None, help="steps for the conservative verdict (default 10n)")
    p.add_argument("--model", choices=("oneway", "twoway"), default="oneway")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_classify)

    p = commands.add_parser("sample", help="sample random programs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=int, default=2)
    p.add_argument("--seed", type=_parse_seed, default=0)
    p.add_argument("--trial", type=int, default=0, help="first trial index")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_sample)

    p = commands.add_parser("enumerate", help="exact event density over all programs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=int, default=2)
    p.add_argument(
        "--event",
        type=_parse_event_arg,
        default=Event(EventKind.HALTS_OR_FALLS_BEFORE_REPEAT),
    )
    p.add_argument("--guard", type=int, default=DEFAULT_ENUMERATION_GUARD)
    _add_common_output(p)
    p.set_defaults(func=_cmd_enumerate)

    p = commands.add_parser("density", help="Monte Carlo density over an n grid")
    p.add_argument("--event", type=_parse_event_arg, required=True)
    p.add_argument("--n", type=_parse_int_list, required=True, help="comma-separated state counts")
    p.add_argument("--a", type=int, default=2)
    p.add_argument("--model", choices=("oneway", "twoway"), default="oneway")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=_parse_seed, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--engine", choices=("auto", "pure", "compiled"), default="auto")
    p.add_argument("--plot", default=None, help="also render a PNG figure to this path")
    _add_common_output(p)
    p.set_defaults(func=_cmd_density)

    p = commands.add_parser("walk", help="random-walk fall-off oracles")
    p.add_argument("--k", type=_parse_int_list, required=True, help="comma-separated horizons")
    p.add_argument("--dim", type=int, choices=(1, 2), default=1)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=_parse_seed, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--engine", choices=("auto", "pure", "compiled"), default="auto")
    p.add_argument("--exact-only", action="store_true", help="skip Monte Carlo columns")
    p.add_argument("--plot", default=None, help="also render a PNG figure to this path")
    _add_common_output(p)
    p.set_defaults(func=_cmd_walk)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TooManyPrograms as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IncompatibleModel, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
