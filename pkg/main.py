import argparse
import logging
import sys

import analysis_lab
import scenario
import verify_suites
from game_engine import (
    NotPlayable,
    StrategyIllegalMove,
    make_variant,
    outcome,
    run_game,
    write_transcript,
)
from game_utils import ConfigError, format_rational, output_dir, parse_rational, write_csv
from metric_spaces import NoWitness, NotFound, RealMaxSpace, parse_ball
from perfect_set import (
    PrecisionExhausted,
    build_perfect_tree,
    verify_tree,
    write_tree,
    write_tree_report,
)
from strategies import NoLegalCandidate

_logger = logging.getLogger(__name__)

SCENARIO_FLAGS = {
    "variant": "Game variant: schmidt, strong or absolute",
    "alpha": "Alice's factor as p/q",
    "beta": "Bob's factor as p/q",
    "space": "Space: realmax:<d>, cantor or binseq",
    "initial": "Initial ball as center@radius",
    "alice": "Alice's strategy as name(key=value,...)",
    "bob": "Bob's strategy as name(key=value,...)",
    "horizon": "Moves after the initial ball",
    "target": "Target set as name(key=value,...)",
    "transcript": "Transcript file name inside the output directory",
    "seed": "Seed for randomized opponents",
}


def load_config(args):
    overrides = {key: getattr(args, key, None) for key in SCENARIO_FLAGS}
    if args.config:
        return scenario.load_scenario(args.config, overrides)
    return scenario.with_overrides(scenario.ScenarioConfig(), overrides)


def max_ratio(radii):
    ratios = [b / a for a, b in zip(radii, radii[1:])]
    return max(ratios) if ratios else None


def run_play(args):
    config = load_config(args)
    game = scenario.build_scenario(config)
    transcript = run_game(game.variant, game.space, game.alice, game.bob, game.initial, config.horizon)
    path = output_dir(args.out) / config.transcript
    write_transcript(path, transcript)
    _logger.info(f"Wrote {len(transcript.moves)} moves to {path}")
    result = outcome(transcript, game.target)
    ratio = max_ratio([ball.radius for ball in transcript.bob_balls()])
    print(
        f"rounds={transcript.rounds} "
        f"final_radius={format_rational(result.enclosure.radius)} "
        f"max_bob_ratio={'-' if ratio is None else format_rational(ratio)} "
        f"shrinking={result.shrinking} winner={result.winner} "
        f"transcript={path}"
    )
    return 0


def run_verify(args):
    report = verify_suites.run_suite(args.suite, seed=args.seed, depth=args.depth, trials=args.trials)
    write_csv(report.rows(), ["property", "checked", "failed", "status", "detail"])
    print(f"suite={report.name} passed={report.passed}")
    return 0 if report.passed else 1


def run_tree(args):
    config = load_config(args)
    game = scenario.build_scenario(config)
    tree = build_perfect_tree(
        game.alice, game.variant, game.space, game.initial, args.depth, args.max_moves
    )
    out_dir = output_dir(args.out)
    write_tree(out_dir / "tree.jsonl", tree)
    report = verify_tree(tree)
    write_tree_report(out_dir / "tree_report.csv", report)
    write_csv(report.rows, ["level", "min_gap", "max_diameter"])
    for failure in report.failures:
        print(f"    {failure}")
    min_gap = "-" if report.min_gap is None else format_rational(report.min_gap)
    print(f"leaves={len(tree.leaves())} min_gap={min_gap} passed={report.passed}")
    return 0 if report.passed else 1


def run_lab(args):
    out_dir = output_dir(args.out)
    if args.lab == "classify":
        label = analysis_lab.classify_parameters(
            args.variant,
            None if args.alpha is None else parse_rational(args.alpha),
            parse_rational(args.beta),
            parse_rational(args.c),
            args.banach,
        )
        rows, columns = [label.row()], ["variant", "alpha", "beta", "c", "label", "certificate"]
    elif args.lab == "measure":
        bound, _ = analysis_lab.measure_upper_bound(
            parse_rational(args.beta), parse_rational(args.rho), args.M
        )
        print(format_rational(bound))
        rows = [
            {"beta": args.beta, "rho": args.rho, "M": args.M, "bound": format_rational(bound)}
        ]
        columns = ["beta", "rho", "M", "bound"]
    elif args.lab == "dimension":
        beta = parse_rational(args.beta)
        rows = [
            {
                "beta": format_rational(beta),
                "depth": args.depth,
                "formula_float": analysis_lab.dimension_formula(beta),
                "estimate_float": analysis_lab.box_counting_estimate(beta, args.depth),
            }
        ]
        columns = ["beta", "depth", "formula_float", "estimate_float"]
    elif args.lab == "minimax":
        space = RealMaxSpace(1)
        spec = analysis_lab.DiscreteGameSpec(
            make_variant(args.variant, args.alpha, args.beta),
            parse_rational(args.step),
            parse_ball(space, args.initial),
            tuple(_intervals(args.target)),
            args.depth,
            args.budget,
        )
        result = analysis_lab.truncated_minimax(spec)
        rows = [
            {
                "variant": args.variant,
                "alpha": args.alpha,
                "beta": args.beta,
                "target": args.target,
                "step": args.step,
                "depth": args.depth,
                "value": result.value,
                "optimistic": result.optimistic,
                "pessimistic": result.pessimistic,
            }
        ]
        columns = list(rows[0])
    elif args.lab == "chaser":
        row = analysis_lab.chaser_probe(
            parse_rational(args.alpha),
            parse_rational(args.beta),
            parse_rational(args.t),
            args.adversary,
            args.horizon,
        )
        rows, columns = [row], list(row)
    else:
        raise ConfigError(f"Unknown lab command {args.lab!r}")
    write_csv(rows, columns, out_dir / f"lab_{args.lab}.csv")
    write_csv(rows, columns)
    return 0


def _intervals(text):
    intervals = []
    for item in text.split(";"):
        if item.strip():
            lo, _, hi = item.partition(":")
            intervals.append((parse_rational(lo), parse_rational(hi)))
    return intervals


def build_parser():
    parser = argparse.ArgumentParser(description="Schmidt, strong and absolute games on metric spaces")
    parser.add_argument("--verbose", action="store_true", help="Log every move")
    parser.add_argument(
        "--out",
        type=str,
        default=None,
        help="Output directory, default: $METRIC_GAMES_OUTPUT or output/",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    for name in ("play", "tree"):
        sub = commands.add_parser(name)
        sub.add_argument("--config", type=str, default=None, help="Scenario file with key=value lines")
        for key, text in SCENARIO_FLAGS.items():
            sub.add_argument(f"--{key}", type=int if key in ("horizon", "seed") else str, help=text)
        if name == "tree":
            sub.add_argument("--depth", type=int, default=3, help="Tree depth, default: %(default)s")
            sub.add_argument(
                "--max-moves", type=int, default=None, help="Move cap per split, default: derived"
            )

    verify = commands.add_parser("verify")
    verify.add_argument("suite", type=str, help=f"One of {', '.join(verify_suites.SUITES)}")
    verify.add_argument("--depth", type=int, default=6, help="Tree depth, default: %(default)s")
    verify.add_argument("--seed", type=int, default=0, help="Random seed, default: %(default)s")
    verify.add_argument("--trials", type=int, default=None, help="Trials per property")

    lab = commands.add_parser("lab")
    labs = lab.add_subparsers(dest="lab", required=True)
    classify = labs.add_parser("classify")
    classify.add_argument("--variant", type=str, default="schmidt", help="default: %(default)s")
    classify.add_argument("--alpha", type=str, default=None)
    classify.add_argument("--beta", type=str, required=True)
    classify.add_argument("--c", type=str, default="1/2", help="default: %(default)s")
    classify.add_argument("--banach", action="store_true")
    measure = labs.add_parser("measure")
    measure.add_argument("--beta", type=str, required=True)
    measure.add_argument("--rho", type=str, default="1", help="default: %(default)s")
    measure.add_argument("--M", type=int, default=3, help="default: %(default)s")
    dimension = labs.add_parser("dimension")
    dimension.add_argument("--beta", type=str, required=True)
    dimension.add_argument("--depth", type=int, default=12, help="default: %(default)s")
    minimax = labs.add_parser("minimax")
    minimax.add_argument("--variant", type=str, default="schmidt", help="default: %(default)s")
    minimax.add_argument("--alpha", type=str, default="1/2", help="default: %(default)s")
    minimax.add_argument("--beta", type=str, default="1/2", help="default: %(default)s")
    minimax.add_argument("--initial", type=str, default="0/1@1/1", help="default: %(default)s")
    minimax.add_argument("--target", type=str, default="0/1:1/2", help="lo:hi;..., default: %(default)s")
    minimax.add_argument("--step", type=str, default="1/8", help="default: %(default)s")
    minimax.add_argument("--depth", type=int, default=2, help="default: %(default)s")
    minimax.add_argument(
        "--budget", type=int, default=10**7, help="Node budget, default: %(default)s"
    )
    chaser = labs.add_parser("chaser")
    chaser.add_argument("--alpha", type=str, default="9/10", help="default: %(default)s")
    chaser.add_argument("--beta", type=str, default="1/2", help="default: %(default)s")
    chaser.add_argument("--t", type=str, default="1/10", help="default: %(default)s")
    chaser.add_argument("--adversary", type=str, default="min-radius", help="default: %(default)s")
    chaser.add_argument("--horizon", type=int, default=20, help="default: %(default)s")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    runners = {"play": run_play, "verify": run_verify, "tree": run_tree, "lab": run_lab}
    try:
        return runners[args.command](args)
    except (StrategyIllegalMove, NoLegalCandidate) as error:
        print(f"strategy error: {error}", file=sys.stderr)
        return 2
    except (ConfigError, NotPlayable, ValueError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    except (
        PrecisionExhausted,
        analysis_lab.BudgetExceeded,
        NoWitness,
        NotFound,
    ) as error:
        print(f"search exhausted: {error}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
