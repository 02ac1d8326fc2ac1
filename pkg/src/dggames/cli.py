"""Command-line front end.

Exit codes: 0 NE found / check passed, 1 NE-free / check failed, 2 input
error, 3 instance too large or method unsupported.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from dggames import harness, oracle, playonce, terminal3
from dggames.errors import GameError, InstanceTooLarge, PreconditionError, ValidationError
from dggames.game import INF, Game, Situation, check_ne, classify, evaluate
from dggames.textio import export_dot, format_game, format_situation, parse_game, parse_situation

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 1, 2, 3
DEFAULT_LIMIT = 10_000_000
METHODS = ("auto", "playonce", "terminal3", "terminal-playonce", "oracle")


class Unsupported(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


def load_game(path: str) -> Game:
    if path.startswith("fixture:"):
        return harness.fixture(path.split(":", 1)[1])
    return parse_game(_read(path))


def load_situation(path: str, game: Game) -> Situation:
    return parse_situation(_read(path), game)


def pick_method(game: Game) -> str:
    c = classify(game)
    if c.is_terminal_game and c.is_play_once:
        return "terminal-playonce"
    if c.is_play_once:
        return "playonce"
    if c.is_terminal_game and len(game.terminals) <= 3:
        return "terminal3"
    return "oracle"


def run_method(game: Game, method: str, limit: int) -> Situation | None:
    """The NE produced by ``method``, or None when the oracle certifies NE-freeness."""
    c = classify(game)
    if method == "playonce":
        if not c.is_play_once:
            raise Unsupported("playonce needs every player to control exactly one position")
        return playonce.solve_play_once(game)
    if method == "terminal3":
        if not c.is_terminal_game or len(game.terminals) > 3:
            raise Unsupported("terminal3 needs a terminal game with at most 3 terminals")
        return terminal3.solve_terminal3(game)
    if method == "terminal-playonce":
        if not (c.is_terminal_game and c.is_play_once):
            raise Unsupported("terminal-playonce needs a terminal play-once game")
        if not c.terminal_reachable_from_init:
            return terminal3.solve_unreachable(game)
        return terminal3.solve_terminal_play_once(game)
    cert = oracle.certify(game, limit=limit)
    return cert.situations[0] if cert.situations else None


def _print_solution(game: Game, method: str, sigma: Situation) -> None:
    play = evaluate(game, sigma)
    print("status: NE")
    print(f"method: {method}")
    print(f"outcome: {play.outcome}")
    print("play: " + " ".join(play.walk))
    print("situation:")
    sys.stdout.write(format_situation(sigma))


def cmd_solve(args) -> int:
    game = load_game(args.file)
    method = pick_method(game) if args.method == "auto" else args.method
    try:
        sigma = run_method(game, method, args.limit)
    except (Unsupported, PreconditionError) as exc:
        print("status: UNSUPPORTED")
        print(f"method: {method}")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    if sigma is not None and args.require_terminal and evaluate(game, sigma).outcome == INF:
        cert = oracle.certify(game, want_all=True, limit=args.limit)
        sigma = cert.terminal[0] if cert.terminal else None
        method = f"{method}+oracle"
        if sigma is None:
            print("status: NO-NE")
            print(f"method: {method}")
            print(f"detail: no terminal NE ({cert.examined} situations examined)")
            return EXIT_NEGATIVE
    if sigma is None:
        print("status: NO-NE")
        print(f"method: {method}")
        print(f"detail: NE-free ({game.situation_count()} situations examined)")
        return EXIT_NEGATIVE
    if not check_ne(game, sigma).is_ne:
        print(f"error: {method} returned a situation that is not a NE", file=sys.stderr)
        return EXIT_NEGATIVE
    _print_solution(game, method, sigma)
    return EXIT_OK


def cmd_check(args) -> int:
    game = load_game(args.file)
    sigma = load_situation(args.situation, game)
    verdict = check_ne(game, sigma)
    if verdict.is_ne:
        print("NE")
        print(f"outcome: {verdict.outcome}")
        return EXIT_OK
    w = verdict.witness
    print("NOT-NE")
    print(f"outcome: {verdict.outcome}")
    print(f"witness player: {w.player}")
    print(f"witness outcome: {w.new_outcome}")
    print("witness deviation:")
    for v in game.positions_of(w.player):
        print(f"{v} -> {w.deviation[v]}")
    return EXIT_NEGATIVE


def cmd_certify(args) -> int:
    game = load_game(args.file)
    cert = oracle.certify(game, want_all=args.all, limit=args.limit, jobs=args.jobs)
    if cert.ne_free:
        print(f"NE-free ({cert.examined} situations examined)")
        return EXIT_NEGATIVE
    if args.all:
        label = "no terminal NE" if cert.kind is oracle.CertificateKind.NO_TERMINAL_NE else "NE found"
        print(f"{label}: {len(cert.terminal)} terminal, {len(cert.nonterminal)} non-terminal "
              f"({cert.examined} situations examined)")
    else:
        print(f"NE found ({cert.examined} situations examined)")
    for s in cert.situations:
        out = evaluate(game, s).outcome
        print(f"[{oracle.encode(game, s)}] outcome={out}: " + " ".join(f"{a}->{b}" for a, b in s.moves()))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    game = load_game(args.file)
    count = game.situation_count()
    if count > oracle.INDEX_LIMIT:
        raise InstanceTooLarge(f"instance too large: {count} situations")
    if args.count_only:
        print(count)
        return EXIT_OK
    if count > args.limit:
        raise InstanceTooLarge(f"instance too large: {count} situations exceed --limit {args.limit}")
    for k, s in enumerate(oracle.enumerate_situations(game)):
        print(f"{k}: " + " ".join(f"{a}->{b}" for a, b in s.moves()) + f" => {evaluate(game, s).outcome}")
    return EXIT_OK


def cmd_dynamics(args) -> int:
    game = load_game(args.file)
    start = load_situation(args.start, game) if args.start else oracle.decode(game, 0)
    run = oracle.improvement_dynamics(game, start, args.max_steps)
    print(f"start: " + " ".join(f"{a}->{b}" for a, b in start.moves()) + f" => {evaluate(game, start).outcome}")
    for k, (s, p) in enumerate(run.steps, start=1):
        print(f"step {k} player {p}: " + " ".join(f"{a}->{b}" for a, b in s.moves())
              + f" => {evaluate(game, s).outcome}")
    end = run.end.value
    if run.cycle_start is not None:
        end += f" (returns to situation {run.cycle_start})"
    print(f"end: {end} after {len(run.steps)} steps")
    return EXIT_OK if run.end is oracle.DynamicsEnd.REACHED_NE else EXIT_NEGATIVE


def _params(args) -> harness.GenParams:
    return harness.GenParams(positions=args.positions, terminals=args.terminals, players=args.players,
                             max_out_degree=args.max_out_degree, force_play_once=args.play_once,
                             force_terminal_game=args.terminal_game,
                             force_terminal_reachable=args.terminal_reachable, seed=args.seed)


def cmd_gen(args) -> int:
    game = harness.fixture(args.fixture) if args.fixture else harness.random_game(_params(args))
    text = format_game(game)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_search(args) -> int:
    params = _params(args)

    def progress(done: int, hits: int) -> None:
        if done % max(1, args.trials // 10) == 0 or done == args.trials:
            print(f"{done}/{args.trials} certified, {hits} NE-free", file=sys.stderr)

    hits = harness.search_ne_free(params, args.trials, limit=args.limit, progress=progress)
    for seed, cert in hits:
        print(f"NE-free seed={seed} ({cert.examined} situations examined)")
    print(f"{len(hits)} NE-free games in {args.trials} trials")
    return EXIT_NEGATIVE if hits else EXIT_OK


def cmd_export_dot(args) -> int:
    game = load_game(args.file)
    sigma = load_situation(args.situation, game) if args.situation else None
    sys.stdout.write(export_dot(game, sigma))
    return EXIT_OK


def _gen_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--positions", type=int, default=4, help="internal positions")
    p.add_argument("--terminals", type=int, default=3)
    p.add_argument("--players", type=int, default=3)
    p.add_argument("--max-out-degree", type=int, default=3)
    p.add_argument("--play-once", action="store_true")
    p.add_argument("--terminal-game", action="store_true")
    p.add_argument("--terminal-reachable", action="store_true")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dggames", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="construct a Nash equilibrium")
    p.add_argument("file")
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--require-terminal", action="store_true")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="oracle situation limit")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="check whether a situation is a NE")
    p.add_argument("file")
    p.add_argument("--situation", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("certify", help="exhaustively certify NE existence")
    p.add_argument("file")
    p.add_argument("--all", action="store_true", help="list every NE")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("enumerate", help="list or count situations")
    p.add_argument("file")
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--limit", type=int, default=100_000)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("dynamics", help="run best-response improvement dynamics")
    p.add_argument("file")
    p.add_argument("--start")
    p.add_argument("--max-steps", type=int, default=1000)
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("gen", help="write a random or fixture game")
    _gen_options(p)
    p.add_argument("--fixture", choices=harness.FIXTURES)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("search", help="search random terminal games for NE-free ones")
    _gen_options(p)
    p.set_defaults(terminal_game=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("export-dot", help="render a game as Graphviz DOT")
    p.add_argument("file")
    p.add_argument("--situation")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except InstanceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ValidationError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except GameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
