"""Reference fixtures, seeded random game generators, and the NE-free search loop."""

from __future__ import annotations

import logging
import random
from collections.abc import Callable, Iterable
from dataclasses import dataclass

from dggames import oracle
from dggames.errors import GameError, ValidationError
from dggames.game import INF, Game, classify, terminal_reachable

log = logging.getLogger(__name__)

# fig1: three players, player 2 owns two positions, no NE.
_FIG1 = dict(
    players=3,
    terminals=("a", "b", "c"),
    controller={"p1": 1, "p2": 2, "p3": 2, "p4": 3},
    moves=[("p1", "p2"), ("p1", "p4"), ("p2", "a"), ("p2", "p3"),
           ("p3", "b"), ("p3", "p4"), ("p4", "p3"), ("p4", "c")],
    init="p1",
    prefs={1: ("b", INF, "a", "c"),
           2: ("c", "a", "b", INF),
           3: ("a", INF, "c", "b")},
)

# fig2: play-once 3-cycle, every player ranks infinity above its own exit.
_FIG2 = dict(
    players=3,
    terminals=("a", "b", "c"),
    controller={"q1": 1, "q2": 2, "q3": 3},
    moves=[("q1", "q2"), ("q1", "a"), ("q2", "q3"), ("q2", "b"), ("q3", "q1"), ("q3", "c")],
    init="q1",
    prefs={1: ("b", "c", INF, "a"),
           2: ("c", "a", INF, "b"),
           3: ("a", "b", INF, "c")},
)

_FIG2_TERMINAL_PREFS = {1: ("b", "c", "a", INF),
                        2: ("c", "a", "b", INF),
                        3: ("a", "b", "c", INF)}

FIXTURES = ("fig1", "fig2", "fig2-terminal")


def fixture(name: str) -> Game:
    if name == "fig1":
        return Game(**_FIG1)
    if name == "fig2":
        return Game(**_FIG2)
    if name == "fig2-terminal":
        return Game(**{**_FIG2, "prefs": _FIG2_TERMINAL_PREFS})
    raise KeyError(f"unknown fixture {name!r}; expected one of {', '.join(FIXTURES)}")


@dataclass(frozen=True)
class GenParams:
    """Parameters of :func:`random_game`.

    ``positions`` counts internal positions. With ``force_play_once`` the
    player count must equal ``positions``.
    """

    positions: int = 4
    terminals: int = 3
    players: int = 3
    max_out_degree: int = 3
    force_play_once: bool = False
    force_terminal_game: bool = False
    force_terminal_reachable: bool = False
    seed: int = 0

    def check(self) -> None:
        if self.positions < 1:
            raise ValidationError("positions must be at least 1")
        if self.terminals < 0:
            raise ValidationError("terminals must be non-negative")
        if self.players < 1:
            raise ValidationError("players must be at least 1")
        if self.max_out_degree < 1:
            raise ValidationError("max_out_degree must be at least 1")
        if self.force_play_once and self.players != self.positions:
            raise ValidationError("force_play_once requires players == positions")
        if self.force_terminal_reachable and self.terminals == 0:
            raise ValidationError("force_terminal_reachable needs at least one terminal")
        if self.positions == 1 and self.terminals == 0:
            raise ValidationError("a single position without terminals has no legal move")

    def with_seed(self, seed: int) -> GenParams:
        return GenParams(self.positions, self.terminals, self.players, self.max_out_degree,
                         self.force_play_once, self.force_terminal_game,
                         self.force_terminal_reachable, seed)


def internal_names(count: int) -> list[str]:
    width = len(str(count - 1))
    return [f"v{k:0{width}d}" for k in range(count)]


def terminal_names(count: int) -> list[str]:
    if count <= 26:
        return [chr(ord("a") + k) for k in range(count)]
    width = len(str(count - 1))
    return [f"t{k:0{width}d}" for k in range(count)]


def random_prefs(rng: random.Random, players: int, terminals: list[str],
                 terminal_game: bool) -> dict[int, tuple[str, ...]]:
    prefs = {}
    for p in range(1, players + 1):
        if terminal_game:
            order = list(terminals)
            rng.shuffle(order)
            order.append(INF)
        else:
            order = list(terminals) + [INF]
            rng.shuffle(order)
        prefs[p] = tuple(order)
    return prefs


def _controllers(rng: random.Random, names: list[str], players: int, play_once: bool) -> dict[str, int]:
    if play_once:
        owners = list(range(1, players + 1))
        rng.shuffle(owners)
        return dict(zip(names, owners))
    return {v: rng.randint(1, players) for v in names}


MAX_ATTEMPTS = 1000


def random_game(params: GenParams) -> Game:
    """Seeded random game honouring every requested flag.

    Out-neighbourhoods are drawn without replacement from the other
    positions; reachability is enforced by rejection sampling.
    """
    params.check()
    rng = random.Random(params.seed)
    names = internal_names(params.positions)
    terms = terminal_names(params.terminals)
    for _ in range(MAX_ATTEMPTS):
        moves = []
        for v in names:
            pool = [w for w in names if w != v] + terms
            degree = rng.randint(1, min(params.max_out_degree, len(pool)))
            moves.extend((v, w) for w in rng.sample(pool, degree))
        controller = _controllers(rng, names, params.players, params.force_play_once)
        prefs = random_prefs(rng, params.players, terms, params.force_terminal_game)
        game = Game(params.players, terms, controller, moves, names[0], prefs)
        if params.force_terminal_reachable and not terminal_reachable(game):
            continue
        return game
    raise GameError(f"could not satisfy generator flags after {MAX_ATTEMPTS} attempts: {params}")


def random_acyclic_game(seed: int, positions: int = 5, terminals: int = 3, players: int = 3,
                        max_out_degree: int = 3) -> Game:
    """Random game whose moves only go to higher-numbered internals or terminals."""
    if terminals < 1:
        raise ValidationError("an acyclic game needs at least one terminal")
    rng = random.Random(seed)
    names = internal_names(positions)
    terms = terminal_names(terminals)
    moves = []
    for k, v in enumerate(names):
        pool = names[k + 1:] + terms
        degree = rng.randint(1, min(max_out_degree, len(pool)))
        moves.extend((v, w) for w in rng.sample(pool, degree))
    controller = _controllers(rng, names, players, False)
    return Game(players, terms, controller, moves, names[0], random_prefs(rng, players, terms, False))


def random_unreachable_game(seed: int, positions: int = 6, terminals: int = 3, players: int = 3,
                            max_out_degree: int = 3, terminal_game: bool = True) -> Game:
    """Random game in which no terminal is reachable from the initial position.

    A trap component containing the initial position only moves inside
    itself; the remaining positions move anywhere.
    """
    if positions < 1:
        raise ValidationError("positions must be at least 1")
    rng = random.Random(seed)
    names = internal_names(positions)
    terms = terminal_names(terminals)
    trap_size = rng.randint(1, positions)
    trap, rest = names[:trap_size], names[trap_size:]
    moves = []
    for v in trap:
        pool = [w for w in trap if w != v] or [v]
        degree = rng.randint(1, min(max_out_degree, len(pool)))
        moves.extend((v, w) for w in rng.sample(pool, degree))
    for v in rest:
        pool = [w for w in names if w != v] + terms
        degree = rng.randint(1, min(max_out_degree, len(pool)))
        moves.extend((v, w) for w in rng.sample(pool, degree))
    controller = _controllers(rng, names, players, False)
    return Game(players, terms, controller, moves, names[0],
                random_prefs(rng, players, terms, terminal_game))


def scan_ne_free(stream: Iterable[tuple[object, Game]], limit: int | None = None,
                 progress: Callable[[int, int], None] | None = None) -> list[tuple[object, oracle.Certificate]]:
    """Certify each labelled game and keep the NE-free ones."""
    hits = []
    done = 0
    for label, game in stream:
        cert = oracle.certify(game, limit=limit)
        done += 1
        if cert.ne_free:
            hits.append((label, cert))
            log.info("NE-free game found: %s", label)
        if progress is not None:
            progress(done, len(hits))
    return hits


def search_ne_free(params: GenParams, trials: int, limit: int | None = None,
                   progress: Callable[[int, int], None] | None = None) -> list[tuple[int, oracle.Certificate]]:
    """Look for NE-free terminal games among ``trials`` random games.

    Trial ``k`` uses seed ``params.seed + k``. A hit on a terminal game would
    refute the conjecture that every terminal game has a NE.
    """
    if not params.force_terminal_game:
        raise ValidationError("search_ne_free requires force_terminal_game")
    stream = ((params.seed + k, random_game(params.with_seed(params.seed + k))) for k in range(trials))
    return scan_ne_free(stream, limit=limit, progress=progress)


def describe(game: Game) -> str:
    c = classify(game)
    flags = [name for name, on in (("terminal", c.is_terminal_game), ("play-once", c.is_play_once),
                                   ("T-reachable", c.terminal_reachable_from_init)) if on]
    return f"{len(game.internals)} internal, {len(game.terminals)} terminal, {game.players} players [{', '.join(flags)}]"
