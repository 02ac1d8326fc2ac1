"""Deterministic graphical games: model, plays, and Nash equilibrium checks.

A game is a digraph whose out-degree-0 vertices are terminals. Every other
position is controlled by one player, who picks one stationary move there.
The outcome of a situation is the terminal its play from ``init`` reaches, or
:data:`INF` when the play runs into a cycle. Each player ranks all outcomes
strictly.
"""

from __future__ import annotations

import graphlib
import itertools
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType

from dggames import _graph
from dggames.errors import CyclicGraphError, PreconditionError, ValidationError
from dggames.kernel import Kernel

INF = "inf"

Outcome = str
Move = tuple[str, str]


class Game:
    """An n-person DG game with strict preferences.

    ``controller`` maps every internal (non-terminal) position to its player
    (1-based). ``prefs[i]`` lists all terminals plus :data:`INF`, best first.
    Instances are immutable and validated on construction.
    """

    def __init__(self, players: int, terminals: Iterable[str], controller: Mapping[str, int],
                 moves: Iterable[Move], init: str, prefs: Mapping[int, Iterable[Outcome]]):
        self.players = int(players)
        self.terminals = frozenset(terminals)
        self.controller = MappingProxyType(dict(controller))
        self.moves = frozenset((str(a), str(b)) for a, b in moves)
        self.init = init
        self.prefs = MappingProxyType({int(p): tuple(order) for p, order in prefs.items()})
        self._validate()

    def _validate(self) -> None:
        if self.players < 1:
            raise ValidationError("game needs at least one player")
        for name in itertools.chain(self.terminals, self.controller):
            if name == INF:
                raise ValidationError("'inf' is reserved for the infinite outcome", position=name)
        overlap = self.terminals & set(self.controller)
        if overlap:
            name = min(overlap)
            raise ValidationError(f"duplicate position {name}", position=name)
        for v, p in self.controller.items():
            if not 1 <= p <= self.players:
                raise ValidationError(f"unknown controller index {p} for position {v}", position=v)
        if self.init not in self.controller:
            if self.init in self.terminals:
                raise ValidationError(f"initial position {self.init} is a terminal", position=self.init)
            raise ValidationError(f"missing init: unknown initial position {self.init}")
        known = self.terminals | set(self.controller)
        for a, b in sorted(self.moves):
            if a in self.terminals:
                raise ValidationError(f"move from terminal {a}", position=a)
            if a not in known:
                raise ValidationError(f"move from unknown position {a}", position=a)
            if b not in known:
                raise ValidationError(f"move to unknown position {b}", position=b)
        for v in sorted(self.controller):
            if not self.succ(v):
                raise ValidationError(f"zero out-degree internal position {v}", position=v)
        outcomes = set(self.terminals) | {INF}
        for p in range(1, self.players + 1):
            if p not in self.prefs:
                raise ValidationError(f"missing pref for player {p}")
            order = self.prefs[p]
            seen: set[str] = set()
            for o in order:
                if o in seen:
                    raise ValidationError(f"preference tie: pref for player {p} lists {o} twice")
                if o not in outcomes:
                    raise ValidationError(f"pref for player {p} names unknown outcome {o}")
                seen.add(o)
            for o in sorted(outcomes - seen):
                raise ValidationError(f"pref for player {p} missing outcome {o}")
        extra = set(self.prefs) - set(range(1, self.players + 1))
        if extra:
            raise ValidationError(f"pref for unknown player {min(extra)}")

    # -- identity -----------------------------------------------------------

    def _key(self):
        return (self.players, tuple(sorted(self.terminals)), tuple(sorted(self.controller.items())),
                tuple(sorted(self.moves)), self.init, tuple(sorted(self.prefs.items())))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Game):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __reduce__(self):
        return (Game, (self.players, tuple(self.terminals), dict(self.controller), tuple(self.moves),
                       self.init, dict(self.prefs)))

    def __repr__(self) -> str:
        return (f"Game(players={self.players}, internals={list(self.internals)}, "
                f"terminals={sorted(self.terminals)}, moves={len(self.moves)}, init={self.init!r})")

    # -- structure ----------------------------------------------------------

    @cached_property
    def internals(self) -> tuple[str, ...]:
        return tuple(sorted(self.controller))

    @cached_property
    def positions(self) -> tuple[str, ...]:
        return tuple(sorted(self.terminals | set(self.controller)))

    @cached_property
    def outcomes(self) -> tuple[Outcome, ...]:
        return tuple(sorted(self.terminals)) + (INF,)

    @cached_property
    def _succ(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {}
        for a, b in self.moves:
            out.setdefault(a, []).append(b)
        return {a: tuple(sorted(bs)) for a, bs in out.items()}

    @cached_property
    def _pred(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {}
        for a, b in self.moves:
            out.setdefault(b, []).append(a)
        return {b: tuple(sorted(as_)) for b, as_ in out.items()}

    def succ(self, v: str) -> tuple[str, ...]:
        """Out-neighbours of ``v`` sorted by name."""
        return self._succ.get(v, ())

    def pred(self, v: str) -> tuple[str, ...]:
        return self._pred.get(v, ())

    def is_terminal(self, v: str) -> bool:
        return v in self.terminals

    def positions_of(self, player: int) -> tuple[str, ...]:
        return tuple(v for v in self.internals if self.controller[v] == player)

    @cached_property
    def _ranks(self) -> dict[int, dict[str, int]]:
        return {p: {o: r for r, o in enumerate(order)} for p, order in self.prefs.items()}

    def rank(self, player: int, outcome: Outcome) -> int:
        """0 for ``player``'s best outcome, increasing towards the worst."""
        return self._ranks[player][outcome]

    def prefers(self, player: int, a: Outcome, b: Outcome) -> bool:
        """True iff ``player`` strictly prefers ``a`` to ``b``."""
        return self._ranks[player][a] < self._ranks[player][b]

    def best_of(self, player: int, outcomes: Iterable[Outcome]) -> Outcome:
        return min(outcomes, key=self._ranks[player].__getitem__)

    def situation_count(self) -> int:
        count = 1
        for v in self.internals:
            count *= len(self.succ(v))
        return count

    # -- derived games ------------------------------------------------------

    def replace(self, *, moves: Iterable[Move] | None = None, controller: Mapping[str, int] | None = None,
                init: str | None = None, terminals: Iterable[str] | None = None,
                prefs: Mapping[int, Iterable[Outcome]] | None = None) -> Game:
        return Game(self.players,
                    self.terminals if terminals is None else terminals,
                    self.controller if controller is None else controller,
                    self.moves if moves is None else moves,
                    self.init if init is None else init,
                    self.prefs if prefs is None else prefs)

    def restrict(self, keep: Iterable[str]) -> Game:
        """Induced subgame on ``keep`` plus all terminals."""
        keep_set = set(keep) | self.terminals
        return self.replace(
            controller={v: p for v, p in self.controller.items() if v in keep_set},
            moves=[(a, b) for a, b in self.moves if a in keep_set and b in keep_set])

    # -- kernel bridge ------------------------------------------------------

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: k for k, v in enumerate(self.internals)}

    @cached_property
    def _terminal_order(self) -> tuple[str, ...]:
        return tuple(sorted(self.terminals))

    @cached_property
    def _digit(self) -> dict[Move, int]:
        return {(v, w): d for v in self.internals for d, w in enumerate(self.succ(v))}

    def kernel(self, factory=None):
        """Integer-encoded twin of this game for the situation kernel."""
        if factory is None:
            return self._kernel
        return self._build_kernel(factory)

    @cached_property
    def _kernel(self):
        return self._build_kernel(Kernel)

    def _build_kernel(self, factory):
        m = len(self.internals)
        term_code = {t: j for j, t in enumerate(self._terminal_order)}
        offsets = [0]
        targets: list[int] = []
        for v in self.internals:
            for w in self.succ(v):
                targets.append(self._index[w] if w in self._index else m + term_code[w])
            offsets.append(len(targets))
        nt = len(self._terminal_order)
        ranks = []
        for p in range(1, self.players + 1):
            r = self._ranks[p]
            ranks.extend(r[t] for t in self._terminal_order)
            ranks.append(r[INF])
        owner = [self.controller[v] - 1 for v in self.internals]
        return factory(offsets, targets, owner, ranks, self.players, nt, self._index[self.init])

    def outcome_name(self, code: int) -> Outcome:
        return INF if code == len(self._terminal_order) else self._terminal_order[code]

    def digits(self, situation: Situation) -> list[int]:
        self.validate_situation(situation)
        return [self._digit[(v, situation[v])] for v in self.internals]

    def from_digits(self, digits: Iterable[int]) -> Situation:
        return Situation({v: self.succ(v)[d] for v, d in zip(self.internals, digits)})

    def validate_situation(self, situation: Mapping[str, str]) -> None:
        for v in self.internals:
            if v not in situation:
                raise ValidationError(f"situation has no move for position {v}", position=v)
            if (v, situation[v]) not in self.moves:
                raise ValidationError(f"situation chooses missing move {v} -> {situation[v]}", position=v)
        for v in situation:
            if v not in self.controller:
                raise ValidationError(f"situation chooses a move at non-internal position {v}", position=v)


class Situation(Mapping[str, str]):
    """One chosen successor per internal position; immutable and hashable."""

    __slots__ = ("_choice", "_hash")

    def __init__(self, choice: Mapping[str, str] | Iterable[tuple[str, str]] = ()):
        self._choice = dict(choice)
        self._hash: int | None = None

    def __getitem__(self, v: str) -> str:
        return self._choice[v]

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._choice))

    def __len__(self) -> int:
        return len(self._choice)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._choice.items()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Situation):
            return self._choice == other._choice
        if isinstance(other, Mapping):
            return self._choice == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{v}->{w}" for v, w in self.moves())
        return f"Situation({body})"

    def moves(self) -> list[Move]:
        return [(v, self._choice[v]) for v in sorted(self._choice)]

    def replace(self, updates: Mapping[str, str] | Iterable[tuple[str, str]]) -> Situation:
        choice = dict(self._choice)
        choice.update(dict(updates))
        return Situation(choice)

    def restrict(self, positions: Iterable[str]) -> Situation:
        keep = set(positions)
        return Situation({v: w for v, w in self._choice.items() if v in keep})


@dataclass(frozen=True)
class Play:
    """The walk induced by a situation from ``walk[0]``.

    For an infinite play the walk stops at the first repeated position, which
    therefore appears twice; ``cycle_start`` is the index of its first visit.
    """

    walk: tuple[str, ...]
    outcome: Outcome
    cycle_start: int | None = None

    @property
    def is_terminal(self) -> bool:
        return self.outcome != INF

    def cycle(self) -> tuple[str, ...]:
        if self.cycle_start is None:
            return ()
        return self.walk[self.cycle_start:-1]


@dataclass(frozen=True)
class Witness:
    player: int
    deviation: Situation
    new_outcome: Outcome


@dataclass(frozen=True)
class NeVerdict:
    is_ne: bool
    outcome: Outcome
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.is_ne


@dataclass(frozen=True)
class Classification:
    is_terminal_game: bool
    is_play_once: bool
    terminal_reachable_from_init: bool


def evaluate(game: Game, situation: Mapping[str, str], start: str | None = None) -> Play:
    """Follow ``situation`` from ``start`` (default: the initial position)."""
    game.validate_situation(situation)
    v = game.init if start is None else start
    if v not in game.controller and v not in game.terminals:
        raise ValidationError(f"unknown start position {v}", position=v)
    walk = [v]
    first_visit = {}
    while v not in game.terminals:
        first_visit[v] = len(walk) - 1
        v = situation[v]
        walk.append(v)
        if v in first_visit:
            return Play(tuple(walk), INF, first_visit[v])
    return Play(tuple(walk), v)


def outcome(game: Game, situation: Mapping[str, str], start: str | None = None) -> Outcome:
    return evaluate(game, situation, start).outcome


def check_ne(game: Game, situation: Situation) -> NeVerdict:
    """Exhaustive deviation check.

    Players are tried in ascending order and each player's strategies in
    mixed-radix order over their positions sorted by name; the first strictly
    improving deviation found is returned as the witness.
    """
    if not isinstance(situation, Situation):
        situation = Situation(situation)
    digits = game.digits(situation)
    kern = game.kernel()
    current = game.outcome_name(kern.outcome(digits, kern.init))
    found = kern.find_improvement(digits)
    if found is None:
        return NeVerdict(True, current)
    p, dev_digits, out = found
    positions = game.positions_of(p + 1)
    deviation = situation.replace({v: game.succ(v)[d] for v, d in zip(positions, dev_digits)})
    return NeVerdict(False, current, Witness(p + 1, deviation, game.outcome_name(out)))


def best_response(game: Game, situation: Situation, player: int) -> tuple[Outcome, Situation]:
    """The best outcome ``player`` can reach alone, with a situation achieving it.

    The current situation is returned when it already achieves the best
    outcome; otherwise the first achieving strategy in enumeration order.
    """
    if not 1 <= player <= game.players:
        raise ValidationError(f"unknown player {player}")
    if not isinstance(situation, Situation):
        situation = Situation(situation)
    digits = game.digits(situation)
    out, dev = game.kernel().best_response(digits, player - 1)
    positions = game.positions_of(player)
    return game.outcome_name(out), situation.replace({v: game.succ(v)[d] for v, d in zip(positions, dev)})


def reachable(game: Game, start: str, allowed: Iterable[str] | None = None) -> frozenset[str]:
    """Positions reachable from ``start`` by paths staying inside ``allowed``."""
    allowed_set = set(game.positions) if allowed is None else set(allowed)
    if start not in allowed_set:
        raise PreconditionError(f"start position {start} is not in the allowed set")
    return frozenset(_graph.reach(start, game.succ, allowed_set))


def terminal_reachable(game: Game, start: str | None = None) -> bool:
    seen = _graph.reach(game.init if start is None else start, game.succ)
    return not seen.isdisjoint(game.terminals)


def classify(game: Game) -> Classification:
    terminal_game = all(game.prefs[p][-1] == INF for p in range(1, game.players + 1))
    counts = [0] * (game.players + 1)
    for p in game.controller.values():
        counts[p] += 1
    play_once = game.players == len(game.internals) and all(c == 1 for c in counts[1:])
    return Classification(terminal_game, play_once, terminal_reachable(game))


def backward_induction(game: Game) -> tuple[Situation, dict[str, Outcome]]:
    """Backward induction on an acyclic game.

    Each internal position takes its controller's best successor value; equal
    values are resolved towards the lowest-named successor.
    """
    sorter = graphlib.TopologicalSorter({v: game.succ(v) for v in game.internals})
    try:
        order = list(sorter.static_order())
    except graphlib.CycleError:
        cycle = _graph.find_cycle(game.internals, game.succ)
        raise CyclicGraphError(cycle or []) from None
    value: dict[str, Outcome] = {t: t for t in game.terminals}
    choice: dict[str, str] = {}
    for v in order:
        if v in game.terminals:
            continue
        ranks = game._ranks[game.controller[v]]
        best = None
        for w in game.succ(v):
            if best is None or ranks[value[w]] < ranks[value[best]]:
                best = w
        choice[v] = best
        value[v] = value[best]
    return Situation(choice), value


def non_terminating_move(game: Game, v: str, within: Iterable[str] | None = None) -> str | None:
    """Lowest-named non-terminal successor of ``v`` (optionally inside ``within``)."""
    allowed = None if within is None else set(within)
    for w in game.succ(v):
        if w in game.terminals:
            continue
        if allowed is None or w in allowed:
            return w
    return None


def default_situation(game: Game, fixed: Mapping[str, str] | None = None) -> Situation:
    """Lowest-named move everywhere, overridden by ``fixed``."""
    choice = {v: game.succ(v)[0] for v in game.internals}
    if fixed:
        choice.update(fixed)
    return Situation(choice)
