"""Nash equilibria of terminal games with at most three terminals.

In a terminal game every player ranks the infinite outcome last. The solver
is a recursive reduction engine: it shrinks the game with one of the rules
below, solves the smaller game, and lifts that equilibrium back. Every lift
is re-checked with :func:`check_ne`.

Rules, tried in this order after each step:

``NO_DEAD_END``
    drop positions that cannot reach a terminal;
``DUMMY_CONTRACT``
    fold a single-move position into its successor (or into its terminal);
``FORCED_TERMINATION``
    a position with only terminal moves keeps its owner's best one;
``SHARP1``
    a position with its owner's favourite terminal as a move keeps only that move;
``SHARP3``
    delete a move into the owner's least favourite terminal.

When none applies every terminal move is a #2-move; ``MAIN_STEP`` picks one,
``(u, b)``, strips ``u``'s other moves, recurses, and switches stray terminal
choices away if the result ends at ``b``.
"""

from __future__ import annotations

import enum
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any

from dggames import _graph
from dggames.errors import GameError, NotApplicable, PreconditionError, SolverInvariantError
from dggames.game import (
    INF,
    Game,
    Move,
    Situation,
    check_ne,
    classify,
    default_situation,
    evaluate,
    non_terminating_move,
    terminal_reachable,
)
from dggames.playonce import normalize_play_once

log = logging.getLogger(__name__)


class StepKind(enum.Enum):
    NO_DEAD_END = "NoDE"
    DUMMY_CONTRACT = "DummyContract"
    FORCED_TERMINATION = "ForcedTermination"
    SHARP1 = "Sharp1"
    SHARP3 = "Sharp3"
    MAIN_STEP = "MainStep"


@dataclass(frozen=True)
class ReductionStep:
    kind: StepKind
    parent: Game
    child: Game
    data: dict[str, Any] = field(default_factory=dict)

    def lift(self, situation: Situation) -> Situation:
        """Map a situation of ``child`` to an equivalent situation of ``parent``."""
        parent = self.parent
        if self.kind is StepKind.NO_DEAD_END:
            return default_situation(parent, situation)
        if self.kind is StepKind.DUMMY_CONTRACT:
            v, w = self.data["position"], self.data["into"]
            if self.data["terminal"]:
                choice = {}
                for x, y in situation.items():
                    if y == w and (x, w) not in parent.moves:
                        y = v
                    choice[x] = y
                choice[v] = w
                return Situation(choice)
            choice = {}
            for x, y in situation.items():
                if x == v:
                    continue
                if y == v and (x, v) not in parent.moves:
                    y = w
                choice[x] = y
            inner = situation[v]
            if inner == v:
                inner = v if (w, v) in parent.moves else w
            choice[v] = w
            choice[w] = inner
            return Situation(choice)
        # every other kind only deletes moves: situations carry over unchanged
        return situation


@dataclass
class ReductionTrace:
    steps: list[ReductionStep] = field(default_factory=list)
    final_game: Game | None = None

    def kinds(self) -> list[StepKind]:
        return [s.kind for s in self.steps]

    def replay(self, original: Game) -> Game:
        """Re-apply each recorded rule from ``original`` and return the last game.

        Raises :class:`SolverInvariantError` if a replayed step disagrees with
        the recorded one.
        """
        game = original
        for step in self.steps:
            if step.parent != game:
                raise SolverInvariantError(f"trace broken before {step.kind.value}")
            if step.kind is StepKind.MAIN_STEP:
                child = main_step(game, step.data["move"])[0]
            else:
                child = RULES[step.kind](game)[0]
            if child != step.child:
                raise SolverInvariantError(f"replaying {step.kind.value} gave a different game")
            game = child
        return game


# -- helpers -------------------------------------------------------------------


def _require_terminal_game(game: Game) -> None:
    if not classify(game).is_terminal_game:
        raise PreconditionError("not a terminal game: some player does not rank inf last")


def terminal_rank(game: Game, player: int, t: str) -> int:
    """1-based rank of terminal ``t`` among ``player``'s terminals."""
    return 1 + sum(1 for o in game.prefs[player] if o != INF and game.prefers(player, o, t))


def sharp_k(game: Game, move: Move) -> int | None:
    u, a = move
    if a not in game.terminals:
        return None
    return terminal_rank(game, game.controller[u], a)


def terminal_moves(game: Game) -> list[Move]:
    return sorted((u, a) for u, a in game.moves if a in game.terminals)


def dead_positions(game: Game) -> set[str]:
    alive = _graph.reach(game.terminals, game.pred) if game.terminals else set()
    return set(game.internals) - alive


def reachable_terminals(game: Game) -> set[str]:
    return _graph.reach(game.init, game.succ) & game.terminals


# -- reductions ----------------------------------------------------------------


def reduce_no_dead_end(game: Game) -> tuple[Game, ReductionStep]:
    """Remove positions from which no terminal can be reached."""
    if not terminal_reachable(game):
        raise PreconditionError("no terminal is reachable from init; use solve_unreachable")
    dead = dead_positions(game)
    if not dead:
        raise NotApplicable("every position reaches a terminal")
    child = game.restrict(set(game.internals) - dead)
    return child, ReductionStep(StepKind.NO_DEAD_END, game, child, {"removed": sorted(dead)})


def contract_dummy(game: Game) -> tuple[Game, ReductionStep]:
    """Fold the first single-move position into its successor.

    An internal successor ``w`` is removed and ``v`` inherits its moves and its
    owner. A terminal successor absorbs ``v`` instead (not for ``init``).
    """
    for v in game.internals:
        succ = game.succ(v)
        if len(succ) != 1 or succ[0] == v:
            continue
        w = succ[0]
        if w in game.terminals:
            if v == game.init:
                continue
            return _absorb_into_terminal(game, v, w)
        return _contract(game, v, w)
    raise NotApplicable("no dummy position")


def _contract(game: Game, v: str, w: str) -> tuple[Game, ReductionStep]:
    def rename(y: str) -> str:
        return v if y == w else y

    moves = {(x, rename(y)) for x, y in game.moves if x not in (v, w)}
    moves |= {(v, rename(u)) for u in game.succ(w)}
    controller = {x: p for x, p in game.controller.items() if x != w}
    controller[v] = game.controller[w]
    init = v if game.init == w else game.init
    child = game.replace(moves=moves, controller=controller, init=init)
    return child, ReductionStep(StepKind.DUMMY_CONTRACT, game, child,
                                {"position": v, "into": w, "terminal": False,
                                 "redirected": sorted((x, y) for x, y in game.moves if y == w and x != v)})


def _absorb_into_terminal(game: Game, v: str, t: str) -> tuple[Game, ReductionStep]:
    moves = {(x, t if y == v else y) for x, y in game.moves if x != v}
    controller = {x: p for x, p in game.controller.items() if x != v}
    child = game.replace(moves=moves, controller=controller)
    return child, ReductionStep(StepKind.DUMMY_CONTRACT, game, child,
                                {"position": v, "into": t, "terminal": True,
                                 "redirected": sorted((x, y) for x, y in game.moves if y == v)})


def _keep_only(game: Game, u: str, keep: set[str], kind: StepKind, data: dict) -> tuple[Game, ReductionStep]:
    deleted = sorted((u, w) for w in game.succ(u) if w not in keep)
    child = game.replace(moves=game.moves - set(deleted))
    return child, ReductionStep(kind, game, child, {**data, "position": u, "deleted": deleted})


def reduce_forced_termination(game: Game) -> tuple[Game, ReductionStep]:
    """A position with only terminal moves (at least two) keeps its owner's best one."""
    for v in game.internals:
        succ = game.succ(v)
        if len(succ) >= 2 and all(w in game.terminals for w in succ):
            best = game.best_of(game.controller[v], succ)
            return _keep_only(game, v, {best}, StepKind.FORCED_TERMINATION, {"kept": (v, best)})
    raise NotApplicable("no forced termination")


def reduce_sharp1(game: Game) -> tuple[Game, ReductionStep]:
    """A #1-move ``(u, a)`` from a position with other moves becomes ``u``'s only move."""
    for u, a in terminal_moves(game):
        if len(game.succ(u)) >= 2 and sharp_k(game, (u, a)) == 1:
            return _keep_only(game, u, {a}, StepKind.SHARP1, {"kept": (u, a)})
    raise NotApplicable("no #1-move with alternatives")


def reduce_sharp3(game: Game) -> tuple[Game, ReductionStep]:
    """Delete a move into the owner's worst terminal when the position has other moves."""
    n_terms = len(game.terminals)
    for u, c in terminal_moves(game):
        if len(game.succ(u)) >= 2 and sharp_k(game, (u, c)) == n_terms:
            child = game.replace(moves=game.moves - {(u, c)})
            return child, ReductionStep(StepKind.SHARP3, game, child,
                                        {"position": u, "deleted": [(u, c)]})
    raise NotApplicable("no worst-terminal move with alternatives")


RULES = {
    StepKind.NO_DEAD_END: reduce_no_dead_end,
    StepKind.DUMMY_CONTRACT: contract_dummy,
    StepKind.FORCED_TERMINATION: reduce_forced_termination,
    StepKind.SHARP1: reduce_sharp1,
    StepKind.SHARP3: reduce_sharp3,
}


def main_step(game: Game, move: Move) -> tuple[Game, ReductionStep]:
    """Delete every non-terminal move of ``u`` for the #2-move ``(u, b)``."""
    u, b = move
    if move not in game.moves or b not in game.terminals:
        raise PreconditionError(f"{u}->{b} is not a terminal move")
    keep = {w for w in game.succ(u) if w in game.terminals}
    if keep == set(game.succ(u)):
        raise NotApplicable(f"{u} has no non-terminal move")
    child, step = _keep_only(game, u, keep, StepKind.MAIN_STEP, {"move": move})
    return child, step


def choose_main_move(game: Game) -> Move:
    candidates = [m for m in terminal_moves(game)
                  if sharp_k(game, m) == 2 and any(w not in game.terminals for w in game.succ(m[0]))]
    if not candidates:
        raise SolverInvariantError("fixpoint has no #2-move with a non-terminal alternative")
    return candidates[0]


# -- direct constructions ------------------------------------------------------


def solve_unreachable(game: Game) -> Situation:
    """Non-terminal NE when no terminal is reachable from ``init``.

    Positions reachable from ``init`` keep to non-terminal moves, so the play
    and every deviation from it stay in a terminal-free region.
    """
    region = _graph.reach(game.init, game.succ)
    if region & game.terminals:
        raise PreconditionError("a terminal is reachable from init")
    choice = {}
    for v in region:
        w = non_terminating_move(game, v)
        if w is None:
            raise SolverInvariantError(f"position {v} in the terminal-free region has no move")
        choice[v] = w
    return default_situation(game, choice)


def shortest_path_tree_situation(game: Game) -> Situation:
    """Every position that can reach a terminal steps along a shortest path to one.

    Used when exactly one terminal is reachable from ``init``: in a terminal
    game the resulting situation is a NE since every deviation yields that
    same terminal or the infinite outcome.
    """
    dist: dict[str, int] = {t: 0 for t in game.terminals}
    choice: dict[str, str] = {}
    queue = deque(sorted(game.terminals))
    while queue:
        x = queue.popleft()
        for p in game.pred(x):
            if p not in dist:
                dist[p] = dist[x] + 1
                choice[p] = x
                queue.append(p)
    for v in game.internals:
        if v in choice:
            best = min(game.succ(v), key=lambda w: (dist.get(w, len(dist) + 1), w))
            choice[v] = best
    return default_situation(game, choice)


def solve_terminal_play_once(game: Game) -> Situation:
    """Shortest-path equilibrium of a terminal play-once game with a reachable terminal."""
    c = classify(game)
    if not (c.is_terminal_game and c.is_play_once):
        raise PreconditionError("solve_terminal_play_once needs a terminal play-once game")
    if not c.terminal_reachable_from_init:
        raise PreconditionError("no terminal is reachable from init; use solve_unreachable")
    norm = normalize_play_once(game)
    if norm.trivial:
        return norm.lift(None)
    ng = norm.game
    path, exit_ = shortest_terminal_path(ng)
    choice = dict(zip(path, path[1:]))
    choice[path[-1]] = exit_
    for v in ng.internals:
        if v not in choice:
            w = non_terminating_move(ng, v)
            choice[v] = w if w is not None else ng.succ(v)[0]
    return norm.lift(Situation(choice))


def shortest_terminal_path(game: Game) -> tuple[list[str], str]:
    """Fewest-arc path of internals from ``init`` to a position with a terminal move.

    Returns the path and the owner's best terminal move at its last position.
    """
    parent: dict[str, str | None] = {game.init: None}
    queue = deque([game.init])
    while queue:
        v = queue.popleft()
        exits = [w for w in game.succ(v) if w in game.terminals]
        if exits:
            path = [v]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1], game.best_of(game.controller[v], exits)
        for w in game.succ(v):
            if w not in parent and w not in game.terminals:
                parent[w] = v
                queue.append(w)
    raise PreconditionError("no terminal is reachable from init")


def switching_transform(game: Game, sigma: Situation) -> Situation:
    """Redirect every choice into a terminal other than the outcome to a non-terminal move."""
    a = evaluate(game, sigma).outcome
    if a == INF:
        raise PreconditionError("switching needs a terminal equilibrium")
    for m in terminal_moves(game):
        if sharp_k(game, m) == 1:
            raise PreconditionError(f"#1-move {m[0]}->{m[1]} present", )
    choice = dict(sigma)
    for u, w in sigma.items():
        if w in game.terminals and w != a:
            alt = non_terminating_move(game, u)
            if alt is None:
                raise PreconditionError(f"position {u} has no non-terminal move to switch to")
            choice[u] = alt
    return Situation(choice)


# -- driver --------------------------------------------------------------------


@dataclass
class LiftCheck:
    kind: StepKind | str
    ok: bool
    depth: int


@dataclass
class Terminal3Report:
    situation: Situation
    outcome: str
    trace: ReductionTrace
    lift_checks: list[LiftCheck] = field(default_factory=list)
    fallbacks: list[str] = field(default_factory=list)
    cases: list[int] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return all(c.ok for c in self.lift_checks)


def solve_terminal3(game: Game) -> Situation:
    return solve_terminal3_report(game).situation


def solve_terminal3_report(game: Game, *, oracle_fallback: bool = True) -> Terminal3Report:
    """Run the reduction engine on a terminal game with at most three terminals."""
    _require_terminal_game(game)
    if len(game.terminals) > 3:
        raise PreconditionError(f"{len(game.terminals)} terminals; the reduction engine handles at most 3")
    trace = ReductionTrace()
    report = Terminal3Report(Situation(), INF, trace)
    sigma = _solve(game, report, 0, oracle_fallback)
    report.situation = sigma
    report.outcome = evaluate(game, sigma).outcome
    if report.outcome == INF and terminal_reachable(game):
        raise SolverInvariantError("terminal reachable but the returned equilibrium is infinite")
    return report


def _solve(game: Game, report: Terminal3Report, depth: int, fallback: bool) -> Situation:
    if not terminal_reachable(game):
        report.trace.final_game = game
        return _verified(game, solve_unreachable(game), "unreachable", report, depth, fallback)
    if len(reachable_terminals(game)) == 1:
        report.trace.final_game = game
        return _verified(game, shortest_path_tree_situation(game), "single-terminal", report, depth, fallback)
    for kind, rule in RULES.items():
        try:
            child, step = rule(game)
        except NotApplicable:
            continue
        report.trace.steps.append(step)
        sub = _solve(child, report, depth + 1, fallback)
        return _verified(game, step.lift(sub), kind, report, depth, fallback)
    for u, a in terminal_moves(game):
        if sharp_k(game, (u, a)) != 2:
            raise SolverInvariantError(f"fixpoint has a non-#2 terminal move {u}->{a}")
    move = choose_main_move(game)
    child, step = main_step(game, move)
    if dead_positions(child):
        raise SolverInvariantError("main step cut a position off from the terminals")
    report.trace.steps.append(step)
    sub = _solve(child, report, depth + 1, fallback)
    b = move[1]
    if evaluate(child, sub).outcome == b:
        report.cases.append(1)
        lifted = switching_transform(child, sub)
    else:
        report.cases.append(2)
        lifted = sub
    return _verified(game, lifted, StepKind.MAIN_STEP, report, depth, fallback)


def _verified(game: Game, sigma: Situation, kind, report: Terminal3Report, depth: int,
              fallback: bool) -> Situation:
    verdict = check_ne(game, sigma)
    ok = verdict.is_ne and (verdict.outcome != INF or not terminal_reachable(game))
    report.lift_checks.append(LiftCheck(kind, ok, depth))
    if ok:
        return sigma
    label = kind.value if isinstance(kind, StepKind) else kind
    log.warning("lift verification failed after %s at depth %d: %s", label, depth, verdict.witness)
    if not fallback:
        raise SolverInvariantError(f"lift after {label} is not a NE: {verdict.witness}")
    report.fallbacks.append(label)
    return _oracle_ne(game)


def _oracle_ne(game: Game) -> Situation:
    from dggames import oracle

    cert = oracle.certify(game, want_all=True)
    if cert.terminal:
        return cert.terminal[0]
    if cert.nonterminal:
        return cert.nonterminal[0]
    raise GameError("oracle found no NE")
