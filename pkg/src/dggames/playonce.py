"""Nash equilibria of play-once games (each player owns exactly one position).

The solver normalises the game so every position has at most one terminal
move and at least one non-terminal move, then splits the internal positions
into four classes:

* ``S``: positions whose terminal exit beats the infinite outcome for their owner;
* ``W``: positions reachable from ``init`` while avoiding ``S``;
* ``Q``: the rest of the positions that can reach a cycle avoiding ``S``, ``W``
  and the terminals;
* ``R``: whatever remains (acyclic).

If ``W`` contains a cycle, circling it is an equilibrium with infinite
outcome. Otherwise a minimal set of ``S``-arcs is cut to make the graph
outside ``Q`` acyclic, backward induction is run there, and its play is
wrapped in a maximal in-tree towards the reached terminal.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass, field

from dggames import _graph
from dggames.errors import PreconditionError, SolverInvariantError
from dggames.game import (
    INF,
    Game,
    Move,
    Situation,
    backward_induction,
    check_ne,
    classify,
    default_situation,
    evaluate,
    non_terminating_move,
)


@dataclass
class Normalization:
    """Changes made by :func:`normalize_play_once` and how to undo them.

    ``merged`` lists ``(position, original move)`` for every position folded
    into a terminal, in merge order. ``dropped`` lists deleted terminal moves.
    ``origin`` maps each move of the normalised game to the original move it
    stands for. When ``init`` itself was folded away ``game`` is None.
    """

    original: Game
    game: Game | None
    merged: list[tuple[str, Move]] = field(default_factory=list)
    dropped: list[Move] = field(default_factory=list)
    origin: dict[Move, Move] = field(default_factory=dict)

    @property
    def notes(self) -> list[str]:
        out = [f"merged {v} into {self.terminal_of(v)} (fixed move {a}->{b})" for v, (a, b) in self.merged]
        out += [f"dropped terminal move {a}->{b}" for a, b in self.dropped]
        return out

    @property
    def trivial(self) -> bool:
        return self.game is None

    def terminal_of(self, v: str) -> str:
        fixed = dict(self.merged)
        w = fixed[v][1]
        while w in fixed:
            w = fixed[w][1]
        return w

    def lift(self, situation: Situation | None) -> Situation:
        """Map a situation of the normalised game back to the original game."""
        choice = {}
        if situation is not None:
            for v, w in situation.items():
                choice[v] = self.origin[(v, w)][1]
        for v, (_, w) in self.merged:
            choice[v] = w
        return default_situation(self.original, choice)


def normalize_play_once(game: Game, *, require_play_once: bool = True) -> Normalization:
    """Fold forced positions into terminals and keep one best terminal exit per position.

    (a) a position whose successors are all terminals takes its owner's best
    one and is merged into it, predecessors' arcs being redirected; (b) a
    position with several terminal moves keeps only its owner's best. Both
    rules repeat until neither applies.
    """
    if require_play_once and not classify(game).is_play_once:
        raise PreconditionError("normalize_play_once needs a play-once game")
    terminals = game.terminals
    controller = dict(game.controller)
    succ: dict[str, set[str]] = {v: set(game.succ(v)) for v in game.internals}
    origin: dict[Move, Move] = {(a, b): (a, b) for a, b in game.moves}
    norm = Normalization(game, None)
    while True:
        forced = sorted(v for v in succ if succ[v] <= terminals)
        if forced:
            v = forced[0]
            owner = controller[v]
            best = game.best_of(owner, succ[v])
            norm.merged.append((v, origin[(v, best)]))
            if v == game.init:
                return norm
            for w in succ[v]:
                del origin[(v, w)]
            del succ[v]
            del controller[v]
            for u in sorted(succ):
                if v in succ[u]:
                    succ[u].discard(v)
                    move = origin.pop((u, v))
                    if best not in succ[u]:
                        succ[u].add(best)
                        origin[(u, best)] = move
            continue
        multi = sorted(v for v in succ if len(succ[v] & terminals) > 1)
        if multi:
            v = multi[0]
            exits = succ[v] & terminals
            best = game.best_of(controller[v], exits)
            for t in sorted(exits - {best}):
                succ[v].discard(t)
                norm.dropped.append(origin.pop((v, t)))
            continue
        break
    moves = [(v, w) for v in succ for w in succ[v]]
    norm.game = game.replace(moves=moves, controller=controller)
    norm.origin = origin
    return norm


def is_normalized(game: Game) -> bool:
    return all(not set(game.succ(v)) <= game.terminals
               and len(set(game.succ(v)) & game.terminals) <= 1 for v in game.internals)


@dataclass(frozen=True)
class Partition:
    S: frozenset[str]
    W: frozenset[str]
    Q: frozenset[str]
    R: frozenset[str]


def terminal_exit(game: Game, v: str) -> str | None:
    exits = [w for w in game.succ(v) if w in game.terminals]
    return exits[0] if exits else None


def partition(game: Game) -> Partition:
    """Split the internal positions of a normalised game into S, W, Q, R."""
    S = set()
    for v in game.internals:
        a = terminal_exit(game, v)
        if a is not None and game.prefers(game.controller[v], a, INF):
            S.add(v)
    internals = set(game.internals)
    outside_s = internals - S
    W = set() if game.init in S else _graph.reach(game.init, game.succ, outside_s)
    rest = internals - S - W
    # positions of `rest` on a cycle of G[rest], then everything in `rest` reaching them
    on_cycle = _vertices_on_cycles(rest, game)
    Q = _graph.reach(on_cycle, game.pred, rest) if on_cycle else set()
    R = rest - Q
    return Partition(frozenset(S), frozenset(W), frozenset(Q), frozenset(R))


def _vertices_on_cycles(nodes: set[str], game: Game) -> set[str]:
    """Vertices lying on some directed cycle of the subgraph induced by ``nodes``."""
    out = set()
    for v in nodes:
        if v in _graph.reach([w for w in game.succ(v) if w in nodes], game.succ, nodes):
            out.add(v)
    return out


def check_partition(game: Game, part: Partition) -> None:
    """Raise :class:`SolverInvariantError` unless ``part`` obeys all partition laws."""
    sets = [part.S, part.W, part.Q, part.R]
    internals = set(game.internals)
    if set().union(*sets) != internals or sum(map(len, sets)) != len(internals):
        raise SolverInvariantError("S, W, Q, R do not partition the internal positions")
    for v in internals:
        a = terminal_exit(game, v)
        in_s = a is not None and game.prefers(game.controller[v], a, INF)
        if in_s != (v in part.S):
            raise SolverInvariantError(f"S membership wrong at {v}")
    expected_w = set() if game.init in part.S else _graph.reach(game.init, game.succ, internals - part.S)
    if expected_w != part.W:
        raise SolverInvariantError("W is not the S-avoiding reach of init")
    rest = internals - part.S - part.W
    for q in part.Q:
        if not _vertices_on_cycles(set(_graph.reach(q, game.succ, rest)), game):
            raise SolverInvariantError(f"Q position {q} reaches no cycle outside S and W")
    if not _graph.is_acyclic(part.R, game.succ):
        raise SolverInvariantError("R is not acyclic")


def w_cycle(game: Game, part: Partition) -> list[str] | None:
    return _graph.find_cycle(part.W, game.succ)


def non_terminal_ne_from_w_cycle(game: Game, part: Partition) -> Situation:
    """Circle a cycle of ``G[W]`` reached from ``init``; every other position avoids terminals."""
    cycle = w_cycle(game, part)
    if cycle is None:
        raise PreconditionError("W acyclic: no non-terminal equilibrium from W")
    choice = {v: cycle[(k + 1) % len(cycle)] for k, v in enumerate(cycle)}
    path = _bfs_path(game, game.init, set(cycle), part.W)
    for a, b in zip(path, path[1:]):
        choice.setdefault(a, b)
    for v in game.internals:
        if v not in choice:
            w = non_terminating_move(game, v)
            choice[v] = w if w is not None else game.succ(v)[0]
    return Situation(choice)


def _bfs_path(game: Game, start: str, goal: set[str], allowed: Iterable[str]) -> list[str]:
    """Shortest path from ``start`` to ``goal`` inside ``allowed``, first found in name order."""
    allowed_set = set(allowed)
    parent = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if v in goal:
            path = [v]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for w in game.succ(v):
            if w in allowed_set and w not in parent:
                parent[w] = v
                queue.append(w)
    raise SolverInvariantError(f"no path from {start} to the target set")


@dataclass(frozen=True)
class FeedbackSet:
    arcs: frozenset[Move]
    nodes: frozenset[str]  # vertex set of G[V \ Q], terminals included
    base_arcs: frozenset[Move]  # moves of G[V \ Q]

    def remaining(self) -> frozenset[Move]:
        return self.base_arcs - self.arcs


def _arcs_acyclic(nodes: Iterable[str], arcs: Iterable[Move]) -> bool:
    adj: dict[str, list[str]] = {}
    for a, b in arcs:
        adj.setdefault(a, []).append(b)
    for targets in adj.values():
        targets.sort()
    return _graph.is_acyclic(nodes, lambda v: adj.get(v, ()))


def minimal_feedback_arcs(game: Game, part: Partition) -> FeedbackSet:
    """Inclusion-minimal set of non-terminal S-arcs whose removal leaves G[V∖Q] acyclic.

    Starts from every non-terminal arc leaving S and greedily restores arcs in
    sorted order whenever acyclicity survives.
    """
    if w_cycle(game, part) is not None:
        raise PreconditionError("G[W] has a cycle; use non_terminal_ne_from_w_cycle")
    nodes = frozenset(v for v in game.positions if v not in part.Q)
    base = frozenset((a, b) for a, b in game.moves if a in nodes and b in nodes)
    candidates = sorted((a, b) for a, b in base if a in part.S and b not in game.terminals)
    kept = set(base) - set(candidates)
    if not _arcs_acyclic(nodes, kept):
        raise SolverInvariantError("a cycle of G[V\\Q] avoids S")
    removed = []
    for arc in candidates:
        kept.add(arc)
        if not _arcs_acyclic(nodes, kept):
            kept.discard(arc)
            removed.append(arc)
    return FeedbackSet(frozenset(removed), nodes, base)


def check_feedback_set(fs: FeedbackSet, game: Game, part: Partition) -> None:
    remaining = fs.remaining()
    if not _arcs_acyclic(fs.nodes, remaining):
        raise SolverInvariantError("feedback set leaves a cycle")
    for a, b in fs.arcs:
        if a not in part.S:
            raise SolverInvariantError(f"feedback arc {a}->{b} does not leave S")
        if b in game.terminals:
            raise SolverInvariantError(f"feedback arc {a}->{b} is a terminal move")
        if _arcs_acyclic(fs.nodes, remaining | {(a, b)}):
            raise SolverInvariantError(f"feedback set not minimal: {a}->{b} can be restored")


@dataclass(frozen=True)
class TerminalConstruction:
    """Intermediate objects of the terminal-equilibrium construction."""

    subgame: Game  # G' = (V∖Q, E'∖F)
    bi_situation: Situation  # backward induction on the subgame
    tree: dict[str, str]  # in-tree towards the reached terminal
    situation: Situation


def terminal_ne_construct(game: Game, part: Partition, fs: FeedbackSet) -> Situation:
    return _terminal_construction(game, part, fs).situation


def _terminal_construction(game: Game, part: Partition, fs: FeedbackSet) -> TerminalConstruction:
    keep = fs.nodes
    sub_moves = fs.remaining()
    controller = {v: p for v, p in game.controller.items() if v in keep}
    for v in controller:
        if not any(a == v for a, _ in sub_moves):
            raise SolverInvariantError(f"position {v} lost every move after cutting the feedback set")
    sub = game.replace(moves=sub_moves, controller=controller)
    sigma, value = backward_induction(sub)
    play = evaluate(sub, sigma)
    target = play.outcome
    if target == INF:
        raise SolverInvariantError("backward induction produced an infinite play")
    tree: dict[str, str] = {}
    for a, b in zip(play.walk, play.walk[1:]):
        tree[a] = b
    queue = deque([target] + list(reversed(play.walk[:-1])))
    in_tree = set(queue)
    while queue:
        x = queue.popleft()
        for p in sub.pred(x):
            if p not in in_tree:
                in_tree.add(p)
                tree[p] = x
                queue.append(p)
    choice = {}
    for v in game.internals:
        if v in part.Q:
            w = non_terminating_move(game, v, within=part.Q)
            if w is None:
                raise SolverInvariantError(f"Q position {v} has no successor inside Q")
            choice[v] = w
        elif v in tree:
            choice[v] = tree[v]
        else:
            choice[v] = sigma[v]
    return TerminalConstruction(sub, sigma, tree, Situation(choice))


@dataclass
class PlayOnceReport:
    """Everything :func:`solve_play_once` computed, for inspection and tests."""

    situation: Situation
    outcome: str
    normalization: Normalization
    partition: Partition | None = None
    cycle: list[str] | None = None
    feedback: FeedbackSet | None = None
    construction: TerminalConstruction | None = None

    @property
    def method(self) -> str:
        if self.partition is None:
            return "trivial"
        return "w-cycle" if self.cycle is not None else "terminal-construction"


def solve_play_once(game: Game, verify: bool = True) -> Situation:
    return solve_play_once_report(game, verify).situation


def solve_play_once_report(game: Game, verify: bool = True, require_play_once: bool = True) -> PlayOnceReport:
    """Construct a NE of a play-once game, checking every intermediate law when ``verify``."""
    norm = normalize_play_once(game, require_play_once=require_play_once)
    if norm.trivial:
        sigma = norm.lift(None)
        return _finish(game, PlayOnceReport(sigma, evaluate(game, sigma).outcome, norm), verify)
    ng = norm.game
    part = partition(ng)
    if verify:
        check_partition(ng, part)
    cycle = w_cycle(ng, part)
    if cycle is not None:
        inner = non_terminal_ne_from_w_cycle(ng, part)
        if verify:
            play = evaluate(ng, inner)
            if play.outcome != INF or not set(play.walk) <= part.W:
                raise SolverInvariantError("W-cycle situation does not circle inside W")
        sigma = norm.lift(inner)
        report = PlayOnceReport(sigma, evaluate(game, sigma).outcome, norm, part, cycle)
        return _finish(game, report, verify)
    if verify:
        s_free = [(a, b) for a, b in ng.moves if a not in part.S and a not in part.Q and b not in part.Q]
        if not _arcs_acyclic([v for v in ng.positions if v not in part.Q], s_free):
            raise SolverInvariantError("a cycle of G[V\\Q] avoids S")
    fs = minimal_feedback_arcs(ng, part)
    if verify:
        check_feedback_set(fs, ng, part)
    cons = _terminal_construction(ng, part, fs)
    if verify:
        _check_tree_outcomes(ng, part, cons)
    sigma = norm.lift(cons.situation)
    report = PlayOnceReport(sigma, evaluate(game, sigma).outcome, norm, part, None, fs, cons)
    return _finish(game, report, verify)


def _check_tree_outcomes(game: Game, part: Partition, cons: TerminalConstruction) -> None:
    reached = evaluate(cons.subgame, cons.bi_situation).outcome
    if evaluate(game, cons.situation).outcome != reached:
        raise SolverInvariantError("tree situation changed the backward-induction play")
    for w in game.internals:
        if w in part.Q:
            continue
        got = evaluate(game, cons.situation, w).outcome
        if got not in (reached, evaluate(cons.subgame, cons.bi_situation, w).outcome):
            raise SolverInvariantError(f"outcome from {w} is neither the play's nor the BI value")


def _finish(game: Game, report: PlayOnceReport, verify: bool) -> PlayOnceReport:
    if verify:
        verdict = check_ne(game, report.situation)
        if not verdict.is_ne:
            raise SolverInvariantError(f"play-once construction is not a NE: {verdict.witness}")
    return report
