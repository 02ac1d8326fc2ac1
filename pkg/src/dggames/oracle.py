"""Brute-force situation enumeration, NE certification and improvement dynamics.

Situations are indexed mixed-radix: internal positions sorted by name, the
first position being the most significant digit, and each digit indexing
that position's moves sorted by target name.
"""

from __future__ import annotations

import enum
import os
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from dggames.errors import InstanceTooLarge, ValidationError
from dggames.game import INF, Game, Situation, best_response, check_ne

INDEX_LIMIT = 2**63 - 1


def situation_count(game: Game) -> int:
    return game.situation_count()


def _require_fits(game: Game, limit: int | None = None) -> int:
    count = game.situation_count()
    if count > INDEX_LIMIT:
        raise InstanceTooLarge(f"instance too large: {count} situations exceed the 64-bit index width")
    if limit is not None and count > limit:
        raise InstanceTooLarge(f"instance too large: {count} situations exceed the limit of {limit}")
    return count


def encode(game: Game, situation: Situation) -> int:
    index = 0
    for v, d in zip(game.internals, game.digits(situation)):
        index = index * len(game.succ(v)) + d
    return index


def decode(game: Game, index: int) -> Situation:
    count = game.situation_count()
    if not 0 <= index < count:
        raise ValidationError(f"situation index {index} out of range 0..{count - 1}")
    digits = []
    for v in reversed(game.internals):
        index, d = divmod(index, len(game.succ(v)))
        digits.append(d)
    return game.from_digits(reversed(digits))


def enumerate_situations(game: Game) -> Iterator[Situation]:
    """Every situation once, in index order."""
    _require_fits(game)
    internals = game.internals
    succs = [game.succ(v) for v in internals]
    digits = [0] * len(internals)
    while True:
        yield Situation({v: s[d] for v, s, d in zip(internals, succs, digits)})
        k = len(digits) - 1
        while k >= 0:
            digits[k] += 1
            if digits[k] < len(succs[k]):
                break
            digits[k] = 0
            k -= 1
        if k < 0:
            return


class CertificateKind(enum.Enum):
    NE_FREE = "ne-free"
    HAS_NE = "has-ne"
    NO_TERMINAL_NE = "no-terminal-ne"


@dataclass(frozen=True)
class Certificate:
    """Result of exhaustive certification.

    ``terminal`` and ``nonterminal`` hold the equilibria found (all of them
    when certified with ``want_all``), split by outcome.
    """

    kind: CertificateKind
    examined: int
    terminal: tuple[Situation, ...] = ()
    nonterminal: tuple[Situation, ...] = ()
    exhaustive: bool = field(default=True)

    @property
    def situations(self) -> tuple[Situation, ...]:
        return self.terminal + self.nonterminal

    @property
    def ne_free(self) -> bool:
        return self.kind is CertificateKind.NE_FREE


def _scan_chunk(args):
    game, lo, hi, first_only = args
    return game.kernel().scan(lo, hi, first_only)


def certify(game: Game, want_all: bool = False, limit: int | None = None, jobs: int = 1) -> Certificate:
    """Apply :func:`check_ne` to every situation.

    Without ``want_all`` the scan stops at the first equilibrium. ``jobs > 1``
    splits the index range into contiguous chunks certified in worker
    processes; results are merged in index order.
    """
    count = _require_fits(game, limit)
    if jobs > 1 and count >= 4 * jobs:
        bounds = [count * k // jobs for k in range(jobs + 1)]
        tasks = [(game, bounds[k], bounds[k + 1], not want_all) for k in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_scan_chunk, tasks))
        indices = [i for chunk in chunks for i in chunk]
        if not want_all:
            indices = indices[:1]
        examined = count if want_all or not indices else indices[0] + 1
    else:
        indices = game.kernel().scan(0, count, not want_all)
        examined = count if want_all or not indices else indices[0] + 1
    found = [decode(game, i) for i in indices]
    outcomes = [check_ne(game, s).outcome for s in found]
    terminal = tuple(s for s, o in zip(found, outcomes) if o != INF)
    nonterminal = tuple(s for s, o in zip(found, outcomes) if o == INF)
    if not found:
        kind = CertificateKind.NE_FREE
    elif want_all and not terminal:
        kind = CertificateKind.NO_TERMINAL_NE
    else:
        kind = CertificateKind.HAS_NE
    return Certificate(kind, examined, terminal, nonterminal, exhaustive=want_all or not found)


def default_jobs() -> int:
    return max(1, (os.cpu_count() or 1))


class DynamicsEnd(enum.Enum):
    REACHED_NE = "reached-ne"
    IMPROVEMENT_CYCLE = "improvement-cycle"
    STEP_LIMIT = "step-limit"


@dataclass(frozen=True)
class DynamicsRun:
    """Trajectory of best-response dynamics.

    ``steps[k] = (situation, player)`` records the situation reached by the
    k-th move and the player who made it. For an improvement cycle,
    ``cycle_start`` indexes the trajectory ``[start, steps[0][0], ...]`` at
    the first visit of the repeated situation.
    """

    start: Situation
    steps: tuple[tuple[Situation, int], ...]
    end: DynamicsEnd
    cycle_start: int | None = None

    @property
    def final(self) -> Situation:
        return self.steps[-1][0] if self.steps else self.start

    def trajectory(self) -> list[Situation]:
        return [self.start] + [s for s, _ in self.steps]


def improvement_dynamics(game: Game, start: Situation, max_steps: int = 1000) -> DynamicsRun:
    """Lowest-indexed improving player switches to a best response, repeatedly."""
    if max_steps < 1:
        raise ValidationError("max_steps must be at least 1")
    if not isinstance(start, Situation):
        start = Situation(start)
    game.validate_situation(start)
    seen = {start: 0}
    steps: list[tuple[Situation, int]] = []
    current = start
    while True:
        verdict = check_ne(game, current)
        if verdict.is_ne:
            return DynamicsRun(start, tuple(steps), DynamicsEnd.REACHED_NE)
        if len(steps) >= max_steps:
            return DynamicsRun(start, tuple(steps), DynamicsEnd.STEP_LIMIT)
        mover = verdict.witness.player
        _, current = best_response(game, current, mover)
        steps.append((current, mover))
        if current in seen:
            return DynamicsRun(start, tuple(steps), DynamicsEnd.IMPROVEMENT_CYCLE, seen[current])
        seen[current] = len(steps)
