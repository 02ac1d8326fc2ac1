"""Nash equilibria for deterministic graphical games.

Constructive solvers for play-once games and for terminal games with at most
three terminals, backed by a brute-force equilibrium oracle.
"""

from dggames.errors import (
    CyclicGraphError,
    GameError,
    InstanceTooLarge,
    NotApplicable,
    PreconditionError,
    SolverInvariantError,
    ValidationError,
)
from dggames.game import (
    INF,
    Classification,
    Game,
    NeVerdict,
    Play,
    Situation,
    Witness,
    backward_induction,
    best_response,
    check_ne,
    classify,
    evaluate,
    reachable,
)
from dggames.kernel import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "INF",
    "Classification",
    "CyclicGraphError",
    "Game",
    "GameError",
    "InstanceTooLarge",
    "NeVerdict",
    "NotApplicable",
    "Play",
    "PreconditionError",
    "Situation",
    "SolverInvariantError",
    "ValidationError",
    "Witness",
    "backward_induction",
    "best_response",
    "check_ne",
    "classify",
    "evaluate",
    "reachable",
]
