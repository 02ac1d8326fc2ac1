"""Line-oriented game and situation files, plus DOT export.

Game file grammar (``#`` starts a comment, blank lines are ignored)::

    players 3
    terminal a b c
    position q1 controller=1
    init q1
    move q1 q2
    pref 1: b > c > inf > a

``inf`` is the reserved spelling of the infinite outcome. A situation file
holds one ``FROM -> TO`` line per internal position.
"""

from __future__ import annotations

import re
from collections.abc import Mapping

from dggames.errors import ValidationError
from dggames.game import INF, Game, Situation

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_CONTROLLER = re.compile(r"controller=(\S*)")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def _ident(token: str, line_no: int, column: int, what: str) -> str:
    if not IDENT.fullmatch(token):
        raise ValidationError(f"invalid {what} {token!r}", line=line_no, column=column)
    if token == INF:
        raise ValidationError(f"'inf' is reserved and cannot name a {what}", line=line_no, column=column)
    return token


def _tokens(line: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def parse_game(text: str) -> Game:
    players: int | None = None
    terminals: dict[str, int] = {}
    controller: dict[str, int] = {}
    controller_line: dict[str, int] = {}
    moves: dict[tuple[str, str], int] = {}
    init: tuple[str, int] | None = None
    prefs: dict[int, tuple[str, ...]] = {}
    pref_line: dict[int, int] = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        toks = _tokens(line)
        if not toks:
            continue
        keyword, kcol = toks[0]
        args = toks[1:]
        if keyword == "players":
            if len(args) != 1 or not args[0][0].isdigit():
                raise ValidationError("expected 'players N'", line=line_no, column=kcol)
            if players is not None:
                raise ValidationError("duplicate players line", line=line_no, column=kcol)
            players = int(args[0][0])
            if players < 1:
                raise ValidationError("players must be at least 1", line=line_no, column=args[0][1])
        elif keyword == "terminal":
            if not args:
                raise ValidationError("expected 'terminal IDENT+'", line=line_no, column=kcol)
            for tok, col in args:
                name = _ident(tok, line_no, col, "terminal")
                if name in terminals or name in controller:
                    raise ValidationError(f"duplicate position {name}", position=name, line=line_no, column=col)
                terminals[name] = line_no
        elif keyword == "position":
            if len(args) != 2:
                raise ValidationError("expected 'position IDENT controller=K'", line=line_no, column=kcol)
            name = _ident(args[0][0], line_no, args[0][1], "position")
            m = _CONTROLLER.fullmatch(args[1][0])
            if not m or not m.group(1).isdigit():
                raise ValidationError("expected controller=K", line=line_no, column=args[1][1])
            if name in terminals or name in controller:
                raise ValidationError(f"duplicate position {name}", position=name, line=line_no, column=args[0][1])
            controller[name] = int(m.group(1))
            controller_line[name] = line_no
        elif keyword == "init":
            if len(args) != 1:
                raise ValidationError("expected 'init IDENT'", line=line_no, column=kcol)
            if init is not None:
                raise ValidationError("duplicate init line", line=line_no, column=kcol)
            init = (_ident(args[0][0], line_no, args[0][1], "position"), line_no)
        elif keyword == "move":
            if len(args) != 2:
                raise ValidationError("expected 'move IDENT IDENT'", line=line_no, column=kcol)
            a = _ident(args[0][0], line_no, args[0][1], "position")
            b = _ident(args[1][0], line_no, args[1][1], "position")
            if (a, b) in moves:
                raise ValidationError(f"duplicate move {a} {b}", position=a, line=line_no, column=kcol)
            moves[(a, b)] = line_no
        elif keyword == "pref":
            player, order = _parse_pref(line, line_no)
            if player in prefs:
                raise ValidationError(f"duplicate pref line for player {player}", line=line_no, column=kcol)
            prefs[player] = order
            pref_line[player] = line_no
        else:
            raise ValidationError(f"unknown keyword {keyword!r}", line=line_no, column=kcol)

    if players is None:
        raise ValidationError("missing 'players' line")
    if init is None:
        raise ValidationError("missing init")
    for name, p in controller.items():
        if not 1 <= p <= players:
            raise ValidationError(f"unknown controller index {p}", position=name, line=controller_line[name])
    for (a, b), line_no in moves.items():
        if a in terminals:
            raise ValidationError(f"move from terminal {a}", position=a, line=line_no)
        for x in (a, b):
            if x not in terminals and x not in controller:
                raise ValidationError(f"move names unknown position {x}", position=x, line=line_no)
    if init[0] not in controller:
        what = "a terminal" if init[0] in terminals else "unknown"
        raise ValidationError(f"init position {init[0]} is {what}", position=init[0], line=init[1])
    has_move = {a for a, _ in moves}
    for name in sorted(controller):
        if name not in has_move:
            raise ValidationError(f"zero out-degree internal position {name}", position=name,
                                  line=controller_line[name])
    outcomes = set(terminals) | {INF}
    for p in range(1, players + 1):
        if p not in prefs:
            raise ValidationError(f"missing pref for player {p}")
        listed = prefs[p]
        for o in listed:
            if o not in outcomes:
                raise ValidationError(f"pref for player {p} names unknown outcome {o}", line=pref_line[p])
        for o in sorted(outcomes - set(listed)):
            raise ValidationError(f"pref for player {p} missing outcome {o}", line=pref_line[p])
    for p in prefs:
        if not 1 <= p <= players:
            raise ValidationError(f"pref for unknown player {p}", line=pref_line[p])
    return Game(players, terminals, controller, moves, init[0], prefs)


def _parse_pref(line: str, line_no: int) -> tuple[int, tuple[str, ...]]:
    m = re.fullmatch(r"\s*pref\s+(\d+)\s*:(.*)", line)
    if not m:
        raise ValidationError("expected 'pref K: O1 > O2 > ... > Om'", line=line_no, column=1)
    player = int(m.group(1))
    body = m.group(2)
    body_col = m.start(2) + 1
    order: list[str] = []
    for group in body.split(">"):
        names = [s for s in re.split(r"\s*=\s*", group.strip())]
        if len(names) > 1:
            raise ValidationError(f"preference tie between {' and '.join(names)} for player {player}",
                                  line=line_no)
        name = names[0]
        if not name:
            raise ValidationError("empty outcome in pref line", line=line_no, column=body_col)
        if name != INF and not IDENT.fullmatch(name):
            raise ValidationError(f"invalid outcome {name!r}", line=line_no,
                                  column=body_col + body.find(name))
        if name in order:
            raise ValidationError(f"duplicate pref entry {name} for player {player}", line=line_no)
        order.append(name)
    return player, tuple(order)


def format_game(game: Game) -> str:
    lines = [f"players {game.players}"]
    if game.terminals:
        lines.append("terminal " + " ".join(sorted(game.terminals)))
    for v in game.internals:
        lines.append(f"position {v} controller={game.controller[v]}")
    lines.append(f"init {game.init}")
    for a, b in sorted(game.moves):
        lines.append(f"move {a} {b}")
    for p in range(1, game.players + 1):
        lines.append(f"pref {p}: " + " > ".join(game.prefs[p]))
    return "\n".join(lines) + "\n"


def parse_situation(text: str, game: Game) -> Situation:
    choice: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw).strip()
        if not line:
            continue
        m = re.fullmatch(r"(\S+)\s*->\s*(\S+)", line)
        if not m:
            raise ValidationError("expected 'FROM -> TO'", line=line_no, column=1)
        a, b = m.groups()
        if a in choice:
            raise ValidationError(f"position {a} chosen twice", position=a, line=line_no)
        if a not in game.controller:
            raise ValidationError(f"{a} is not an internal position", position=a, line=line_no)
        if (a, b) not in game.moves:
            raise ValidationError(f"no move {a} -> {b}", position=a, line=line_no)
        choice[a] = b
    for v in game.internals:
        if v not in choice:
            raise ValidationError(f"situation has no move for position {v}", position=v)
    return Situation(choice)


def format_situation(situation: Mapping[str, str]) -> str:
    return "".join(f"{v} -> {situation[v]}\n" for v in sorted(situation))


def _q(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(game: Game, situation: Mapping[str, str] | None = None) -> str:
    """DOT digraph: terminals as boxes, internals labelled ``name/controller``.

    Moves chosen by ``situation`` are drawn bold; the initial position gets a
    double border.
    """
    chosen = set(situation.items()) if situation else set()
    out = ["digraph dg {"]
    for t in sorted(game.terminals):
        out.append(f"  {_q(t)} [shape=box];")
    for v in game.internals:
        extra = ", peripheries=2" if v == game.init else ""
        out.append(f"  {_q(v)} [shape=circle, label={_q(f'{v}/{game.controller[v]}')}{extra}];")
    for a, b in sorted(game.moves):
        style = " [style=bold]" if (a, b) in chosen else ""
        out.append(f"  {_q(a)} -> {_q(b)}{style};")
    out.append("}")
    return "\n".join(out) + "\n"
