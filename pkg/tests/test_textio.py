from pathlib import Path

import pydot
import pytest
from conftest import mixed_params

from dggames import harness
from dggames.errors import ValidationError
from dggames.game import Situation
from dggames.textio import export_dot, format_game, format_situation, parse_game, parse_situation

GAMES = Path(__file__).resolve().parent.parent / "games"
CYCLE = Situation({"q1": "q2", "q2": "q3", "q3": "q1"})

MINIMAL = """\
players 2
terminal a b
position v controller=1
position w controller=2
init v
move v w
move v a
move w b
pref 1: a > b > inf
pref 2: b > inf > a
"""


@pytest.mark.parametrize("name", ["fig1", "fig2", "fig2-terminal"])
def test_shipped_files_match_fixtures(name):
    assert parse_game((GAMES / f"{name}.dgg").read_text()) == harness.fixture(name)


def test_round_trip_random_games():
    for seed in range(200):
        g = harness.random_game(mixed_params(seed))
        assert parse_game(format_game(g)) == g


def test_comments_and_blank_lines():
    text = "# header\n\n" + MINIMAL.replace("init v", "init v   # start here")
    assert parse_game(text) == parse_game(MINIMAL)


@pytest.mark.parametrize("old, new, fragment", [
    ("pref 2: b > inf > a", "pref 2: b > a", "pref for player 2 missing outcome inf"),
    ("move w b", "move w b\nmove a v", "move from terminal a"),
    ("position w controller=2", "position w controller=3", "unknown controller index 3"),
    ("position w controller=2", "position w controller=2\nposition w controller=1", "duplicate position w"),
    ("move w b", "move w b\nmove w b", "duplicate move w b"),
    ("pref 1: a > b > inf", "pref 1: a > b = inf", "preference tie"),
    ("pref 1: a > b > inf", "pref 1: a > b > inf > a", "duplicate pref entry a"),
    ("move w b", "", "zero out-degree internal position w"),
    ("init v\n", "", "missing init"),
    ("terminal a b", "terminal a inf", "reserved"),
    ("players 2", "players two", "expected 'players N'"),
])
def test_parse_errors(old, new, fragment):
    with pytest.raises(ValidationError, match=fragment):
        parse_game(MINIMAL.replace(old, new))


def test_syntax_error_has_line_and_column():
    with pytest.raises(ValidationError) as exc:
        parse_game(MINIMAL.replace("move v a", "move v 9a"))
    assert exc.value.line == 7 and exc.value.column == 8
    assert str(exc.value).startswith("line 7, column 8:")


def test_unknown_keyword():
    with pytest.raises(ValidationError, match="unknown keyword"):
        parse_game(MINIMAL + "edge v w\n")


def test_situation_file(fig2):
    text = (GAMES / "cycle.sit").read_text()
    s = parse_situation(text, fig2)
    assert s == CYCLE
    assert parse_situation(format_situation(s), fig2) == s


@pytest.mark.parametrize("text, fragment", [
    ("q1 -> q2\nq2 -> q3\n", "no move for position q3"),
    ("q1 -> q3\nq2 -> q3\nq3 -> q1\n", "no move q1 -> q3"),
    ("q1 -> q2\nq1 -> a\nq2 -> q3\nq3 -> q1\n", "chosen twice"),
    ("a -> q1\n", "not an internal position"),
    ("q1 q2\n", "FROM -> TO"),
])
def test_situation_errors(fig2, text, fragment):
    with pytest.raises(ValidationError, match=fragment):
        parse_situation(text, fig2)


def test_dot_bold_edges(fig2):
    text = export_dot(fig2, CYCLE)
    assert text.count("->") == 6
    assert text.count("style=bold") == 3
    assert "style=bold" not in export_dot(fig2)
    assert "style=bold" not in export_dot(fig2, Situation())


def test_dot_parses_and_is_deterministic(fig1):
    text = export_dot(fig1)
    assert text == export_dot(harness.fixture("fig1"))
    (graph,) = pydot.graph_from_dot_data(text)
    assert len(graph.get_edges()) == 8
    shapes = {n.get_name().strip('"'): n.get_shape() for n in graph.get_nodes()}
    assert shapes["a"] == "box" and shapes["p1"] == "circle"
    assert graph.get_node('"p1"')[0].get("peripheries") == "2"


def test_dot_random_games_parse():
    for seed in range(50):
        g = harness.random_game(mixed_params(seed))
        (graph,) = pydot.graph_from_dot_data(export_dot(g))
        assert len(graph.get_edges()) == len(g.moves)
