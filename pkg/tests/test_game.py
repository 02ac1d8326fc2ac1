import random

import pytest
from conftest import mixed_params
from reference import improving_deviations, is_ne, walk_outcome

from dggames import harness
from dggames.errors import CyclicGraphError, PreconditionError, ValidationError
from dggames.game import (
    INF,
    Game,
    Situation,
    backward_induction,
    best_response,
    check_ne,
    classify,
    evaluate,
    reachable,
)

CYCLE = Situation({"q1": "q2", "q2": "q3", "q3": "q1"})


def single(prefs=("x", "y", INF)):
    return Game(1, ["x", "y"], {"v": 1}, [("v", "x"), ("v", "y")], "v", {1: prefs})


def random_situation(game, rng):
    return Situation({v: rng.choice(game.succ(v)) for v in game.internals})


# -- evaluate -----------------------------------------------------------------


def test_evaluate_forced_single_move():
    g = Game(1, ["t"], {"v0": 1}, [("v0", "t")], "v0", {1: ("t", INF)})
    play = evaluate(g, Situation({"v0": "t"}))
    assert play.walk == ("v0", "t")
    assert play.outcome == "t"
    assert play.cycle_start is None


def test_evaluate_fig2_cycle(fig2):
    play = evaluate(fig2, CYCLE)
    assert play.outcome == INF
    assert play.walk == ("q1", "q2", "q3", "q1")
    assert play.cycle() == ("q1", "q2", "q3")


def test_evaluate_fig1_trace(fig1):
    sigma = Situation({"p1": "p2", "p2": "a", "p3": "b", "p4": "c"})
    play = evaluate(fig1, sigma)
    assert play.walk == ("p1", "p2", "a")
    assert play.outcome == "a"
    assert walk_outcome(fig1, dict(sigma)) == "a"


def test_evaluate_from_terminal_start(fig2):
    play = evaluate(fig2, CYCLE, "b")
    assert play.walk == ("b",) and play.outcome == "b"


def test_evaluate_rejects_missing_choice(fig2):
    with pytest.raises(ValidationError) as exc:
        evaluate(fig2, Situation({"q1": "q2", "q2": "q3"}))
    assert exc.value.position == "q3"


def test_evaluate_rejects_foreign_move(fig2):
    with pytest.raises(ValidationError) as exc:
        evaluate(fig2, Situation({"q1": "q3", "q2": "q3", "q3": "q1"}))
    assert exc.value.position == "q1"


def test_self_loop_choice_is_infinite():
    g = Game(1, ["t"], {"v": 1}, [("v", "v"), ("v", "t")], "v", {1: ("t", INF)})
    assert evaluate(g, Situation({"v": "v"})).outcome == INF


def test_walk_bound_and_determinism():
    rng = random.Random(3)
    for seed in range(300):
        g = harness.random_game(mixed_params(seed))
        s = random_situation(g, rng)
        for start in g.positions:
            play = evaluate(g, s, start)
            assert len(play.walk) <= len(g.positions) + 1
            assert (play.outcome == INF) == (len(set(play.walk)) < len(play.walk))
            assert play == evaluate(g, s, start)


# -- check_ne -----------------------------------------------------------------


def test_fig2_cycle_is_ne(fig2):
    verdict = check_ne(fig2, CYCLE)
    assert verdict.is_ne and verdict.outcome == INF and verdict.witness is None


def test_fig1_every_situation_fails(fig1):
    from dggames.oracle import enumerate_situations

    situations = list(enumerate_situations(fig1))
    assert len(situations) == 16
    assert not any(check_ne(fig1, s).is_ne for s in situations)


def test_single_player_dominance_witness():
    g = single()
    verdict = check_ne(g, Situation({"v": "y"}))
    assert not verdict.is_ne
    assert verdict.witness.player == 1
    assert verdict.witness.deviation == Situation({"v": "x"})
    assert verdict.witness.new_outcome == "x"


def test_check_ne_agrees_with_reference_and_witness_replays():
    rng = random.Random(11)
    for seed in range(1000):
        g = harness.random_game(mixed_params(seed))
        s = random_situation(g, rng)
        verdict = check_ne(g, s)
        assert verdict.is_ne == is_ne(g, dict(s))
        if not verdict.is_ne:
            w = verdict.witness
            first = next(improving_deviations(g, dict(s)))
            assert (w.player, w.new_outcome) == (first[0], first[2])
            assert evaluate(g, w.deviation).outcome == w.new_outcome
            assert g.prefers(w.player, w.new_outcome, verdict.outcome)
            changed = {v for v in g.internals if w.deviation[v] != s[v]}
            assert all(g.controller[v] == w.player for v in changed)


def test_ne_iff_no_best_response_improves():
    rng = random.Random(12)
    for seed in range(1000):
        g = harness.random_game(mixed_params(seed))
        s = random_situation(g, rng)
        current = evaluate(g, s).outcome
        improvable = any(g.prefers(p, best_response(g, s, p)[0], current) for p in range(1, g.players + 1))
        assert check_ne(g, s).is_ne == (not improvable)


# -- best_response ------------------------------------------------------------


def test_best_response_player_without_positions():
    g = Game(2, ["x", "y"], {"v": 1}, [("v", "x"), ("v", "y")], "v",
             {1: ("x", "y", INF), 2: ("y", "x", INF)})
    s = Situation({"v": "x"})
    assert best_response(g, s, 2) == ("x", s)


def test_best_response_fig1_player3(fig1):
    s = Situation({"p1": "p4", "p2": "a", "p3": "b", "p4": "c"})
    out, sit = best_response(fig1, s, 3)
    assert out == "c"
    assert sit == s


def test_best_response_fig2_player1_keeps_cycle(fig2):
    out, sit = best_response(fig2, CYCLE, 1)
    assert out == INF and sit == CYCLE


def test_best_response_changes_only_own_positions(fig1):
    s = Situation({"p1": "p2", "p2": "a", "p3": "b", "p4": "c"})
    out, sit = best_response(fig1, s, 2)
    assert {v for v in fig1.internals if sit[v] != s[v]} <= {"p2", "p3"}
    assert evaluate(fig1, sit).outcome == out == "c"


def test_best_response_unknown_player(fig2):
    with pytest.raises(ValidationError):
        best_response(fig2, CYCLE, 4)


# -- backward induction -------------------------------------------------------


def test_bi_chain():
    g = Game(2, ["t"], {"v0": 1, "v1": 2}, [("v0", "v1"), ("v1", "t")], "v0", {1: ("t", INF), 2: (INF, "t")})
    sigma, value = backward_induction(g)
    assert sigma == Situation({"v0": "v1", "v1": "t"})
    assert value["v0"] == "t"


def test_bi_fig2_without_back_arc(fig2t):
    g = fig2t.replace(moves=fig2t.moves - {("q3", "q1")})
    sigma, value = backward_induction(g)
    assert (value["q3"], value["q2"], value["q1"]) == ("c", "c", "c")
    assert evaluate(g, sigma).walk == ("q1", "q2", "q3", "c")
    assert is_ne(g, dict(sigma))


def test_bi_rejects_cycles(fig2):
    with pytest.raises(CyclicGraphError) as exc:
        backward_induction(fig2)
    assert sorted(exc.value.cycle) == ["q1", "q2", "q3"]
    assert "graph not acyclic" in str(exc.value)


def test_bi_tie_prefers_lowest_name():
    g = Game(2, ["t"], {"v": 1, "w": 2, "x": 2}, [("v", "x"), ("v", "w"), ("w", "t"), ("x", "t")], "v",
             {1: ("t", INF), 2: ("t", INF)})
    sigma, _ = backward_induction(g)
    assert sigma["v"] == "w"


def test_bi_random_acyclic_games_are_ne():
    for seed in range(200):
        g = harness.random_acyclic_game(seed, positions=1 + seed % 7, players=1 + seed % 3)
        sigma, value = backward_induction(g)
        assert check_ne(g, sigma).is_ne
        for v in g.positions:
            assert value[v] == evaluate(g, sigma, v).outcome


# -- reachable / classify -----------------------------------------------------


def test_reachable_singleton():
    g = single()
    assert reachable(g, "v", {"v"}) == {"v"}


def test_reachable_fig2_internals(fig2):
    assert reachable(fig2, "q1", set(fig2.internals)) == {"q1", "q2", "q3"}


def test_reachable_fig1_restricted(fig1):
    assert reachable(fig1, "p1", {"p1", "p2"}) == {"p1", "p2"}


def test_reachable_precondition(fig1):
    with pytest.raises(PreconditionError):
        reachable(fig1, "p1", {"p2"})


def test_classify_fixtures(fig1, fig2, fig2t):
    c1, c2, c3 = classify(fig1), classify(fig2), classify(fig2t)
    assert (c1.is_terminal_game, c1.is_play_once) == (False, False)
    assert (c2.is_terminal_game, c2.is_play_once) == (False, True)
    assert c3.is_terminal_game and c3.is_play_once
    assert c1.terminal_reachable_from_init


# -- validation -------------------------------------------------------------


@pytest.mark.parametrize("kwargs, fragment", [
    (dict(controller={"v": 2}), "unknown controller index 2"),
    (dict(moves=[("v", "x"), ("x", "v")]), "move from terminal x"),
    (dict(init="x"), "is a terminal"),
    (dict(init="nope"), "missing init"),
    (dict(prefs={1: ("x", "y")}), "missing outcome inf"),
    (dict(prefs={1: ("x", "y", INF, "x")}), "preference tie"),
    (dict(controller={"v": 1, "w": 1}), "zero out-degree internal position w"),
    (dict(terminals=["x", "y", "v"]), "duplicate position v"),
])
def test_game_validation(kwargs, fragment):
    base = dict(players=1, terminals=["x", "y"], controller={"v": 1}, moves=[("v", "x"), ("v", "y")],
                init="v", prefs={1: ("x", "y", INF)})
    base.update(kwargs)
    with pytest.raises(ValidationError, match=fragment):
        Game(**base)


def test_game_equality_and_hash(fig2):
    again = harness.fixture("fig2")
    assert again == fig2 and hash(again) == hash(fig2)
    assert fig2 != harness.fixture("fig2-terminal")
