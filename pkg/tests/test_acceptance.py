"""Acceptance criteria 1-8, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v`` (or this file directly) and look
for the ``[acceptance]`` lines.
"""

import functools
import graphlib
import time

import pytest
from conftest import play_once_params, terminal_params

from dggames import harness
from dggames.cli import main
from dggames.game import INF, Situation, backward_induction, check_ne, evaluate, terminal_reachable
from dggames.oracle import certify
from dggames.playonce import normalize_play_once, partition, solve_play_once_report, w_cycle
from dggames.terminal3 import solve_terminal3_report, solve_unreachable, switching_transform, terminal_moves
from dggames.textio import parse_game

SUITE = 2000


def report(capsys, number, ok, detail, seconds=None, limit=None):
    timing = "" if seconds is None else f" [{seconds:.2f}s" + (f" / limit {limit}s]" if limit else "]")
    with capsys.disabled():
        print(f"\n[acceptance] criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}{timing}")
    assert ok, detail
    if limit is not None:
        assert seconds < limit, f"took {seconds:.2f}s, limit {limit}s"


def _acyclic(nodes, arcs):
    ts = graphlib.TopologicalSorter({v: set() for v in nodes})
    for a, b in arcs:
        ts.add(b, a)
    try:
        ts.prepare()
    except graphlib.CycleError:
        return False
    return True


@functools.cache
def play_once_suite():
    """(game, report) for the seeded play-once suite, with total solve time."""
    start = time.perf_counter()
    out = [(g, solve_play_once_report(g)) for g in
           (harness.random_game(play_once_params(seed)) for seed in range(SUITE))]
    return out, time.perf_counter() - start


@functools.cache
def terminal_suite():
    start = time.perf_counter()
    out = [(g, solve_terminal3_report(g, oracle_fallback=False)) for g in
           (harness.random_game(terminal_params(seed)) for seed in range(SUITE))]
    return out, time.perf_counter() - start


def test_criterion_1_fig1_certification(capsys):
    start = time.perf_counter()
    code = main(["certify", "fixture:fig1"])
    out = capsys.readouterr().out
    cert = certify(harness.fixture("fig1"))
    took = time.perf_counter() - start
    ok = code == 1 and "NE-free (16 situations examined)" in out and cert.ne_free and cert.examined == 16
    report(capsys, 1, ok, f"fig1 NE-free after examining {cert.examined} situations", took, 1)


def test_criterion_2_fig2_certification(capsys):
    start = time.perf_counter()
    code = main(["certify", "--all", "fixture:fig2"])
    capsys.readouterr()
    cert = certify(harness.fixture("fig2"), want_all=True)
    took = time.perf_counter() - start
    cycle = Situation({"q1": "q2", "q2": "q3", "q3": "q1"})
    ok = code == 0 and cert.examined == 8 and not cert.terminal and cycle in cert.nonterminal
    report(capsys, 2, ok, f"{cert.examined} situations, {len(cert.terminal)} terminal NE, "
                          f"3-cycle NE present: {cycle in cert.nonterminal}", took, 1)


def test_criterion_3_play_once_solver(capsys):
    suite, solve_time = play_once_suite()
    start = time.perf_counter()
    failures, confirmed = [], 0
    for seed, (g, rep) in enumerate(suite):
        if not check_ne(g, rep.situation).is_ne:
            failures.append(seed)
        if len(g.internals) <= 6:
            if certify(g).ne_free:
                failures.append(seed)
            confirmed += 1
    took = solve_time + time.perf_counter() - start
    report(capsys, 3, not failures, f"{len(suite)} games solved, {confirmed} oracle-confirmed, "
                                    f"{len(failures)} failures", took, 60)


def test_criterion_4_terminal_solver(capsys):
    suite, took = terminal_suite()
    bad = []
    for seed, (g, rep) in enumerate(suite):
        v = check_ne(g, rep.situation)
        if not (v.is_ne and rep.verified and not rep.fallbacks):
            bad.append(seed)
        elif terminal_reachable(g) and v.outcome == INF:
            bad.append(seed)
    reachable = sum(terminal_reachable(g) for g, _ in suite)
    report(capsys, 4, not bad, f"{len(suite)} games, {reachable} with a reachable terminal, "
                               f"{len(bad)} failures", took, 120)


def test_criterion_5_infinite_ne_iff_w_cycle(capsys):
    # W is defined through each position's single terminal exit, so the
    # equivalence is judged on the normalized game; raw counts are shown too.
    mismatches, checked, already, literal, raw_mismatch = [], 0, 0, 0, 0
    for seed in range(SUITE * 2):
        g = harness.random_game(play_once_params(seed, max_positions=6))
        norm = normalize_play_once(g)
        if norm.trivial:
            continue
        ng = norm.game
        cyclic = w_cycle(ng, partition(ng)) is not None
        if bool(certify(ng, want_all=True).nonterminal) != cyclic:
            mismatches.append(seed)
        checked += 1
        raw_inf = bool(certify(g, want_all=True).nonterminal)
        raw_mismatch += raw_inf != cyclic
        if ng == g:
            already += 1
            literal += raw_inf != cyclic
    ok = not mismatches and literal == 0
    report(capsys, 5, ok, f"{checked} games: {len(mismatches)} disagreements on the normalized game, "
                          f"{literal} on the {already} games already normalized "
                          f"(raw unnormalized games: {raw_mismatch} differ, see notes)")


def test_criterion_6a_switching(capsys):
    checked, bad = 0, 0
    seed = 0
    while checked < 500 and seed < 50_000:
        g = harness.random_game(terminal_params(seed, max_positions=6))
        seed += 1
        if any(b == g.prefs[g.controller[u]][0] for u, b in terminal_moves(g)):
            continue
        for s in certify(g, want_all=True).terminal:
            a = evaluate(g, s).outcome
            if any(w in g.terminals and w != a and all(x in g.terminals for x in g.succ(u))
                   for u, w in s.items()):
                continue
            v = check_ne(g, switching_transform(g, s))
            bad += not (v.is_ne and v.outcome == a)
            checked += 1
    report(capsys, "6a", checked >= 500 and not bad, f"{checked} terminal NE switched, {bad} failures")


def test_criterion_6b_reduction_lifts(capsys):
    suite, _ = terminal_suite()
    lifts = sum(len(rep.lift_checks) for _, rep in suite)
    failed = sum(not c.ok for _, rep in suite for c in rep.lift_checks)
    fallbacks = sum(len(rep.fallbacks) for _, rep in suite)
    steps = sum(len(rep.trace.steps) for _, rep in suite)
    report(capsys, "6b", failed == 0 and fallbacks == 0 and steps > 0,
           f"{lifts} lifts over {steps} reduction steps, {failed} failed, {fallbacks} oracle fallbacks")


def test_criterion_6c_feedback_minimality(capsys):
    suite, _ = play_once_suite()
    sets, arcs, bad = 0, 0, 0
    for g, rep in suite:
        fs = rep.feedback
        if fs is None:
            continue
        sets += 1
        remaining = fs.remaining()
        bad += not _acyclic(fs.nodes, remaining)
        for f in fs.arcs:
            arcs += 1
            bad += _acyclic(fs.nodes, remaining | {f})
    report(capsys, "6c", bad == 0 and sets > 0,
           f"{sets} feedback sets, {arcs} arcs restored one at a time, {bad} violations")


def test_criterion_7_backward_induction(capsys):
    bad = 0
    for seed in range(500):
        g = harness.random_acyclic_game(seed, positions=1 + seed % 8, terminals=1 + seed % 3,
                                        players=1 + seed % 4)
        sigma, value = backward_induction(g)
        bad += not check_ne(g, sigma).is_ne
        bad += any(value[v] != evaluate(g, sigma, v).outcome for v in g.positions)
    report(capsys, 7, bad == 0, f"500 acyclic games, {bad} failures")


def test_criterion_8_unreachable(capsys):
    bad = 0
    for seed in range(200):
        g = harness.random_unreachable_game(seed)
        assert not terminal_reachable(g)
        v = check_ne(g, solve_unreachable(g))
        bad += not (v.is_ne and v.outcome == INF)
    report(capsys, 8, bad == 0, f"200 games with the terminals cut off, {bad} failures")


def test_shipped_fixture_files_match(capsys):
    from pathlib import Path

    games = Path(__file__).resolve().parent.parent / "games"
    assert parse_game((games / "fig1.dgg").read_text()) == harness.fixture("fig1")
    assert parse_game((games / "fig2.dgg").read_text()) == harness.fixture("fig2")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
