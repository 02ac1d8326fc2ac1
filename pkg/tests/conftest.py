import pytest

from dggames import harness


@pytest.fixture
def fig1():
    return harness.fixture("fig1")


@pytest.fixture
def fig2():
    return harness.fixture("fig2")


@pytest.fixture
def fig2t():
    return harness.fixture("fig2-terminal")


def play_once_params(seed, max_positions=8, max_terminals=3, max_out_degree=3):
    n = 1 + seed % max_positions
    return harness.GenParams(positions=n, players=n, terminals=1 + (seed // max_positions) % max_terminals,
                             max_out_degree=max_out_degree, force_play_once=True, seed=seed)


def terminal_params(seed, max_positions=8, max_terminals=3, max_players=4, max_out_degree=3):
    return harness.GenParams(positions=1 + seed % max_positions, players=1 + (seed // 3) % max_players,
                             terminals=1 + (seed // 7) % max_terminals, max_out_degree=max_out_degree,
                             force_terminal_game=True, seed=seed)


def mixed_params(seed, max_positions=6, max_terminals=3, max_players=3, max_out_degree=3):
    positions = 1 + seed % max_positions
    terminals = (seed // 11) % (max_terminals + 1)
    if positions == 1:
        terminals = max(terminals, 1)
    return harness.GenParams(positions=positions, players=1 + (seed // 5) % max_players,
                             terminals=terminals, max_out_degree=max_out_degree, seed=seed)
