"""Small digraph helpers over name-keyed adjacency callables."""

from __future__ import annotations

from collections import deque
from collections.abc import Callable, Collection, Iterable

Succ = Callable[[str], Iterable[str]]


def reach(start: str | Iterable[str], succ: Succ, allowed: Collection[str] | None = None) -> set[str]:
    """Vertices reachable from ``start`` (included) along paths inside ``allowed``."""
    seeds = [start] if isinstance(start, str) else list(start)
    seen = set(seeds)
    queue = deque(seeds)
    while queue:
        v = queue.popleft()
        for w in succ(v):
            if w in seen or (allowed is not None and w not in allowed):
                continue
            seen.add(w)
            queue.append(w)
    return seen


def find_cycle(nodes: Iterable[str], succ: Succ) -> list[str] | None:
    """Return one directed cycle of the subgraph induced by ``nodes``, or None.

    Deterministic: roots are tried in sorted order and ``succ`` order is kept.
    The cycle is listed from its first vertex without repeating it.
    """
    node_set = set(nodes)
    state: dict[str, int] = {}  # 1 = on stack, 2 = done
    for root in sorted(node_set):
        if root in state:
            continue
        path = [root]
        state[root] = 1
        iters = [iter([w for w in succ(root) if w in node_set])]
        while iters:
            try:
                w = next(iters[-1])
            except StopIteration:
                iters.pop()
                state[path.pop()] = 2
                continue
            mark = state.get(w)
            if mark == 1:
                return path[path.index(w):]
            if mark is None:
                state[w] = 1
                path.append(w)
                iters.append(iter([x for x in succ(w) if x in node_set]))
    return None


def is_acyclic(nodes: Iterable[str], succ: Succ) -> bool:
    return find_cycle(nodes, succ) is None
