"""Pure-Python situation kernel.

Mirrors ``_ckernel.pyx`` call for call; :mod:`dggames.kernel` picks one of the
two at import time.

Encoding (shared with the compiled kernel):

* internals are indexed ``0..m-1`` in name order;
* a move target code ``< m`` is an internal index, ``m + j`` is terminal ``j``;
* an outcome code is ``j`` for terminal ``j`` and ``n_terminals`` for the
  infinite outcome;
* ``ranks[p * (n_terminals + 1) + o]`` is player ``p``'s rank of outcome ``o``
  (0 = best);
* a situation is a list of digits, ``choice[k]`` indexing the out-moves of
  internal ``k``.
"""

from __future__ import annotations

BACKEND = "python"


class Kernel:
    def __init__(self, offsets, targets, owner, ranks, n_players, n_terminals, init):
        self.offsets = list(offsets)
        self.targets = list(targets)
        self.owner = list(owner)
        self.ranks = list(ranks)
        self.n_players = n_players
        self.n_terminals = n_terminals
        self.init = init
        self.m = len(self.owner)
        self.degrees = [self.offsets[k + 1] - self.offsets[k] for k in range(self.m)]
        self.player_positions = [[k for k in range(self.m) if self.owner[k] == p]
                                 for p in range(n_players)]

    def outcome(self, choice, start):
        m = self.m
        offsets = self.offsets
        targets = self.targets
        seen = [False] * m
        v = start
        while v < m:
            if seen[v]:
                return self.n_terminals
            seen[v] = True
            v = targets[offsets[v] + choice[v]]
        return v - m

    def _rank(self, player, outcome):
        return self.ranks[player * (self.n_terminals + 1) + outcome]

    def find_improvement(self, choice):
        """Return ``(player, digits, outcome)`` for the first improving deviation, else None.

        Players are scanned in ascending order; a player's strategies run in
        mixed-radix order with the lowest-indexed position most significant.
        """
        current = self.outcome(choice, self.init)
        trial = list(choice)
        for p in range(self.n_players):
            positions = self.player_positions[p]
            if not positions:
                continue
            threshold = self._rank(p, current)
            if threshold == 0:
                continue
            for k in positions:
                trial[k] = 0
            while True:
                out = self.outcome(trial, self.init)
                if self._rank(p, out) < threshold:
                    return p, [trial[k] for k in positions], out
                if not self._advance(trial, positions):
                    break
            for k in positions:
                trial[k] = choice[k]
        return None

    def best_response(self, choice, player):
        """Best outcome ``player`` can force by changing only their digits.

        Returns ``(outcome, digits)``; the current strategy wins ties.
        """
        positions = self.player_positions[player]
        current = self.outcome(choice, self.init)
        best_out = current
        best_digits = [choice[k] for k in positions]
        if not positions:
            return best_out, best_digits
        best_rank = self._rank(player, current)
        trial = list(choice)
        for k in positions:
            trial[k] = 0
        while True:
            out = self.outcome(trial, self.init)
            r = self._rank(player, out)
            if r < best_rank:
                best_rank = r
                best_out = out
                best_digits = [trial[k] for k in positions]
            if not self._advance(trial, positions):
                break
        return best_out, best_digits

    def _advance(self, trial, positions):
        for k in reversed(positions):
            trial[k] += 1
            if trial[k] < self.degrees[k]:
                return True
            trial[k] = 0
        return False

    def decode(self, index):
        digits = [0] * self.m
        for k in range(self.m - 1, -1, -1):
            index, digits[k] = divmod(index, self.degrees[k])
        return digits

    def scan(self, lo, hi, first_only):
        """Indices in ``[lo, hi)`` whose situation is a NE."""
        found = []
        if lo >= hi:
            return found
        choice = self.decode(lo)
        everything = list(range(self.m))
        index = lo
        while index < hi:
            if self.find_improvement(choice) is None:
                found.append(index)
                if first_only:
                    break
            index += 1
            self._advance(choice, everything)
        return found
