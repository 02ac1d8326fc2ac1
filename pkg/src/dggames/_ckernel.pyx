# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled situation kernel; same encoding and API as ``_kernel_py``."""

from libc.stdlib cimport malloc, free

BACKEND = "cython"


cdef class Kernel:
    cdef int *offsets
    cdef int *targets
    cdef int *owner
    cdef int *ranks
    cdef int *degrees
    cdef int *seen
    cdef int *trial
    cdef int *pos_start
    cdef int *pos_list
    cdef int stamp
    cdef public int m, n_players, n_terminals, init

    def __cinit__(self, offsets, targets, owner, ranks, int n_players, int n_terminals, int init):
        cdef int m = len(owner)
        cdef int k, p, c
        self.m = m
        self.n_players = n_players
        self.n_terminals = n_terminals
        self.init = init
        self.offsets = <int *> malloc((m + 1) * sizeof(int))
        self.targets = <int *> malloc((len(targets) + 1) * sizeof(int))
        self.owner = <int *> malloc((m + 1) * sizeof(int))
        self.ranks = <int *> malloc((len(ranks) + 1) * sizeof(int))
        self.degrees = <int *> malloc((m + 1) * sizeof(int))
        self.seen = <int *> malloc((m + 1) * sizeof(int))
        self.trial = <int *> malloc((m + 1) * sizeof(int))
        self.pos_start = <int *> malloc((n_players + 1) * sizeof(int))
        self.pos_list = <int *> malloc((m + 1) * sizeof(int))
        if (not self.offsets or not self.targets or not self.owner or not self.ranks
                or not self.degrees or not self.seen or not self.trial
                or not self.pos_start or not self.pos_list):
            raise MemoryError()
        for k in range(m + 1):
            self.offsets[k] = offsets[k]
        for k in range(len(targets)):
            self.targets[k] = targets[k]
        for k in range(len(ranks)):
            self.ranks[k] = ranks[k]
        for k in range(m):
            self.owner[k] = owner[k]
            self.degrees[k] = self.offsets[k + 1] - self.offsets[k]
            self.seen[k] = 0
        self.stamp = 0
        c = 0
        for p in range(n_players):
            self.pos_start[p] = c
            for k in range(m):
                if self.owner[k] == p:
                    self.pos_list[c] = k
                    c += 1
        self.pos_start[n_players] = c

    def __dealloc__(self):
        free(self.offsets)
        free(self.targets)
        free(self.owner)
        free(self.ranks)
        free(self.degrees)
        free(self.seen)
        free(self.trial)
        free(self.pos_start)
        free(self.pos_list)

    cdef int _walk(self, int *choice, int start) nogil:
        cdef int v = start
        self.stamp += 1
        if self.stamp == 0x7fffffff:
            for v in range(self.m):
                self.seen[v] = 0
            self.stamp = 1
            v = start
        while v < self.m:
            if self.seen[v] == self.stamp:
                return self.n_terminals
            self.seen[v] = self.stamp
            v = self.targets[self.offsets[v] + choice[v]]
        return v - self.m

    cdef inline int _rank(self, int p, int o) nogil:
        return self.ranks[p * (self.n_terminals + 1) + o]

    cdef bint _advance(self, int *digits, int lo, int hi) nogil:
        # odometer over pos_list[lo:hi], last entry least significant
        cdef int j, k
        j = hi - 1
        while j >= lo:
            k = self.pos_list[j]
            digits[k] += 1
            if digits[k] < self.degrees[k]:
                return True
            digits[k] = 0
            j -= 1
        return False

    cdef bint _advance_all(self, int *digits) nogil:
        cdef int k = self.m - 1
        while k >= 0:
            digits[k] += 1
            if digits[k] < self.degrees[k]:
                return True
            digits[k] = 0
            k -= 1
        return False

    cdef int _improve(self, int *choice, int *out_player, int *out_outcome) nogil:
        # 1 and fills trial/out_* when an improving deviation exists
        cdef int current = self._walk(choice, self.init)
        cdef int p, j, lo, hi, threshold, o
        for j in range(self.m):
            self.trial[j] = choice[j]
        for p in range(self.n_players):
            lo = self.pos_start[p]
            hi = self.pos_start[p + 1]
            if lo == hi:
                continue
            threshold = self._rank(p, current)
            if threshold == 0:
                continue
            for j in range(lo, hi):
                self.trial[self.pos_list[j]] = 0
            while True:
                o = self._walk(self.trial, self.init)
                if self._rank(p, o) < threshold:
                    out_player[0] = p
                    out_outcome[0] = o
                    return 1
                if not self._advance(self.trial, lo, hi):
                    break
            for j in range(lo, hi):
                self.trial[self.pos_list[j]] = choice[self.pos_list[j]]
        return 0

    cdef void _load(self, choice, int *buf):
        cdef int k
        for k in range(self.m):
            buf[k] = choice[k]

    def outcome(self, choice, int start):
        cdef int *buf = <int *> malloc((self.m + 1) * sizeof(int))
        cdef int o
        try:
            self._load(choice, buf)
            o = self._walk(buf, start)
        finally:
            free(buf)
        return o

    def find_improvement(self, choice):
        cdef int *buf = <int *> malloc((self.m + 1) * sizeof(int))
        cdef int player = 0, outcome = 0, found, j
        try:
            self._load(choice, buf)
            found = self._improve(buf, &player, &outcome)
            if not found:
                return None
            digits = [self.trial[self.pos_list[j]]
                      for j in range(self.pos_start[player], self.pos_start[player + 1])]
        finally:
            free(buf)
        return player, digits, outcome

    def best_response(self, choice, int player):
        cdef int *buf = <int *> malloc((self.m + 1) * sizeof(int))
        cdef int lo = self.pos_start[player], hi = self.pos_start[player + 1]
        cdef int current, best_rank, best_out, o, r, j
        try:
            self._load(choice, buf)
            current = self._walk(buf, self.init)
            best_out = current
            best_digits = [buf[self.pos_list[j]] for j in range(lo, hi)]
            if lo == hi:
                return best_out, best_digits
            best_rank = self._rank(player, current)
            for j in range(self.m):
                self.trial[j] = buf[j]
            for j in range(lo, hi):
                self.trial[self.pos_list[j]] = 0
            while True:
                o = self._walk(self.trial, self.init)
                r = self._rank(player, o)
                if r < best_rank:
                    best_rank = r
                    best_out = o
                    best_digits = [self.trial[self.pos_list[j]] for j in range(lo, hi)]
                if not self._advance(self.trial, lo, hi):
                    break
        finally:
            free(buf)
        return best_out, best_digits

    def decode(self, index):
        digits = [0] * self.m
        for k in range(self.m - 1, -1, -1):
            index, digits[k] = divmod(index, self.degrees[k])
        return digits

    def scan(self, long long lo, long long hi, bint first_only):
        cdef int *buf = <int *> malloc((self.m + 1) * sizeof(int))
        cdef long long index
        cdef int player = 0, outcome = 0
        found = []
        if lo >= hi:
            free(buf)
            return found
        try:
            self._load(self.decode(lo), buf)
            index = lo
            while index < hi:
                if not self._improve(buf, &player, &outcome):
                    found.append(index)
                    if first_only:
                        break
                index += 1
                self._advance_all(buf)
        finally:
            free(buf)
        return found
