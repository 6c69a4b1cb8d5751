"""Pure-Python event engine for the two-type competition process.

This is the reference implementation; the optional compiled twin
(``escape_lab._engine``) replays the identical algorithm and the
identical random-number draws, so both backends produce the same event
sequence for the same seeds.

Algorithm notes:

* Two categories of active directed edges are kept in append/swap-remove
  arrays: growth edges (type-1 source -> vacant target, rate 1 each) and
  takeover edges (type-2 source -> non-type-2 target, rate ``lam``
  each).  Entries are not eagerly deleted when a flip elsewhere
  invalidates them; an invalid entry picked by the sampler is discarded
  as a null event and the category clock is redrawn.  This lazy scheme
  is exact: states never revert, so an entry's validity only ever
  decreases, a stale entry contributes no real transition, and the
  accepted picks are uniform over the currently valid edges.
* Each category has its own splitmix64 stream, and a category's array
  length changes only during its own picks (a growth flip never appends
  or removes takeover entries, and vice versa; it can only make them
  stale).  Next-event times are therefore persisted absolute times,
  redrawn only after the owning category's pick.  A useful consequence:
  takeover bookkeeping (append counts, entry validity, pick indices) is
  a function of the takeover history alone -- whether a target is vacant
  or type 1 affects neither -- so for a fixed takeover seed the type-2
  trajectory is identical whatever type 1 does, realising per seed the
  model property that the type-2 marginal is an autonomous rate-``lam``
  growth process.
* Vertices are dense integer indices (root = 0) with lazily materialised
  children in a flat slot table of width d+1; the root uses all d+1
  slots, other vertices the first d plus their parent link.  Vacant
  vertices are only materialised when they join some edge's
  neighbourhood, so memory tracks the occupied region, not the ball.
"""

from __future__ import annotations

import math

from .rng import GOLDEN, MASK64, mix64

_INV_2_53 = 1.0 / 9007199254740992.0
_INF = math.inf

VACANT = 0
ONE = 1
TWO = 2


class EventEngine:
    """Event-driven core for one replica; deterministic given its seeds."""

    def __init__(self, d, lam, a0, b0, seed_growth, seed_takeover):
        self.d = d
        self.lam = lam
        self._s_growth = seed_growth & MASK64
        self._s_takeover = seed_takeover & MASK64

        self.state = bytearray(1)
        self.parent = [-1]
        self.branch = [-1]
        self.level = [0]
        self.children = [-1] * (d + 1)

        a_idx = [self._insert(p) for p in a0]
        b_idx = [self._insert(p) for p in b0]
        for i in a_idx:
            self.state[i] = ONE
        for i in b_idx:
            self.state[i] = TWO

        self.a_src: list[int] = []
        self.a_tgt: list[int] = []
        self.b_src: list[int] = []
        self.b_tgt: list[int] = []
        for i in a_idx:
            for j in self._neighbors(i):
                if self.state[j] == VACANT:
                    self.a_src.append(i)
                    self.a_tgt.append(j)
        for i in b_idx:
            for j in self._neighbors(i):
                if self.state[j] != TWO:
                    self.b_src.append(i)
                    self.b_tgt.append(j)

        self.a_exact = len(self.a_src)
        self.b_exact = len(self.b_src)
        self.clock = 0.0
        self.event_count = 0
        self.n_type1 = len(a_idx)
        self.n_type2 = len(b_idx)
        self.max_level_reached = max((self.level[i] for i in a_idx), default=-1)
        self.extinction_time = 0.0 if self.n_type1 == 0 else -1.0

        # Fixed draw order at start-up: growth clock first, then takeover.
        self.t_growth = self._draw_growth(0.0)
        self.t_takeover = self._draw_takeover(0.0)

    # -- vertex table -------------------------------------------------

    def _insert(self, path):
        i = 0
        for br in path:
            i = self._child(i, br)
        return i

    def _child(self, i, br):
        d1 = self.d + 1
        slot = i * d1 + br
        j = self.children[slot]
        if j < 0:
            j = len(self.parent)
            self.children[slot] = j
            self.parent.append(i)
            self.branch.append(br)
            self.level.append(self.level[i] + 1)
            self.state.append(VACANT)
            self.children.extend([-1] * d1)
        return j

    def _neighbors(self, i):
        """Neighbour indices in canonical order: parent first, then
        children by ascending branch (the root has d+1 children)."""
        if i == 0:
            out = []
            nb = self.d + 1
        else:
            out = [self.parent[i]]
            nb = self.d
        for br in range(nb):
            out.append(self._child(i, br))
        return out

    # -- per-category splitmix64 streams ------------------------------

    def _u64_growth(self):
        self._s_growth = (self._s_growth + GOLDEN) & MASK64
        return mix64(self._s_growth)

    def _u64_takeover(self):
        self._s_takeover = (self._s_takeover + GOLDEN) & MASK64
        return mix64(self._s_takeover)

    def _draw_growth(self, now):
        n = len(self.a_src)
        if n == 0:
            return _INF
        u = (self._u64_growth() >> 11) * _INV_2_53
        return now - math.log(1.0 - u) / n

    def _draw_takeover(self, now):
        n = len(self.b_src)
        if n == 0:
            return _INF
        u = (self._u64_takeover() >> 11) * _INV_2_53
        return now - math.log(1.0 - u) / (self.lam * n)

    # -- event processing ---------------------------------------------

    def _attempt(self):
        """Process one clock event; returns an event record ``(t, vertex,
        old_state, new_state)`` or None if the pick was stale (null)."""
        if self.t_growth <= self.t_takeover:
            return self._attempt_growth()
        return self._attempt_takeover()

    def _attempt_growth(self):
        t = self.t_growth
        self.clock = t
        n = len(self.a_src)
        idx = self._u64_growth() % n
        src = self.a_src[idx]
        tgt = self.a_tgt[idx]
        last = n - 1
        self.a_src[idx] = self.a_src[last]
        self.a_tgt[idx] = self.a_tgt[last]
        self.a_src.pop()
        self.a_tgt.pop()
        record = None
        if self.state[src] == ONE and self.state[tgt] == VACANT:
            nbrs = self._neighbors(tgt)
            n_vac = 0
            n_one = 0
            for j in nbrs:
                s = self.state[j]
                if s == VACANT:
                    n_vac += 1
                elif s == ONE:
                    n_one += 1
            self.state[tgt] = ONE
            self.n_type1 += 1
            self.a_exact += n_vac - n_one
            if self.level[tgt] > self.max_level_reached:
                self.max_level_reached = self.level[tgt]
            for j in nbrs:
                if self.state[j] == VACANT:
                    self.a_src.append(tgt)
                    self.a_tgt.append(j)
            self.event_count += 1
            record = (t, tgt, VACANT, ONE)
        self.t_growth = self._draw_growth(t)
        return record

    def _attempt_takeover(self):
        t = self.t_takeover
        self.clock = t
        n = len(self.b_src)
        idx = self._u64_takeover() % n
        tgt = self.b_tgt[idx]
        last = n - 1
        self.b_src[idx] = self.b_src[last]
        self.b_tgt[idx] = self.b_tgt[last]
        self.b_src.pop()
        self.b_tgt.pop()
        record = None
        if self.state[tgt] != TWO:
            old = self.state[tgt]
            nbrs = self._neighbors(tgt)
            n_vac = 0
            n_one = 0
            n_two = 0
            for j in nbrs:
                s = self.state[j]
                if s == VACANT:
                    n_vac += 1
                elif s == ONE:
                    n_one += 1
                else:
                    n_two += 1
            self.state[tgt] = TWO
            self.n_type2 += 1
            self.b_exact += (len(nbrs) - n_two) - n_two
            if old == ONE:
                self.n_type1 -= 1
                self.a_exact -= n_vac
                if self.n_type1 == 0:
                    self.extinction_time = t
            else:
                self.a_exact -= n_one
            for j in nbrs:
                if self.state[j] != TWO:
                    self.b_src.append(tgt)
                    self.b_tgt.append(j)
            self.event_count += 1
            record = (t, tgt, old, TWO)
        self.t_takeover = self._draw_takeover(t)
        return record

    def step(self):
        """Advance to the next real event; returns its record, or None if
        no further event is possible (both categories empty)."""
        while True:
            if self.t_growth == _INF and self.t_takeover == _INF:
                return None
            rec = self._attempt()
            if rec is not None:
                return rec

    def run_until(self, max_time, max_level, max_events, halt_on_empty=True):
        """Fire events until a stopping condition; returns the reason:
        'extinct', 'events', 'level', 'time', or 'frozen'.

        ``max_level`` refers to the highest level ever occupied by type 1;
        ``max_events`` counts real events.  After a 'time' return the state
        is exactly the state at ``max_time`` (no event beyond it fired).
        """
        while True:
            if halt_on_empty and self.n_type1 == 0:
                return "extinct"
            if self.event_count >= max_events:
                return "events"
            if self.max_level_reached >= max_level:
                return "level"
            t_next = self.t_growth
            if self.t_takeover < t_next:
                t_next = self.t_takeover
            if t_next == _INF:
                return "frozen"
            if t_next > max_time:
                # Park the clock at the bound: the state really is the
                # time-max_time state (no event fires in between), and
                # pending event times are absolute, so this is safe.
                if max_time > self.clock:
                    self.clock = max_time
                return "time"
            self._attempt()

    # -- inspection ---------------------------------------------------

    def pending_edges(self):
        """Current array lengths (valid + stale) per category."""
        return len(self.a_src), len(self.b_src)

    def recompute_tallies(self):
        """Recount both exact active-edge tallies from the vertex table
        (unmaterialised children count as vacant neighbours)."""
        d = self.d
        d1 = d + 1
        a = 0
        b = 0
        for i in range(len(self.parent)):
            s = self.state[i]
            if s == VACANT:
                continue
            n_occ = 0
            n_two = 0
            base = i * d1
            nb = d1 if i == 0 else d
            for br in range(nb):
                j = self.children[base + br]
                if j >= 0:
                    sj = self.state[j]
                    if sj != VACANT:
                        n_occ += 1
                    if sj == TWO:
                        n_two += 1
            if i != 0:
                sj = self.state[self.parent[i]]
                if sj != VACANT:
                    n_occ += 1
                if sj == TWO:
                    n_two += 1
            if s == ONE:
                a += d1 - n_occ
            else:
                b += d1 - n_two
        return a, b

    def vertex_count(self):
        return len(self.parent)

    def vertex_path(self, i):
        out = []
        while i != 0:
            out.append(self.branch[i])
            i = self.parent[i]
        out.reverse()
        return tuple(out)

    def occupancy_items(self):
        """All non-vacant vertices as (path, state) pairs."""
        return [
            (self.vertex_path(i), s) for i, s in enumerate(self.state) if s != VACANT
        ]

    def level_counts(self, code):
        """Occupied-level histogram {level: count} for one state code."""
        out = {}
        levels = self.level
        for i, s in enumerate(self.state):
            if s == code:
                lev = levels[i]
                out[lev] = out.get(lev, 0) + 1
        return out
