# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# distutils: language = c++
"""Compiled twin of the pure-Python event engine.

Replays the identical algorithm and the identical splitmix64 draw
sequence as ``escape_lab._engine_py.EventEngine`` (see that module for
the algorithm notes), so both backends produce the same events for the
same seeds.  The selector in ``escape_lab.engine`` prefers this backend
when the extension built successfully.
"""

from libc.math cimport log, INFINITY
from libcpp.vector cimport vector

ctypedef unsigned long long u64

cdef u64 GOLDEN = 0x9E3779B97F4A7C15ULL
cdef u64 MIX_A = 0xBF58476D1CE4E5B9ULL
cdef u64 MIX_B = 0x94D049BB133111EBULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0

cdef char VACANT = 0
cdef char ONE = 1
cdef char TWO = 2


cdef inline u64 mix64(u64 z) nogil:
    z ^= z >> 30
    z *= MIX_A
    z ^= z >> 27
    z *= MIX_B
    z ^= z >> 31
    return z


cdef class EventEngine:
    """Event-driven core for one replica; deterministic given its seeds."""

    cdef public int d
    cdef public double lam
    cdef u64 s_growth
    cdef u64 s_takeover
    cdef vector[char] state
    cdef vector[int] parent
    cdef vector[int] branch
    cdef vector[int] level
    cdef vector[int] children
    cdef vector[int] a_src
    cdef vector[int] a_tgt
    cdef vector[int] b_src
    cdef vector[int] b_tgt
    cdef vector[int] nbr_buf
    cdef public double clock
    cdef public long long event_count
    cdef public long long n_type1
    cdef public long long n_type2
    cdef public int max_level_reached
    cdef public double extinction_time
    cdef public long long a_exact
    cdef public long long b_exact
    cdef public double t_growth
    cdef public double t_takeover

    def __init__(self, int d, double lam, a0, b0, seed_growth, seed_takeover):
        cdef int i, br, lev
        self.d = d
        self.lam = lam
        self.s_growth = <u64> (seed_growth & 0xFFFFFFFFFFFFFFFF)
        self.s_takeover = <u64> (seed_takeover & 0xFFFFFFFFFFFFFFFF)

        self.state.push_back(VACANT)
        self.parent.push_back(-1)
        self.branch.push_back(-1)
        self.level.push_back(0)
        for br in range(d + 1):
            self.children.push_back(-1)

        a_idx = []
        b_idx = []
        for path in a0:
            i = 0
            for step in path:
                i = self._materialize(i, <int> step)
            a_idx.append(i)
        for path in b0:
            i = 0
            for step in path:
                i = self._materialize(i, <int> step)
            b_idx.append(i)
        for i in a_idx:
            self.state[i] = ONE
        for i in b_idx:
            self.state[i] = TWO

        cdef size_t k
        for i in a_idx:
            self._fill_neighbors(i)
            for k in range(self.nbr_buf.size()):
                if self.state[self.nbr_buf[k]] == VACANT:
                    self.a_src.push_back(i)
                    self.a_tgt.push_back(self.nbr_buf[k])
        for i in b_idx:
            self._fill_neighbors(i)
            for k in range(self.nbr_buf.size()):
                if self.state[self.nbr_buf[k]] != TWO:
                    self.b_src.push_back(i)
                    self.b_tgt.push_back(self.nbr_buf[k])

        self.a_exact = <long long> self.a_src.size()
        self.b_exact = <long long> self.b_src.size()
        self.clock = 0.0
        self.event_count = 0
        self.n_type1 = len(a_idx)
        self.n_type2 = len(b_idx)
        self.max_level_reached = -1
        for i in a_idx:
            lev = self.level[i]
            if lev > self.max_level_reached:
                self.max_level_reached = lev
        self.extinction_time = 0.0 if self.n_type1 == 0 else -1.0

        # Fixed draw order at start-up: growth clock first, then takeover.
        self.t_growth = self._draw_growth(0.0)
        self.t_takeover = self._draw_takeover(0.0)

    # -- vertex table -------------------------------------------------

    cdef int _materialize(self, int i, int br):
        cdef int d1 = self.d + 1
        cdef size_t slot = (<size_t> i) * d1 + br
        cdef int j = self.children[slot]
        cdef int k
        if j < 0:
            j = <int> self.parent.size()
            self.children[slot] = j
            self.parent.push_back(i)
            self.branch.push_back(br)
            self.level.push_back(self.level[i] + 1)
            self.state.push_back(VACANT)
            for k in range(d1):
                self.children.push_back(-1)
        return j

    cdef void _fill_neighbors(self, int i):
        cdef int nb, br
        self.nbr_buf.clear()
        if i == 0:
            nb = self.d + 1
        else:
            self.nbr_buf.push_back(self.parent[i])
            nb = self.d
        for br in range(nb):
            self.nbr_buf.push_back(self._materialize(i, br))

    # -- per-category splitmix64 streams ------------------------------

    cdef u64 _u64_growth(self):
        self.s_growth += GOLDEN
        return mix64(self.s_growth)

    cdef u64 _u64_takeover(self):
        self.s_takeover += GOLDEN
        return mix64(self.s_takeover)

    cdef double _draw_growth(self, double now):
        cdef size_t n = self.a_src.size()
        cdef double u
        if n == 0:
            return INFINITY
        u = <double> (self._u64_growth() >> 11) * INV_2_53
        return now - log(1.0 - u) / <double> n

    cdef double _draw_takeover(self, double now):
        cdef size_t n = self.b_src.size()
        cdef double u
        if n == 0:
            return INFINITY
        u = <double> (self._u64_takeover() >> 11) * INV_2_53
        return now - log(1.0 - u) / (self.lam * <double> n)

    # -- event processing ---------------------------------------------

    cdef int _attempt_growth(self):
        """Returns 1 if a real event fired (recorded in _last_*), else 0."""
        cdef double t = self.t_growth
        cdef size_t n = self.a_src.size()
        cdef size_t idx = <size_t> (self._u64_growth() % <u64> n)
        cdef int src = self.a_src[idx]
        cdef int tgt = self.a_tgt[idx]
        cdef size_t last = n - 1
        cdef int fired = 0
        cdef int n_vac, n_one, j
        cdef size_t k
        self.clock = t
        self.a_src[idx] = self.a_src[last]
        self.a_tgt[idx] = self.a_tgt[last]
        self.a_src.pop_back()
        self.a_tgt.pop_back()
        if self.state[src] == ONE and self.state[tgt] == VACANT:
            self._fill_neighbors(tgt)
            n_vac = 0
            n_one = 0
            for k in range(self.nbr_buf.size()):
                j = self.nbr_buf[k]
                if self.state[j] == VACANT:
                    n_vac += 1
                elif self.state[j] == ONE:
                    n_one += 1
            self.state[tgt] = ONE
            self.n_type1 += 1
            self.a_exact += n_vac - n_one
            if self.level[tgt] > self.max_level_reached:
                self.max_level_reached = self.level[tgt]
            for k in range(self.nbr_buf.size()):
                j = self.nbr_buf[k]
                if self.state[j] == VACANT:
                    self.a_src.push_back(tgt)
                    self.a_tgt.push_back(j)
            self.event_count += 1
            self._last_t = t
            self._last_vertex = tgt
            self._last_old = VACANT
            self._last_new = ONE
            fired = 1
        self.t_growth = self._draw_growth(t)
        return fired

    cdef int _attempt_takeover(self):
        cdef double t = self.t_takeover
        cdef size_t n = self.b_src.size()
        cdef size_t idx = <size_t> (self._u64_takeover() % <u64> n)
        cdef int tgt = self.b_tgt[idx]
        cdef size_t last = n - 1
        cdef int fired = 0
        cdef char old
        cdef int n_vac, n_one, n_two, j
        cdef size_t k
        self.clock = t
        self.b_src[idx] = self.b_src[last]
        self.b_tgt[idx] = self.b_tgt[last]
        self.b_src.pop_back()
        self.b_tgt.pop_back()
        if self.state[tgt] != TWO:
            old = self.state[tgt]
            self._fill_neighbors(tgt)
            n_vac = 0
            n_one = 0
            n_two = 0
            for k in range(self.nbr_buf.size()):
                j = self.nbr_buf[k]
                if self.state[j] == VACANT:
                    n_vac += 1
                elif self.state[j] == ONE:
                    n_one += 1
                else:
                    n_two += 1
            self.state[tgt] = TWO
            self.n_type2 += 1
            self.b_exact += (<long long> self.nbr_buf.size() - n_two) - n_two
            if old == ONE:
                self.n_type1 -= 1
                self.a_exact -= n_vac
                if self.n_type1 == 0:
                    self.extinction_time = t
            else:
                self.a_exact -= n_one
            for k in range(self.nbr_buf.size()):
                j = self.nbr_buf[k]
                if self.state[j] != TWO:
                    self.b_src.push_back(tgt)
                    self.b_tgt.push_back(j)
            self.event_count += 1
            self._last_t = t
            self._last_vertex = tgt
            self._last_old = old
            self._last_new = TWO
            fired = 1
        self.t_takeover = self._draw_takeover(t)
        return fired

    cdef double _last_t
    cdef int _last_vertex
    cdef char _last_old
    cdef char _last_new

    cdef int _attempt(self):
        if self.t_growth <= self.t_takeover:
            return self._attempt_growth()
        return self._attempt_takeover()

    def step(self):
        """Advance to the next real event; returns its record ``(t, vertex,
        old_state, new_state)`` or None if no further event is possible."""
        while True:
            if self.t_growth == INFINITY and self.t_takeover == INFINITY:
                return None
            if self._attempt():
                return (
                    self._last_t,
                    self._last_vertex,
                    int(self._last_old),
                    int(self._last_new),
                )

    def run_until(self, double max_time, long max_level, long long max_events,
                  bint halt_on_empty=True):
        """Fire events until a stopping condition; returns the reason:
        'extinct', 'events', 'level', 'time', or 'frozen'."""
        cdef double t_next
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
            if t_next == INFINITY:
                return "frozen"
            if t_next > max_time:
                # Park the clock at the bound: no event fires in between
                # and pending event times are absolute, so this is safe.
                if max_time > self.clock:
                    self.clock = max_time
                return "time"
            self._attempt()

    # -- inspection ---------------------------------------------------

    def pending_edges(self):
        """Current array lengths (valid + stale) per category."""
        return (<long long> self.a_src.size(), <long long> self.b_src.size())

    def recompute_tallies(self):
        """Recount both exact active-edge tallies from the vertex table
        (unmaterialised children count as vacant neighbours)."""
        cdef int d = self.d
        cdef int d1 = d + 1
        cdef long long a = 0
        cdef long long b = 0
        cdef size_t i
        cdef int n_occ, n_two, nb, br, j
        cdef size_t base
        cdef char s, sj
        for i in range(self.parent.size()):
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
        return <long long> self.parent.size()

    def vertex_path(self, int i):
        out = []
        while i != 0:
            out.append(self.branch[i])
            i = self.parent[i]
        out.reverse()
        return tuple(out)

    def occupancy_items(self):
        """All non-vacant vertices as (path, state) pairs."""
        cdef size_t i
        out = []
        for i in range(self.parent.size()):
            if self.state[i] != VACANT:
                out.append((self.vertex_path(<int> i), int(self.state[i])))
        return out

    def level_counts(self, int code):
        """Occupied-level histogram {level: count} for one state code."""
        cdef size_t i
        out = {}
        for i in range(self.parent.size()):
            if self.state[i] == code:
                lev = self.level[i]
                out[lev] = out.get(lev, 0) + 1
        return out
