"""Trust&Doubt: a caching algorithm driven by predicted cache configurations.

This is the non-lazy simulated algorithm; wrap it in
:class:`~mts_oracle.caching.policies.LazyWrapper` (or use
:func:`trust_doubt`) for the algorithm whose faults are reported.

Arbitrary choices resolve as: pages missing from the predicted cache first
(mandatory when defining predicted evictions), then least recently used,
then lowest page id.  The first phase is treated as warm-up: no page is
stale and no clean-page bookkeeping happens until the cache has been full
at a phase start.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvariantViolation
from .policies import CachePolicy, LazyWrapper


@dataclass
class PhaseStats:
    """Optional per-phase diagnostics (not used by the algorithm)."""

    start: int
    ancient: int
    clean: int = 0
    doubted_redefinitions: int = 0
    doublings: int = 0
    loads: int = 0


class TrustDoubt(CachePolicy):
    name = "trust_doubt"
    lazy = False
    needs_prediction = True

    def __init__(self, debug: bool = False):
        self.debug = debug

    def start(self, k, rng):
        super().start(k, rng)
        self.time = 0
        self.phase = 0
        self.last_used: dict = {}
        self.marked: set = set()
        self.phase_stats: list = [PhaseStats(0, 0)]
        self._reset_phase_sets(set(), set())
        self.warmup = True

    def _reset_phase_sets(self, ancient, stale):
        self.A = ancient
        self.stale = stale
        self.U = set(stale)
        self.M: set = set()
        self.T: set = set()
        self.D: set = set()
        self.C: list = []
        self.p: dict = {}  # clean page -> its predicted eviction
        self.owner: dict = {}  # predicted eviction -> clean page
        self.trusted: dict = {}
        self.threshold: dict = {}
        self.due: dict = {}  # arrival count -> clean pages whose next interval starts there
        self.priority = None

    # -- helpers ------------------------------------------------------------

    def _pick(self, candidates, predicted):
        """Prefer pages outside the predicted cache, then LRU, then lowest id."""
        last = self.last_used
        return min(candidates, key=lambda q: (q in predicted, last.get(q, -1), q))

    def _sample_priorities(self):
        order = sorted(self.U)
        self.rng.shuffle(order)
        self.priority = {page: rank for rank, page in enumerate(order)}

    def _assign(self, q, page):
        self.p[q] = page
        self.owner[page] = q

    def check_invariants(self):
        """Cache and bookkeeping properties that hold before a request with no ancient pages."""
        UM = self.U | self.M
        if not self.cache <= UM:
            raise InvariantViolation("cache holds a page outside U and M")
        if not self.M <= self.cache:
            raise InvariantViolation("a marked non-trusted page is missing from the cache")
        if len(UM) != self.k + len(self.D):
            raise InvariantViolation(f"|U ∪ M| = {len(UM)} but k + |D| = {self.k + len(self.D)}")
        if self.T & self.cache:
            raise InvariantViolation("a trusted eviction is still cached")
        if not self.D <= UM:
            raise InvariantViolation("doubted eviction outside U ∪ M")
        pq = {self.p[q] for q in self.C}
        if pq != self.T | self.D or self.T & self.D:
            raise InvariantViolation("T and D do not partition the predicted evictions")

    # -- main step ------------------------------------------------------------

    def request(self, r, predicted=None):
        if predicted is None:
            raise ValueError("Trust&Doubt needs the predicted configuration")
        k = self.k
        self.time += 1
        cache = self.cache

        if len(self.marked) == k and r not in self.marked:
            ancient = cache - self.marked
            self._reset_phase_sets(ancient, cache - ancient)
            self.marked = set()
            self.phase += 1
            self.warmup = False
            self.phase_stats.append(PhaseStats(self.time - 1, len(ancient)))
        elif self.debug and not self.A and not self.warmup:
            self.check_invariants()

        is_arrival = r not in self.marked
        if is_arrival:
            self.marked.add(r)
            if r not in self.T:
                self.M.add(r)
            self.U.discard(r)

        loads = 0
        if self.A:
            if r in self.A:
                self.A.remove(r)
            elif r not in cache:
                victim = self._pick(self.A, predicted)
                self.A.remove(victim)
                cache.remove(victim)
                cache.add(r)
                loads += 1
        else:
            if self.priority is None:
                self._sample_priorities()
            prio = self.priority
            # step 1
            if r not in cache:
                if len(cache) >= k:
                    resident = [q for q in self.U if q in cache]
                    if not resident:
                        raise InvariantViolation("no unmarked cached page to evict")
                    cache.remove(min(resident, key=prio.__getitem__))
                cache.add(r)
                loads += 1
            if not self.warmup:
                loads += self._clean_steps(r, is_arrival, predicted)

        self.last_used[r] = self.time
        self.phase_stats[-1].loads += loads
        if self.debug and self.T & cache:
            raise InvariantViolation("a trusted eviction is cached after the request")
        return loads

    def _clean_steps(self, r, is_arrival, predicted):
        stats = self.phase_stats[-1]
        loads = 0
        # step 2
        if is_arrival and r not in self.stale:
            cands = (self.U | self.M) - self.D - predicted
            if not cands:
                raise InvariantViolation("no candidate for a clean page's predicted eviction")
            pr = self._pick(cands, predicted)
            self.C.append(r)
            self._assign(r, pr)
            self.trusted[r] = True
            self.T.add(pr)
            self.U.discard(pr)
            self.M.discard(pr)
            self.threshold[r] = 1
            self.due.setdefault(len(self.marked), []).append(r)
            stats.clean += 1
        # step 3
        q = self.owner.get(r)
        if q is not None and self.p.get(q) == r:
            del self.owner[r]
            self.D.discard(r)
            self.T.discard(r)
            (self.M if r in self.marked else self.U).add(r)
            cands = (self.U | self.M) - self.D - predicted
            if not cands:
                raise InvariantViolation("no candidate to redefine a predicted eviction")
            new = self._pick(cands, predicted)
            self._assign(q, new)
            self.trusted[q] = False
            self.D.add(new)
            stats.doubted_redefinitions += 1
        # step 4
        if is_arrival:
            n_marked = len(self.marked)
            starting = self.due.pop(n_marked, ())
            for q in sorted(starting, key=self.C.index) if len(starting) > 1 else starting:
                pq = self.p[q]
                if not self.trusted[q]:
                    self.threshold[q] *= 2
                    self.trusted[q] = True
                    self.T.add(pq)
                    self.D.discard(pq)
                    self.U.discard(pq)
                    self.M.discard(pq)
                    stats.doublings += 1
                self.due.setdefault(n_marked + self.threshold[q], []).append(q)
                if pq in self.cache:
                    missing = [u for u in self.U if u not in self.cache]
                    if not missing:
                        raise InvariantViolation("no missing unmarked page to load")
                    self.cache.remove(pq)
                    self.cache.add(max(missing, key=self.priority.__getitem__))
                    loads += 1
        return loads

    @property
    def clean_per_phase(self) -> list:
        return [s.clean for s in self.phase_stats]


def trust_doubt(debug: bool = False) -> LazyWrapper:
    """The lazy Trust&Doubt policy whose faults are reported."""
    w = LazyWrapper(TrustDoubt(debug=debug))
    w.name = "trust_doubt"
    return w
