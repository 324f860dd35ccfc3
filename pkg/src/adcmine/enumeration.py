"""Minimal hitting set enumeration, exact and approximate.

mmcs() is the exact baseline: depth-first search over (S, crit, uncov,
cand) with in-place mutation and undo logs, emitting S when uncov
empties.  adc_enum() generalizes it for approximate acceptance: the
base case becomes accept(S) plus an explicit single-removal minimality
check, a skip branch explores never hitting the chosen set (tracked by
canHit flags and pruned by a best-case bound), and redundant operator
variants of a chosen predicate are dropped from the candidate pool.

Enumeration is sequential; all shared inputs are immutable.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import numpy as np

from .approx import (
    ApproxFunction,
    FnKind,
    greedy_removals,
    int_cutoff,
    problematic_count,
)
from .evidence import EvidenceSet
from .predicates import PredicateSpace
from .sampling import Estimate, accept_on_sample, normal_ci_halfwidth


class InternalError(Exception):
    """An invariant the enumerator relies on was violated."""


def mmcs(universe: int, family) -> list[frozenset]:
    """All minimal hitting sets of the family, each exactly once.

    Elements are 0..universe-1.  An empty family has the single minimal
    hitting set {}; a family containing the empty set has none.
    """
    sets = [frozenset(F) for F in family]
    for F in sets:
        if F and (min(F) < 0 or max(F) >= universe):
            raise ValueError("set element outside the universe")
    elem_sets: list[set[int]] = [set() for _ in range(universe)]
    for idx, F in enumerate(sets):
        for e_ in F:
            elem_sets[e_].add(idx)
    uncov = set(range(len(sets)))
    cand = set(range(universe))
    crit: dict[int, set[int]] = {}
    S: list[int] = []
    out: list[frozenset] = []

    def update_crit_uncov(e):
        moved = uncov & elem_sets[e]
        uncov.difference_update(moved)
        crit[e] = set(moved)
        stripped = []
        for u in S:
            rm = crit[u] & elem_sets[e]
            if rm:
                crit[u] -= rm
                stripped.append((u, rm))
        return moved, stripped

    def undo(e, log):
        moved, stripped = log
        uncov.update(moved)
        del crit[e]
        for u, rm in stripped:
            crit[u] |= rm

    def recurse():
        if not uncov:
            out.append(frozenset(S))
            return
        F = sets[min(uncov)]
        C = sorted(cand & F)
        cand.difference_update(C)
        for e in C:
            log = update_crit_uncov(e)
            if all(crit[u] for u in S):
                S.append(e)
                recurse()
                S.pop()
                cand.add(e)
            undo(e, log)
        cand.update(C)

    recurse()
    return out


@dataclass
class EmittedDC:
    """One discovered constraint, in both hitting-set and DC form."""

    hitting_set: tuple[int, ...]
    dc_predicates: tuple[int, ...]
    violations: int          # violating ordered pairs on the scored evidence
    score: float             # value of the approximation function
    sampled: dict | None = None  # p_hat/n/halfwidth/accept when sampling


@dataclass
class EnumStats:
    nodes: int = 0
    emitted: int = 0
    empty_dc_accepted: bool = False


class _Acceptor:
    """Acceptance tests for the enumerator, specialised per function.

    Keeps a running uncovered weight so the pair-fraction tests are
    O(1); the tuple-based functions recompute from the uncovered mask.
    Threshold tests compare integers against exact rational cutoffs.
    """

    def __init__(self, e: EvidenceSet, fn: ApproxFunction, eps: float,
                 sample_alpha: float | None):
        if e.pair_universe == 0:
            raise ValueError("evidence over fewer than 2 rows")
        self.e = e
        self.kind = fn.kind
        self.vios = fn.vios
        self.d_size = fn.d_size
        self.eps = eps
        self.alpha = sample_alpha
        self.mult = e.mult
        self.universe = e.pair_universe
        self.weight = int(e.mult.sum())
        if fn.kind is FnKind.F1:
            self.cutoff = int_cutoff(eps, self.universe)
        else:
            self.cutoff = int_cutoff(eps, fn.d_size)

    def cover(self, classes: np.ndarray) -> None:
        self.weight -= int(self.mult[classes].sum())

    def uncover(self, classes: np.ndarray) -> None:
        self.weight += int(self.mult[classes].sum())

    def _f1_weight_ok(self, w: int) -> bool:
        if self.alpha is None:
            return w <= self.cutoff
        est = Estimate(w / self.universe, self.universe)
        return accept_on_sample(est, self.eps, self.alpha)

    def accept_current(self, uncov: np.ndarray) -> bool:
        if self.kind is FnKind.F1:
            return self._f1_weight_ok(self.weight)
        return self.accept_mask(uncov)

    def accept_without(self, uncov: np.ndarray, crit_row: np.ndarray) -> bool:
        if self.kind is FnKind.F1:
            return self._f1_weight_ok(self.weight + int(self.mult[crit_row].sum()))
        return self.accept_mask(uncov | crit_row)

    def accept_mask(self, mask: np.ndarray) -> bool:
        if self.kind is FnKind.F1:
            return self._f1_weight_ok(int(self.mult[mask].sum()))
        if self.kind is FnKind.F2:
            return problematic_count(self.vios, mask) <= self.cutoff
        return greedy_removals(self.e, self.vios, self.d_size, mask) <= self.cutoff

    def accept_bestcase(self, mask: np.ndarray) -> bool:
        # with sampling active this is intentionally the plain pair
        # fraction: a sound bound, since the sample criterion never
        # accepts a rate above eps
        if self.kind is FnKind.F1:
            return int(self.mult[mask].sum()) <= int_cutoff(self.eps, self.universe)
        return self.accept_mask(mask)

    def emission_fields(self, uncov: np.ndarray):
        w = self.weight
        if self.kind is FnKind.F1:
            score = 1.0 - w / self.universe
        elif self.kind is FnKind.F2:
            score = 1.0 - problematic_count(self.vios, uncov) / self.d_size
        else:
            score = 1.0 - greedy_removals(self.e, self.vios, self.d_size, uncov) / self.d_size
        sampled = None
        if self.alpha is not None:
            p_hat = w / self.universe
            hw = normal_ci_halfwidth(p_hat, self.universe, self.alpha)
            sampled = {
                "p_hat": p_hat,
                "n": self.universe,
                "halfwidth": hw,
                "accept": bool(accept_on_sample(Estimate(p_hat, self.universe),
                                                self.eps, self.alpha)),
            }
        return w, score, sampled


def adc_enum(e: EvidenceSet, space: PredicateSpace, fn: ApproxFunction,
             eps: float, sink, sample_alpha: float | None = None) -> EnumStats:
    """Emit every nontrivial minimal approximately-valid DC exactly once.

    sink receives an EmittedDC per discovery, in discovery order.  When
    sample_alpha is given (evidence built from a sample, pair-fraction
    function only), acceptance and minimality use the sample-side
    criterion and the best-case prune falls back to the plain fraction.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if sample_alpha is not None and fn.kind is not FnKind.F1:
        raise ValueError("sample-side acceptance only applies to the pair fraction")
    m = len(space)
    n_classes = e.n_distinct
    sets = e.sets
    acceptor = _Acceptor(e, fn, eps, sample_alpha)
    stats = EnumStats()

    elem_classes = [np.nonzero(sets[:, p])[0] for p in range(m)]
    uncov = np.ones(n_classes, dtype=bool)
    can_hit = np.ones(n_classes, dtype=bool)
    cand = np.ones(m, dtype=bool)
    crit = np.zeros((m, n_classes), dtype=bool)
    crit_size = np.zeros(m, dtype=np.int64)
    S: list[int] = []
    emitted: set[tuple[int, ...]] = set()

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 2 * (n_classes + m) + 1000))

    def update_crit_uncov(e_id: int):
        ec = elem_classes[e_id]
        moved = ec[uncov[ec]]
        uncov[moved] = False
        crit[e_id, moved] = True
        crit_size[e_id] = moved.shape[0]
        acceptor.cover(moved)
        stripped = []
        for u in S:
            row = crit[u]
            rm = ec[row[ec]]
            if rm.shape[0]:
                row[rm] = False
                crit_size[u] -= rm.shape[0]
                stripped.append((u, rm))
        return moved, stripped

    def undo_crit_uncov(e_id: int, log) -> None:
        moved, stripped = log
        uncov[moved] = True
        crit[e_id, moved] = False
        crit_size[e_id] = 0
        acceptor.uncover(moved)
        for u, rm in stripped:
            crit[u, rm] = True
            crit_size[u] += rm.shape[0]

    def is_minimal() -> bool:
        return not any(acceptor.accept_without(uncov, crit[u]) for u in S)

    def emit() -> None:
        h = tuple(sorted(S))
        if h in emitted:
            raise InternalError(f"hitting set emitted twice: {h}")
        emitted.add(h)
        w, score, sampled = acceptor.emission_fields(uncov)
        dc = tuple(space.dc_order(space.complement_set(h)))
        stats.emitted += 1
        sink(EmittedDC(h, dc, w, score, sampled))

    def recurse() -> None:
        stats.nodes += 1
        if acceptor.accept_current(uncov):
            if not S:
                # empty hitting set accepted: eps admits the empty DC;
                # nothing below can be a nontrivial minimal ADC
                stats.empty_dc_accepted = True
                return
            if is_minimal():
                emit()
                return
            if acceptor.kind is not FnKind.F3_GREEDY:
                # monotone functions: every extension keeps an accepted
                # proper subset, so no descendant can be minimal
                return
        live = uncov & can_hit
        live_idx = np.nonzero(live)[0]
        if live_idx.shape[0] == 0:
            return
        cand_idx = np.nonzero(cand)[0]
        if cand_idx.shape[0]:
            gains = sets[np.ix_(live_idx, cand_idx)].sum(axis=1)
            f_class = int(live_idx[np.argmax(gains)])
        else:
            f_class = int(live_idx[0])
        f_row = sets[f_class]

        # skip branch: commit to never hitting the chosen class
        c_ids = np.nonzero(cand & f_row)[0]
        cand[c_ids] = False
        now_cand = np.nonzero(cand)[0]
        hittable = sets[:, now_cand].any(axis=1) if now_cand.shape[0] else np.zeros(n_classes, bool)
        dead = np.nonzero(uncov & can_hit & ~hittable)[0]
        can_hit[dead] = False
        bestcase = uncov & ~hittable
        if acceptor.accept_bestcase(bestcase):
            recurse()
        can_hit[dead] = True
        cand[c_ids] = True

        # hit branch: add one element of the chosen class
        cand[c_ids] = False
        for e_id in c_ids:
            e_id = int(e_id)
            log = update_crit_uncov(e_id)
            if all(crit_size[u] > 0 for u in S):
                group = [g for g in space.group_members[space.group_of(e_id)]
                         if g != e_id and cand[g]]
                for g in group:
                    cand[g] = False
                S.append(e_id)
                recurse()
                S.pop()
                for g in group:
                    cand[g] = True
                cand[e_id] = True
            undo_crit_uncov(e_id, log)
        cand[c_ids] = True

    recurse()
    return stats


def enumerate_dcs(e: EvidenceSet, space: PredicateSpace, fn: ApproxFunction,
                  eps: float, sample_alpha: float | None = None,
                  sort_output: bool = False):
    """Convenience wrapper collecting emissions into a list; optional
    stable post-sort by (predicate count, ids)."""
    found: list[EmittedDC] = []
    stats = adc_enum(e, space, fn, eps, found.append, sample_alpha)
    if sort_output:
        found.sort(key=lambda d: (len(d.hitting_set), d.hitting_set))
    return found, stats
