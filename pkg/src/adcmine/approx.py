"""Scoring functions deciding whether a candidate constraint holds
approximately, all phrased in hitting-set space: the argument h is the
complement set of the DC's predicates, and an evidence set is violating
iff it has an empty intersection with h.

Three scorings: satisfied-pair fraction (f1), non-problematic-tuple
fraction (f2), and a greedy surrogate for the cardinality-repair
fraction (f3), plus the 2-epsilon pre-filter that links them and an
exhaustive repair oracle for tiny inputs.

Threshold comparisons reduce to integer comparisons against
floor(eps * denominator) computed in exact rational arithmetic, so
acceptance at the boundary is never lost to float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .dataset import Dataset
from .evidence import EvidenceSet, Vios, sat, uncovered_mask, uncovered_weight
from .predicates import PredicateSpace


def int_cutoff(eps: float, denominator: int) -> int:
    """Largest integer k with k/denominator <= eps, exactly."""
    return int(Fraction(eps) * denominator // 1)


class FnKind(Enum):
    F1 = "f1"
    F2 = "f2"
    F3_GREEDY = "f3"


@dataclass(frozen=True)
class ApproxFunction:
    """A scoring function bundled with the side tables it needs.

    The tuple-based functions require per-set violation lists and the
    source row count; the pair fraction needs neither.
    """

    kind: FnKind
    d_size: int
    vios: Vios | None = None

    def __post_init__(self):
        if self.kind is not FnKind.F1 and (self.vios is None or not self.vios.is_available):
            raise ValueError(f"{self.kind.value} requires violation lists")

    @classmethod
    def f1(cls, d_size: int) -> "ApproxFunction":
        return cls(FnKind.F1, d_size)

    @classmethod
    def f2(cls, vios: Vios, d_size: int) -> "ApproxFunction":
        return cls(FnKind.F2, d_size, vios)

    @classmethod
    def f3_greedy(cls, vios: Vios, d_size: int) -> "ApproxFunction":
        return cls(FnKind.F3_GREEDY, d_size, vios)

    def score(self, e: EvidenceSet, h) -> float:
        if self.kind is FnKind.F1:
            return f1_score(e, h)
        if self.kind is FnKind.F2:
            return f2_score(e, self.vios, self.d_size, h)
        return 1.0 - greedy_removals(e, self.vios, self.d_size,
                                     uncovered_mask(e, h)) / self.d_size

    def accepts(self, e: EvidenceSet, h, eps: float) -> bool:
        if eps < 0:
            raise ValueError("eps must be >= 0")
        if self.kind is FnKind.F1:
            return uncovered_weight(e, h) <= int_cutoff(eps, e.pair_universe)
        if self.kind is FnKind.F2:
            uncov = uncovered_mask(e, h)
            return problematic_count(self.vios, uncov) <= int_cutoff(eps, self.d_size)
        return greedy_f3_accept(self.d_size, e, self.vios, h, eps)[0]


def f1_score(e: EvidenceSet, h) -> float:
    """Fraction of ordered tuple pairs satisfying the DC: 1 - violation rate."""
    if e.pair_universe == 0:
        raise ValueError("pair universe is empty; need at least 2 rows")
    return 1.0 - uncovered_weight(e, h) / e.pair_universe


def problematic_count(v: Vios, uncov: np.ndarray) -> int:
    """Tuples involved in at least one violating pair."""
    if not v.is_available:
        raise ValueError("Vios not built; rebuild evidence with with_vios=True")
    sel = np.repeat(uncov, np.diff(v.indptr))
    return int(np.unique(v.tuple_ids[sel]).shape[0])


def f2_score(e: EvidenceSet, v: Vios, n_tuples: int, h) -> float:
    """Fraction of tuples not involved in any violating pair."""
    if n_tuples < 1:
        raise ValueError("need at least one tuple")
    return 1.0 - problematic_count(v, uncovered_mask(e, h)) / n_tuples


def greedy_removals(e: EvidenceSet, v: Vios, d_size: int, uncov: np.ndarray) -> int:
    """Size of the greedy repair set: take tuples by descending
    violation involvement v(t) (ties to the lower id) until the running
    sum reaches the violating-pair count u."""
    u = int(e.mult[uncov].sum())
    if u == 0:
        return 0
    if not v.is_available:
        raise ValueError("Vios not built; rebuild evidence with with_vios=True")
    sel = np.repeat(uncov, np.diff(v.indptr))
    vt = np.bincount(
        v.tuple_ids[sel], weights=v.counts[sel].astype(np.float64), minlength=d_size
    ).astype(np.int64)
    order = np.lexsort((np.arange(d_size), -vt))
    c = np.cumsum(vt[order])
    return int(np.searchsorted(c, u, side="left")) + 1


def greedy_f3_accept(d_size: int, e: EvidenceSet, v: Vios, h, eps: float):
    """Greedy repair decision: (accept, removal count)."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    r = greedy_removals(e, v, d_size, uncovered_mask(e, h))
    return r <= int_cutoff(eps, d_size), r


def prefilter_2eps(e: EvidenceSet, h, eps: float) -> bool:
    """True iff the violation rate is within 2*eps.  A false result
    proves the repair and problematic-tuple scores cannot reach 1-eps,
    so the caller may skip them."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return uncovered_weight(e, h) <= int_cutoff(2 * Fraction(eps), e.pair_universe)


def exact_f3_removals(d: Dataset, space: PredicateSpace, h, oracle_limit: int = 16) -> int:
    """Minimum number of tuples whose removal eliminates every violating
    ordered pair (exhaustive vertex-cover search; tiny inputs only)."""
    if d.n_rows > oracle_limit:
        raise ValueError(f"exact repair oracle limited to {oracle_limit} rows")
    hset = set(int(x) for x in h)
    edges = []
    for i in range(d.n_rows):
        for j in range(d.n_rows):
            if i != j and not (hset & sat(d, space, i, j)):
                edges.append((i, j))
    if not edges:
        return 0
    involved = sorted({t for e_ in edges for t in e_})
    from itertools import combinations
    for r in range(1, len(involved) + 1):
        for cover in combinations(involved, r):
            cs = set(cover)
            if all(i in cs or j in cs for i, j in edges):
                return r
    return len(involved)


def exact_f3_bruteforce(d: Dataset, space: PredicateSpace, h, oracle_limit: int = 16) -> float:
    """Largest violation-free sub-instance fraction |D'|/|D|."""
    if d.n_rows == 0:
        raise ValueError("empty dataset")
    r = exact_f3_removals(d, space, h, oracle_limit)
    return (d.n_rows - r) / d.n_rows
