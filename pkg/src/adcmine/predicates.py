"""Predicate space: comparison atoms over column pairs.

Predicates come in two shapes: cross-tuple atoms t[A] op t'[B] and
same-tuple atoms t[A] op t[B] (evaluated on the first tuple of an
ordered pair).  Numeric column pairs admit all six comparison
operators, string pairs only equality and inequality.  Predicate ids
are dense and deterministic: sorted by (pattern, left, right, op).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .dataset import ColumnKind, Dataset


class Op(IntEnum):
    EQ = 0
    NEQ = 1
    GT = 2
    LT = 3
    GEQ = 4
    LEQ = 5


OP_SYMBOL = {Op.EQ: "=", Op.NEQ: "!=", Op.GT: ">", Op.LT: "<", Op.GEQ: ">=", Op.LEQ: "<="}

# complement pairs: = / !=, > / <=, < / >=  (an involution)
OP_COMPLEMENT = {Op.EQ: Op.NEQ, Op.NEQ: Op.EQ, Op.GT: Op.LEQ, Op.LEQ: Op.GT, Op.LT: Op.GEQ, Op.GEQ: Op.LT}

STRING_OPS = (Op.EQ, Op.NEQ)
NUMERIC_OPS = (Op.EQ, Op.NEQ, Op.GT, Op.LT, Op.GEQ, Op.LEQ)


class Pattern(IntEnum):
    CROSS_TUPLE = 0  # t[A] op t'[B]
    SAME_TUPLE = 1   # t[A] op t[B], first tuple of the ordered pair


@dataclass(frozen=True)
class Predicate:
    pattern: Pattern
    left: int
    right: int
    op: Op

    def sort_key(self):
        return (int(self.pattern), self.left, self.right, int(self.op))


class PredicateSpace:
    """Immutable indexed predicate collection with complement and
    redundancy-group lookups.

    A redundancy group is the set of predicates sharing
    (pattern, left, right) and differing only in the operator.
    """

    def __init__(self, predicates: list[Predicate], column_names: list[str]):
        self.predicates = predicates
        self.column_names = column_names
        self._ids = {p: i for i, p in enumerate(predicates)}
        comp = np.empty(len(predicates), dtype=np.int32)
        for i, p in enumerate(predicates):
            comp[i] = self._ids[Predicate(p.pattern, p.left, p.right, OP_COMPLEMENT[p.op])]
        self.complement_ids = comp
        group_keys: dict[tuple, int] = {}
        gid = np.empty(len(predicates), dtype=np.int32)
        members: list[list[int]] = []
        for i, p in enumerate(predicates):
            key = (int(p.pattern), p.left, p.right)
            g = group_keys.setdefault(key, len(members))
            if g == len(members):
                members.append([])
            members[g].append(i)
            gid[i] = g
        self.group_ids = gid
        self.group_members = [tuple(m) for m in members]

    def __len__(self) -> int:
        return len(self.predicates)

    def id_of(self, pred: Predicate) -> int:
        return self._ids[pred]

    def complement(self, pid: int) -> int:
        return int(self.complement_ids[pid])

    def complement_set(self, ids) -> frozenset:
        return frozenset(int(self.complement_ids[i]) for i in ids)

    def group_of(self, pid: int) -> int:
        return int(self.group_ids[pid])

    def render(self, pid: int) -> str:
        p = self.predicates[pid]
        lhs = f"t.{self.column_names[p.left]}"
        tick = "t" if p.pattern is Pattern.SAME_TUPLE else "t'"
        rhs = f"{tick}.{self.column_names[p.right]}"
        return f"{lhs} {OP_SYMBOL[p.op]} {rhs}"

    def dc_order(self, dc_ids) -> list[int]:
        """Deterministic predicate order inside a rendered DC."""
        def key(pid):
            p = self.predicates[pid]
            return (int(p.op), p.left, p.right, int(p.pattern))
        return sorted(dc_ids, key=key)

    def render_dc(self, h_ids) -> str:
        """Render the DC whose hitting set is h_ids: complement each
        predicate and join the conjunction."""
        dc = self.dc_order(self.complement_set(h_ids))
        return "¬(" + " ∧ ".join(self.render(p) for p in dc) + ")"


def common_value_overlap(d: Dataset, a: int, b: int) -> float:
    """|vals(a) & vals(b)| / min(|vals(a)|, |vals(b)|) over distinct
    non-null values; 0 when either column has no values."""
    va, vb = d.distinct_nonnull(a), d.distinct_nonnull(b)
    m = min(len(va), len(vb))
    if m == 0:
        return 0.0
    return len(va & vb) / m


def generate_predicate_space(d: Dataset, common_value_threshold: float = 0.3) -> PredicateSpace:
    """Build the predicate space for a dataset.

    Same-column cross-tuple predicates are always generated.  For every
    ordered pair of distinct same-kind columns whose distinct value
    sets overlap by at least the threshold, cross-tuple and same-tuple
    predicates are generated with all type-allowed operators.
    """
    preds: list[Predicate] = []
    kinds = [c.kind for c in d.columns]
    for j, kind in enumerate(kinds):
        ops = NUMERIC_OPS if kind is ColumnKind.NUMERIC else STRING_OPS
        for op in ops:
            preds.append(Predicate(Pattern.CROSS_TUPLE, j, j, op))
    for a in range(d.n_columns):
        for b in range(d.n_columns):
            if a == b or kinds[a] is not kinds[b]:
                continue
            if common_value_overlap(d, a, b) < common_value_threshold:
                continue
            ops = NUMERIC_OPS if kinds[a] is ColumnKind.NUMERIC else STRING_OPS
            for op in ops:
                preds.append(Predicate(Pattern.CROSS_TUPLE, a, b, op))
                preds.append(Predicate(Pattern.SAME_TUPLE, a, b, op))
    preds.sort(key=Predicate.sort_key)
    return PredicateSpace(preds, d.column_names)
