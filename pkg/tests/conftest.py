"""Shared fixtures and independent oracles.

Everything here recomputes results from raw cell values or by subset
enumeration, deliberately avoiding the package's evidence/scoring code
paths, so tests compare two genuinely different routes to the same
answer.
"""

from __future__ import annotations

import csv
from collections import Counter
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from adcmine import Dataset, from_cells
from adcmine.predicates import Op, Pattern, PredicateSpace

TABLE1_NAMES = ["Name", "State", "Zip", "Income", "Tax"]
TABLE1_ROWS = [
    ["Alice", "NY", "11803", "28000", "2400"],
    ["Mark", "NY", "10102", "42000", "4700"],
    ["Bob", "NY", "13914", "93000", "11800"],
    ["Mary", "NY", "10437", "58000", "6700"],
    ["Alice", "NY", "10437", "26000", "2100"],
    ["Julia", "WA", "98112", "27000", "1400"],
    ["Jimmy", "WA", "98112", "24000", "1600"],
    ["Sam", "WA", "98112", "49000", "6800"],
    ["Jeff", "WA", "98112", "56000", "7800"],
    ["Gary", "WA", "98112", "50000", "7200"],
    ["Ron", "WA", "98112", "58000", "8000"],
    ["Jennifer", "WA", "98112", "61000", "8500"],
    ["Adam", "WA", "98112", "20000", "1000"],
    ["Tim", "IL", "62078", "39000", "5000"],
    ["Sarah", "IL", "98112", "54000", "5000"],
]


@pytest.fixture(scope="session")
def table1() -> Dataset:
    return from_cells(TABLE1_NAMES, [list(r) for r in TABLE1_ROWS])


@pytest.fixture(scope="session")
def table1_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "tax.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TABLE1_NAMES)
        w.writerows(TABLE1_ROWS)
    return path


# ---------------------------------------------------------------------------
# independent predicate evaluation straight from cell values

_RAW_OPS = {
    Op.EQ: lambda a, b: a == b,
    Op.NEQ: lambda a, b: a != b,
    Op.GT: lambda a, b: a > b,
    Op.LT: lambda a, b: a < b,
    Op.GEQ: lambda a, b: a >= b,
    Op.LEQ: lambda a, b: a <= b,
}


def eval_pred_raw(d: Dataset, pred, i: int, j: int) -> bool:
    """Reference semantics: nulls satisfy nothing; the single-tuple
    pattern reads both sides from the first tuple of the pair."""
    right_row = i if pred.pattern is Pattern.SAME_TUPLE else j
    a = d.cell(i, pred.left)
    b = d.cell(right_row, pred.right)
    if a is None or b is None:
        return False
    return _RAW_OPS[pred.op](a, b)


def brute_sat_ids(d: Dataset, space: PredicateSpace, i: int, j: int) -> frozenset:
    return frozenset(p for p in range(len(space))
                     if eval_pred_raw(d, space.predicates[p], i, j))


def brute_classes(d: Dataset, space: PredicateSpace):
    """Bag of satisfied-predicate sets over all ordered distinct pairs:
    {sat set -> {"count": multiplicity, "tuples": Counter row -> pairs}}."""
    out: dict[frozenset, dict] = {}
    for i in range(d.n_rows):
        for j in range(d.n_rows):
            if i == j:
                continue
            s = brute_sat_ids(d, space, i, j)
            rec = out.setdefault(s, {"count": 0, "tuples": Counter()})
            rec["count"] += 1
            rec["tuples"][i] += 1
            rec["tuples"][j] += 1
    return out


def brute_violations(classes, h) -> int:
    """Violating ordered pairs for hitting set h, from brute classes."""
    hs = set(h)
    return sum(rec["count"] for s, rec in classes.items() if not (hs & s))


def brute_problem_tuples(classes, h) -> set:
    hs = set(h)
    out: set[int] = set()
    for s, rec in classes.items():
        if not (hs & s):
            out.update(rec["tuples"])
    return out


def brute_violating_pairs(d: Dataset, space: PredicateSpace, h):
    hs = set(h)
    return [(i, j) for i in range(d.n_rows) for j in range(d.n_rows)
            if i != j and not (hs & brute_sat_ids(d, space, i, j))]


def brute_greedy_removals(classes, h, n_rows: int) -> int:
    """From-scratch run of the greedy repair tally: take tuples by
    descending uncovered involvement (ties to the lower id) until the
    running sum reaches the uncovered pair total."""
    hs = set(h)
    uncovered = [rec for s, rec in classes.items() if not (hs & s)]
    u = sum(rec["count"] for rec in uncovered)
    if u == 0:
        return 0
    v = [0] * n_rows
    for rec in uncovered:
        for t, c in rec["tuples"].items():
            v[t] += c
    c = 0
    for r, t in enumerate(sorted(range(n_rows), key=lambda t: (-v[t], t)), 1):
        c += v[t]
        if c >= u:
            return r
    raise AssertionError("unreachable: total involvement is twice u")


def brute_min_removals(d: Dataset, space: PredicateSpace, h) -> int:
    """Smallest tuple set whose removal leaves no violating pair:
    exhaustive vertex cover over the tuples involved in conflicts."""
    from itertools import combinations

    pairs = {frozenset(p) for p in brute_violating_pairs(d, space, h)}
    if not pairs:
        return 0
    involved = sorted(set().union(*pairs))
    for r in range(1, len(involved) + 1):
        for cover in combinations(involved, r):
            cs = set(cover)
            if all(p & cs for p in pairs):
                return r
    raise AssertionError("unreachable: removing all involved tuples repairs")


# ---------------------------------------------------------------------------
# hitting set oracle by full subset enumeration

def brute_minimal_hitting_sets(universe: int, family) -> set[frozenset]:
    masks = np.arange(1 << universe, dtype=np.int64)
    ok = np.ones(masks.shape[0], dtype=bool)
    for F in family:
        fmask = 0
        for e in F:
            fmask |= 1 << e
        ok &= (masks & fmask) != 0
    hitting = set(int(m) for m in masks[ok])
    out = set()
    # hitting is closed upward, so single removals decide minimality
    for m in hitting:
        if not any((m ^ (1 << e)) in hitting
                   for e in range(universe) if m >> e & 1):
            out.add(frozenset(e for e in range(universe) if m >> e & 1))
    return out


# ---------------------------------------------------------------------------
# group-constrained minimal-ADC oracle (f1/f2, monotone)

def constrained_candidates(space: PredicateSpace):
    """Every predicate set taking at most one operator per redundancy
    group, as frozensets (includes the empty set)."""
    options = [(None, *members) for members in space.group_members]
    for choice in product(*options):
        yield frozenset(p for p in choice if p is not None)


def brute_adc_metrics(d: Dataset, space: PredicateSpace):
    """(violating pairs, problematic tuples) for every constrained
    candidate, computed from raw-cell evaluation with bitmask sums."""
    classes = brute_classes(d, space)
    entries = []
    for s, rec in classes.items():
        pmask = 0
        for p in s:
            pmask |= 1 << p
        tmask = 0
        for t in rec["tuples"]:
            tmask |= 1 << t
        entries.append((pmask, rec["count"], tmask))
    metrics: dict[frozenset, tuple[int, int]] = {}
    for h in constrained_candidates(space):
        hmask = 0
        for p in h:
            hmask |= 1 << p
        viol = 0
        prob = 0
        for pmask, cnt, tmask in entries:
            if not pmask & hmask:
                viol += cnt
                prob |= tmask
        metrics[h] = (viol, prob.bit_count())
    return metrics


def minimal_adcs_from_metrics(metrics, n_rows: int, kind: str,
                              eps: float) -> tuple[set[frozenset], bool]:
    """(nonempty minimal accepted hitting sets, empty-set-accepted flag).
    Single-removal minimality is exact here because f1/f2 are monotone."""
    idx = 0 if kind == "f1" else 1
    denom = n_rows * (n_rows - 1) if kind == "f1" else n_rows
    budget = Fraction(eps)
    accepted = {h for h, m in metrics.items()
                if Fraction(m[idx], denom) <= budget}
    minimal = {h for h in accepted
               if h and not any(h - {e} in accepted for e in h)}
    return minimal, frozenset() in accepted


# ---------------------------------------------------------------------------
# toy dataset generator (small spaces so the oracle stays exhaustive)

def make_toy(rng: np.random.Generator) -> Dataset:
    share = rng.random() < 0.35
    if share:
        kind = "num" if rng.random() < 0.5 else "str"
        n_cols = 2 if kind == "num" else int(rng.integers(2, 4))
        kinds = [kind, kind] + [("num" if rng.random() < 0.5 else "str")
                                for _ in range(n_cols - 2)]
    else:
        n_cols = int(rng.integers(1, 5))
        kinds = [("num" if rng.random() < 0.6 else "str") for _ in range(n_cols)]
    n_rows = int(rng.integers(2, 9))
    cells = []
    for i in range(n_rows):
        row = []
        for c, k in enumerate(kinds):
            if rng.random() < 0.08:
                row.append("")        # null
                continue
            pool = 0 if (share and c < 2) else c + 1
            if k == "num":
                row.append(str(100 * pool + int(rng.integers(0, 4))))
            else:
                row.append(f"s{pool}_{int(rng.integers(0, 3))}")
        cells.append(row)
    if n_rows >= 3 and rng.random() < 0.3:
        src, dst = rng.integers(0, n_rows, size=2)
        cells[int(dst)] = list(cells[int(src)])
    return from_cells([f"c{k}" for k in range(n_cols)], cells)


def make_toys(count: int, seed: int) -> list[Dataset]:
    rng = np.random.default_rng(seed)
    return [make_toy(rng) for _ in range(count)]
