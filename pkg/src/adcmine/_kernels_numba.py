"""Numba kernel for pairwise predicate evaluation.

Fills packed uint64 bitset rows for every ordered pair (i, j) of a
(row-block x row-block) tile.  Rows for i == j may hold garbage; the
caller drops them by position.  Nulls (NaN / negative string code)
never satisfy a predicate, including != .

Operators over one column pair share a single pass: the comparison is
reduced to sign(x - y) once and a 3-entry table ORs in the bits of
every operator that sign satisfies, so a 6-operator group costs one
tile scan instead of six.
"""

import numpy as np
from numba import njit

# ok-by-sign(x - y) tables, sign index 0/1/2 for -1/0/+1
_CMP_OK = np.array([
    [False, True, False],   # ==
    [True, False, True],    # !=
    [False, False, True],   # >
    [True, False, False],   # <
    [False, True, True],    # >=
    [True, True, False],    # <=
], dtype=np.bool_)


def _group_tables(p_is_str, p_left, p_right, p_op, p_same):
    """Bundle predicates sharing (kind, columns, pattern, limb) into
    single-pass entries with per-outcome OR masks."""
    entries: dict[tuple, list] = {}
    for p in range(p_op.shape[0]):
        key = (int(p_is_str[p]), int(p_left[p]), int(p_right[p]),
               int(p_same[p]), p >> 6)
        entries.setdefault(key, []).append((p & 63, int(p_op[p])))
    n_g = len(entries)
    g_is_str = np.zeros(n_g, dtype=np.int8)
    g_lcol = np.zeros(n_g, dtype=np.int64)
    g_rcol = np.zeros(n_g, dtype=np.int64)
    g_same = np.zeros(n_g, dtype=np.int8)
    g_limb = np.zeros(n_g, dtype=np.int64)
    num_tab = np.zeros((n_g, 3), dtype=np.uint64)   # sign -1/0/+1
    str_tab = np.zeros((n_g, 2), dtype=np.uint64)   # unequal/equal
    for g, (key, plist) in enumerate(entries.items()):
        g_is_str[g], g_lcol[g], g_rcol[g], g_same[g], g_limb[g] = key
        for bitpos, op in plist:
            bit = np.uint64(1) << np.uint64(bitpos)
            if key[0] == 1:
                str_tab[g, 1 if op == 0 else 0] |= bit
            else:
                for s in range(3):
                    if _CMP_OK[op, s]:
                        num_tab[g, s] |= bit
    return g_is_str, g_lcol, g_rcol, g_same, g_limb, num_tab, str_tab


@njit(cache=True, nogil=True)
def _scan(num_mat, str_mat, g_is_str, g_lcol, g_rcol, g_same, g_limb,
          num_tab, str_tab, i0, i1, j0, j1, out):
    wj = j1 - j0
    for g in range(g_is_str.shape[0]):
        limb = g_limb[g]
        lcol = g_lcol[g]
        rcol = g_rcol[g]
        same = g_same[g] == 1
        if g_is_str[g] == 1:
            m_neq = str_tab[g, 0]
            m_eq = str_tab[g, 1]
            for i in range(i0, i1):
                a = str_mat[i, lcol]
                if a < 0:
                    continue
                base = (i - i0) * wj
                if same:
                    b = str_mat[i, rcol]
                    if b >= 0:
                        mask = m_eq if a == b else m_neq
                        if mask:
                            for j in range(j0, j1):
                                out[base + (j - j0), limb] |= mask
                else:
                    for j in range(j0, j1):
                        b = str_mat[j, rcol]
                        if b >= 0:
                            out[base + (j - j0), limb] |= \
                                m_eq if a == b else m_neq
        else:
            t_lt = num_tab[g, 0]
            t_eq = num_tab[g, 1]
            t_gt = num_tab[g, 2]
            for i in range(i0, i1):
                x = num_mat[i, lcol]
                if x != x:
                    continue
                base = (i - i0) * wj
                if same:
                    y = num_mat[i, rcol]
                    if y == y:
                        mask = t_gt if x > y else (t_lt if x < y else t_eq)
                        if mask:
                            for j in range(j0, j1):
                                out[base + (j - j0), limb] |= mask
                else:
                    for j in range(j0, j1):
                        y = num_mat[j, rcol]
                        if y == y:
                            out[base + (j - j0), limb] |= \
                                t_gt if x > y else (t_lt if x < y else t_eq)
    return out


def pair_bitsets(num_mat, str_mat, p_is_str, p_left, p_right, p_op, p_same,
                 i0, i1, j0, j1, out):
    tables = _group_tables(p_is_str, p_left, p_right, p_op, p_same)
    return _scan(num_mat, str_mat, *tables, i0, i1, j0, j1, out)
