"""Pure-numpy fallback for pairwise predicate evaluation.

Same contract as the numba kernel: packed uint64 bitset rows for one
tile of ordered pairs, diagonal rows left zeroed.  Vectorizes one
predicate at a time over the whole tile.
"""

import numpy as np

_OPS = {
    0: np.equal,
    1: np.not_equal,
    2: np.greater,
    3: np.less,
    4: np.greater_equal,
    5: np.less_equal,
}


def pair_bitsets(num_mat, str_mat, p_is_str, p_left, p_right, p_op, p_same,
                 i0, i1, j0, j1, out):
    wi, wj = i1 - i0, j1 - j0
    for p in range(p_op.shape[0]):
        if p_is_str[p] == 1:
            mat = str_mat
            lv = mat[i0:i1, p_left[p]]
            lvalid = lv >= 0
        else:
            mat = num_mat
            lv = mat[i0:i1, p_left[p]]
            lvalid = ~np.isnan(lv)
        cmp = _OPS[int(p_op[p])]
        if p_same[p] == 1:
            rv = mat[i0:i1, p_right[p]]
            rvalid = (rv >= 0) if p_is_str[p] == 1 else ~np.isnan(rv)
            res1 = cmp(lv, rv) & lvalid & rvalid  # (wi,)
            res = np.broadcast_to(res1[:, None], (wi, wj))
        else:
            rv = mat[j0:j1, p_right[p]]
            rvalid = (rv >= 0) if p_is_str[p] == 1 else ~np.isnan(rv)
            res = cmp(lv[:, None], rv[None, :])
            res &= lvalid[:, None]
            res &= rvalid[None, :]
        out[:, p >> 6] |= res.reshape(-1).astype(np.uint64) << np.uint64(p & 63)
    # zero the self-pair rows the loop above may have filled
    lo, hi = max(i0, j0), min(i1, j1)
    if lo < hi:
        diag = np.arange(lo, hi)
        out[(diag - i0) * wj + (diag - j0), :] = 0
    return out
