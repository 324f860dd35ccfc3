"""Evidence construction: the bag of satisfied-predicate sets over all
ordered distinct tuple pairs, with multiplicities, plus per-tuple
incidence counts (Vios) for the repair-based scoring.

The pair scan runs tile by tile through a compiled kernel (numba by
default, pure numpy when ADCMINE_NO_NUMBA is set or numba is missing),
deduplicating each tile and merging into a global table.  The final
distinct sets are canonically ordered by ascending bitset value, so
the result is identical across backends, tilings, and thread counts.
"""

from __future__ import annotations

import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataset import ColumnKind, Dataset, DataError
from .predicates import Pattern, PredicateSpace

_MAGIC = b"ADCEVID\x01"
_CACHE_VERSION = 1


def _backend_name() -> str:
    if os.environ.get("ADCMINE_NO_NUMBA"):
        return "numpy"
    try:
        from . import _kernels_numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


def _kernel(backend: str):
    if backend == "numba":
        from ._kernels_numba import pair_bitsets
    else:
        from ._kernels_numpy import pair_bitsets
    return pair_bitsets


@dataclass
class EvidenceSet:
    """Distinct satisfied-predicate bitsets with multiplicities."""

    sets: np.ndarray   # (n_distinct, n_preds) bool
    mult: np.ndarray   # (n_distinct,) int64, bag multiplicities
    n_rows: int

    @property
    def n_distinct(self) -> int:
        return self.sets.shape[0]

    @property
    def n_preds(self) -> int:
        return self.sets.shape[1]

    @property
    def pair_universe(self) -> int:
        return self.n_rows * (self.n_rows - 1)

    def packed(self) -> np.ndarray:
        """(n_distinct, ceil(n_preds/8)) uint8, little-endian bit order."""
        return np.packbits(self.sets, axis=1, bitorder="little")


@dataclass
class Vios:
    """CSR of per-(distinct set, tuple) pair-incidence counts.

    counts[k] = number of pairs with evidence set s that involve tuple
    tuple_ids[k], for indptr[s] <= k < indptr[s+1].  Every pair is
    counted once per endpoint, so each set's counts sum to 2*mult[s].
    """

    indptr: np.ndarray     # (n_distinct+1,) int64
    tuple_ids: np.ndarray  # int32
    counts: np.ndarray     # int64

    @classmethod
    def unavailable(cls) -> "Vios":
        v = cls(np.zeros(1, dtype=np.int64), np.empty(0, np.int32), np.empty(0, np.int64))
        v.indptr = v.indptr[:0]  # zero-length marks "not built"
        return v

    @property
    def is_available(self) -> bool:
        return self.indptr.shape[0] > 0

    def tuples_of(self, s: int):
        lo, hi = self.indptr[s], self.indptr[s + 1]
        return self.tuple_ids[lo:hi], self.counts[lo:hi]


def compile_tables(d: Dataset, space: PredicateSpace):
    """Columnar matrices plus flat predicate metadata for the kernels."""
    num_idx = [j for j, c in enumerate(d.columns) if c.kind is ColumnKind.NUMERIC]
    str_idx = [j for j, c in enumerate(d.columns) if c.kind is ColumnKind.STRING]
    slot = {}
    for s, j in enumerate(num_idx):
        slot[j] = s
    for s, j in enumerate(str_idx):
        slot[j] = s
    num_mat = (
        np.column_stack([d.columns[j].values for j in num_idx])
        if num_idx else np.empty((d.n_rows, 0), dtype=np.float64)
    )
    str_mat = (
        np.column_stack([d.columns[j].values for j in str_idx])
        if str_idx else np.empty((d.n_rows, 0), dtype=np.int32)
    )
    m = len(space)
    p_is_str = np.empty(m, dtype=np.int8)
    p_left = np.empty(m, dtype=np.int32)
    p_right = np.empty(m, dtype=np.int32)
    p_op = np.empty(m, dtype=np.int32)
    p_same = np.empty(m, dtype=np.int8)
    str_cols = set(str_idx)
    for i, p in enumerate(space.predicates):
        p_is_str[i] = 1 if p.left in str_cols else 0
        p_left[i] = slot[p.left]
        p_right[i] = slot[p.right]
        p_op[i] = int(p.op)
        p_same[i] = 1 if p.pattern is Pattern.SAME_TUPLE else 0
    return num_mat, str_mat, (p_is_str, p_left, p_right, p_op, p_same)


def sat(d: Dataset, space: PredicateSpace, i: int, j: int) -> frozenset:
    """Predicate ids satisfied by the ordered pair (tuple i, tuple j)."""
    out = []
    for pid, p in enumerate(space.predicates):
        x = d.cell(i, p.left)
        y = d.cell(i if p.pattern is Pattern.SAME_TUPLE else j, p.right)
        if x is None or y is None:
            continue
        if _op_eval(int(p.op), x, y):
            out.append(pid)
    return frozenset(out)


def _op_eval(op: int, x, y) -> bool:
    if op == 0:
        return x == y
    if op == 1:
        return x != y
    if op == 2:
        return x > y
    if op == 3:
        return x < y
    if op == 4:
        return x >= y
    return x <= y


def _tiles(n: int, tile: int):
    for i0 in range(0, n, tile):
        for j0 in range(0, n, tile):
            yield i0, min(i0 + tile, n), j0, min(j0 + tile, n)


def build_evidence(d: Dataset, space: PredicateSpace, threads: int = 1,
                   with_vios: bool = True, backend: str | None = None,
                   tile: int = 1024):
    """Scan all ordered distinct tuple pairs and return
    (EvidenceSet, Vios).  Pass with_vios=False to skip the incidence
    counts (they are only needed by the tuple-repair scorings)."""
    if backend is None:
        backend = _backend_name()
    kernel = _kernel(backend)
    num_mat, str_mat, meta = compile_tables(d, space)
    m = len(space)
    n = d.n_rows
    n_limbs = max(1, (m + 63) >> 6)

    classes: dict[bytes, int] = {}
    limb_rows: list[np.ndarray] = []       # one (n_limbs,) row per class
    counts = np.zeros(0, dtype=np.int64)
    grid = np.zeros((0, n), dtype=np.int64) if with_vios else None

    def run_tile(t):
        i0, i1, j0, j1 = t
        out = np.zeros(((i1 - i0) * (j1 - j0), n_limbs), dtype=np.uint64)
        kernel(num_mat, str_mat, *meta, i0, i1, j0, j1, out)
        return t, out

    def merge(t, out):
        nonlocal counts, grid
        i0, i1, j0, j1 = t
        wi, wj = i1 - i0, j1 - j0
        keep = None
        lo, hi = max(i0, j0), min(i1, j1)
        if lo < hi:
            keep = np.ones(wi * wj, dtype=bool)
            diag = np.arange(lo, hi)
            keep[(diag - i0) * wj + (diag - j0)] = False
            out = out[keep]
        if out.shape[0] == 0:
            return
        # the pair -> class inverse is only needed for the incidence
        # grid, and np.unique computes it far slower than a lookup in
        # the sorted uniques
        if n_limbs == 1:
            col = out[:, 0]
            uniq, cnt = np.unique(col, return_counts=True)
            uniq_rows = uniq[:, None]
            inv = np.searchsorted(uniq, col) if with_vios else None
        else:
            voids = np.ascontiguousarray(out).view(
                np.dtype((np.void, out.dtype.itemsize * n_limbs))
            ).reshape(-1)
            if with_vios:
                uniq_v, inv, cnt = np.unique(voids, return_inverse=True,
                                             return_counts=True)
            else:
                uniq_v, cnt = np.unique(voids, return_counts=True)
                inv = None
            uniq_rows = uniq_v.view(np.uint64).reshape(-1, n_limbs)
        l2g = np.empty(uniq_rows.shape[0], dtype=np.int64)
        for k in range(uniq_rows.shape[0]):
            key = uniq_rows[k].tobytes()
            g = classes.get(key)
            if g is None:
                g = classes[key] = len(limb_rows)
                limb_rows.append(uniq_rows[k].copy())
            l2g[k] = g
        if len(limb_rows) > counts.shape[0]:
            counts = np.concatenate(
                [counts, np.zeros(len(limb_rows) - counts.shape[0], dtype=np.int64)]
            )
            if with_vios:
                grid = np.vstack(
                    [grid, np.zeros((len(limb_rows) - grid.shape[0], n), dtype=np.int64)]
                )
        counts[l2g] += cnt
        if with_vios:
            pair_g = l2g[inv]
            pi = np.repeat(np.arange(i0, i1), wj)
            pj = np.tile(np.arange(j0, j1), wi)
            if keep is not None:
                pi, pj = pi[keep], pj[keep]
            np.add.at(grid, (pair_g, pi), 1)
            np.add.at(grid, (pair_g, pj), 1)

    tiles = list(_tiles(n, tile))
    if threads <= 1 or len(tiles) <= 1:
        for t in tiles:
            merge(*run_tile(t))
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            # merge in submission order so class ids are reproducible
            for t, out in ex.map(run_tile, tiles):
                merge(t, out)

    g_count = len(limb_rows)
    if g_count == 0:
        sets = np.zeros((0, m), dtype=bool)
        ev = EvidenceSet(sets, np.zeros(0, dtype=np.int64), n)
        if with_vios:
            return ev, _make_vios(np.zeros((0, n), dtype=np.int64), ev.mult)
        return ev, Vios.unavailable()

    limbs = np.vstack(limb_rows)
    # canonical order: ascending bitset integer value
    order = np.lexsort(tuple(limbs[:, l] for l in range(n_limbs)))
    limbs = limbs[order]
    mult = counts[:g_count][order]
    sets = np.unpackbits(
        limbs.view(np.uint8).reshape(g_count, -1), axis=1, bitorder="little", count=m
    ).astype(bool)
    ev = EvidenceSet(sets, mult, n)
    if not with_vios:
        return ev, Vios.unavailable()
    return ev, _make_vios(grid[:g_count][order], mult)


def _make_vios(grid: np.ndarray, mult: np.ndarray) -> Vios:
    n_sets = grid.shape[0]
    indptr = np.zeros(n_sets + 1, dtype=np.int64)
    ids = []
    cnts = []
    for s in range(n_sets):
        nz = np.nonzero(grid[s])[0]
        indptr[s + 1] = indptr[s] + nz.shape[0]
        ids.append(nz.astype(np.int32))
        cnts.append(grid[s, nz])
    tuple_ids = np.concatenate(ids) if ids else np.empty(0, np.int32)
    counts = np.concatenate(cnts) if cnts else np.empty(0, np.int64)
    return Vios(indptr, tuple_ids, counts)


def uncovered_mask(e: EvidenceSet, h_ids) -> np.ndarray:
    """Boolean mask of distinct sets with empty intersection with h."""
    ids = np.fromiter(h_ids, dtype=np.int64) if not isinstance(h_ids, np.ndarray) else h_ids
    if ids.shape[0] == 0:
        return np.ones(e.n_distinct, dtype=bool)
    return ~e.sets[:, ids].any(axis=1)


def uncovered_weight(e: EvidenceSet, h_ids) -> int:
    """Total multiplicity of evidence sets not hit by h: the number of
    ordered pairs violating the DC whose hitting set is h."""
    return int(e.mult[uncovered_mask(e, h_ids)].sum())


def save_cache(path, e: EvidenceSet, v: Vios) -> None:
    """Binary evidence cache.  Header: magic, u32 version, u32 n_preds,
    u64 n_distinct, u64 n_rows, u64 vios-triple count.  Then per set a
    little-endian bitset (ceil(n_preds/8) bytes) and a u64 multiplicity;
    then (u32 set idx, u32 tuple id, u32 count) triples."""
    packed = e.packed()
    n_triples = 0
    if v.is_available:
        n_triples = int(v.tuple_ids.shape[0])
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIQQQ", _CACHE_VERSION, e.n_preds, e.n_distinct,
                             e.n_rows, n_triples))
        rec = np.empty(
            e.n_distinct,
            dtype=np.dtype([("bits", np.uint8, (packed.shape[1],)), ("mult", "<u8")]),
        )
        rec["bits"] = packed
        rec["mult"] = e.mult.astype(np.uint64)
        fh.write(rec.tobytes())
        if n_triples:
            tri = np.empty(n_triples, dtype=np.dtype([("s", "<u4"), ("t", "<u4"), ("c", "<u4")]))
            tri["s"] = np.repeat(
                np.arange(e.n_distinct, dtype=np.uint32), np.diff(v.indptr)
            )
            tri["t"] = v.tuple_ids.astype(np.uint32)
            tri["c"] = v.counts.astype(np.uint32)
            fh.write(tri.tobytes())


def load_cache(path):
    """Read a cache written by save_cache; returns (EvidenceSet, Vios)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != _MAGIC:
        raise DataError(f"{path}: not an evidence cache")
    version, n_preds, n_distinct, n_rows, n_triples = struct.unpack_from("<IIQQQ", blob, 8)
    if version != _CACHE_VERSION:
        raise DataError(f"{path}: unsupported cache version {version}")
    off = 8 + struct.calcsize("<IIQQQ")
    nbytes = (n_preds + 7) >> 3
    rec = np.frombuffer(
        blob, dtype=np.dtype([("bits", np.uint8, (nbytes,)), ("mult", "<u8")]),
        count=n_distinct, offset=off,
    )
    off += rec.nbytes
    bits = rec["bits"].reshape(n_distinct, nbytes)
    sets = np.unpackbits(bits, axis=1, bitorder="little", count=n_preds).astype(bool)
    e = EvidenceSet(sets, rec["mult"].astype(np.int64), int(n_rows))
    if n_triples == 0:
        return e, Vios.unavailable()
    tri = np.frombuffer(
        blob, dtype=np.dtype([("s", "<u4"), ("t", "<u4"), ("c", "<u4")]),
        count=n_triples, offset=off,
    )
    indptr = np.zeros(n_distinct + 1, dtype=np.int64)
    np.add.at(indptr, tri["s"].astype(np.int64) + 1, 1)
    indptr = np.cumsum(indptr)
    return e, Vios(indptr, tri["t"].astype(np.int32), tri["c"].astype(np.int64))
