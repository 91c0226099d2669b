"""Array-level class enumeration shared by the census builder.

A mode bundles the admissibility tables for one symbolic system:

* free mode: no-backtracking pair rule over 2r letters;
* surface mode (genus 2): pair rule plus the sixteen forbidden 5-grams (the
  cyclic subwords of the relator and its inverse longer than half) and the
  half-relator swap table used to pick one canonical word per class;
* sft mode: an arbitrary aperiodic 0-1 transition matrix.

Enumeration is the FKM prenecklace DFS in `_kernels`, emitting canonical
(lex-min) rotations in lexicographic order.  Sharding splits the DFS by
length-3 prefixes; outputs concatenated in seed order are identical to the
unsharded order, which is what makes censuses worker-count invariant.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DataIntegrityError
from .words import SurfacePresentation

__all__ = [
    "Mode", "group_mode", "sft_mode", "cyclic_word_count", "necklace_count",
    "estimate_class_count", "enumerate_length", "pack_words",
]


@dataclass
class Mode:
    alphabet: int
    allow2: np.ndarray            # (E, E) bool
    allow5: np.ndarray            # (E**5,) bool; all-True when use5 is False
    use5: bool
    swap_table: np.ndarray | None  # (E**4,) int64, -1 = no swap; surface only
    label: str

    def transfer_matrix(self):
        """0-1 matrix whose trace powers count cyclically admissible words."""
        import scipy.sparse as sp

        E = self.alphabet
        if not self.use5:
            return sp.csr_matrix(self.allow2.astype(np.float64))
        # de Bruijn graph on 4-letter contexts
        states = []
        index = np.full(E**4, -1, dtype=np.int64)
        for ctx in range(E**4):
            c = [(ctx // E**j) % E for j in (3, 2, 1, 0)]
            if all(self.allow2[c[i], c[i + 1]] for i in range(3)):
                index[ctx] = len(states)
                states.append(ctx)
        rows, cols, k = [], [], len(states)
        for ctx in states:
            for nxt in range(E):
                prev = ctx % E
                if not self.allow2[prev, nxt]:
                    continue
                if not self.allow5[ctx * E + nxt]:
                    continue
                tgt = (ctx * E + nxt) % (E**4)
                if index[tgt] >= 0:
                    rows.append(index[ctx])
                    cols.append(index[tgt])
        return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(k, k))


def _surface_tables(pres: SurfacePresentation):
    E = pres.alphabet_size
    g = pres.n_generators
    R = pres.relator.codes
    L = len(R)
    inv = lambda c: (c + g) % E

    allow2 = np.ones((E, E), dtype=np.bool_)
    for x in range(E):
        allow2[x, inv(x)] = False

    allow5 = np.ones(E**5, dtype=np.bool_)
    swap_table = np.full(E**4, -1, dtype=np.int64)
    half = L // 2
    for base in (R, tuple(inv(c) for c in reversed(R))):
        dbl = base + base
        for i in range(L):
            piece = dbl[i:i + half + 1]
            idx = 0
            for c in piece:
                idx = idx * E + c
            allow5[idx] = False
            u = dbl[i:i + half]
            v = dbl[i + half:i + L]
            repl = tuple(inv(c) for c in reversed(v))
            uidx = 0
            for c in u:
                uidx = uidx * E + c
            ridx = 0
            for c in repl:
                ridx = ridx * E + c
            swap_table[uidx] = ridx
    return allow2, allow5, swap_table


def group_mode(pres: SurfacePresentation) -> Mode:
    E = pres.alphabet_size
    if not pres.is_surface:
        g = pres.n_generators
        allow2 = np.ones((E, E), dtype=np.bool_)
        for x in range(E):
            allow2[x, (x + g) % E] = False
        return Mode(E, allow2, np.ones(1, dtype=np.bool_), False, None,
                    pres.describe())
    if pres.genus != 2:
        # forbidden pieces have length > half the relator = 2g+1 letters;
        # the 5-gram table only fits the genus-2 relator of length 8
        raise NotImplementedError("array enumeration supports genus 2 only")
    allow2, allow5, swap_table = _surface_tables(pres)
    return Mode(E, allow2, allow5, True, swap_table, pres.describe())


def sft_mode(transition: np.ndarray, label: str = "sft") -> Mode:
    t = np.asarray(transition, dtype=np.bool_)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValueError("transition must be square")
    return Mode(t.shape[0], t, np.ones(1, dtype=np.bool_), False, None, label)


def cyclic_word_count(mode: Mode, n: int):
    """Number of cyclically admissible linear words of length n: tr(M^n)."""
    M = mode.transfer_matrix()
    P = M.copy()
    for _ in range(n - 1):
        P = P @ M
    return float(P.diagonal().sum())


def necklace_count(mode: Mode, n: int) -> int:
    """Exact count of admissible necklaces (pre swap-filter), via Burnside."""
    M = mode.transfer_matrix()
    traces = {}
    P = None
    for d in range(1, n + 1):
        P = M.copy() if P is None else P @ M
        if n % d == 0:
            traces[d] = float(P.diagonal().sum())
    total = 0.0
    for d, tr in traces.items():
        total += _totient(n // d) * tr
    return int(round(total / n))


def _totient(m: int) -> int:
    out, p, mm = m, 2, m
    while p * p <= mm:
        if mm % p == 0:
            while mm % p == 0:
                mm //= p
            out -= out // p
        p += 1
    if mm > 1:
        out -= out // mm
    return out


def estimate_class_count(mode: Mode, n_max: int) -> float:
    """Upper estimate of total classes with n <= n_max (before swap merges)."""
    M = mode.transfer_matrix()
    total, P = 0.0, None
    for n in range(1, n_max + 1):
        P = M.copy() if P is None else P @ M
        total += float(P.diagonal().sum()) / n
    return total * 1.05 + 2 * mode.alphabet * n_max


def _warm_kernels(mode: Mode):
    w = np.zeros((4, 2), dtype=np.uint8)
    p = np.zeros(4, dtype=np.int16)
    _kernels.fkm_fill(2, mode.alphabet, mode.allow2, mode.allow5, mode.use5, w, p)
    if mode.swap_table is not None:
        words = np.zeros((1, 4), dtype=np.uint8)
        words[0] = [0, 1, 2, 3]
        keep = np.zeros(1, dtype=np.bool_)
        _kernels.swap_min_filter(words, mode.alphabet, mode.swap_table, keep)


def _seed_prefixes(mode: Mode):
    """All admissible FKM prenecklace prefixes of length 3, with periods.

    Mirrors the kernel DFS exactly: at 1-indexed position t with running
    period p the candidate a[t-p] keeps period p, larger candidates reset it
    to t (a[0] is a zero sentinel).
    """
    E = mode.alphabet
    seeds = []

    def rec(prefix, p):
        t = len(prefix) + 1
        ip = t - p
        copy_cand = prefix[ip - 1] if ip >= 1 else 0
        for cand in range(copy_cand, E):
            newp = p if cand == copy_cand else t
            if prefix and not mode.allow2[prefix[-1], cand]:
                continue
            word = prefix + (cand,)
            if t == 3:
                seeds.append((word, newp))
            else:
                rec(word, newp)

    rec((), 1)
    return seeds


def _enumerate_shard(args):
    mode, n, seed_arr, seed_per = args
    cap0 = np.zeros((0, n), dtype=np.uint8)
    per0 = np.zeros(0, dtype=np.int16)
    m = _kernels.fkm_fill_sharded(n, mode.alphabet, mode.allow2, mode.allow5,
                                  mode.use5, seed_arr, seed_per, cap0, per0)
    words = np.zeros((m, n), dtype=np.uint8)
    periods = np.zeros(m, dtype=np.int16)
    _kernels.fkm_fill_sharded(n, mode.alphabet, mode.allow2, mode.allow5,
                              mode.use5, seed_arr, seed_per, words, periods)
    return _apply_swap_filter(mode, words, periods)


def _apply_swap_filter(mode, words, periods):
    """Keep one canonical word per class among equal-length conjugates.

    Short words (n <= half relator) go through the full object-level
    canonical form, whose orbit also includes Dehn-assisted letter
    conjugations; those extra identifications only occur below the half
    relator length (at n = 3 for genus 2: words one letter short of a half
    relator, e.g. abc ~ cba through d).  Longer words use the compiled
    half-swap orbit filter.
    """
    if mode.swap_table is None or len(words) == 0:
        return words, periods
    n = words.shape[1]
    if n <= 4:
        from .words import CyclicWord, SurfacePresentation, canonical_form

        pres = SurfacePresentation(genus=mode.alphabet // 4)
        keep = np.zeros(len(words), dtype=np.bool_)
        for i in range(len(words)):
            codes = tuple(int(c) for c in words[i])
            canon = canonical_form(CyclicWord(codes, pres.n_generators),
                                   pres)
            keep[i] = canon.codes == codes
        return words[keep], periods[keep]
    keep = np.zeros(len(words), dtype=np.bool_)
    overflows = _kernels.swap_min_filter(words, mode.alphabet,
                                         mode.swap_table, keep)
    if overflows:
        raise DataIntegrityError(
            f"half-relator swap orbit exceeded capacity for {overflows} words")
    return words[keep], periods[keep]


def enumerate_length(mode: Mode, n: int, workers: int = 1):
    """All canonical classes of length exactly n: (words (m, n), periods).

    Output is sorted lexicographically and independent of `workers`.
    """
    if n * math.log2(mode.alphabet) > 62:
        raise ValueError("word length too large for packed keys")
    _warm_kernels(mode)
    if n <= 3 or workers <= 1:
        cap = necklace_count(mode, n) + 1
        words = np.zeros((cap, n), dtype=np.uint8)
        periods = np.zeros(cap, dtype=np.int16)
        m = _kernels.fkm_fill(n, mode.alphabet, mode.allow2, mode.allow5,
                              mode.use5, words, periods)
        if m > cap:
            raise DataIntegrityError(
                f"necklace count underestimated: {m} > {cap}")
        return _apply_swap_filter(mode, words[:m], periods[:m])

    seeds = _seed_prefixes(mode)
    chunks = _split_seeds(seeds, workers)
    jobs = []
    for chunk in chunks:
        seed_arr = np.array([w for w, _ in chunk], dtype=np.uint8)
        seed_per = np.array([p for _, p in chunk], dtype=np.int64)
        jobs.append((mode, n, seed_arr, seed_per))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_enumerate_shard, jobs))
    words = np.concatenate([w for w, _ in parts], axis=0)
    periods = np.concatenate([p for _, p in parts])
    return words, periods


def _split_seeds(seeds, k):
    """Contiguous split preserving lex order (so concatenation is ordered)."""
    k = max(1, min(k, len(seeds)))
    bounds = [round(i * len(seeds) / k) for i in range(k + 1)]
    return [seeds[bounds[i]:bounds[i + 1]]
            for i in range(k) if bounds[i] < bounds[i + 1]]


def pack_words(words: np.ndarray, alphabet: int) -> np.ndarray:
    """Pack letter rows into int64 keys (lexicographic order preserving)."""
    out = np.zeros(len(words), dtype=np.int64)
    for j in range(words.shape[1]):
        out *= alphabet
        out += words[:, j]
    return out
