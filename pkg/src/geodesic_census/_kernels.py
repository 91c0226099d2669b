"""Numba kernels for the hot paths.

Everything here operates on plain numpy arrays of letter codes so it stays
compilable: words are rows of uint8 codes, constraint tables are flat boolean
arrays.  The single-core budget for a full genus-2 enumeration to word length
10 (~33M classes) is what forces compiled code; the pure-Python reference
implementations used by the tests live in `words.py`.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def fkm_fill(n, alphabet, allow2, allow5, use5, out_words, out_period):
    """Enumerate cyclically admissible necklaces of length n in lex order.

    FKM/Duval prenecklace DFS restricted by a pair rule (allow2[prev, nxt])
    and, when use5, a 5-gram rule (allow5[packed 5-window]).  Emits each
    admissible necklace exactly once as its lexicographically minimal
    rotation, together with its smallest period.  Returns the number of
    necklaces found; out arrays are filled up to their capacity (callers
    size them from a transfer-matrix count, so overflow means a bug).
    """
    a = np.zeros(n + 1, dtype=np.uint8)
    stack_j = np.zeros(n + 2, dtype=np.int64)
    stack_p = np.zeros(n + 2, dtype=np.int64)
    m = 0
    sp = 0
    stack_p[0] = 1
    stack_j[0] = -1
    cap = out_words.shape[0]
    while sp >= 0:
        t = sp + 1
        p = stack_p[sp]
        j = stack_j[sp]
        if j == -1:
            cand = a[t - p]
            newp = p
            stack_j[sp] = cand + 1
        elif j < alphabet:
            cand = j
            newp = t
            stack_j[sp] = j + 1
        else:
            sp -= 1
            continue
        a[t] = cand
        if t >= 2 and not allow2[a[t - 1], a[t]]:
            continue
        if use5 and t >= 5:
            idx = np.int64(0)
            for q in range(t - 4, t + 1):
                idx = idx * alphabet + a[q]
            if not allow5[idx]:
                continue
        if t == n:
            if n % newp == 0:
                ok = allow2[a[n], a[1]]
                if ok and use5 and n >= 5:
                    for start in range(n - 3, n + 1):
                        idx = np.int64(0)
                        for q in range(5):
                            pos = start + q
                            if pos > n:
                                pos -= n
                            idx = idx * alphabet + a[pos]
                        if not allow5[idx]:
                            ok = False
                            break
                if ok:
                    if m < cap:
                        for q in range(n):
                            out_words[m, q] = a[q + 1]
                        out_period[m] = newp
                    m += 1
        else:
            sp += 1
            stack_p[sp] = newp
            stack_j[sp] = -1
    return m


@njit(cache=True)
def fkm_fill_sharded(n, alphabet, allow2, allow5, use5, seeds, seed_periods,
                     out_words, out_period):
    """Like fkm_fill but DFS restarted from given length-3 seed prefixes.

    seeds is (S, 3) uint8 of valid prenecklace prefixes in lex order with
    their FKM periods; enumeration order equals the unsharded order when the
    seed list is the full lex-ordered seed set.  Requires n > 3.
    """
    a = np.zeros(n + 1, dtype=np.uint8)
    stack_j = np.zeros(n + 2, dtype=np.int64)
    stack_p = np.zeros(n + 2, dtype=np.int64)
    m = 0
    cap = out_words.shape[0]
    for si in range(seeds.shape[0]):
        a[1] = seeds[si, 0]
        a[2] = seeds[si, 1]
        a[3] = seeds[si, 2]
        sp = 3
        stack_p[3] = seed_periods[si]
        stack_j[3] = -1
        while sp >= 3:
            t = sp + 1
            p = stack_p[sp]
            j = stack_j[sp]
            if j == -1:
                cand = a[t - p]
                newp = p
                stack_j[sp] = cand + 1
            elif j < alphabet:
                cand = j
                newp = t
                stack_j[sp] = j + 1
            else:
                sp -= 1
                continue
            a[t] = cand
            if not allow2[a[t - 1], a[t]]:
                continue
            if use5 and t >= 5:
                idx = np.int64(0)
                for q in range(t - 4, t + 1):
                    idx = idx * alphabet + a[q]
                if not allow5[idx]:
                    continue
            if t == n:
                if n % newp == 0:
                    ok = allow2[a[n], a[1]]
                    if ok and use5 and n >= 5:
                        for start in range(n - 3, n + 1):
                            idx = np.int64(0)
                            for q in range(5):
                                pos = start + q
                                if pos > n:
                                    pos -= n
                                idx = idx * alphabet + a[pos]
                            if not allow5[idx]:
                                ok = False
                                break
                    if ok:
                        if m < cap:
                            for q in range(n):
                                out_words[m, q] = a[q + 1]
                            out_period[m] = newp
                        m += 1
            else:
                sp += 1
                stack_p[sp] = newp
                stack_j[sp] = -1
    return m


@njit(cache=True)
def _min_rotation_into(w, n, buf):
    best = 0
    for s in range(1, n):
        for j in range(n):
            x = w[(s + j) % n]
            y = w[(best + j) % n]
            if x < y:
                best = s
                break
            elif x > y:
                break
    for j in range(n):
        buf[j] = w[(best + j) % n]


@njit(cache=True)
def _pack(w, n, base):
    v = np.int64(0)
    for j in range(n):
        v = v * base + w[j]
    return v


@njit(cache=True)
def swap_orbit_status(word, n, alphabet, swap_table, orbit_cap):
    """Explore the half-relator swap orbit of a canonical-rotation word.

    Returns (is_min, orbit_size): is_min is True when `word` is the
    lexicographically smallest canonical rotation in the closure under
    single half-relator swaps.  orbit_size == -1 signals capacity overflow
    (callers must treat that as an error; it has never been observed).
    Requires n*log2(alphabet) <= 62 bits for the packed keys.
    """
    orbit = np.empty((orbit_cap, n), dtype=np.uint8)
    keys = np.empty(orbit_cap, dtype=np.int64)
    orbit[0, :n] = word[:n]
    keys[0] = _pack(word, n, alphabet)
    cnt = 1
    head = 0
    tmp = np.empty(n, dtype=np.uint8)
    buf = np.empty(n, dtype=np.uint8)
    while head < cnt:
        w = orbit[head]
        head += 1
        for i in range(n):
            u = np.int64(0)
            for j in range(4):
                u = u * alphabet + w[(i + j) % n]
            r = swap_table[u]
            if r < 0:
                continue
            for j in range(n):
                tmp[j] = w[j]
            rr = r
            for j in range(3, -1, -1):
                tmp[(i + j) % n] = np.uint8(rr % alphabet)
                rr //= alphabet
            _min_rotation_into(tmp, n, buf)
            k = _pack(buf, n, alphabet)
            seen = False
            for q in range(cnt):
                if keys[q] == k:
                    seen = True
                    break
            if not seen:
                if cnt >= orbit_cap:
                    return False, -1
                orbit[cnt, :n] = buf[:n]
                keys[cnt] = k
                cnt += 1
    k0 = keys[0]
    for q in range(1, cnt):
        if keys[q] < k0:
            return False, cnt
    return True, cnt


@njit(cache=True)
def swap_min_filter(words, alphabet, swap_table, keep):
    """keep[i] = word i is the minimum of its half-relator swap orbit.

    Words without any swap window are kept outright.  Returns the number of
    orbit-capacity overflows (0 in practice; >0 aborts the build upstream).
    """
    K, n = words.shape
    overflows = 0
    if n < 4:
        for i in range(K):
            keep[i] = True
        return 0
    for i in range(K):
        w = words[i]
        has = False
        for s in range(n):
            u = np.int64(0)
            for j in range(4):
                u = u * alphabet + w[(s + j) % n]
            if swap_table[u] >= 0:
                has = True
                break
        if not has:
            keep[i] = True
            continue
        ok, size = swap_orbit_status(w, n, alphabet, swap_table, 256)
        if size == -1:
            overflows += 1
            keep[i] = False
        else:
            keep[i] = ok
    return overflows


@njit(cache=True)
def fnv1a64(data, h0):
    """FNV-1a 64-bit over a uint8 array, chainable via h0."""
    h = np.uint64(h0)
    prime = np.uint64(0x100000001B3)
    for i in range(data.shape[0]):
        h = np.uint64(h ^ np.uint64(data[i]))
        h = np.uint64(h * prime)
    return h


FNV_OFFSET = np.uint64(0xCBF29CE484222325)
