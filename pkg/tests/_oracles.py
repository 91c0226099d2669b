"""Independent brute-force oracles, written against the definitions only.

Everything here works on plain letter strings ("abcdABCD" alphabet with
capitals as inverses) and never calls the package's enumeration,
canonicalization, or reduction code, so the tests comparing against these
oracles are genuine dual routes.
"""

import itertools
import string


def inv_char(c: str) -> str:
    return c.upper() if c.islower() else c.lower()


def inverse_string(w: str) -> str:
    return "".join(inv_char(c) for c in reversed(w))


def stack_reduce(w: str) -> str:
    """Independent free reduction: push letters, cancel inverse tops."""
    out = []
    for c in w:
        if out and out[-1] == inv_char(c):
            out.pop()
        else:
            out.append(c)
    return "".join(out)


def alphabet(rank: int) -> str:
    return string.ascii_lowercase[:rank] + string.ascii_uppercase[:rank]


def genus2_relator() -> str:
    return "abcd" + "ABCD"


def cyclic_substrings(w: str, length: int):
    dbl = w + w
    return {dbl[i:i + length] for i in range(len(w))}


def forbidden_5grams() -> set:
    R = genus2_relator()
    out = set()
    for base in (R, inverse_string(R)):
        out |= cyclic_substrings(base, 5)
    return out


def half_swap_map() -> dict:
    """length-4 cyclic piece of R (or R^-1) -> inverse complementary half."""
    out = {}
    R = genus2_relator()
    for base in (R, inverse_string(R)):
        dbl = base + base
        for i in range(len(base)):
            u = dbl[i:i + 4]
            v = dbl[i + 4:i + 8]
            out[u] = inverse_string(v)
    return out


def long_piece_map() -> dict:
    """cyclic piece of R/R^-1 longer than half -> inverse of complement."""
    out = {}
    R = genus2_relator()
    for base in (R, inverse_string(R)):
        dbl = base + base
        for i in range(len(base)):
            for k in range(5, 9):
                out[dbl[i:i + k]] = inverse_string(dbl[i + k:i + 8])
    return out


def dehn_reduce_string(w: str, pieces: dict) -> str:
    """Greedy linear Dehn reduction on a letter string (genus 2)."""
    w = stack_reduce(w)
    changed = True
    while changed:
        changed = False
        for k in range(min(8, len(w)), 4, -1):
            for i in range(len(w) - k + 1):
                repl = pieces.get(w[i:i + k])
                if repl is not None:
                    w = stack_reduce(w[:i] + repl + w[i + k:])
                    changed = True
                    break
            if changed:
                break
    return w


def cyclic_reduce_string(w: str) -> str:
    while len(w) >= 2 and w[0] == inv_char(w[-1]):
        w = w[1:-1]
    return w


def letter_conjugate_moves(w: str, pieces: dict):
    """Same-length conjugates via one letter conjugation plus Dehn
    reduction (the elementary move of Dehn's conjugacy algorithm)."""
    n = len(w)
    out = set()
    dbl = w + w
    letters = alphabet(2)
    for i in range(n):
        rot = dbl[i:i + n]
        for x in "abcdABCD":
            if inv_char(x) == inv_char(rot[0]) or x == rot[-1]:
                continue
            lin = inv_char(x) + rot + x
            if lin[:5] not in pieces and lin[-5:] not in pieces:
                continue
            red = cyclic_reduce_string(dehn_reduce_string(lin, pieces))
            if len(red) == n:
                out.add(red)
    return out


def is_cyclically_reduced(w: str) -> bool:
    return all(w[(i + 1) % len(w)] != inv_char(w[i]) for i in range(len(w)))


def admissible_words(rank: int, surface: bool, n: int):
    """All cyclically reduced (and Dehn-irreducible, in surface mode)
    words of length n, by direct filtering of the full product set."""
    letters = alphabet(rank)
    bad = forbidden_5grams() if surface else set()
    words = []
    for tup in itertools.product(letters, repeat=n):
        w = "".join(tup)
        if not is_cyclically_reduced(w):
            continue
        if surface and n >= 5:
            if cyclic_substrings(w, 5) & bad:
                continue
        words.append(w)
    return words


def class_count(rank: int, surface: bool, n: int) -> int:
    """Conjugacy classes at word length n: connected components of the
    admissible word set under rotation and (surface mode) half swaps."""
    words = admissible_words(rank, surface, n)
    index = {w: i for i, w in enumerate(words)}
    parent = list(range(len(words)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    swaps = half_swap_map() if surface else {}
    pieces = long_piece_map() if surface else {}
    for w in words:
        i = index[w]
        union(i, index[w[1:] + w[:1]])
        if surface and n >= 4:
            dbl = w + w
            for s in range(n):
                u = dbl[s:s + 4]
                repl = swaps.get(u)
                if repl is None:
                    continue
                chars = list(w)
                for j in range(4):
                    chars[(s + j) % n] = repl[j]
                t = "".join(chars)
                assert t in index, (w, s, t)
                union(i, index[t])
        if surface:
            for t in letter_conjugate_moves(w, pieces):
                assert t in index, (w, t)
                union(i, index[t])
    return len({find(i) for i in range(len(words))})


def kmp_period(w: str) -> int:
    """Smallest period of w via the KMP failure function, when it divides."""
    n = len(w)
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and w[i] != w[k]:
            k = fail[k - 1]
        if w[i] == w[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1]
    return p if n % p == 0 else n
