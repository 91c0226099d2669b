"""Words, cyclic words, and conjugacy classes of surface and free groups.

Letters are encoded as small integers: generator i is code i, its inverse is
code i + g where g is the number of generators.  The fixed order used for
canonical forms is therefore a < b < c < d < A < B < C < D (generators
before inverses, by index), which is plain integer order on codes.

Serialization uses lowercase for generators and uppercase for inverses,
e.g. "abAB" for the commutator of the first two generators.

The genus-2 surface group is presented with the opposite-side-pairing
relator a b c d a^-1 b^-1 c^-1 d^-1.  Pieces between the relator and its
inverse have length 1 against relator length 8, so the presentation is
C'(1/6) and greedy reduction (replace any cyclic subword longer than half
the relator by the inverse of the complementary piece) computes conjugacy
length exactly; equal-length ambiguity is exactly the orbit of half-relator
swaps, which canonical_form minimizes over.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field

__all__ = [
    "Letter", "Word", "CyclicWord", "Identity", "IDENTITY",
    "SurfacePresentation", "ConjugacyClass",
    "free_reduce", "cyclic_reduce", "dehn_reduce_word", "dehn_reduce_cyclic",
    "canonical_form", "is_primitive", "enumerate_classes",
]


@dataclass(frozen=True)
class Letter:
    """One generator or inverse generator."""

    generator_index: int
    inverted: bool = False

    def code(self, n_generators: int) -> int:
        return self.generator_index + (n_generators if self.inverted else 0)

    @staticmethod
    def from_code(code: int, n_generators: int) -> "Letter":
        if code < n_generators:
            return Letter(code, False)
        return Letter(code - n_generators, True)


def _code_to_char(code: int, g: int) -> str:
    if code < g:
        return string.ascii_lowercase[code]
    return string.ascii_uppercase[code - g]


def _char_to_code(ch: str, g: int) -> int:
    if ch.islower():
        idx = ord(ch) - ord("a")
        inv = 0
    else:
        idx = ord(ch) - ord("A")
        inv = 1
    if idx >= g:
        raise ValueError(f"letter {ch!r} outside alphabet of {g} generators")
    return idx + inv * g


def _inv_code(code: int, g: int) -> int:
    return (code + g) % (2 * g)


class Word:
    """A freely reduced word; immutable."""

    __slots__ = ("codes", "n_generators")

    def __init__(self, codes, n_generators, _reduced=False):
        codes = tuple(codes)
        if not _reduced:
            codes = _free_reduce_codes(codes, n_generators)
        self.codes = codes
        self.n_generators = n_generators

    @classmethod
    def from_string(cls, s: str, n_generators: int) -> "Word":
        return cls((_char_to_code(c, n_generators) for c in s), n_generators)

    @property
    def letters(self) -> tuple[Letter, ...]:
        return tuple(Letter.from_code(c, self.n_generators) for c in self.codes)

    def __len__(self):
        return len(self.codes)

    def __eq__(self, other):
        return (isinstance(other, Word) and self.codes == other.codes
                and self.n_generators == other.n_generators)

    def __hash__(self):
        return hash((self.codes, self.n_generators))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.codes + other.codes, self.n_generators)

    def inverse(self) -> "Word":
        g = self.n_generators
        return Word(tuple(_inv_code(c, g) for c in reversed(self.codes)),
                    g, _reduced=True)

    def __str__(self):
        return "".join(_code_to_char(c, self.n_generators) for c in self.codes)

    def __repr__(self):
        return f"Word({str(self)!r})"


class Identity:
    """Explicit marker for the trivial element (no closed geodesic)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "IDENTITY"

    def __bool__(self):
        return False


IDENTITY = Identity()


class CyclicWord:
    """A nonempty cyclically reduced word considered up to rotation."""

    __slots__ = ("codes", "n_generators", "canonical")

    def __init__(self, codes, n_generators, canonical=False):
        self.codes = tuple(codes)
        if not self.codes:
            raise ValueError("CyclicWord must be nonempty; use IDENTITY")
        self.n_generators = n_generators
        self.canonical = canonical
        g = n_generators
        for i, c in enumerate(self.codes):
            if self.codes[(i + 1) % len(self.codes)] == _inv_code(c, g):
                raise ValueError(f"not cyclically reduced at position {i}")

    @classmethod
    def from_string(cls, s: str, n_generators: int) -> "CyclicWord":
        return cls([_char_to_code(c, n_generators) for c in s], n_generators)

    def __len__(self):
        return len(self.codes)

    def __eq__(self, other):
        """Equality as cyclic words: some rotation matches."""
        if not isinstance(other, CyclicWord) or len(self) != len(other):
            return False
        return min_rotation(self.codes) == min_rotation(other.codes)

    def __hash__(self):
        return hash((min_rotation(self.codes), self.n_generators))

    def rotation(self, k: int) -> "CyclicWord":
        c = self.codes
        k %= len(c)
        return CyclicWord(c[k:] + c[:k], self.n_generators)

    def to_word(self) -> Word:
        return Word(self.codes, self.n_generators, _reduced=True)

    def inverse(self) -> "CyclicWord":
        g = self.n_generators
        return CyclicWord([_inv_code(c, g) for c in reversed(self.codes)], g)

    def __str__(self):
        return "".join(_code_to_char(c, self.n_generators) for c in self.codes)

    def __repr__(self):
        return f"CyclicWord({str(self)!r})"


def min_rotation(codes: tuple) -> tuple:
    n = len(codes)
    return min(codes[k:] + codes[:k] for k in range(n))


@dataclass(frozen=True)
class SurfacePresentation:
    """Genus-g surface presentation (opposite-side pairing) or free group.

    Exactly one of genus/free_rank is set.  Surface mode uses 2g generators
    with relator g_1 g_2 ... g_{2g} g_1^-1 ... g_{2g}^-1 of length 4g, each
    generator appearing once plain and once inverted.
    """

    genus: int | None = None
    free_rank: int | None = None

    def __post_init__(self):
        if (self.genus is None) == (self.free_rank is None):
            raise ValueError("set exactly one of genus or free_rank")
        if self.genus is not None and self.genus < 2:
            raise ValueError("genus must be >= 2")
        if self.free_rank is not None and self.free_rank < 2:
            raise ValueError("free_rank must be >= 2")
        if self.n_generators > 13:
            raise ValueError("alphabet limited to 26 letters")

    @property
    def is_surface(self) -> bool:
        return self.genus is not None

    @property
    def n_generators(self) -> int:
        return 2 * self.genus if self.genus is not None else self.free_rank

    @property
    def alphabet_size(self) -> int:
        return 2 * self.n_generators

    @property
    def relator(self) -> CyclicWord | None:
        if not self.is_surface:
            return None
        g = self.n_generators
        return CyclicWord(tuple(range(g)) + tuple(range(g, 2 * g)), g,
                          canonical=True)

    def describe(self) -> str:
        if self.is_surface:
            return f"surface-genus{self.genus}-opposite-pairing"
        return f"free-rank{self.free_rank}"


def _free_reduce_codes(codes, g) -> tuple:
    out = []
    for c in codes:
        if out and out[-1] == _inv_code(c, g):
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def free_reduce(letters, n_generators: int) -> Word:
    """Reduce a letter sequence to the free-group normal form.

    Accepts an iterable of Letter, of integer codes, or a string.

    >>> str(free_reduce("abBA", 2))
    ''
    >>> str(free_reduce("abBa", 2))
    'aa'
    """
    if isinstance(letters, str):
        codes = [_char_to_code(c, n_generators) for c in letters]
    else:
        codes = [c.code(n_generators) if isinstance(c, Letter) else int(c)
                 for c in letters]
    return Word(codes, n_generators)


def cyclic_reduce(w: Word) -> CyclicWord | Identity:
    """Strip inverse prefix/suffix pairs until cyclically reduced.

    The result is conjugate to w; IDENTITY when everything cancels.
    """
    codes = list(w.codes)
    g = w.n_generators
    while len(codes) >= 2 and codes[0] == _inv_code(codes[-1], g):
        codes = codes[1:-1]
    if not codes:
        return IDENTITY
    return CyclicWord(codes, g)


class _DehnTable:
    """Relator-piece lookup: cyclic subwords of R and R^-1 longer than half
    the relator map to the inverse of the complementary piece; exact halves
    map to their swap replacement."""

    def __init__(self, pres: SurfacePresentation):
        g = pres.n_generators
        R = pres.relator.codes
        L = len(R)
        self.relator_length = L
        self.long_pieces: dict[tuple, tuple] = {}
        self.half_swaps: dict[tuple, tuple] = {}
        for base in (R, tuple(_inv_code(c, g) for c in reversed(R))):
            dbl = base + base
            for i in range(L):
                for piece_len in range(L // 2, L + 1):
                    u = dbl[i:i + piece_len]
                    v = dbl[i + piece_len:i + L]
                    repl = tuple(_inv_code(c, g) for c in reversed(v))
                    if piece_len > L // 2:
                        self.long_pieces[u] = repl
                    else:
                        self.half_swaps[u] = repl


_DEHN_CACHE: dict[SurfacePresentation, _DehnTable] = {}


def _dehn_table(pres: SurfacePresentation) -> _DehnTable:
    table = _DEHN_CACHE.get(pres)
    if table is None:
        table = _DehnTable(pres)
        _DEHN_CACHE[pres] = table
    return table


def dehn_reduce_word(w: Word, pres: SurfacePresentation) -> Word:
    """Greedy linear Dehn reduction: replace any subword longer than half
    the relator by the shorter complementary inverse, until none remains.

    Computes group-geodesic form for this C'(1/6) presentation; the output
    represents the same group element as w.
    """
    if not pres.is_surface:
        return w
    table = _dehn_table(pres)
    L = table.relator_length
    codes = list(w.codes)
    g = pres.n_generators
    changed = True
    while changed:
        changed = False
        for piece_len in range(min(L, len(codes)), L // 2, -1):
            for i in range(len(codes) - piece_len + 1):
                u = tuple(codes[i:i + piece_len])
                repl = table.long_pieces.get(u)
                if repl is not None:
                    codes = list(_free_reduce_codes(
                        tuple(codes[:i]) + repl + tuple(codes[i + piece_len:]), g))
                    changed = True
                    break
            if changed:
                break
    return Word(codes, g, _reduced=True)


def dehn_reduce_cyclic(cw: CyclicWord | Identity,
                       pres: SurfacePresentation) -> CyclicWord | Identity:
    """Cyclic Dehn reduction to conjugacy-geodesic form.

    Replaces any cyclic subword strictly longer than half the relator by the
    inverse complementary piece, re-reducing cyclically, until irreducible.
    The output length is the conjugacy length |gamma|.  Identity input or
    full cancellation yields IDENTITY.  Free mode is the identity operation.
    """
    if isinstance(cw, Identity) or not pres.is_surface:
        return cw
    table = _dehn_table(pres)
    L = table.relator_length
    g = pres.n_generators
    codes = tuple(cw.codes)
    while True:
        n = len(codes)
        if n == 0:
            return IDENTITY
        dbl = codes + codes
        hit = None
        for piece_len in range(min(L, n), L // 2, -1):
            for i in range(n):
                u = dbl[i:i + piece_len]
                repl = table.long_pieces.get(u)
                if repl is not None:
                    hit = (i, piece_len, repl)
                    break
            if hit:
                break
        if hit is None:
            return CyclicWord(codes, g)
        i, piece_len, repl = hit
        rot = dbl[i:i + n]
        linear = Word(repl + rot[piece_len:], g)
        reduced = cyclic_reduce(linear)
        if isinstance(reduced, Identity):
            return IDENTITY
        codes = reduced.codes


def is_dehn_irreducible(cw: CyclicWord, pres: SurfacePresentation) -> bool:
    if not pres.is_surface:
        return True
    table = _dehn_table(pres)
    L = table.relator_length
    n = len(cw)
    dbl = cw.codes + cw.codes
    for piece_len in range(L // 2 + 1, min(L, n) + 1):
        for i in range(n):
            if dbl[i:i + piece_len] in table.long_pieces:
                return False
    return True


def _letter_conjugates_same_length(codes: tuple,
                                   pres: SurfacePresentation):
    """Equal-length conjugates reachable by one letter conjugation.

    For each rotation r of the cyclic word and each letter x, the linear
    word x^-1 r x is freely and Dehn reduced; results of the original
    length are new geodesic representatives of the class.  This is the
    elementary step of Dehn's conjugacy algorithm; it is what identifies
    e.g. abc with cba in the genus-2 group (abc*d is half the relator).
    Plain rotations reappear here and are filtered by the caller.
    """
    g = pres.n_generators
    n = len(codes)
    half = g  # relator length 2g, half pieces have g letters
    table = _dehn_table(pres)
    out = set()
    dbl = codes + codes
    for i in range(n):
        rot = dbl[i:i + n]
        for x in range(2 * g):
            xinv = _inv_code(x, g)
            if xinv == _inv_code(rot[0], g) or x == rot[-1]:
                continue  # free cancellation: just a rotation
            lin = (xinv,) + rot + (x,)
            # a Dehn move must use a window through an end letter (interior
            # windows are windows of the irreducible word); pieces are
            # closed under length >= half+1 subwords, so checking the two
            # boundary windows of length half+1 suffices
            if (lin[:half + 1] not in table.long_pieces
                    and lin[-(half + 1):] not in table.long_pieces):
                continue
            word = dehn_reduce_word(Word(lin, g, _reduced=True), pres)
            cyc = cyclic_reduce(word)
            if isinstance(cyc, Identity) or len(cyc) < n:
                raise ValueError(
                    f"letter conjugation shortened a supposedly geodesic "
                    f"word {codes!r}")
            if len(cyc) == n:
                out.add(min_rotation(cyc.codes))
    return out


def canonical_form(cw: CyclicWord, pres: SurfacePresentation) -> CyclicWord:
    """Canonical class representative of a Dehn-irreducible cyclic word.

    Lexicographically minimal rotation; in surface mode additionally
    minimal over the closure under exact-half-relator swaps (length
    preserving) and Dehn-assisted single-letter conjugations.  The latter
    matter exactly when a rotation extends to more than half the relator
    after one letter; without them distinct representatives of one class
    survive at word length half-relator minus one.
    """
    best = min_rotation(cw.codes)
    if pres.is_surface:
        table = _dehn_table(pres)
        seen = {best}
        queue = [best]
        while queue:
            w = queue.pop()
            n = len(w)
            dbl = w + w
            if n >= 4:
                for i in range(n):
                    u = dbl[i:i + 4]
                    repl = table.half_swaps.get(u)
                    if repl is None:
                        continue
                    nw = list(w)
                    for j in range(4):
                        nw[(i + j) % n] = repl[j]
                    cand = min_rotation(tuple(nw))
                    if cand not in seen:
                        seen.add(cand)
                        queue.append(cand)
            for cand in _letter_conjugates_same_length(w, pres):
                if cand not in seen:
                    seen.add(cand)
                    queue.append(cand)
        best = min(seen)
    return CyclicWord(best, pres.n_generators, canonical=True)


def is_primitive(cw: CyclicWord) -> tuple[bool, CyclicWord, int]:
    """Decompose a cyclic word as root**power with maximal power.

    >>> is_primitive(CyclicWord.from_string("abab", 2))
    (False, CyclicWord('ab'), 2)
    """
    codes = cw.codes
    n = len(codes)
    for p in range(1, n + 1):
        if n % p:
            continue
        if codes[:p] * (n // p) == codes:
            root = CyclicWord(codes[:p], cw.n_generators, canonical=cw.canonical)
            return p == n, root, n // p


def is_identity_element(w: Word, pres: SurfacePresentation) -> bool:
    """Word problem: does w represent 1?  Dehn's algorithm decides this
    exactly for the C'(1/6) surface presentations (free mode: free
    reduction alone)."""
    if len(w) == 0:
        return True
    if not pres.is_surface:
        return False  # w is freely reduced and nonempty
    reduced = dehn_reduce_word(w, pres)
    return len(reduced) == 0


def conjugate_as_classes(a: CyclicWord, b: CyclicWord,
                         pres: SurfacePresentation,
                         conjugator_bound: int) -> bool:
    """Brute-force conjugacy test, independent of canonical forms.

    Necklace equality is checked first; then for every conjugator g with
    |g| <= bound (the identity included) and every rotation r of b, the
    word problem decides g^-1 a g r^-1 = 1 via Dehn reduction.  False only
    means no conjugator within the bound was found.
    """
    if a == b:
        return True
    if len(a) != len(b):
        return False
    g = pres.n_generators
    wa = a.to_word()
    rot_inverses = [b.rotation(k).to_word().inverse() for k in range(len(b))]

    def check(conj: Word) -> bool:
        x = conj.inverse() * wa * conj
        return any(is_identity_element(x * ri, pres) for ri in rot_inverses)

    stack = [Word((), g, _reduced=True)]
    while stack:
        w = stack.pop()
        if check(w):
            return True
        if len(w) < conjugator_bound:
            for c in range(2 * g):
                if w.codes and w.codes[-1] == _inv_code(c, g):
                    continue
                stack.append(Word(w.codes + (c,), g, _reduced=True))
    return False


@dataclass(frozen=True)
class ConjugacyClass:
    """A directed conjugacy class with its canonical representative."""

    representative: CyclicWord
    n: int
    primitive: bool
    root: CyclicWord
    power: int

    @classmethod
    def from_cyclic(cls, cw: CyclicWord) -> "ConjugacyClass":
        prim, root, power = is_primitive(cw)
        return cls(cw, len(cw), prim, root, power)

    def __str__(self):
        return str(self.representative)


def enumerate_classes(pres: SurfacePresentation, n_max: int,
                      memory_budget: int = 80_000_000):
    """Yield every conjugacy class with 1 <= |gamma| <= n_max exactly once.

    Directed: a class and its inverse class are both emitted.  Non-primitive
    classes are included.  Output order is (n, canonical representative).
    Fails fast when the transfer-matrix estimate of the output count exceeds
    memory_budget records.
    """
    from . import enumeration

    mode = enumeration.group_mode(pres)
    est = enumeration.estimate_class_count(mode, n_max)
    if est > memory_budget:
        from .errors import MemoryBudgetError
        raise MemoryBudgetError(
            f"estimated {est:.3g} classes up to n_max={n_max} exceeds "
            f"memory budget of {memory_budget} records")
    for n in range(1, n_max + 1):
        words_arr, periods = enumeration.enumerate_length(mode, n)
        for row, p in zip(words_arr, periods):
            codes = tuple(int(c) for c in row)
            cw = CyclicWord(codes, pres.n_generators, canonical=True)
            root = CyclicWord(codes[:p], pres.n_generators, canonical=True)
            yield ConjugacyClass(cw, n, p == n, root, n // p)
