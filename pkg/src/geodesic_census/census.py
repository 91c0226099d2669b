"""Censuses: the ground-truth datasets of (|gamma|, l(gamma)) pairs.

A census holds every directed conjugacy class with word length up to n_max
exactly once (non-primitive classes included), with geodesic lengths from a
Fuchsian representation, or Birkhoff sums of a roof function for censuses
generated from a synthetic subshift.  Storage is columnar numpy; records
are sorted by (ell, n, id) where ids number the enumeration (n, lex) order.

Certification: summing over {l(gamma) < T} is only sound when no class
beyond n_max could have length below T.  The cutoff uses the empirical
linear envelope alpha_hat = min_n m(n)/n with m(n) = min{ell : |gamma|=n}:
T_cert = alpha_hat * (n_max + 1).  This is a heuristic stand-in for the
word-length/geodesic-length comparability bound (no computable constant is
available); the regression test re-certifies after extending n_max and
checks that no new record undercuts the previous cutoff.

File format (UTF-8 CSV): `# key=value` comment lines, then the header
`id,n,ell,prime,power,trace,word`, then one line per record with ell and
trace printed to 17 significant digits.  The checksum line is FNV-1a
64-bit over the raw bytes of all data lines (newlines included).  Wall
times and worker counts are deliberately not serialized: censuses are
byte-identical across worker counts and re-runs.

Counting convention: classes are directed; a class and its inverse class
are separate records.  Lengths depend on the fixed presentation recorded
in the header.  Free-group (Schottky) censuses are a testbed: the limit
theorems this package checks are stated for compact surfaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels, enumeration, hyperbolic
from .errors import (ChecksumError, DataIntegrityError, FormatVersionError,
                     MemoryBudgetError, NonHyperbolicError)
from .words import CyclicWord, SurfacePresentation

__all__ = [
    "GeodesicRecord", "Census", "build_census", "build_census_from_system",
    "certify_cutoff", "dedupe_classes", "save_census", "load_census",
]

FORMAT_VERSION = 1
_TRACE_ERROR_FLAG = 1e-7


@dataclass(frozen=True)
class GeodesicRecord:
    id: int
    word: str
    n: int
    ell: float
    trace: float
    primitive: bool
    power: int


@dataclass
class Census:
    presentation: str
    representation: str
    mode_kind: str            # surface | free | sft
    alphabet: int
    n_max: int
    ids: np.ndarray           # int64, sorted by (ell, n, id)
    n: np.ndarray             # int16
    ell: np.ndarray           # float64
    prime: np.ndarray         # bool
    power: np.ndarray         # int16
    trace: np.ndarray         # float64
    words: np.ndarray         # (N, n_max) uint8, padded with 255
    alpha_hat: float = float("nan")
    T_cert: float = float("nan")
    build_meta: dict = field(default_factory=dict)  # in-memory only
    _checksum: int | None = None
    _prime_ell_sorted: np.ndarray | None = None

    def __len__(self):
        return len(self.ids)

    def word_string(self, i: int) -> str:
        import string as _s

        g = self.alphabet // 2
        row = self.words[i]
        out = []
        for c in row:
            if c == 255:
                break
            c = int(c)
            if self.mode_kind == "sft":
                out.append(_s.ascii_lowercase[c])  # plain state letters
            else:
                out.append(_s.ascii_lowercase[c] if c < g
                           else _s.ascii_uppercase[c - g])
        return "".join(out)

    def record(self, i: int) -> GeodesicRecord:
        return GeodesicRecord(int(self.ids[i]), self.word_string(i),
                              int(self.n[i]), float(self.ell[i]),
                              float(self.trace[i]), bool(self.prime[i]),
                              int(self.power[i]))

    def __iter__(self):
        return (self.record(i) for i in range(len(self)))

    @property
    def prime_ell_sorted(self) -> np.ndarray:
        if self._prime_ell_sorted is None:
            self._prime_ell_sorted = np.sort(self.ell[self.prime])
        return self._prime_ell_sorted

    def primitive_ells_by_n(self) -> dict[int, np.ndarray]:
        """Sorted primitive-class lengths per word length (pressure input)."""
        out = {}
        for nn in range(1, self.n_max + 1):
            mask = self.prime & (self.n == nn)
            out[nn] = np.sort(self.ell[mask])
        return out

    def m_table(self) -> dict[int, float]:
        """min{ell : |gamma| = n} for each populated n."""
        out = {}
        for nn in range(1, self.n_max + 1):
            mask = self.n == nn
            if mask.any():
                out[nn] = float(self.ell[mask].min())
        return out

    def checksum(self) -> int:
        if self._checksum is None:
            h = _kernels.FNV_OFFSET
            for chunk in self._data_line_chunks():
                h = _kernels.fnv1a64(np.frombuffer(chunk, dtype=np.uint8), h)
            self._checksum = int(h)
        return self._checksum

    def _data_line_chunks(self, chunk_records: int = 500_000):
        for start in range(0, len(self), chunk_records):
            stop = min(start + chunk_records, len(self))
            lines = []
            for i in range(start, stop):
                lines.append(
                    f"{int(self.ids[i])},{int(self.n[i])},"
                    f"{self.ell[i]:.17g},{1 if self.prime[i] else 0},"
                    f"{int(self.power[i])},{self.trace[i]:.17g},"
                    f"{self.word_string(i)}\n")
            yield "".join(lines).encode()

    def restricted(self, n_max: int) -> "Census":
        """Sub-census of classes with |gamma| <= n_max, re-certified."""
        if n_max > self.n_max:
            raise ValueError("cannot extend a census by restriction")
        keep = self.n <= n_max
        sub = Census(self.presentation, self.representation, self.mode_kind,
                     self.alphabet, n_max, self.ids[keep], self.n[keep],
                     self.ell[keep], self.prime[keep], self.power[keep],
                     self.trace[keep], self.words[keep][:, :n_max])
        certify_cutoff(sub)
        return sub

    def equals(self, other: "Census") -> bool:
        return (self.presentation == other.presentation
                and self.representation == other.representation
                and self.mode_kind == other.mode_kind
                and self.alphabet == other.alphabet
                and self.n_max == other.n_max
                and np.array_equal(self.ids, other.ids)
                and np.array_equal(self.n, other.n)
                and np.array_equal(self.ell, other.ell)
                and np.array_equal(self.prime, other.prime)
                and np.array_equal(self.power, other.power)
                and np.array_equal(self.trace, other.trace)
                and np.array_equal(self.words, other.words)
                and self.T_cert == other.T_cert)


def _assemble(presentation, representation, mode_kind, alphabet, n_max,
              per_n, build_meta):
    """Sort per-n blocks by (ell, n, id) into a Census."""
    total = sum(len(b["ell"]) for b in per_n)
    ids = np.zeros(total, dtype=np.int64)
    n_arr = np.zeros(total, dtype=np.int16)
    ell = np.zeros(total)
    prime = np.zeros(total, dtype=bool)
    power = np.zeros(total, dtype=np.int16)
    trace = np.zeros(total)
    words = np.full((total, n_max), 255, dtype=np.uint8)
    pos = 0
    for block in per_n:
        k = len(block["ell"])
        sl = slice(pos, pos + k)
        ids[sl] = np.arange(pos, pos + k)
        n_arr[sl] = block["n"]
        ell[sl] = block["ell"]
        prime[sl] = block["prime"]
        power[sl] = block["power"]
        trace[sl] = block["trace"]
        words[sl, :block["n"]] = block["words"]
        pos += k
    order = np.lexsort((ids, n_arr, ell))
    census = Census(presentation, representation, mode_kind, alphabet, n_max,
                    ids[order], n_arr[order], ell[order], prime[order],
                    power[order], trace[order], words[order],
                    build_meta=build_meta)
    certify_cutoff(census)
    return census


def build_census(pres: SurfacePresentation, rep: hyperbolic.FuchsianRep,
                 n_max: int, workers: int = 1,
                 memory_budget: int = 80_000_000) -> Census:
    """Enumerate all classes up to n_max and attach geodesic lengths.

    Primitive classes get lengths from batched matrix products (forward and
    reverse association; disagreement beyond 1e-7 relative is counted in
    build_meta["flagged_trace_errors"]).  Non-primitive classes inherit
    ell = power * root_ell exactly, with traces from the corresponding
    Chebyshev relation, rather than from long products.
    """
    import time as _time

    if rep.presentation != pres:
        raise ValueError("representation presentation mismatch")
    t0 = _time.monotonic()
    check = hyperbolic.verify_representation(rep, min(n_max, 4), workers)
    if not check.passed:
        raise DataIntegrityError(
            f"representation failed verification: {check.summary()}")
    mode = enumeration.group_mode(pres)
    est = enumeration.estimate_class_count(mode, n_max)
    if est > memory_budget:
        raise MemoryBudgetError(
            f"estimated {est:.3g} classes exceeds budget {memory_budget}")

    root_keys: dict[int, tuple] = {}
    per_n = []
    flagged = 0
    chunk = 2_000_000
    for n in range(1, n_max + 1):
        words, periods = enumeration.enumerate_length(mode, n, workers)
        prim = periods == np.int16(n)
        wp = words[prim]
        tr = np.empty(len(wp))
        for s in range(0, len(wp), chunk):
            part = wp[s:s + chunk]
            fwd = hyperbolic.batch_traces(rep.stack, part)
            rev = hyperbolic.batch_traces(rep.stack, part, reverse=True)
            relerr = np.abs(fwd - rev) / np.maximum(1.0, np.abs(fwd))
            flagged += int((relerr > _TRACE_ERROR_FLAG).sum())
            tr[s:s + chunk] = fwd
        if len(tr) and np.abs(tr).min() <= 2.0 + rep.tolerance:
            bad = int(np.abs(tr).argmin())
            raise NonHyperbolicError(
                f"non-hyperbolic class at n={n}, |trace|="
                f"{abs(tr[bad]):.6g}; census build aborted")
        ell_p = 2.0 * np.arccosh(np.abs(tr) / 2.0)
        if n <= n_max // 2 and len(wp):
            keys = enumeration.pack_words(wp, mode.alphabet)
            order = np.argsort(keys)
            root_keys[n] = (keys[order], ell_p[order], np.sign(tr[order]))
        # non-primitive records from their primitive roots
        npm = ~prim
        ell_np = np.zeros(int(npm.sum()))
        tr_np = np.zeros(len(ell_np))
        if len(ell_np):
            idxs = np.where(npm)[0]
            pv = periods[idxs].astype(np.int64)
            for p in np.unique(pv):
                sel = pv == p
                sub = words[idxs[sel]][:, :p]
                keys = enumeration.pack_words(sub, mode.alphabet)
                rk, re_, rs = root_keys[int(p)]
                pos = np.searchsorted(rk, keys)
                if not np.array_equal(rk[pos], keys):
                    raise DataIntegrityError("missing primitive root record")
                k = n // int(p)
                ell_np[sel] = k * re_[pos]
                tr_np[sel] = rs[pos] ** k * 2.0 * np.cosh(k * re_[pos] / 2.0)
        per_n.append({
            "n": n,
            "words": np.concatenate([wp, words[npm]], axis=0),
            "ell": np.concatenate([ell_p, ell_np]),
            "trace": np.concatenate([tr, tr_np]),
            "prime": np.concatenate([np.ones(len(ell_p), bool),
                                     np.zeros(len(ell_np), bool)]),
            "power": np.concatenate([np.ones(len(ell_p), np.int16),
                                     (n // periods[npm]).astype(np.int16)]),
        })
        del words, periods, wp
    meta = {"workers": workers, "flagged_trace_errors": flagged,
            "build_seconds": round(_time.monotonic() - t0, 3)}
    return _assemble(pres.describe(), rep.describe(),
                     "surface" if pres.is_surface else "free",
                     mode.alphabet, n_max, per_n, meta)


def build_census_from_system(system, n_max: int, workers: int = 1,
                             memory_budget: int = 80_000_000) -> Census:
    """Census of the periodic orbits of a synthetic subshift.

    Words are state strings; ell is the Birkhoff sum of the roof over the
    cycle.  The trace column is filled with the value 2*cosh(ell/2) that a
    curvature -1 matrix of that translation length would have, keeping the
    schema and the dedupe tooling uniform.
    """
    import time as _time

    t0 = _time.monotonic()
    mode = enumeration.sft_mode(system.transition, label="sft")
    est = enumeration.estimate_class_count(mode, n_max)
    if est > memory_budget:
        raise MemoryBudgetError(
            f"estimated {est:.3g} classes exceeds budget {memory_budget}")
    roof = np.asarray(system.roof, dtype=np.float64)
    per_n = []
    for n in range(1, n_max + 1):
        words, periods = enumeration.enumerate_length(mode, n, workers)
        ell = roof[words].sum(axis=1)
        per_n.append({
            "n": n,
            "words": words,
            "ell": ell,
            "trace": 2.0 * np.cosh(ell / 2.0),
            "prime": periods == np.int16(n),
            "power": (n // periods.astype(np.int64)).astype(np.int16),
        })
    meta = {"workers": workers, "build_seconds":
            round(_time.monotonic() - t0, 3)}
    return _assemble(system.describe(), "sft", "sft", mode.alphabet, n_max,
                     per_n, meta)


def certify_cutoff(census: Census) -> float:
    """Compute alpha_hat and T_cert = alpha_hat * (n_max + 1); see module doc."""
    if len(census) == 0:
        raise DataIntegrityError("cannot certify an empty census")
    table = census.m_table()
    census.alpha_hat = min(v / k for k, v in table.items())
    census.T_cert = census.alpha_hat * (census.n_max + 1)
    return census.T_cert


@dataclass
class CollisionAudit:
    n: int
    ell: float
    id_a: int
    id_b: int
    status: str  # merged-rotation | merged-conjugate | kept-distinct


def dedupe_classes(census: Census, conjugator_bound: int,
                   presentation: SurfacePresentation | None = None):
    """Audit duplicate records: trace collisions tested for actual conjugacy.

    Records sharing (n, ell rounded to 1e-6) with trace difference below
    1e-9 and distinct words are tested: first rotation equality (necklace
    identity), then brute-force conjugation up to conjugator_bound.
    Confirmed duplicates are merged keeping the lowest id; unresolved
    collisions are kept and listed.  Returns (census, audits); the census
    object is unchanged when nothing merged.
    """
    if census.mode_kind == "sft":
        pres = None
    elif presentation is not None:
        pres = presentation
    elif census.mode_kind == "free":
        pres = SurfacePresentation(free_rank=census.alphabet // 2)
    else:
        pres = SurfacePresentation(genus=census.alphabet // 4)

    key_ell = np.round(census.ell, 6)
    order = np.lexsort((census.ids, key_ell, census.n))
    audits: list[CollisionAudit] = []
    drop: set[int] = set()
    i = 0
    N = len(census)
    while i < N:
        j = i + 1
        while (j < N and census.n[order[j]] == census.n[order[i]]
               and key_ell[order[j]] == key_ell[order[i]]):
            j += 1
        if j - i > 1:
            idxs = [order[k] for k in range(i, j)]
            for a in range(len(idxs)):
                for b in range(a + 1, len(idxs)):
                    ia, ib = idxs[a], idxs[b]
                    if abs(census.trace[ia] - census.trace[ib]) >= 1e-9:
                        continue
                    wa, wb = census.word_string(ia), census.word_string(ib)
                    if wa == wb:
                        continue
                    status = _collision_status(census, ia, ib, pres,
                                               conjugator_bound)
                    if status.startswith("merged"):
                        drop.add(int(census.ids[max(ia, ib,
                                                    key=lambda t: census.ids[t])]))
                    audits.append(CollisionAudit(
                        int(census.n[ia]), float(census.ell[ia]),
                        int(census.ids[ia]), int(census.ids[ib]), status))
        i = j
    if not drop:
        return census, audits
    keep = ~np.isin(census.ids, np.fromiter(drop, dtype=np.int64))
    out = Census(census.presentation, census.representation, census.mode_kind,
                 census.alphabet, census.n_max, census.ids[keep],
                 census.n[keep], census.ell[keep], census.prime[keep],
                 census.power[keep], census.trace[keep], census.words[keep],
                 build_meta=dict(census.build_meta, deduped=len(drop)))
    certify_cutoff(out)
    return out, audits


def _collision_status(census, ia, ib, pres, bound) -> str:
    from .words import conjugate_as_classes

    wa, wb = census.word_string(ia), census.word_string(ib)
    rotations = {wa[k:] + wa[:k] for k in range(len(wa))}
    if wb in rotations:
        return "merged-rotation"
    if pres is None:
        return "kept-distinct"
    g = census.alphabet // 2
    ca = CyclicWord.from_string(wa, g)
    cb = CyclicWord.from_string(wb, g)
    if conjugate_as_classes(ca, cb, pres, bound):
        return "merged-conjugate"
    return "kept-distinct"


# ---------------------------------------------------------------------------
# persistence

def save_census(census: Census, path) -> None:
    header = [
        f"# format_version={FORMAT_VERSION}",
        f"# presentation={census.presentation}",
        f"# representation={census.representation}",
        f"# mode={census.mode_kind}",
        f"# alphabet={census.alphabet}",
        f"# n_max={census.n_max}",
        f"# alpha_hat={census.alpha_hat:.17g}",
        f"# T_cert={census.T_cert:.17g}",
        f"# checksum={census.checksum():016x}",
        "id,n,ell,prime,power,trace,word",
    ]
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode())
        for chunk in census._data_line_chunks():
            fh.write(chunk)


def load_census(path) -> Census:
    meta = {}
    data_start = None
    with open(path, "rb") as fh:
        raw = fh.read()
    lines = raw.split(b"\n")
    i = 0
    while i < len(lines) and lines[i].startswith(b"# "):
        key, _, val = lines[i][2:].decode().partition("=")
        meta[key] = val
        i += 1
    if meta.get("format_version") != str(FORMAT_VERSION):
        raise FormatVersionError(
            f"unsupported format_version={meta.get('format_version')!r}")
    if i >= len(lines) or lines[i] != b"id,n,ell,prime,power,trace,word":
        raise DataIntegrityError("missing census column header")
    body = lines[i + 1:]
    if body and body[-1] == b"":
        body = body[:-1]
    data = b"".join(line + b"\n" for line in body)
    h = _kernels.fnv1a64(np.frombuffer(data, dtype=np.uint8),
                         _kernels.FNV_OFFSET)
    if f"{int(h):016x}" != meta.get("checksum"):
        raise ChecksumError(
            f"checksum mismatch: computed {int(h):016x}, "
            f"header {meta.get('checksum')}")

    alphabet = int(meta["alphabet"])
    n_max = int(meta["n_max"])
    g = alphabet // 2
    count = len(body)
    ids = np.zeros(count, dtype=np.int64)
    n_arr = np.zeros(count, dtype=np.int16)
    ell = np.zeros(count)
    prime = np.zeros(count, dtype=bool)
    power = np.zeros(count, dtype=np.int16)
    trace = np.zeros(count)
    words = np.full((count, n_max), 255, dtype=np.uint8)
    for r, line in enumerate(body):
        f0, f1, f2, f3, f4, f5, f6 = line.decode().split(",")
        ids[r] = int(f0)
        n_arr[r] = int(f1)
        ell[r] = float(f2)
        prime[r] = f3 == "1"
        power[r] = int(f4)
        trace[r] = float(f5)
        if meta["mode"] == "sft":
            for j, ch in enumerate(f6):
                words[r, j] = ord(ch) - ord("a")
        else:
            for j, ch in enumerate(f6):
                c = ord(ch)
                words[r, j] = (c - ord("a")) if c >= ord("a") \
                    else (c - ord("A") + g)
    census = Census(meta["presentation"], meta["representation"], meta["mode"],
                    alphabet, n_max, ids, n_arr, ell, prime, power, trace,
                    words, alpha_hat=float(meta["alpha_hat"]),
                    T_cert=float(meta["T_cert"]))
    census._checksum = int(h)
    return census
