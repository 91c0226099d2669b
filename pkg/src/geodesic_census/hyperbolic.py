"""Fuchsian matrix representations and geodesic (translation) lengths.

Curvature is normalized to -1 throughout, so the translation length of a
hyperbolic isometry with matrix M in SL(2, R) is l = 2*arccosh(|tr M|/2).

The genus-2 model is the regular hyperbolic octagon with vertex angle pi/4
centered at the origin of the disk model, opposite sides identified.  The
pairing translations have axes through the origin at angles k*pi/4 and
common translation length L0 = 2*arccosh(1 + sqrt 2): cosh(L0/2) equals the
octagon's apothem cosh, cot(pi/8) = 1 + sqrt 2.  With the translation
directions alternating (+, -, +, -) the four maps satisfy the
opposite-side-pairing relator a b c d a^-1 b^-1 c^-1 d^-1 = I exactly, as
the constructor verifies.

The free-rank-2 testbed is a pair of disk-model translations along
orthogonal axes with a common translation length ("separation"); their four
isometric disks are pairwise disjoint once cosh(separation/2) > sqrt 2,
which is checked, giving a classical Schottky (free, discrete) group.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataIntegrityError, NonHyperbolicError
from .words import CyclicWord, SurfacePresentation, Word

__all__ = [
    "MoebiusMatrix", "FuchsianRep", "octagon_representation",
    "schottky_representation", "evaluate_word", "translation_length",
    "verify_representation", "OCTAGON_GENERATOR_LENGTH",
]

OCTAGON_GENERATOR_LENGTH = 2.0 * np.arccosh(1.0 + np.sqrt(2.0))

_DET_TOL = 1e-12


class MoebiusMatrix:
    """A real 2x2 matrix with determinant 1 (tolerance 1e-12)."""

    __slots__ = ("m",)

    def __init__(self, entries):
        m = np.asarray(entries, dtype=np.float64)
        if m.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det - 1.0) > _DET_TOL:
            raise ValueError(f"determinant {det!r} is not 1")
        self.m = m

    def __matmul__(self, other: "MoebiusMatrix") -> "MoebiusMatrix":
        out = MoebiusMatrix.__new__(MoebiusMatrix)
        out.m = self.m @ other.m
        return out

    def inverse(self) -> "MoebiusMatrix":
        # exact adjugate; det == 1
        a, b, c, d = self.m.ravel()
        out = MoebiusMatrix.__new__(MoebiusMatrix)
        out.m = np.array([[d, -b], [-c, a]])
        return out

    @property
    def trace(self) -> float:
        return float(self.m[0, 0] + self.m[1, 1])

    def __repr__(self):
        return f"MoebiusMatrix({self.m.tolist()!r})"


def _identity() -> MoebiusMatrix:
    return MoebiusMatrix(np.eye(2))


@dataclass
class FuchsianRep:
    """Generator matrices for a presentation, plus inverse/stacked caches."""

    presentation: SurfacePresentation
    generator_matrices: list[MoebiusMatrix]
    tolerance: float = 1e-9
    name: str = ""
    strict: bool = True  # False skips validation (verify_representation use)

    def __post_init__(self):
        g = self.presentation.n_generators
        if len(self.generator_matrices) != g:
            raise ValueError(f"expected {g} generator matrices")
        # stacked [generators..., inverses...] for array evaluation
        stack = np.zeros((2 * g, 2, 2))
        for i, mat in enumerate(self.generator_matrices):
            stack[i] = mat.m
            stack[i + g] = mat.inverse().m
        self.stack = stack
        if self.strict:
            self._validate()

    def _validate(self):
        for i, mat in enumerate(self.generator_matrices):
            if abs(mat.trace) <= 2.0 + self.tolerance:
                raise DataIntegrityError(
                    f"generator {i} is not hyperbolic (|trace|="
                    f"{abs(mat.trace):.6g})")
        dev = self.relator_deviation()
        if dev is not None and dev > self.tolerance:
            raise DataIntegrityError(
                f"relator deviates from +-identity by {dev:.3g}")

    def relator_deviation(self) -> float | None:
        """Max entry deviation of the relator from +-I; None in free mode."""
        rel = self.presentation.relator
        if rel is None:
            return None
        prod = evaluate_word(self, rel.to_word()).m
        eye = np.eye(2)
        return float(min(np.abs(prod - eye).max(), np.abs(prod + eye).max()))

    def describe(self) -> str:
        return self.name or "custom"


def _disk_translation(theta: float, length: float) -> np.ndarray:
    """SU(1,1) translation along the axis through 0 at angle theta."""
    ch, sh = np.cosh(length / 2.0), np.sinh(length / 2.0)
    return np.array([[ch, np.exp(1j * theta) * sh],
                     [np.exp(-1j * theta) * sh, ch]])


_CAYLEY = np.array([[1.0, -1j], [1.0, 1j]])
_CAYLEY_INV = np.linalg.inv(_CAYLEY)


def _to_uhp(disk_matrix: np.ndarray) -> np.ndarray:
    """Conjugate an SU(1,1) matrix to SL(2, R) (upper half-plane model)."""
    u = _CAYLEY_INV @ disk_matrix @ _CAYLEY
    u = u / np.sqrt(np.linalg.det(u))
    if np.abs(u.imag).max() > 1e-12:
        raise DataIntegrityError("disk matrix did not conjugate to a real one")
    return u.real


def octagon_representation() -> FuchsianRep:
    """The regular-octagon opposite-side-pairing genus-2 representation.

    Generator k is the rotation of a fixed hyperbolic translation by k*pi/4;
    the alternating translation directions realize the relator
    a b c d a^-1 b^-1 c^-1 d^-1 (checked to 1e-9 at construction).
    """
    pres = SurfacePresentation(genus=2)
    gens = []
    for k in range(4):
        sign = 1.0 if k % 2 == 0 else -1.0
        disk = _disk_translation(k * np.pi / 4.0,
                                 sign * OCTAGON_GENERATOR_LENGTH)
        gens.append(MoebiusMatrix(_to_uhp(disk)))
    return FuchsianRep(pres, gens, tolerance=1e-9, name="octagon")


def schottky_representation(separation: float = 3.0) -> FuchsianRep:
    """Rank-2 free Schottky group: orthogonal-axis translations.

    `separation` is the common translation length.  The four isometric
    circles in the disk model have radius 1/sinh(separation/2) around
    centers at distance coth(separation/2) from the origin along the +-x
    and +-y directions; adjacent disks are disjoint iff
    cosh(separation/2) > sqrt 2, and overlapping parameters are rejected.
    """
    if separation <= 0:
        raise ValueError("separation must be positive")
    ch = np.cosh(separation / 2.0)
    sh = np.sinh(separation / 2.0)
    # adjacent center distance sqrt(2)*coth vs radius sum 2/sinh
    if np.sqrt(2.0) * ch <= 2.0:
        raise ValueError(
            f"isometric disks overlap at separation={separation:g}; "
            "need cosh(separation/2) > sqrt(2)")
    pres = SurfacePresentation(free_rank=2)
    gens = [MoebiusMatrix(_to_uhp(_disk_translation(np.pi / 2.0, separation))),
            MoebiusMatrix(_to_uhp(_disk_translation(0.0, separation)))]
    return FuchsianRep(pres, gens, tolerance=1e-9,
                       name=f"schottky(separation={separation:g})")


def evaluate_word(rep: FuchsianRep, w: Word | CyclicWord) -> MoebiusMatrix:
    """Ordered product of generator matrices; inverses use the adjugate."""
    out = _identity()
    for code in w.codes:
        nxt = MoebiusMatrix.__new__(MoebiusMatrix)
        nxt.m = out.m @ rep.stack[code]
        out = nxt
    return out


def translation_length(m: MoebiusMatrix | float,
                       tolerance: float = 1e-9) -> float:
    """Geodesic length 2*arccosh(|tr|/2) of a hyperbolic matrix.

    Raises NonHyperbolicError for |trace| <= 2 + tolerance (identity,
    elliptic or parabolic input); such input from a census class is a fatal
    data-integrity failure upstream.
    """
    tr = abs(m.trace if isinstance(m, MoebiusMatrix) else float(m))
    if tr <= 2.0 + tolerance:
        raise NonHyperbolicError(f"|trace| = {tr:.12g} is not > 2")
    return float(2.0 * np.arccosh(tr / 2.0))


def batch_traces(stack: np.ndarray, words: np.ndarray,
                 reverse: bool = False) -> np.ndarray:
    """Traces of matrix products for an array of words (rows of codes).

    With reverse=True the product is accumulated in the opposite
    association order; the difference between the two estimates the
    floating-point error of the product.
    """
    if len(words) == 0:
        return np.zeros(0)
    order = range(words.shape[1] - 1, -1, -1) if reverse else range(words.shape[1])
    prod = None
    for j in order:
        gj = stack[words[:, j]]
        if prod is None:
            prod = gj.copy()
        elif reverse:
            prod = np.matmul(gj, prod)
        else:
            prod = np.matmul(prod, gj)
    return prod[:, 0, 0] + prod[:, 1, 1]


@dataclass
class RepresentationReport:
    relator_deviation: float | None
    n_checked: int
    all_hyperbolic: bool
    min_abs_trace: float
    max_abs_entry: float
    max_rotation_trace_dev: float
    max_product_error: float
    passed: bool

    def summary(self) -> str:
        status = "pass" if self.passed else "FAIL"
        rel = ("-" if self.relator_deviation is None
               else f"{self.relator_deviation:.3e}")
        return (f"[{status}] relator_dev={rel} n<={self.n_checked} "
                f"min|tr|={self.min_abs_trace:.6g} "
                f"max|entry|={self.max_abs_entry:.3e} "
                f"rot_dev={self.max_rotation_trace_dev:.3e} "
                f"prod_err={self.max_product_error:.3e}")


def verify_representation(rep: FuchsianRep, n_check: int,
                          workers: int = 1) -> RepresentationReport:
    """Check relator, hyperbolicity and rotation invariance up to n_check.

    Every class with |gamma| <= n_check is evaluated; traces must exceed 2
    in absolute value and must agree (to 1e-9) along word rotations, which
    exercises conjugation invariance of the representation.
    """
    from . import enumeration

    mode = enumeration.group_mode(rep.presentation)
    rel_dev = rep.relator_deviation()
    min_tr, max_entry, max_rot, max_err = np.inf, 0.0, 0.0, 0.0
    hyper = True
    for n in range(1, n_check + 1):
        words, _ = enumeration.enumerate_length(mode, n, workers=workers)
        if len(words) == 0:
            continue
        chunk = 2_000_000
        for s in range(0, len(words), chunk):
            part = words[s:s + chunk]
            tr = batch_traces(rep.stack, part)
            tr_rev = batch_traces(rep.stack, part, reverse=True)
            err = np.abs(tr - tr_rev) / np.maximum(1.0, np.abs(tr))
            max_err = max(max_err, float(err.max()))
            min_tr = min(min_tr, float(np.abs(tr).min()))
            if np.abs(tr).min() <= 2.0 + rep.tolerance:
                hyper = False
            # rotation invariance on the first rotation of every word and
            # all rotations of a deterministic subsample
            rot = np.roll(part, -1, axis=1)
            tr_rot = batch_traces(rep.stack, rot)
            max_rot = max(max_rot, float(np.abs(tr - tr_rot).max()))
            sample = part[:: max(1, len(part) // 64)]
            for k in range(2, n):
                tr_k = batch_traces(rep.stack, np.roll(sample, -k, axis=1))
                base = tr[:: max(1, len(part) // 64)][:len(tr_k)]
                max_rot = max(max_rot, float(np.abs(base - tr_k).max()))
            # entry growth control
            prod = None
            for j in range(part.shape[1]):
                gj = rep.stack[part[:, j]]
                prod = gj.copy() if prod is None else np.matmul(prod, gj)
            max_entry = max(max_entry, float(np.abs(prod).max()))
    passed = (hyper and max_rot < 1e-9 and max_err < 1e-7
              and (rel_dev is None or rel_dev < rep.tolerance))
    return RepresentationReport(rel_dev, n_check, hyper, min_tr, max_entry,
                                max_rot, max_err, passed)
