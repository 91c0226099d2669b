"""hyperbolic_geom: representations, translation lengths, verification."""

import math
import random

import numpy as np
import pytest

from geodesic_census import (CyclicWord, FuchsianRep, MoebiusMatrix,
                             SurfacePresentation, Word, evaluate_word,
                             octagon_representation, schottky_representation,
                             translation_length, verify_representation)
from geodesic_census.errors import DataIntegrityError, NonHyperbolicError
from geodesic_census.hyperbolic import OCTAGON_GENERATOR_LENGTH, batch_traces


def test_octagon_relator_is_identity(octagon_rep):
    assert octagon_rep.relator_deviation() < 1e-9


def test_octagon_generator_length_trigonometry(octagon_rep):
    # regular octagon with vertex angle pi/4: cosh(L0/2) = cot(pi/8)
    expected = 2.0 * math.acosh(1.0 / math.tan(math.pi / 8.0))
    assert abs(expected - 2.0 * math.acosh(1.0 + math.sqrt(2.0))) < 1e-12
    for g in octagon_rep.generator_matrices:
        assert abs(translation_length(g) - expected) < 1e-9


def test_octagon_ab_is_hyperbolic(octagon_rep):
    m = evaluate_word(octagon_rep, Word.from_string("ab", 4))
    assert abs(m.trace) > 2.0


def test_schottky_generator_length_by_construction():
    rep = schottky_representation(3.0)
    for g in rep.generator_matrices:
        assert abs(g.trace) == pytest.approx(2.0 * math.cosh(1.5), abs=1e-12)
        assert translation_length(g) == pytest.approx(3.0, abs=1e-12)


def test_schottky_commutator_hyperbolic():
    rep = schottky_representation(3.0)
    m = evaluate_word(rep, Word.from_string("abAB", 2))
    assert abs(m.trace) > 2.0
    assert translation_length(m) > 0.0


def test_schottky_overlapping_disks_rejected():
    # need cosh(separation/2) > sqrt(2), i.e. separation > 1.7627
    with pytest.raises(ValueError):
        schottky_representation(1.5)
    with pytest.raises(ValueError):
        schottky_representation(-1.0)


def test_evaluate_word_empty_is_identity():
    rep = schottky_representation(3.0)
    m = evaluate_word(rep, Word((), 2))
    assert np.allclose(m.m, np.eye(2), atol=1e-15)


def test_evaluate_word_single_letter(octagon_rep):
    m = evaluate_word(octagon_rep, Word.from_string("a", 4))
    assert np.array_equal(m.m, octagon_rep.generator_matrices[0].m)


def test_evaluate_word_inverse_pair(octagon_rep):
    m = evaluate_word(octagon_rep, Word.from_string("aA", 4))
    assert np.abs(m.m - np.eye(2)).max() < 1e-12


def test_translation_length_parabolic_boundary():
    with pytest.raises(NonHyperbolicError):
        translation_length(2.0)


def test_translation_length_closed_form_values():
    assert translation_length(2.0 * math.cosh(1.0)) == pytest.approx(2.0, abs=1e-12)
    assert translation_length(3.0) == pytest.approx(2.0 * math.acosh(1.5), abs=1e-12)


def test_moebius_determinant_enforced():
    with pytest.raises(ValueError):
        MoebiusMatrix([[2.0, 0.0], [0.0, 1.0]])


# ---------------------------------------------------------------------------
# invariants

def _random_words(rng, n_letters, length, count):
    alphabet = "abcdABCD"[:2 * n_letters]
    words = []
    while len(words) < count:
        w = "".join(rng.choice(alphabet) for _ in range(length))
        words.append(w)
    return words


def test_conjugation_invariance(octagon_rep):
    rng = random.Random(23)
    base = evaluate_word(octagon_rep, Word.from_string("abc", 4))
    l0 = translation_length(base)
    for w in _random_words(rng, 4, 4, 25):
        g = evaluate_word(octagon_rep, Word.from_string(w, 4))
        conj = g @ base @ g.inverse()
        assert abs(translation_length(conj) - l0) < 1e-9


def test_power_law(octagon_rep):
    m = evaluate_word(octagon_rep, Word.from_string("ab", 4))
    l1 = translation_length(m)
    p = m
    for k in range(2, 6):
        p = p @ m
        assert abs(translation_length(p) - k * l1) < 1e-9


def test_inverse_symmetry(octagon_rep):
    for w in ("a", "ab", "abcB", "aabA"):
        m = evaluate_word(octagon_rep, Word.from_string(w, 4))
        assert abs(translation_length(m) - translation_length(m.inverse())) < 1e-9


def test_entry_growth_and_product_error_at_14(octagon_rep):
    # worst-case families at |gamma| = 14: near-powers maximize entries
    words = ["a" * 13 + "b", "ab" * 7, "abcd" * 3 + "ab", "a" * 7 + "b" * 7]
    codes = np.array([[_code(c) for c in w] for w in words], dtype=np.uint8)
    prod = None
    for j in range(codes.shape[1]):
        gj = octagon_rep.stack[codes[:, j]]
        prod = gj.copy() if prod is None else np.matmul(prod, gj)
    assert np.abs(prod).max() < 1e9
    fwd = batch_traces(octagon_rep.stack, codes)
    rev = batch_traces(octagon_rep.stack, codes, reverse=True)
    rel = np.abs(fwd - rev) / np.maximum(1.0, np.abs(fwd))
    assert rel.max() < 1e-7


def _code(ch):
    return "abcdABCD".index(ch)


def test_verify_octagon_n3(octagon_rep):
    report = verify_representation(octagon_rep, 3)
    assert report.passed
    assert report.relator_deviation < 1e-9
    assert report.all_hyperbolic


def test_verify_degenerate_identity_rep_fails():
    ident = [MoebiusMatrix(np.eye(2)) for _ in range(4)]
    rep = FuchsianRep(SurfacePresentation(genus=2), ident, strict=False)
    report = verify_representation(rep, 2)
    assert report.relator_deviation < 1e-9  # relator trivially passes
    assert not report.all_hyperbolic
    assert not report.passed


def test_strict_constructor_rejects_elliptic():
    ident = [MoebiusMatrix(np.eye(2)) for _ in range(4)]
    with pytest.raises(DataIntegrityError):
        FuchsianRep(SurfacePresentation(genus=2), ident)
