"""census: building, certification, dedupe, persistence, determinism."""

import math

import numpy as np
import pytest

from geodesic_census import (MarkovChainSystem, SurfacePresentation,
                             build_census, build_census_from_system,
                             certify_cutoff, dedupe_classes, load_census,
                             octagon_representation, save_census,
                             schottky_representation, evaluate_word,
                             translation_length, Word)
from geodesic_census.census import Census
from geodesic_census.errors import (ChecksumError, DataIntegrityError,
                                    FormatVersionError, MemoryBudgetError)

import _oracles

L0 = 2.0 * math.acosh(1.0 + math.sqrt(2.0))


def test_octagon_n1_records(octagon_rep):
    c = build_census(SurfacePresentation(genus=2), octagon_rep, 1)
    assert len(c) == 8
    assert np.allclose(c.ell, L0, atol=1e-9)
    assert c.prime.all()


def test_octagon_n2_record_count(octagon_rep):
    c = build_census(SurfacePresentation(genus=2), octagon_rep, 2)
    assert len(c) == 40
    assert (c.n == 1).sum() == 8 and (c.n == 2).sum() == 32


def test_schottky_n2_records():
    rep = schottky_representation(3.0)
    c = build_census(SurfacePresentation(free_rank=2), rep, 2)
    assert len(c) == 12


def test_exactly_once_vs_oracle(octagon_census6, schottky_census8):
    for n in range(1, 7):
        assert (octagon_census6.n == n).sum() == _oracles.class_count(4, True, n)
        assert (schottky_census8.n == n).sum() == _oracles.class_count(2, False, n)


def test_census_sorted_by_ell_n_id(octagon_census6):
    c = octagon_census6
    key = np.lexsort((c.ids, c.n, c.ell))
    assert np.array_equal(key, np.arange(len(c)))


def test_power_consistency(schottky_census8, octagon_census6):
    for c in (schottky_census8, octagon_census6):
        prim = {}
        for i in range(len(c)):
            if c.prime[i]:
                prim[c.word_string(i)] = (int(c.n[i]), float(c.ell[i]))
        for i in range(len(c)):
            if not c.prime[i]:
                k = int(c.power[i])
                w = c.word_string(i)
                root = w[: len(w) // k]
                rn, rell = prim[root]
                assert c.n[i] == k * rn
                assert abs(c.ell[i] - k * rell) < 1e-9


def test_cutoff_certification_n1(octagon_rep):
    c = build_census(SurfacePresentation(genus=2), octagon_rep, 1)
    assert c.alpha_hat == pytest.approx(L0, abs=1e-9)
    assert c.T_cert == pytest.approx(2 * L0, abs=1e-9)


def test_cutoff_single_record_formula():
    sys1 = MarkovChainSystem.full_shift([2.5])
    c = build_census_from_system(sys1, 1)
    assert len(c) == 1
    assert c.T_cert == pytest.approx(2 * 2.5)


def test_cutoff_schottky_bound(schottky_census8):
    # commutator-type words shorten per letter, so alpha_hat <= 3
    c = schottky_census8
    m2 = float(c.ell[c.n == 2].min())
    assert c.alpha_hat <= 3.0 + 1e-12
    assert c.T_cert <= 3.0 * (c.n_max + 1) + 1e-9
    # m(2) by brute force over the 8 words at n=2
    rep = schottky_representation(3.0)
    ells = []
    for w in _oracles.admissible_words(2, False, 2):
        m = evaluate_word(rep, Word.from_string(w, 2))
        ells.append(translation_length(m))
    assert min(ells) == pytest.approx(m2, abs=1e-9)


def test_cutoff_a_posteriori(octagon_rep):
    c4 = build_census(SurfacePresentation(genus=2), octagon_rep, 4)
    c5 = build_census(SurfacePresentation(genus=2), octagon_rep, 5)
    new = c5.ell[c5.n == 5]
    assert (new >= c4.T_cert - 1e-9).all()


def test_worker_invariance_bytes(octagon_rep, tmp_path):
    pres = SurfacePresentation(genus=2)
    paths = []
    for k in (1, 2, 4):
        c = build_census(pres, octagon_rep, 5, workers=k)
        p = tmp_path / f"census_w{k}.csv"
        save_census(c, p)
        paths.append(p.read_bytes())
    assert paths[0] == paths[1] == paths[2]


def test_save_load_round_trip(octagon_rep, tmp_path):
    c = build_census(SurfacePresentation(genus=2), octagon_rep, 2)
    p = tmp_path / "census.csv"
    save_census(c, p)
    c2 = load_census(p)
    assert c.equals(c2)
    # reals survive bit-exactly through the 17-significant-digit decimals
    assert np.array_equal(c.ell, c2.ell)
    assert np.array_equal(c.trace, c2.trace)


def test_load_truncated_file_checksum_error(octagon_rep, tmp_path):
    c = build_census(SurfacePresentation(genus=2), octagon_rep, 2)
    p = tmp_path / "census.csv"
    save_census(c, p)
    raw = p.read_bytes()
    p.write_bytes(raw[:len(raw) - 40])
    with pytest.raises(ChecksumError):
        load_census(p)


def test_load_unknown_version(octagon_rep, tmp_path):
    c = build_census(SurfacePresentation(genus=2), octagon_rep, 1)
    p = tmp_path / "census.csv"
    save_census(c, p)
    text = p.read_text().replace("format_version=1", "format_version=99")
    p.write_text(text)
    with pytest.raises(FormatVersionError):
        load_census(p)


def test_dedupe_no_collisions_unchanged():
    sys12 = MarkovChainSystem.full_shift([1.0, 2.0])
    c = build_census_from_system(sys12, 6)
    out, audits = dedupe_classes(c, 2)
    assert out is c
    assert all(a.status == "kept-distinct" for a in audits)


def test_dedupe_merges_injected_rotation_duplicate(octagon_rep):
    c = build_census(SurfacePresentation(genus=2), octagon_rep, 3)
    # duplicate the first n=3 record under a non-canonical rotation
    i = int(np.where(c.n == 3)[0][0])
    rot = c.word_string(i)[1:] + c.word_string(i)[:1]
    codes = np.array([["abcdABCD".index(ch) for ch in rot]], dtype=np.uint8)
    words = np.vstack([c.words, np.full((1, c.n_max), 255, np.uint8)])
    words[-1, :3] = codes
    dup = Census(c.presentation, c.representation, c.mode_kind, c.alphabet,
                 c.n_max, np.append(c.ids, c.ids.max() + 1),
                 np.append(c.n, c.n[i]), np.append(c.ell, c.ell[i]),
                 np.append(c.prime, c.prime[i]),
                 np.append(c.power, c.power[i]),
                 np.append(c.trace, c.trace[i]), words)
    certify_cutoff(dup)
    out, audits = dedupe_classes(dup, 0)
    assert len(out) == len(c)
    assert any(a.status == "merged-rotation" for a in audits)


def test_dedupe_trace_collisions_audited(octagon_rep):
    # distinct classes sharing (n, ell, trace) exist by symmetry; they must
    # be kept and audited, not merged.  The exhaustive pairwise scan is run
    # at n <= 4: the octagon length spectrum has large exact multiplicities
    # and the pair count grows by roughly 10x per extra length
    c = build_census(SurfacePresentation(genus=2), octagon_rep, 4)
    before = len(c)
    out, audits = dedupe_classes(c, 1)
    assert len(out) == before
    assert audits, "octagon symmetry should produce trace collisions"
    assert all(a.status == "kept-distinct" for a in audits)


def test_nonhyperbolic_aborts_build():
    # a free "representation" with an elliptic generator must abort
    from geodesic_census.hyperbolic import FuchsianRep, MoebiusMatrix

    theta = 0.3
    rot = MoebiusMatrix([[math.cos(theta), -math.sin(theta)],
                         [math.sin(theta), math.cos(theta)]])
    boost = MoebiusMatrix([[math.e, 0.0], [0.0, 1.0 / math.e]])
    rep = FuchsianRep(SurfacePresentation(free_rank=2), [boost, rot],
                      strict=False)
    with pytest.raises(DataIntegrityError):
        build_census(SurfacePresentation(free_rank=2), rep, 2)


def test_memory_budget_aborts():
    rep = octagon_representation()
    with pytest.raises(MemoryBudgetError):
        build_census(SurfacePresentation(genus=2), rep, 11,
                     memory_budget=100_000)


def test_synthetic_census_counts(system_roof12):
    c = build_census_from_system(system_roof12, 6)
    # full 2-shift necklace counts: 2, 3, 4, 6, 8, 14
    for n, expect in [(1, 2), (2, 3), (3, 4), (4, 6), (5, 8), (6, 14)]:
        assert (c.n == n).sum() == expect
    ones = c.ell[(c.n == 1)]
    assert sorted(ones.tolist()) == [1.0, 2.0]


def test_restricted_recertifies(octagon_census6):
    sub = octagon_census6.restricted(4)
    assert sub.n_max == 4
    assert sub.T_cert <= octagon_census6.T_cert
    assert (sub.n <= 4).all()
