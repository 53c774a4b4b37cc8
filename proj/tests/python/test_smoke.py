import math

import pytest

import sectk


def test_wder_counts():
    ref = [("u", "A"), ("v", "A"), ("w", "A"), ("x", "B"), ("y", "B"), ("z", "B")]
    hyp = [("u", "A"), ("v", "A"), ("w", "A"), ("x", "A"), ("y", "B"), ("z", "B")]
    rate, errors, denom = sectk.wder(ref, hyp)
    assert (errors, denom) == (1, 6)
    assert rate == pytest.approx(1 / 6)
    assert sectk.wder(ref, ref)[0] == 0.0


def test_cpwer_renaming_invariance():
    ref = [("a", "A"), ("b", "B"), ("c", "A")]
    hyp = [("a", "p"), ("b", "q"), ("c", "p")]
    rate, errors, ref_words = sectk.cpwer(ref, hyp)
    assert rate == 0.0
    assert ref_words == 3


def test_bleu():
    assert sectk.bleu([["a", "b", "c", "d"]], [["a", "b", "c", "d"]]) == 1.0
    got = sectk.bleu([["a", "b", "c", "d"]], [["a", "b", "c", "e"]])
    assert got == pytest.approx((3 / 4 * 2 / 3 * 1 / 2) ** (1 / 3))
    with pytest.raises(ArithmeticError):
        sectk.bleu([], [])


def test_classify():
    ref = [("a", "A")] * 5 + [("b", "B")]
    hyp = [("a", "A")] * 4 + [("a", "B"), ("b", "B")]
    found = sectk.classify_errors(ref, hyp)
    assert found == [("b", 0, 5)]


def test_reconcile():
    words = [("hello", 0.1, 0.5), ("world", 2.1, 2.5)]
    segments = [("spk1", 0.0, 2.0), ("spk2", 2.0, 4.0)]
    assert sectk.reconcile(words, segments) == [("hello", "spk1"), ("world", "spk2")]


def test_corpus_and_corrupt_deterministic():
    a = sectk.generate_corpus(sessions=3, mean_turn_len=8, seed=11)
    b = sectk.generate_corpus(sessions=3, mean_turn_len=8, seed=11)
    assert a == b
    assert len(a) == 3
    for session in a:
        assert len({speaker for _, speaker in session}) == 2

    corrupted = sectk.corrupt(a[0], seed=4)
    assert [w for w, _ in corrupted] == [w for w, _ in a[0]]
    assert sectk.corrupt(a[0], seed=4) == corrupted


def test_errors_surface_as_python_exceptions():
    with pytest.raises(ValueError):
        sectk.generate_corpus(sessions=0)
