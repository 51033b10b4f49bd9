import numpy as np
import pytest

from veronese_groups.words import Alphabet, enumerate_layers, evaluate_word, inverse_label


def test_alphabet_order_and_inverses():
    a = Alphabet.from_labels(["a", "b"])
    assert a.letters == ("A", "B", "a", "b")
    for k, letter in enumerate(a.letters):
        assert a.letters[a.inverse[k]] == letter.swapcase()
    assert a.spell(a.parse("a B b")) == "a B b"
    with pytest.raises(ValueError):
        a.parse("c")
    with pytest.raises(ValueError):
        inverse_label("X")
    with pytest.raises(ValueError):
        Alphabet.from_labels(["a", "a"])


def test_reduced_word_counts():
    # free group of rank k: 2k (2k - 1)^(n - 1) reduced words of length n
    gens = [np.array([[2, 1], [1, 1]], dtype=complex), np.array([[1, 2], [0, 1]], dtype=complex)]
    counts = [len(layer.words) for layer in enumerate_layers(gens, ["a", "b"], 5)]
    assert counts == [4 * 3 ** (n - 1) for n in range(1, 6)]


def test_layers_are_reduced_sorted_and_match_products():
    rng = np.random.default_rng(1)
    gens = [rng.standard_normal((2, 2)) + 0j for _ in range(2)]
    labels = ["a", "b"]
    alpha = Alphabet.from_labels(labels)
    for layer in enumerate_layers(gens, labels, 4):
        spelled = [alpha.spell(w) for w in layer.words]
        assert spelled == sorted(spelled, key=lambda s: [alpha.letters.index(t) for t in s.split()])
        for w, m, det in zip(layer.words, layer.mats, layer.dets):
            for x, y in zip(w[:-1], w[1:]):
                assert alpha.inverse[x] != y
            ref = evaluate_word(gens, labels, alpha.spell(w))
            scale = ref.flat[np.argmax(np.abs(ref))] / m.flat[np.argmax(np.abs(m))]
            assert np.allclose(m * scale, ref)
            assert det == pytest.approx(np.linalg.det(m), rel=1e-9)


def test_long_words_keep_exact_determinants():
    g = np.array([[2, 1], [1, 1]], dtype=complex)  # det 1
    alpha = Alphabet.from_labels(["a"])
    last = list(enumerate_layers([g], ["a"], 30))[-1]
    for w, m, det in zip(last.words, last.mats, last.dets):
        ref = evaluate_word([g], ["a"], alpha.spell(w))
        ratio = ref.flat[np.argmax(np.abs(ref))] / m.flat[np.argmax(np.abs(m))]
        # the stored matrix is ref / ratio, so its determinant is 1 / ratio^2
        assert det * ratio**2 == pytest.approx(1.0, rel=1e-9)
