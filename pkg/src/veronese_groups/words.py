"""Breadth-first enumeration of reduced words in a finitely generated group.

Letters are generator labels plus their inverses, written in upper case.
Within each length, words come out in lexicographic order of the letter
alphabet (plain string ordering of the labels), so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np


def inverse_label(label: str) -> str:
    if label.upper() == label:
        raise ValueError(f"generator label {label!r} must contain a lower-case letter")
    return label.upper()


@dataclass(frozen=True)
class Alphabet:
    letters: tuple[str, ...]
    inverse: tuple[int, ...]
    generator_index: tuple[int, ...]
    is_inverse: tuple[bool, ...]

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "Alphabet":
        labels = list(labels)
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate generator labels")
        entries = []
        for i, lab in enumerate(labels):
            entries.append((lab, i, False))
            entries.append((inverse_label(lab), i, True))
        entries.sort(key=lambda e: e[0])
        letters = tuple(e[0] for e in entries)
        pos = {e: k for k, e in enumerate(letters)}
        inverse = tuple(
            pos[inverse_label(e[0])] if not e[2] else pos[labels[e[1]]] for e in entries
        )
        return cls(letters, inverse, tuple(e[1] for e in entries), tuple(e[2] for e in entries))

    def parse(self, word: str | Sequence[str]) -> tuple[int, ...]:
        toks = word.split() if isinstance(word, str) else list(word)
        idx = {l: k for k, l in enumerate(self.letters)}
        try:
            return tuple(idx[t] for t in toks)
        except KeyError as exc:
            raise ValueError(f"unknown letter {exc.args[0]!r}") from None

    def spell(self, word: Sequence[int]) -> str:
        return " ".join(self.letters[i] for i in word)


@dataclass
class WordLayer:
    length: int
    words: np.ndarray  # (n, length) letter indices
    mats: np.ndarray  # (n, d, d)
    dets: np.ndarray  # (n,) determinants of the stored (rescaled) matrices


def letter_matrices(gens: Sequence[np.ndarray], alphabet: Alphabet) -> np.ndarray:
    out = []
    for g_idx, inv in zip(alphabet.generator_index, alphabet.is_inverse):
        g = np.asarray(gens[g_idx], dtype=complex)
        out.append(np.linalg.inv(g) if inv else g)
    return np.array(out)


def enumerate_layers(
    gens: Sequence[np.ndarray], labels: Sequence[str], max_length: int
) -> Iterator[WordLayer]:
    """Yield reduced words of length 1..max_length with their matrices.

    The matrix of the word x1 x2 ... xn is X1 @ X2 @ ... @ Xn. Each layer is
    renormalized entrywise to keep long products finite; callers needing
    projective data only are unaffected. Determinants are carried along
    multiplicatively, since recomputing them from rescaled entries cancels
    catastrophically for long words.
    """
    alphabet = Alphabet.from_labels(labels)
    lm = letter_matrices(gens, alphabet)
    nl = len(alphabet.letters)
    inv = np.array(alphabet.inverse)
    words = np.arange(nl).reshape(nl, 1)
    mats = lm.copy()
    d = lm.shape[1]
    letter_dets = np.linalg.det(lm)
    dets = letter_dets.copy()
    for length in range(1, max_length + 1):
        if length > 1:
            last = words[:, -1]
            parent = np.repeat(np.arange(len(words)), nl)
            letter = np.tile(np.arange(nl), len(words))
            keep = letter != inv[last][parent]
            parent, letter = parent[keep], letter[keep]
            words = np.hstack([words[parent], letter[:, None]])
            mats = np.einsum("nij,njk->nik", mats[parent], lm[letter])
            scale = np.max(np.abs(mats), axis=(1, 2))
            mats = mats / scale[:, None, None]
            dets = dets[parent] * letter_dets[letter] / scale**d
        yield WordLayer(length, words, mats, dets)


def evaluate_word(gens: Sequence[np.ndarray], labels: Sequence[str], word) -> np.ndarray:
    alphabet = Alphabet.from_labels(labels)
    lm = letter_matrices(gens, alphabet)
    d = lm.shape[1]
    acc = np.eye(d, dtype=complex)
    for i in alphabet.parse(word):
        acc = acc @ lm[i]
    return acc
