"""Words in the standard genus-k surface group presentation.

A letter is a nonzero integer: +(i+1) is generator i and -(i+1) its inverse.
Generators are ordered a1, b1, ..., ak, bk and the relator is
[a1, b1] ... [ak, bk] with [a, b] = a b a^-1 b^-1.

Balls of the Cayley graph are enumerated breadth first.  Two words are
identified when their images under the base Fuchsian lift agree numerically
and Dehn's algorithm confirms the identification (the presentation is small
cancellation C'(1/6) for k >= 2, so Dehn's algorithm decides the word problem).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

Word = tuple


def inverse(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def free_reduce(w) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def concat(*ws) -> Word:
    return free_reduce([x for w in ws for x in w])


def relator(k: int) -> Word:
    r = []
    for j in range(k):
        a, b = 2 * j + 1, 2 * j + 2
        r += [a, b, -a, -b]
    return tuple(r)


def letters(k: int) -> tuple:
    """Fixed letter order used for shortlex enumeration."""
    out = []
    for i in range(1, 2 * k + 1):
        out += [i, -i]
    return tuple(out)


@lru_cache(maxsize=None)
def _cyclic_relators(k: int):
    r = relator(k)
    out = set()
    for base in (r, inverse(r)):
        for s in range(len(base)):
            out.add(base[s:] + base[:s])
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _dehn_table(k: int):
    """Map from each long piece (more than half a relator) to its short complement."""
    n = 4 * k
    table = {}
    for r in _cyclic_relators(k):
        for m in range(n // 2 + 1, n + 1):
            table[r[:m]] = inverse(r[m:])
    return table


def dehn_reduce(w, k: int) -> Word:
    table = _dehn_table(k)
    n = 4 * k
    w = free_reduce(w)
    changed = True
    while changed:
        changed = False
        for m in range(n, n // 2, -1):
            for s in range(0, len(w) - m + 1):
                piece = w[s:s + m]
                if piece in table:
                    w = free_reduce(w[:s] + table[piece] + w[s + m:])
                    changed = True
                    break
            if changed:
                break
    return w


def is_trivial(w, k: int) -> bool:
    return len(dehn_reduce(w, k)) == 0


def random_word(rng, k: int, length: int) -> Word:
    ls = letters(k)
    w: list[int] = []
    while len(w) < length:
        x = ls[rng.integers(len(ls))]
        if w and w[-1] == -x:
            continue
        w.append(x)
    return tuple(w)


@lru_cache(maxsize=None)
def fuchsian_sl2(k: int) -> np.ndarray:
    """SL(2,R) generators of the regular 4k-gon group, shape (2k, 2, 2).

    Side s of the polygon centred at i in the upper half plane is paired with
    side s + 2 by an element translating along the common perpendicular.
    """
    N = 4 * k
    theta = 2 * np.pi / N
    h = np.arccosh(np.cos(theta / 2) / np.sin(np.pi / N))

    def rot(phi):
        c, s = np.cos(phi / 2), np.sin(phi / 2)
        return np.array([[c, s], [-s, c]])

    def pairing(s):
        shift = np.diag([np.exp(-h), np.exp(h)])
        return rot(2 * np.pi * s / N + np.pi) @ shift @ rot(-2 * np.pi * (s + 2) / N)

    gens = []
    for j in range(k):
        gens.append(pairing(4 * j))
        gens.append(np.linalg.inv(pairing(4 * j + 1)))
    out = np.array(gens)
    out.setflags(write=False)
    return out


def evaluate(mats, w, identity=None):
    """Product of generator matrices along a word; inverses via np.linalg.inv."""
    mats = np.asarray(mats)
    out = np.eye(mats.shape[-1]) if identity is None else identity.copy()
    inv = {}
    for x in w:
        i = abs(x) - 1
        if x > 0:
            out = out @ mats[i]
        else:
            if i not in inv:
                inv[i] = np.linalg.inv(mats[i])
            out = out @ inv[i]
    return out


@dataclass(frozen=True)
class Ball:
    """The radius-L ball of the Cayley graph, one shortlex-minimal word per element.

    ``parent[i]`` is the index of the word with the last letter removed and
    ``last[i]`` that letter, so products along the ball can be accumulated
    layer by layer.
    """

    k: int
    radius: int
    words: tuple
    parent: np.ndarray
    last: np.ndarray
    lengths: np.ndarray
    features: np.ndarray

    def __len__(self):
        return len(self.words)

    @property
    def layer_sizes(self):
        return np.bincount(self.lengths, minlength=self.radius + 1)

    def images(self, mats):
        """Evaluate every ball element under generator matrices (2k, d, d)."""
        mats = np.asarray(mats)
        d = mats.shape[-1]
        invs = np.linalg.inv(mats)
        out = np.empty((len(self.words), d, d))
        out[0] = np.eye(d)
        for i in range(1, len(self.words)):
            x = int(self.last[i])
            g = mats[x - 1] if x > 0 else invs[-x - 1]
            out[i] = out[self.parent[i]] @ g
        return out

    @property
    def _tree(self):
        tree = self.__dict__.get("_kdtree")
        if tree is None:
            tree = cKDTree(self.features)
            object.__setattr__(self, "_kdtree", tree)
        return tree

    def index_of(self, w) -> int:
        """Index of the ball element equal to the word w, or -1 if outside the ball."""
        w = free_reduce(w)
        f = _feature(evaluate(fuchsian_sl2(self.k), w))
        for j in self._tree.query_ball_point(f, 1e-6):
            if is_trivial(w + inverse(self.words[j]), self.k):
                return j
        return -1


def _feature(M):
    M = np.asarray(M)
    flat = M.reshape(M.shape[:-2] + (4,))
    return flat / np.linalg.norm(flat, axis=-1, keepdims=True)


@lru_cache(maxsize=None)
def ball(k: int, radius: int) -> Ball:
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if radius == 0:
        f = _feature(np.eye(2))[None]
        return Ball(k, 0, ((),), np.array([-1]), np.array([0]), np.array([0]), f)
    prev = ball(k, radius - 1)
    gens = fuchsian_sl2(k)
    invs = np.linalg.inv(gens)
    mats_prev = prev.images(gens)
    start = int(np.sum(prev.lengths < radius - 1))
    cand_words, cand_parent, cand_last, cand_mats = [], [], [], []
    for p in range(start, len(prev.words)):
        w = prev.words[p]
        for x in letters(k):
            if w and w[-1] == -x:
                continue
            cand_words.append(w + (x,))
            cand_parent.append(p)
            cand_last.append(x)
            cand_mats.append(mats_prev[p] @ (gens[x - 1] if x > 0 else invs[-x - 1]))
    feats = _feature(np.array(cand_mats))
    old_tree = cKDTree(prev.features)
    keep = np.ones(len(cand_words), dtype=bool)
    for i, hits in enumerate(old_tree.query_ball_point(feats, 1e-6)):
        for j in hits:
            if is_trivial(cand_words[i] + inverse(prev.words[j]), k):
                keep[i] = False
                break
    new_tree = cKDTree(feats)
    for i, j in sorted(new_tree.query_pairs(1e-6)):
        if keep[i] and keep[j] and is_trivial(cand_words[i] + inverse(cand_words[j]), k):
            keep[j] = False
    idx = np.flatnonzero(keep)
    words = prev.words + tuple(cand_words[i] for i in idx)
    parent = np.concatenate([prev.parent, np.array(cand_parent)[idx]])
    last = np.concatenate([prev.last, np.array(cand_last)[idx]])
    lengths = np.concatenate([prev.lengths, np.full(len(idx), radius)])
    features = np.vstack([prev.features, feats[idx]])
    return Ball(k, radius, words, parent, last, lengths, features)
