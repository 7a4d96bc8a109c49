"""Positive braids, the Lorenz template braid of a word, and reduced Burau matrices."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .laurent import ONE, ZERO, T, LaurentPoly, matmul, identity
from .words import LorenzWord


class NotAKnot(ValueError):
    """Raised when a closure has more than one component."""


@dataclass(frozen=True)
class Braid:
    """Positive braid on ``n`` strands; generator ``k`` (1-based) crosses strands k and k+1."""

    n: int
    word: Tuple[int, ...] = ()

    def __post_init__(self):
        w = tuple(int(k) for k in self.word)
        object.__setattr__(self, "word", w)
        if self.n < 1:
            raise ValueError("braid needs at least one strand")
        for k in w:
            if not 1 <= k <= self.n - 1:
                raise ValueError(f"generator {k} is not positive or out of range for n={self.n}")

    def __len__(self):
        return len(self.word)

    @property
    def crossings(self) -> int:
        return len(self.word)

    def permutation(self) -> list:
        """perm[p] = bottom position of the strand entering at top position p."""
        pos = list(range(self.n))  # pos[strand] = current position
        where = list(range(self.n))  # where[position] = strand
        for k in self.word:
            i = k - 1
            a, b = where[i], where[i + 1]
            where[i], where[i + 1] = b, a
            pos[a], pos[b] = i + 1, i
        return pos

    def components(self) -> int:
        perm = self.permutation()
        seen = [False] * self.n
        c = 0
        for s in range(self.n):
            if not seen[s]:
                c += 1
                while not seen[s]:
                    seen[s] = True
                    s = perm[s]
        return c

    def is_knot(self) -> bool:
        return self.components() == 1

    def __str__(self):
        if not self.word:
            return f"id in B_{self.n}"
        return " ".join(f"s{k}" for k in self.word) + f" in B_{self.n}"


def _rotation_key(seq: str, n: int) -> str:
    # two periods decide the order of distinct periodic sequences
    return (seq * 2)[: 2 * n]


def orbit_permutation(w) -> list:
    """Permutation of the points of the periodic orbit of ``w`` on the template branch line.

    Points are ordered by their itineraries (L < R, lexicographic), and the
    return map sends the point coded by a rotation to the point coded by the next
    rotation.  For a proper power u^k the k copies of each point are kept in
    parallel, so the permutation splits into k cycles.
    """
    w = w if isinstance(w, LorenzWord) else LorenzWord(w)
    u = w.root
    m, k = len(u), w.power
    rots = [u[i:] + u[:i] for i in range(m)]
    keys = sorted(((_rotation_key(rots[j], m), c), j) for j in range(m) for c in range(k))
    rank = {(j, key[1]): r for r, (key, j) in enumerate(keys)}
    perm = [0] * (m * k)
    for (j, c), r in rank.items():
        perm[r] = rank[((j + 1) % m, c)]
    return perm


def permutation_braid(perm) -> Braid:
    """The positive permutation braid of ``perm`` (each inverted pair crosses once)."""
    n = len(perm)
    arr = list(perm)
    word = []
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            if arr[i] > arr[i + 1]:
                arr[i], arr[i + 1] = arr[i + 1], arr[i]
                word.append(i + 1)
                changed = True
    return Braid(n, tuple(word))


def lorenz_braid(w) -> Braid:
    """Positive braid whose closure is the knot of the template orbit coded by ``w``."""
    w = w if isinstance(w, LorenzWord) else LorenzWord(w)
    if not w.primitive:
        raise NotAKnot(f"{w} is a proper power of {w.root}; its closure is a link")
    return permutation_braid(orbit_permutation(w))


def burau_generator(n: int, k: int):
    """Reduced Burau matrix of sigma_k in B_n, size (n-1) x (n-1)."""
    if n < 2:
        return []
    M = identity(n - 1)
    i = k - 1
    if n == 2:
        return [[-T]]
    M[i][i] = -T
    if i > 0:
        M[i][i - 1] = T
    if i < n - 2:
        M[i][i + 1] = ONE
    return M


def burau_reduced(b: Braid):
    M = identity(b.n - 1)
    for k in b.word:
        M = matmul(M, burau_generator(b.n, k))
    return M


def genus_positive_braid(b: Braid) -> int:
    """Genus of the closure of a positive braid with knot closure: (c - n + 1)/2."""
    val = b.crossings - b.n + 1
    if val % 2:
        raise NotAKnot(f"c - n + 1 = {val} is odd; closure is not a knot")
    if not b.is_knot():
        raise NotAKnot("braid closure has several components")
    return val // 2
