"""Cyclic words over {L, R} and their integer matrices."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator

from ..hyperbolic import Matrix2

L_MATRIX = Matrix2(1, 0, 1, 1)
R_MATRIX = Matrix2(1, 1, 0, 1)
LETTERS = "LR"


@dataclass(frozen=True)
class LorenzWord:
    symbols: str

    def __post_init__(self):
        s = "".join(str(self.symbols).split()).upper()
        if not s:
            raise ValueError("empty word")
        if set(s) - set(LETTERS):
            raise ValueError(f"word {self.symbols!r} has letters outside {{L, R}}")
        object.__setattr__(self, "symbols", s)

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        return self.symbols

    def __iter__(self):
        return iter(self.symbols)

    def rotations(self) -> list:
        s = self.symbols
        return [s[i:] + s[:i] for i in range(len(s))]

    @property
    def root(self) -> str:
        """Shortest u with self = u^k."""
        s = self.symbols
        n = len(s)
        for d in range(1, n + 1):
            if n % d == 0 and s[:d] * (n // d) == s:
                return s[:d]
        return s

    @property
    def power(self) -> int:
        return len(self.symbols) // len(self.root)

    @property
    def primitive(self) -> bool:
        return self.power == 1

    @property
    def mixed(self) -> bool:
        return "L" in self.symbols and "R" in self.symbols

    def normal_form(self) -> "LorenzWord":
        """Lexicographically least rotation."""
        return LorenzWord(min(self.rotations()))

    def cyclic_equal(self, other) -> bool:
        o = other.symbols if isinstance(other, LorenzWord) else str(other)
        return len(o) == len(self) and o in self.symbols * 2

    def mirror(self) -> "LorenzWord":
        return LorenzWord(self.symbols.translate(str.maketrans("LR", "RL")))


def word_to_matrix(w) -> Matrix2:
    """Product of L = [[1,0],[1,1]] and R = [[1,1],[0,1]] over the letters of w."""
    w = w if isinstance(w, LorenzWord) else LorenzWord(w)
    M = Matrix2(1, 0, 0, 1)
    for ch in w.symbols:
        M = M @ (L_MATRIX if ch == "L" else R_MATRIX)
    return M


def is_parabolic_word(w) -> bool:
    """Words in a single letter give parabolic matrices (corner orbits)."""
    w = w if isinstance(w, LorenzWord) else LorenzWord(w)
    return not w.mixed


def cyclic_classes(n: int, primitive: bool = True, mixed: bool = True) -> Iterator[LorenzWord]:
    """One normal-form representative per cyclic class of length-n words."""
    seen = set()
    for tup in product(LETTERS, repeat=n):
        w = LorenzWord("".join(tup)).normal_form()
        if w.symbols in seen:
            continue
        seen.add(w.symbols)
        if primitive and not w.primitive:
            continue
        if mixed and not w.mixed:
            continue
        yield w


def primitive_mixed_words(max_len: int) -> list:
    return [w for n in range(2, max_len + 1) for w in cyclic_classes(n)]
