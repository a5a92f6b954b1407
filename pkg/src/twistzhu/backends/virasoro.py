"""Universal Virasoro vertex operator algebra and Verma-type modules."""

from __future__ import annotations

from typing import Callable, Hashable

from ..scalars import QQ
from ..vectors import add_to
from ..voa import VertexAlgebra


def partitions(n: int, min_part: int, max_part: int | None = None) -> list[tuple]:
    """Non-increasing tuples of parts >= min_part summing to n."""
    if n == 0:
        return [()]
    top = n if max_part is None else min(n, max_part)
    out = []
    for p in range(top, min_part - 1, -1):
        out.extend((p,) + rest for rest in partitions(n - p, min_part, p))
    return out


class VirasoroWords:
    """L(m) on states L(-n_1)...L(-n_k) b with n_1 >= ... >= n_k >= min_part and b a base label.

    ``base_action(m, b)`` returns L(m) b as ``{b': c}`` for every m > -min_part;
    smaller m create a new factor.
    """

    def __init__(self, c, min_part: int, base_action: Callable[[int, Hashable], dict]):
        self.c = QQ(c)
        self.min_part = min_part
        self.base_action = base_action
        self._memo: dict = {}

    def act(self, m: int, word: tuple, base) -> dict:
        key = (m, word, base)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if not word:
            if -m >= self.min_part:
                out = {((-m,), base): QQ(1)}
            else:
                out = {((), b): c for b, c in self.base_action(m, base).items()}
        elif -m >= word[0]:
            out = {((-m,) + word, base): QQ(1)}
        else:
            n1, rest = word[0], word[1:]
            out = {}
            for (w2, b2), c in self.act(m, rest, base).items():
                add_to(out, self.act(-n1, w2, b2), c)
            if m + n1:
                add_to(out, self.act(m - n1, rest, base), m + n1)
            if m == n1:
                cent = self.c * (m**3 - m) / 12
                if cent:
                    add_to(out, {(rest, base): QQ(1)}, cent)
        self._memo[key] = out
        return out


class Virasoro(VertexAlgebra):
    """Universal Virasoro VOA of central charge c; labels are the words (n_1 >= ... >= n_k >= 2)."""

    def __init__(self, c):
        super().__init__()
        self.central_charge = QQ(c)
        self.words = VirasoroWords(self.central_charge, 2, lambda m, b: {})

    def weight(self, label) -> int:
        return sum(label)

    def _basis(self, w: int) -> list:
        return partitions(w, 2)

    @property
    def generator_count(self) -> int:
        return 1

    def generator_weight(self, i: int) -> int:
        return 2

    def generator_label(self, i: int):
        return (2,)

    def generator_index(self, label):
        return 0 if label == (2,) else None

    def decompose(self, label) -> tuple:
        # L(-n) = omega_{1-n}
        return 0, 1 - label[0], label[1:]

    def virasoro_mode(self, m: int, label) -> dict:
        """L(m) on a basis word."""
        return {w: c for (w, _), c in self.words.act(m, label, None).items()}

    def generator_mode(self, i: int, q, label) -> dict:
        return self.virasoro_mode(int(q) - 1, label)

    def L(self, n: int, v) -> dict:
        out: dict = {}
        for k, c in v.items():
            add_to(out, self.virasoro_mode(n, k), c)
        return out

    def conformal_vector(self) -> dict:
        return {(2,): QQ(1)}

    def format_label(self, label) -> str:
        return "".join(f"L(-{n})" for n in label) + "1"
