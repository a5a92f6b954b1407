"""Sparse exact linear algebra on dict vectors.

:class:`RowSpace` keeps an echelon basis whose pivot is the largest column of
each row under a fixed order.  Reducing a vector against it removes every
pivot column, so the remainder is a canonical representative of the coset
(independent of the order in which rows were inserted).
"""

from __future__ import annotations

import heapq
from typing import Callable, Hashable, Iterable, Mapping, Sequence

__all__ = ["RowSpace", "kernel", "rank", "Indexer"]


class Indexer:
    """Assigns consecutive integers to hashable labels on first sight."""

    def __init__(self) -> None:
        self.index: dict = {}

    def __call__(self, label: Hashable) -> int:
        i = self.index.get(label)
        if i is None:
            i = self.index[label] = len(self.index)
        return i


class RowSpace:
    """Span of sparse rows; ``order`` maps a column label to a sort key."""

    def __init__(self, order: Callable[[Hashable], object] | None = None):
        self.order = order or Indexer()
        self.pivots: dict = {}
        self._keys: dict = {}

    def _key(self, label):
        k = self._keys.get(label)
        if k is None:
            k = self._keys[label] = self.order(label)
        return k

    def __len__(self) -> int:
        return len(self.pivots)

    rank = property(__len__)

    def reduce(self, vec: Mapping) -> dict:
        """Canonical remainder of vec modulo the span."""
        out = {l: c for l, c in vec.items() if c}
        pivots = self.pivots
        heap = [(_neg(self._key(l)), i, l) for i, l in enumerate(out) if l in pivots]
        heapq.heapify(heap)
        tick = len(heap)
        while heap:
            _, _, lab = heapq.heappop(heap)
            c = out.get(lab)
            if not c:
                continue
            row = pivots[lab]
            for l2, v in row.items():
                had = l2 in out
                x = out.get(l2)
                s = -v * c if x is None else x - v * c
                if s:
                    out[l2] = s
                    if not had and l2 in pivots:
                        tick += 1
                        heapq.heappush(heap, (_neg(self._key(l2)), tick, l2))
                elif had:
                    del out[l2]
        return out

    def add(self, vec: Mapping) -> bool:
        """Insert a row; True when it enlarged the span."""
        r = self.reduce(vec)
        if not r:
            return False
        lead = max(r, key=self._key)
        inv = 1 / r[lead]
        self.pivots[lead] = {l: c * inv for l, c in r.items()}
        return True

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)

    def basis(self) -> list[dict]:
        return [dict(r) for r in self.pivots.values()]


class _Neg:
    __slots__ = ("k",)

    def __init__(self, k):
        self.k = k

    def __lt__(self, other):
        return other.k < self.k

    def __eq__(self, other):
        return self.k == other.k


def _neg(k):
    if isinstance(k, (int, float)):
        return -k
    return _Neg(k)


def kernel(images: Sequence[tuple[Hashable, Mapping]]) -> list[dict]:
    """Basis of the kernel of the linear map tag -> image, as combinations of tags."""
    order = Indexer()
    # image columns rank above every tag column, so they are eliminated first
    key = lambda lab: (lab[0], order(lab[1]))
    space = RowSpace(key)
    out = []
    for tag, img in images:
        row = {(1, l): c for l, c in img.items()}
        row[(0, ("tag", tag))] = 1
        r = space.reduce(row)
        if r and all(k[0] == 0 for k in r):
            out.append({k[1][1]: c for k, c in r.items()})
            continue
        space.add(r)
    # rows kept in the space have independent images, so len(out) = n - rank
    return out


def rank(vectors: Iterable[Mapping]) -> int:
    space = RowSpace()
    for v in vectors:
        space.add(v)
    return space.rank
