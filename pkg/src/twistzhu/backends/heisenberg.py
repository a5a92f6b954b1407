"""Rank-d Heisenberg vertex operator algebra M(1) over a rational symmetric form."""

from __future__ import annotations

from bisect import insort
from typing import Sequence

from ..scalars import QQ
from ..vectors import add_term
from ..voa import VertexAlgebra


def mat_inverse(mat: Sequence[Sequence]) -> list[list]:
    """Exact inverse of a square rational matrix (ValueError when singular)."""
    n = len(mat)
    a = [[QQ(x) for x in row] + [QQ(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def colored_partitions(n: int, colors: int, floor: tuple = (-(10**9), 0)) -> list[tuple]:
    """Sorted tuples of (mode, color) pairs, modes negative, with -sum(modes) = n and every pair >= floor."""
    if n == 0:
        return [()]
    out = []
    for part in range(min(n, -floor[0]), 0, -1):
        for color in range(colors):
            head = (-part, color)
            if head < floor:
                continue
            out.extend((head,) + rest for rest in colored_partitions(n - part, colors, head))
    return out


class Heisenberg(VertexAlgebra):
    """M(1) generated by h_0..h_{d-1} with [h_i(m), h_j(n)] = m G_ij delta_{m+n,0}.

    ``nilpotent[i]`` maps generator i to its image under N as ``{j: coeff}``;
    ``cosets[i]`` is the sigma exponent of generator i.  Labels are sorted
    tuples of ``(mode, generator)`` pairs with negative integer modes.
    """

    def __init__(
        self,
        form: Sequence[Sequence],
        cosets: Sequence | None = None,
        nilpotent: Sequence[dict] | None = None,
        names: Sequence[str] | None = None,
    ):
        super().__init__()
        d = len(form)
        self.rank = d
        self.form = [[QQ(x) for x in row] for row in form]
        self.names = list(names) if names is not None else [f"h{i}" for i in range(d)]
        self.cosets = [QQ(a) for a in (cosets if cosets is not None else [0] * d)]
        self.nil = [
            {j: QQ(c) for j, c in images.items() if c} for images in (nilpotent or [{}] * d)
        ]
        self._validate()
        self.form_inverse = mat_inverse(self.form)
        self.central_charge = QQ(d)

    def _validate(self) -> None:
        d = self.rank
        G = self.form
        if any(len(row) != d for row in G):
            raise ValueError("form must be square")
        if any(G[i][j] != G[j][i] for i in range(d) for j in range(d)):
            raise ValueError("form must be symmetric")
        mat_inverse(G)
        if len(self.cosets) != d or len(self.nil) != d or len(self.names) != d:
            raise ValueError("cosets, nilpotent images and names need one entry per generator")
        if any(not (0 <= a < 1) for a in self.cosets):
            raise ValueError("coset exponents must lie in [0, 1)")
        for i in range(d):
            for j in range(d):
                if G[i][j] and (self.cosets[i] + self.cosets[j]).denominator != 1:
                    raise ValueError("sigma must preserve the form")
            for j in self.nil[i]:
                if not 0 <= j < d:
                    raise ValueError("nilpotent image names an unknown generator")
                if self.cosets[j] != self.cosets[i]:
                    raise ValueError("N must preserve the sigma cosets")
        for i in range(d):
            for j in range(d):
                if self.skew_form(i, j) + self.skew_form(j, i):
                    raise ValueError("N must be skew with respect to the form")
        vec = [{i: QQ(1)} for i in range(d)]
        for _ in range(d + 1):
            vec = [self._apply_nil(v) for v in vec]
        if any(vec):
            raise ValueError("N must be nilpotent")

    def _apply_nil(self, v: dict) -> dict:
        out: dict = {}
        for i, c in v.items():
            for j, e in self.nil[i].items():
                add_term(out, j, c * e)
        return out

    def skew_form(self, i: int, j: int):
        """<N h_i, h_j>, the zero-mode commutator [h_i(0), h_j(0)] on twisted modules."""
        return sum((c * self.form[k][j] for k, c in self.nil[i].items()), QQ(0))

    # -- graded structure
    def weight(self, label) -> int:
        return -sum(m for m, _ in label)

    def coset(self, label):
        s = sum((self.cosets[g] for _, g in label), QQ(0))
        return s - (s.numerator // s.denominator)

    def _basis(self, w: int) -> list:
        return colored_partitions(w, self.rank)

    @property
    def generator_count(self) -> int:
        return self.rank

    def generator_weight(self, i: int) -> int:
        return 1

    def generator_coset(self, i: int):
        return self.cosets[i]

    def generator_nilpotent(self, i: int) -> dict:
        return self.nil[i]

    def generator_label(self, i: int):
        return ((-1, i),)

    def generator_index(self, label):
        if len(label) == 1 and label[0][0] == -1:
            return label[0][1]
        return None

    def decompose(self, label) -> tuple:
        mode, gen = label[0]
        return gen, mode, label[1:]

    def generator_mode(self, i: int, q, label) -> dict:
        """h_i(q) on a basis monomial of V."""
        q = int(q)
        if q < 0:
            new = list(label)
            insort(new, (q, i))
            return {tuple(new): QQ(1)}
        if q == 0:
            return {}
        out: dict = {}
        for p, (m, g) in enumerate(label):
            if m == -q and self.form[i][g]:
                add_term(out, label[:p] + label[p + 1 :], q * self.form[i][g])
        return out

    def nilpotent_label(self, label) -> dict:
        out: dict = {}
        for p, (m, g) in enumerate(label):
            for j, c in self.nil[g].items():
                new = list(label[:p] + label[p + 1 :])
                insort(new, (m, j))
                add_term(out, tuple(new), c)
        return out

    def conformal_vector(self) -> dict:
        out: dict = {}
        d = self.rank
        for i in range(d):
            for j in range(d):
                c = self.form_inverse[i][j]
                if c:
                    add_term(out, tuple(sorted(((-1, i), (-1, j)))), c / 2)
        return out

    def format_label(self, label) -> str:
        if not label:
            return "1"
        return "".join(f"{self.names[g]}({m})" for m, g in label) + "1"
