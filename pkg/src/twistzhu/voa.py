"""Graded vertex algebras with an automorphism g = sigma * exp(tau * N).

The heart of this module is :class:`ModeEngine`, which computes modes of
arbitrary basis states on a module from the modes of strong generators.  For a
basis state ``u = x_l r`` (generator ``x``, integer ``l``, remainder ``r``) the
component Jacobi identity with ``m`` fixed to the coset representative of ``x``
solves for the iterate::

    (x_l r)(q) w = sum_k (-1)^k C(l,k) x(m+l-k) r(q-m+k) w
                 - sum_k (-1)^(l+k) C(l,k) r(l-k+q-m) x(m+k) w
                 - sum_{j>=1} ((C(m+N, j) x)_{l+j} r)(q-j) w

Every sum is finite because modes that would leave the non-negative degree
range vanish.  The vertex algebra itself is the untwisted case (``m = 0``, no
``N`` correction).
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from .formal import TruncationError, u1_coefficients
from .scalars import QQ, Scalar, binomial, conductor, root_of_unity
from .vectors import add_to, apply_linear, scaled

__all__ = ["ModeEngine", "VertexAlgebra", "TruncationError"]


class ModeEngine:
    """Composite modes u(q) on a graded module with generator modes supplied by a subclass."""

    #: use the coset representative and the N-correction in the recursion
    twisted: bool = False

    def __init__(self, voa: "VertexAlgebra"):
        self.voa = voa
        self._memo: dict = {}

    # -- subclass hooks
    def degree(self, label: Hashable):
        raise NotImplementedError

    def generator_mode(self, i: int, q, label: Hashable) -> dict:
        raise NotImplementedError

    # -- composite modes
    def mode(self, u: Hashable, q, w: Hashable) -> dict:
        """u(q) w for basis labels u (of the vertex algebra) and w (of this module)."""
        key = (u, q, w)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        voa = self.voa
        if self.degree(w) + voa.weight(u) - q - 1 < 0:
            out: dict = {}
        elif u == voa.vacuum:
            out = {w: QQ(1)} if q == -1 else {}
        elif self.twisted and (q - voa.coset(u)).denominator != 1:
            out = {}
        else:
            out = self._iterate(u, q, w)
        self._memo[key] = out
        return out

    def _iterate(self, u, q, w) -> dict:
        voa = self.voa
        gi = voa.generator_index(u)
        if gi is not None:
            return self.generator_mode(gi, q, w)
        i, l, rest = voa.decompose(u)
        m = voa.generator_coset(i) if self.twisted else 0
        n = q - m
        dw = self.degree(w)
        wt_rest = voa.weight(rest)
        wt_gen = voa.generator_weight(i)
        acc: dict = {}
        # first sum: x(m+l-k) r(n+k) w
        k = 0
        while dw + wt_rest - (n + k) - 1 >= 0:
            c = binomial(l, k)
            if c:
                inner = self.mode(rest, n + k, w)
                if inner:
                    c = c if k % 2 == 0 else -c
                    for lab, a in inner.items():
                        add_to(acc, self.generator_mode(i, m + l - k, lab), a * c)
            k += 1
        # second sum: r(l-k+n) x(m+k) w
        k = 0
        while dw + wt_gen - (m + k) - 1 >= 0:
            c = binomial(l, k)
            if c:
                inner = self.generator_mode(i, m + k, w)
                if inner:
                    c = -c if (l + k) % 2 == 0 else c
                    for lab, a in inner.items():
                        add_to(acc, self.mode(rest, l - k + n, lab), a * c)
            k += 1
        # correction: ((C(m+N, j) x)_{l+j} r)(q-j) w
        if self.twisted:
            wt_u = voa.weight(u)
            for j in range(1, int(wt_u) + 1):
                comb = voa.nilpotent_binomial(i, m, j)
                if not comb:
                    continue
                state: dict = {}
                for gen, c in comb.items():
                    add_to(state, voa.generator_mode(gen, l + j, rest), c)
                for lab, c in state.items():
                    add_to(acc, self.mode(lab, q - j, w), -c)
        return acc

    def mode_vec(self, u: Mapping, q, w: Mapping) -> dict:
        """Bilinear extension of :meth:`mode` to vectors."""
        acc: dict = {}
        for ul, uc in u.items():
            for wl, wc in w.items():
                r = self.mode(ul, q, wl)
                if r:
                    add_to(acc, r, uc * wc)
        return acc

    def mode_of(self, u: Mapping, q, w: Hashable) -> dict:
        acc: dict = {}
        for ul, uc in u.items():
            r = self.mode(ul, q, w)
            if r:
                add_to(acc, r, uc)
        return acc

    def clear_cache(self) -> None:
        self._memo.clear()


class VertexAlgebra(ModeEngine):
    """Abstract strongly generated vertex algebra with automorphism datum.

    Subclasses provide the basis, generator data and the generator modes on V.
    Labels are hashable; ``decompose(u)`` returns ``(i, l, rest)`` with
    ``u = (x_i)_l rest`` for the leftmost generator factor.
    """

    vacuum: Hashable = ()
    central_charge = QQ(0)

    def __init__(self) -> None:
        super().__init__(self)
        self._nil_binom: dict = {}
        self._basis_cache: dict = {}

    # -- to be provided
    def weight(self, label) -> int:
        raise NotImplementedError

    def coset(self, label):
        """g-weight exponent a in [0, 1) of a basis label."""
        return QQ(0)

    def decompose(self, label) -> tuple:
        raise NotImplementedError

    def generator_index(self, label):
        """Index i when label is the generator state x_i, else None."""
        raise NotImplementedError

    def generator_label(self, i: int):
        raise NotImplementedError

    @property
    def generator_count(self) -> int:
        raise NotImplementedError

    def generator_weight(self, i: int) -> int:
        raise NotImplementedError

    def generator_coset(self, i: int):
        return QQ(0)

    def generator_nilpotent(self, i: int) -> dict:
        """N x_i as a combination of generator indices."""
        return {}

    def nilpotent_label(self, label) -> dict:
        """N on a basis label."""
        return {}

    def conformal_vector(self) -> dict:
        raise NotImplementedError

    def _basis(self, w: int) -> list:
        raise NotImplementedError

    # -- generic structure
    def degree(self, label):
        return self.weight(label)

    def basis(self, w: int) -> list:
        if w not in self._basis_cache:
            self._basis_cache[w] = list(self._basis(w)) if w >= 0 else []
        return self._basis_cache[w]

    def basis_upto(self, w: int) -> list:
        return [b for k in range(w + 1) for b in self.basis(k)]

    @property
    def conductor(self) -> int:
        return conductor(self.generator_coset(i) for i in range(self.generator_count))

    def nilpotent_binomial(self, i: int, m, j: int) -> dict:
        """C(m + N, j) x_i as a combination of generators."""
        key = (i, m, j)
        if key not in self._nil_binom:
            vec: dict = {i: QQ(1)}
            for r in range(j):
                nxt = scaled(vec, m - r)
                for g, c in vec.items():
                    add_to(nxt, self.generator_nilpotent(g), c)
                vec = nxt
            self._nil_binom[key] = scaled(vec, QQ(1, math.factorial(j)))
        return self._nil_binom[key]

    # -- modes on V
    def L(self, n: int, v: Mapping) -> dict:
        return self.mode_vec(self.omega, n + 1, v)

    @cached_property
    def omega(self) -> dict:
        return self.conformal_vector()

    @cached_property
    def vacuum_vector(self) -> dict:
        return {self.vacuum: QQ(1)}

    # -- automorphism
    def nilpotent(self, v: Mapping) -> dict:
        return apply_linear(self.nilpotent_label, v)

    def nilpotent_powers(self, v: Mapping) -> list:
        """[v, Nv, N^2 v, ...] up to the last nonzero power."""
        out = []
        cur = dict(v)
        while cur:
            out.append(cur)
            cur = self.nilpotent(cur)
        return out

    def nilpotency_index(self, v: Mapping) -> int:
        """Least K with N^K v = 0."""
        return len(self.nilpotent_powers(v))

    def sigma(self, v: Mapping) -> dict:
        out = {}
        for k, c in v.items():
            out[k] = c * root_of_unity(self.coset(k))
        return out

    def exp_nilpotent(self, v: Mapping, t) -> dict:
        """exp(t N) v for a scalar (or series coefficient) t."""
        acc: dict = {}
        for k, p in enumerate(self.nilpotent_powers(v)):
            add_to(acc, p, t**k / math.factorial(k) if k else 1)
        return acc

    def g(self, v: Mapping) -> dict:
        """g = sigma exp(tau N)."""
        return self.sigma(self.exp_nilpotent(v, Scalar.tau()))

    def g_inverse(self, v: Mapping) -> dict:
        out = self.exp_nilpotent(v, -Scalar.tau())
        return {k: c * root_of_unity(-self.coset(k)) for k, c in out.items()}

    # -- homogeneity bookkeeping
    def components(self, v: Mapping) -> dict:
        """Split v into parts homogeneous in (weight, coset)."""
        parts: dict = {}
        for k, c in v.items():
            parts.setdefault((self.weight(k), self.coset(k)), {})[k] = c
        return parts

    def _homogeneous(self, u: Mapping) -> tuple:
        keys = {(self.weight(k), self.coset(k)) for k in u}
        if len(keys) != 1:
            raise ValueError("element is not homogeneous in weight and coset; split it first")
        return next(iter(keys))

    def bbL_eigenvalue(self, u: Mapping):
        wt, a = self._homogeneous(u)
        return wt + a if a == 0 else wt + a - 1

    def bbL(self, u: Mapping) -> dict:
        return scaled(u, self.bbL_eigenvalue(u))

    def bbA(self, u: Mapping) -> dict:
        _, a = self._homogeneous(u)
        return scaled(u, a)

    # -- coordinate change U(1) = tau^{L(0)} exp(-sum_j A_j L(j))
    def _lplus(self, v: Mapping, sign, tau) -> dict:
        """exp(sign * sum_j A_j L(j)) v."""
        top = max((self.weight(k) for k in v), default=0)
        if top == 0:
            return dict(v)
        coeffs = [a.substitute(tau) if tau is not None else a for a in u1_coefficients(top)]
        acc = dict(v)
        term = dict(v)
        for k in range(1, top + 1):
            nxt: dict = {}
            for j, a in enumerate(coeffs, start=1):
                lj = self.L(j, term)
                if lj:
                    add_to(nxt, lj, a * sign)
            term = scaled(nxt, QQ(1, k))
            if not term:
                break
            add_to(acc, term)
        return acc

    def U1(self, v: Mapping, tau=None) -> dict:
        """U(1) v; ``tau`` substitutes a value for the symbol (None keeps it symbolic)."""
        t = Scalar.tau() if tau is None else tau
        out = self._lplus(v, -1, tau)
        return {k: c * t ** self.weight(k) for k, c in out.items()}

    def U1_inverse(self, v: Mapping, tau=None) -> dict:
        t = Scalar.tau() if tau is None else tau
        pre = {k: c * t ** (-self.weight(k)) for k, c in v.items()}
        return self._lplus(pre, 1, tau)

    # -- consistency checks of the datum (exhaustive to a weight bound)
    def iter_basis_pairs(self, max_weight: int) -> Iterator[tuple]:
        labels = self.basis_upto(max_weight)
        for u in labels:
            for v in labels:
                yield u, v
