"""Zhu-type associative algebras attached to g = sigma exp(tau N).

Two flavours are computed as truncated quotients of V:

* ``"tilde"``: the bullet product and the ideal spanned by the residues
  ``Res_x tau e^{tau x} (e^{tau x} - 1)^{-(n-e)} e^{tau x s} Y(e^{tau x N} u, x) v``
  with ``s = LL - L(0)`` (0 on the untwisted coset, ``a - 1`` otherwise) and
  ``e = 1`` exactly when ``a != 0``;
* ``"plain"``: the star product and the ideal spanned by
  ``Res_x x^{-(n-e)} (1 + x)^{LL + N} Y(u, x) v``.

All residues reduce to ``sum c_{k,j} (N^j u)_k v`` where ``c_{k,j}`` is the
coefficient of ``x^k N^j`` in a kernel series; :func:`residue_action` does this
sum for any kernel.

Every row and product of homogeneous states is homogeneous in tau: the
component of weight ``s`` carries ``tau^(wt u + wt v - s)``.  Hence
``tau^L(0)`` is an isomorphism from the algebra over K onto its value at
``tau = 1``, and the large quotients are computed over Q with ``tau = 1``.
Passing ``tau=None`` keeps the symbol instead.

Only the untwisted coset enters the ambient space: a state ``u`` in a coset
``a != 0`` satisfies ``u . 1 = u`` for both products and is itself a
spanning row, so every nonzero coset lies entirely in the ideal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .formal import LogSeries, TruncationError
from .linalg import RowSpace, rank
from .scalars import QQ, Scalar
from .twisted import nilpotent_binomial_vec, o_action, rho_action
from .vectors import add_to, scaled, sub
from .voa import VertexAlgebra

__all__ = [
    "kernel_bullet",
    "kernel_tilde_row",
    "kernel_star",
    "kernel_plain_row",
    "kernel_bracket",
    "residue_action",
    "bullet",
    "star",
    "bracket_term",
    "QuotientPresentation",
    "ZhuAlgebra",
    "ZhuFamily",
    "AlgebraTable",
    "algebra_table",
    "law_checks",
    "u1_checks",
    "z_oracle_checks",
    "CheckResult",
]

VARS = ("x", "N")


def _tau(tau):
    return Scalar.tau() if tau is None else tau


def _embed(series: LogSeries, nil_order: int) -> LogSeries:
    """View an x-series as an (x, N)-series."""
    return LogSeries({(e[0], 0): c for e, c in series.terms.items()}, VARS, (series.prec[0], nil_order))


def _expm1_power(m: int, order: int, tau) -> LogSeries:
    """(e^{tau x} - 1)^(-m) with exponents below ``order``."""
    if m <= 0:
        e = LogSeries.exponential(tau, "x", order) - LogSeries.one(("x",), (order,))
        return e ** (-m) if m else LogSeries.one(("x",), (order,))
    width = order + m
    unit = LogSeries(
        {(k,): tau**k / math.factorial(k + 1) for k in range(width)}, ("x",), (width,)
    )
    body = unit.inverse() ** m
    return body.scale(tau ** (-m)).shift("x", -m)


def _exp_nil(tau, order: int, nil_order: int) -> LogSeries:
    """exp(tau x N)."""
    if nil_order <= 1:
        return LogSeries.one(VARS, (order, nil_order))
    return LogSeries.monomial(tau, (1, 1), VARS, (order, nil_order)).exp()


@lru_cache(maxsize=4096)
def kernel_tilde(m: int, shift, order: int, nil_order: int, tau) -> LogSeries:
    """tau e^{tau x (1 + shift)} (e^{tau x} - 1)^(-m) e^{tau x N}."""
    t = _tau(tau)
    # regular factors need m extra terms to survive multiplication by x^{-m}
    width = order + max(m, 0)
    regular = LogSeries.exponential(t * (1 + shift), "x", width)
    base = _expm1_power(m, order, t) * regular
    return _embed(base.scale(t), nil_order) * _exp_nil(t, width, nil_order)


@lru_cache(maxsize=4096)
def kernel_plain(m: int, power, order: int, nil_order: int) -> LogSeries:
    """x^(-m) (1 + x)^(power + N)."""
    if nil_order <= 1:
        body = _embed(LogSeries.binomial_series(power, "x", order + m), 1)
    else:
        body = LogSeries.expand_binomial(power, "x", order + m, "N", nil_order)
    return body.shift("x", -m)


@lru_cache(maxsize=4096)
def kernel_bracket(a, order: int, nil_order: int, tau) -> LogSeries:
    """tau e^{tau x (a + N)}."""
    t = _tau(tau)
    base = LogSeries.exponential(t * a, "x", order).scale(t)
    return _embed(base, nil_order) * _exp_nil(t, order, nil_order)


def _shift(voa: VertexAlgebra, a):
    """LL - L(0) on the coset a."""
    return QQ(0) if a == 0 else a - 1


def kernel_bullet(voa, a, order, nil_order, tau):
    return kernel_tilde(1, _shift(voa, a), order, nil_order, tau)


def kernel_tilde_row(voa, a, n: int, order, nil_order, tau):
    e = 0 if a == 0 else 1
    return kernel_tilde(n - e, _shift(voa, a), order, nil_order, tau)


def kernel_star(voa, wt, a, order, nil_order):
    return kernel_plain(1, wt + _shift(voa, a), order, nil_order)


def kernel_plain_row(voa, wt, a, n: int, order, nil_order):
    e = 0 if a == 0 else 1
    return kernel_plain(n - e, wt + _shift(voa, a), order, nil_order)


def residue_action(voa: VertexAlgebra, kernel: LogSeries, u: Mapping, v: Mapping) -> dict:
    """sum over x^k N^j in the kernel of c (N^j u)_k v."""
    powers = voa.nilpotent_powers(u)
    acc: dict = {}
    for (k, j), c in kernel.terms.items():
        if j < len(powers):
            add_to(acc, voa.mode_vec(powers[j], k, v), c)
    return acc


def _window(voa, u: Mapping, v: Mapping) -> tuple[int, int]:
    """Kernel order and N-truncation that make a residue exact."""
    wu = max((voa.weight(k) for k in u), default=0)
    wv = max((voa.weight(k) for k in v), default=0)
    return wu + wv + 1, max(voa.nilpotency_index(u), 1)


def _bilinear(voa, u: Mapping, v: Mapping, one: Callable) -> dict:
    acc: dict = {}
    for (wt, a), part in voa.components(u).items():
        add_to(acc, one(wt, a, part))
    return acc


def bullet(voa: VertexAlgebra, u: Mapping, v: Mapping, tau=QQ(1)) -> dict:
    """u . v = Res_x tau e^{tau x}/(e^{tau x}-1) Y(e^{tau x (LL - L(0) + N)} u, x) v."""

    def one(wt, a, part):
        order, nil = _window(voa, part, v)
        return residue_action(voa, kernel_bullet(voa, a, order, nil, tau), part, v)

    return _bilinear(voa, u, v, one)


def star(voa: VertexAlgebra, u: Mapping, v: Mapping) -> dict:
    """u * v = Res_x x^{-1} Y((1 + x)^{LL + N} u, x) v."""

    def one(wt, a, part):
        order, nil = _window(voa, part, v)
        return residue_action(voa, kernel_star(voa, wt, a, order, nil), part, v)

    return _bilinear(voa, u, v, one)


def bracket_term(voa: VertexAlgebra, u: Mapping, v: Mapping, tau=QQ(1)) -> dict:
    """tau Res_x Y(e^{tau x (a + N)} u, x) v, the commutator of the bullet product mod the ideal."""

    def one(wt, a, part):
        order, nil = _window(voa, part, v)
        return residue_action(voa, kernel_bracket(a, order, nil, tau), part, v)

    return _bilinear(voa, u, v, one)


def tilde_row(voa, u, v, n: int, tau=QQ(1)) -> dict:
    def one(wt, a, part):
        order, nil = _window(voa, part, v)
        return residue_action(voa, kernel_tilde_row(voa, a, n, order, nil, tau), part, v)

    return _bilinear(voa, u, v, one)


def plain_row(voa, u, v, n: int) -> dict:
    def one(wt, a, part):
        order, nil = _window(voa, part, v)
        return residue_action(voa, kernel_plain_row(voa, wt, a, n, order, nil), part, v)

    return _bilinear(voa, u, v, one)


# ---------------------------------------------------------------------------
# quotients


class QuotientPresentation:
    """V_{<= cutoff} in the untwisted coset modulo the span of the given rows.

    Pivots are the highest ambient labels (by weight, then basis position),
    so :meth:`reduce` returns representatives of the lowest possible weight.
    """

    def __init__(self, voa: VertexAlgebra, cutoff: int, rows: Iterable[Mapping] = ()):
        self.voa = voa
        self.cutoff = cutoff
        self.ambient = [b for b in voa.basis_upto(cutoff) if voa.coset(b) == 0]
        self._pos = {b: (voa.weight(b), i) for i, b in enumerate(self.ambient)}
        self.space = RowSpace(self._key)
        for r in rows:
            self.add(r)

    def _key(self, label):
        return self._pos[label]

    def _restrict(self, vec: Mapping) -> dict:
        out = {}
        for k, c in vec.items():
            if self.voa.coset(k) != 0:
                continue
            if k not in self._pos:
                raise TruncationError(
                    f"state of weight {self.voa.weight(k)} lies above the cutoff {self.cutoff}"
                )
            out[k] = c
        return out

    def add(self, row: Mapping) -> bool:
        return self.space.add(self._restrict(row))

    def reduce(self, vec: Mapping) -> dict:
        """Canonical representative of the class of vec."""
        return self.space.reduce(self._restrict(vec))

    @property
    def rank(self) -> int:
        return self.space.rank

    @property
    def dimension(self) -> int:
        return len(self.ambient) - self.rank

    def basis(self) -> list:
        """Ambient labels that represent the quotient (the non-pivot columns)."""
        return [b for b in self.ambient if b not in self.space.pivots]

    def image_dimension(self, weight: int) -> int:
        """dim of the image of V_{<= weight} in the quotient."""
        return rank(self.reduce({b: QQ(1)}) for b in self.ambient if self.voa.weight(b) <= weight)


@dataclass
class Row:
    top: int
    tag: tuple
    vec: dict


class ZhuFamily:
    """Spanning rows up to the largest cutoff, shared by the quotients at every smaller cutoff.

    ``flavour`` is ``"tilde"`` (bullet product) or ``"plain"`` (star product).
    Rows are generated for pairs with ``wt u + wt v <= cutoff + margin`` and
    ``2 <= n <= cutoff + margin``; a row is kept for cutoff W when its highest
    possible weight ``wt u + wt v + n - e - 1`` is at most W, so that it is a
    complete element of V_{<= W}.
    """

    def __init__(self, voa: VertexAlgebra, max_cutoff: int, flavour: str = "tilde", tau=QQ(1), margin: int = 2):
        if flavour not in ("tilde", "plain"):
            raise ValueError("flavour must be 'tilde' or 'plain'")
        self.voa = voa
        self.max_cutoff = max_cutoff
        self.flavour = flavour
        self.tau = tau
        self.margin = margin
        self.rows: list[Row] = list(self._generate())
        self._algebras: dict = {}

    def _generate(self) -> Iterable[Row]:
        voa = self.voa
        W = self.max_cutoff
        bound = W + self.margin
        labels = voa.basis_upto(bound)
        for u in labels:
            wu, a = voa.weight(u), voa.coset(u)
            e = 0 if a == 0 else 1
            for v in labels:
                wv = voa.weight(v)
                if wu + wv > bound or (a + voa.coset(v)).denominator != 1:
                    continue
                for n in range(2, bound + 1):
                    top = wu + wv + n - e - 1
                    if top > W:
                        break
                    vec = self.row({u: QQ(1)}, {v: QQ(1)}, n)
                    if vec:
                        yield Row(top, (u, v, n), vec)

    def row(self, u: Mapping, v: Mapping, n: int) -> dict:
        if self.flavour == "tilde":
            return tilde_row(self.voa, u, v, n, self.tau)
        return plain_row(self.voa, u, v, n)

    def product(self, u: Mapping, v: Mapping) -> dict:
        if self.flavour == "tilde":
            return bullet(self.voa, u, v, self.tau)
        return star(self.voa, u, v)

    def algebra(self, cutoff: int) -> "ZhuAlgebra":
        if cutoff > self.max_cutoff:
            raise TruncationError(f"rows were generated up to cutoff {self.max_cutoff}")
        if cutoff not in self._algebras:
            q = QuotientPresentation(self.voa, cutoff, (r.vec for r in self.rows if r.top <= cutoff))
            self._algebras[cutoff] = ZhuAlgebra(self, q)
        return self._algebras[cutoff]

    def stabilized_range(self, cutoffs: Sequence[int]) -> int:
        """Largest w0 <= min(cutoffs) - 2 such that every class of weight <= w0
        reduces identically at all the given cutoffs (-1 when none does)."""
        algs = [self.algebra(W) for W in cutoffs]
        base = algs[0]
        w0 = -1
        for w in range(min(cutoffs) - 1):
            for b in base.quotient.ambient:
                if self.voa.weight(b) != w:
                    continue
                reps = [A.reduce({b: QQ(1)}) for A in algs]
                if any(r != reps[0] for r in reps[1:]):
                    return w0
            w0 = w
        return w0


class ZhuAlgebra:
    """The quotient at one cutoff together with its product."""

    def __init__(self, family: ZhuFamily, quotient: QuotientPresentation):
        self.family = family
        self.voa = family.voa
        self.quotient = quotient
        self.cutoff = quotient.cutoff

    @property
    def flavour(self) -> str:
        return self.family.flavour

    def product(self, u: Mapping, v: Mapping) -> dict:
        return self.family.product(u, v)

    def reduce(self, vec: Mapping) -> dict:
        return self.quotient.reduce(vec)

    def is_zero(self, vec: Mapping) -> bool:
        return not self.reduce(vec)

    def labels(self, max_weight: int) -> list:
        return [b for b in self.quotient.ambient if self.voa.weight(b) <= max_weight]


# ---------------------------------------------------------------------------
# tables


@dataclass
class AlgebraTable:
    flavour: str
    cutoff: int
    stabilized_range: int
    basis: list
    constants: dict
    identity: dict
    identity_ok: bool

    def to_json(self, voa: VertexAlgebra) -> dict:
        index = {b: i for i, b in enumerate(self.basis)}
        constants = []
        for (i, j), vec in sorted(self.constants.items()):
            for k in sorted(vec, key=index.__getitem__):
                constants.append([i, j, index[k], str(vec[k])])
        return {
            "flavour": self.flavour,
            "cutoff": self.cutoff,
            "stabilized_range": self.stabilized_range,
            "basis": [voa.format_label(b) for b in self.basis],
            "constants": constants,
            "identity": [[index[k], str(c)] for k, c in sorted(self.identity.items(), key=lambda kc: index[kc[0]])],
            "identity_ok": self.identity_ok,
        }


def algebra_table(algebra: ZhuAlgebra, w0: int) -> AlgebraTable:
    """Structure constants on the quotient basis of weight <= w0 (the stabilized range)."""
    voa = algebra.voa
    basis = algebra.quotient.basis()
    low = [b for b in basis if voa.weight(b) <= w0]
    constants = {}
    index = {b: i for i, b in enumerate(basis)}
    for bi, bj in itertools.product(low, repeat=2):
        if voa.weight(bi) + voa.weight(bj) > algebra.cutoff:
            continue
        constants[(index[bi], index[bj])] = algebra.reduce(algebra.product({bi: QQ(1)}, {bj: QQ(1)}))
    one = {voa.vacuum: QQ(1)}
    identity = algebra.reduce(one)
    identity_ok = all(
        algebra.reduce(algebra.product(one, {b: QQ(1)})) == algebra.reduce({b: QQ(1)})
        and algebra.reduce(algebra.product({b: QQ(1)}, one)) == algebra.reduce({b: QQ(1)})
        for b in low
    )
    return AlgebraTable(algebra.flavour, algebra.cutoff, w0, basis, constants, identity, identity_ok)


# ---------------------------------------------------------------------------
# checks


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def fail(self, **info) -> None:
        if self.counterexample is None:
            self.counterexample = info

    def report(self, **parameters) -> dict:
        out = {"identity": self.name, "checked": self.checked, "status": "pass" if self.passed else "fail"}
        out.update(parameters)
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def _fmt_vec(voa, vec: Mapping) -> dict:
    return {voa.format_label(k): str(c) for k, c in sorted(vec.items(), key=lambda kc: repr(kc[0]))}


def law_checks(algebra: ZhuAlgebra, max_total: int, stop_early: bool = True) -> list[CheckResult]:
    """Algebra laws on untwisted-coset basis states whose combined weight is <= max_total.

    identity, associativity, the commutator formula (tilde) or nothing extra
    (plain), (L(-1) + tau(a + N))u . v in the ideal, the omega bracket and the
    nilpotency of ad omega.
    """
    voa = algebra.voa
    tau = algebra.family.tau
    t = _tau(tau)
    prod = algebra.product
    red = algebra.reduce
    labels = algebra.labels(max_total)
    wt = voa.weight
    one = {voa.vacuum: QQ(1)}
    results = []

    r = CheckResult("identity")
    for b in labels:
        vb = {b: QQ(1)}
        for side, val in (("left", prod(one, vb)), ("right", prod(vb, one))):
            r.checked += 1
            d = red(sub(val, vb))
            if d:
                r.fail(u=voa.format_label(b), side=side, defect=_fmt_vec(voa, d))
    results.append(r)

    r = CheckResult("associativity")
    for u, v, w in itertools.product(labels, repeat=3):
        if wt(u) + wt(v) + wt(w) > max_total or r.counterexample and stop_early:
            continue
        U, Vv, Wv = {u: QQ(1)}, {v: QQ(1)}, {w: QQ(1)}
        r.checked += 1
        d = red(sub(prod(U, prod(Vv, Wv)), prod(prod(U, Vv), Wv)))
        if d:
            r.fail(u=voa.format_label(u), v=voa.format_label(v), w=voa.format_label(w), defect=_fmt_vec(voa, d))
    results.append(r)

    if algebra.flavour == "tilde":
        r = CheckResult("commutator")
        for u, v in itertools.product(labels, repeat=2):
            if wt(u) + wt(v) > max_total or r.counterexample and stop_early:
                continue
            U, Vv = {u: QQ(1)}, {v: QQ(1)}
            r.checked += 1
            d = red(sub(sub(prod(U, Vv), prod(Vv, U)), bracket_term(voa, U, Vv, tau)))
            if d:
                r.fail(u=voa.format_label(u), v=voa.format_label(v), defect=_fmt_vec(voa, d))
        results.append(r)

        r = CheckResult("derivative-in-ideal")
        for u, v in itertools.product(labels, repeat=2):
            if wt(u) + 1 + wt(v) > max_total or r.counterexample and stop_early:
                continue
            U = {u: QQ(1)}
            a = voa.coset(u)
            shifted = add_to(voa.L(-1, U), add_to(scaled(U, a), voa.nilpotent(U)), t)
            r.checked += 1
            d = red(prod(shifted, {v: QQ(1)}))
            if d:
                r.fail(u=voa.format_label(u), v=voa.format_label(v), defect=_fmt_vec(voa, d))
        results.append(r)

    om = voa.omega
    r = CheckResult("omega-bracket")
    r_nil = CheckResult("omega-nilpotent")
    for v in labels:
        if wt(v) + 2 > max_total:
            continue
        V = {v: QQ(1)}
        ad = sub(prod(om, V), prod(V, om))
        if algebra.flavour == "tilde":
            expected = scaled(voa.nilpotent(V), -t * t)
        else:
            # U(1) carries the tilde relation to the plain algebra, where tau drops out
            expected = scaled(voa.nilpotent(V), QQ(-1))
        r.checked += 1
        d = red(sub(ad, expected))
        if d:
            r.fail(v=voa.format_label(v), defect=_fmt_vec(voa, d))
        K = voa.nilpotency_index(V)
        if wt(v) + 2 * K > max_total:
            continue
        cur = V
        for _ in range(K):
            cur = sub(prod(om, cur), prod(cur, om))
        r_nil.checked += 1
        d = red(cur)
        if d:
            r_nil.fail(v=voa.format_label(v), power=K, defect=_fmt_vec(voa, d))
    results.extend([r, r_nil])
    return results


def u1_prequotient_lhs(voa, u: Mapping, v: Mapping, n: int, tau=None) -> dict:
    """U(1) Res_y y^{-n} Y((1 + y)^N u, tau^{-1} log(1 + y)) v, through the log composition."""
    t = _tau(tau)
    wu = max(voa.weight(k) for k in u)
    wv = max(voa.weight(k) for k in v)
    acc: dict = {}
    # (C(N,j) u)_k v x^{-k-1} y^j with x^{-k-1} = (tau^{-1} log(1+y))^{-k-1} of valuation -k-1.
    # C(N, j) never vanishes when N u != 0, so j is bounded through the y-degree only.
    for j in range(n + wu + wv):
        cu = nilpotent_binomial_vec(voa, u, 0, j)
        if not cu:
            continue
        for k in range(j - n, wu + wv):
            target = n - 1 - j
            series = LogSeries.compose_log(-k - 1, target + 1, "y", t)
            c = series.coefficient(target)
            if c:
                add_to(acc, voa.mode_vec(cu, k, v), c)
    return voa.U1(acc, tau)


def u1_prequotient_rhs(voa, u: Mapping, v: Mapping, n: int, tau=None) -> dict:
    """Res_y y^{-n} Y((1 + y)^{L(0) + N} U(1) u, y) U(1) v."""
    Uu = voa.U1(u, tau)
    Uv = voa.U1(v, tau)
    acc: dict = {}
    for (wt, a), part in voa.components(Uu).items():
        order, nil = _window(voa, part, Uv)
        add_to(acc, residue_action(voa, kernel_plain(n, QQ(wt), order, nil), part, Uv))
    return acc


def u1_checks(
    tilde: ZhuFamily,
    plain: ZhuFamily,
    cutoff: int,
    pre_weight: int = 3,
    pre_n: Sequence[int] = (0, 1, 2, 3),
    table_weight: int | None = None,
    tau_pre=None,
) -> list[CheckResult]:
    """U(1) relating the two flavours.

    * the pre-quotient identity (log-composition route against the x-route)
      for basis u, v of weight <= pre_weight, with tau kept symbolic by default;
    * U(1) of every tilde row at ``cutoff`` reduces to zero in the plain quotient;
    * U(1)(u . v) = U(1)u * U(1)v in the plain quotient for u, v of combined
      weight <= table_weight.
    """
    voa = tilde.voa
    tau = tilde.tau
    out = []
    r = CheckResult("u1-prequotient")
    labels = voa.basis_upto(pre_weight)
    for u, v in itertools.product(labels, repeat=2):
        if r.counterexample:
            break
        for n in pre_n:
            U, Vv = {u: QQ(1)}, {v: QQ(1)}
            r.checked += 1
            d = sub(u1_prequotient_lhs(voa, U, Vv, n, tau_pre), u1_prequotient_rhs(voa, U, Vv, n, tau_pre))
            if d:
                r.fail(u=voa.format_label(u), v=voa.format_label(v), n=n, defect=_fmt_vec(voa, d))
                break
    out.append(r)

    A = plain.algebra(cutoff)
    r = CheckResult("u1-rows")
    for row in tilde.rows:
        if row.top > cutoff:
            continue
        r.checked += 1
        d = A.reduce(voa.U1(row.vec, tau))
        if d:
            u, v, n = row.tag
            r.fail(u=voa.format_label(u), v=voa.format_label(v), n=n, defect=_fmt_vec(voa, d))
            break
    out.append(r)

    r = CheckResult("u1-products")
    tw = cutoff if table_weight is None else table_weight
    labs = A.labels(tw)
    for u, v in itertools.product(labs, repeat=2):
        if voa.weight(u) + voa.weight(v) > tw:
            continue
        U, Vv = {u: QQ(1)}, {v: QQ(1)}
        r.checked += 1
        lhs = voa.U1(bullet(voa, U, Vv, tau), tau)
        rhs = star(voa, voa.U1(U, tau), voa.U1(Vv, tau))
        d = A.reduce(sub(lhs, rhs))
        if d:
            r.fail(u=voa.format_label(u), v=voa.format_label(v), defect=_fmt_vec(voa, d))
            break
    out.append(r)
    return out


def _matrix_defect(module, lhs_fn, rhs_fn, states) -> tuple | None:
    for w in states:
        d = sub(lhs_fn({w: QQ(1)}), rhs_fn({w: QQ(1)}))
        if d:
            k = min(d, key=repr)
            return w, k, d[k]
    return None


def z_oracle_checks(
    module,
    states: Sequence,
    tilde: ZhuFamily,
    plain: ZhuFamily,
    cutoff: int,
    product_weight: int = 3,
    describe: Callable[[Hashable], str] = repr,
) -> list[CheckResult]:
    """o kills the plain rows, rho kills the tilde rows, o(u)o(v) = o(u * v) and rho(u)rho(v) = rho(u . v), on ``states``.

    ``states`` is a basis (or a basis of a subspace) of the lowest-weight
    space Omega; operators are compared on every listed state, exactly.
    """
    voa = module.voa
    tau = tilde.tau
    out = []
    zero = lambda w: {}

    def fail(r, tag, found):
        w, k, c = found
        r.fail(**tag, state=describe(w), entry=describe(k), difference=str(c))

    r = CheckResult("o-kills-rows")
    for row in plain.rows:
        if row.top > cutoff:
            continue
        r.checked += 1
        found = _matrix_defect(module, lambda w: o_action(module, row.vec, w), zero, states)
        if found:
            u, v, n = row.tag
            fail(r, {"u": voa.format_label(u), "v": voa.format_label(v), "n": n}, found)
            break
    out.append(r)

    r = CheckResult("rho-kills-rows")
    for row in tilde.rows:
        if row.top > cutoff:
            continue
        r.checked += 1
        found = _matrix_defect(module, lambda w: rho_action(module, row.vec, w, tau), zero, states)
        if found:
            u, v, n = row.tag
            fail(r, {"u": voa.format_label(u), "v": voa.format_label(v), "n": n}, found)
            break
    out.append(r)

    r = CheckResult("o-product")
    labels = voa.basis_upto(product_weight)
    for u, v in itertools.product(labels, repeat=2):
        U, Vv = {u: QQ(1)}, {v: QQ(1)}
        uv = star(voa, U, Vv)
        r.checked += 1
        found = _matrix_defect(
            module,
            lambda w: o_action(module, U, o_action(module, Vv, w)),
            lambda w: o_action(module, uv, w),
            states,
        )
        if found:
            fail(r, {"u": voa.format_label(u), "v": voa.format_label(v)}, found)
            break
    out.append(r)

    r = CheckResult("rho-product")
    for u, v in itertools.product(labels, repeat=2):
        U, Vv = {u: QQ(1)}, {v: QQ(1)}
        uv = bullet(voa, U, Vv, tau)
        r.checked += 1
        found = _matrix_defect(
            module,
            lambda w: rho_action(module, U, rho_action(module, Vv, w, tau), tau),
            lambda w: rho_action(module, uv, w, tau),
            states,
        )
        if found:
            fail(r, {"u": voa.format_label(u), "v": voa.format_label(v)}, found)
            break
    out.append(r)
    return out
