"""Twisted modules, their vertex operators and the identities they satisfy.

Modules are :class:`~twistzhu.voa.ModeEngine` subclasses, so modes of any
state of V are computed from generator modes through the iterate recursion.
Two families are provided:

* :class:`TwistedFockModule` for the Heisenberg algebra with
  g = sigma exp(tau N).  Generator modes h_i(m), m in a_i + Z, obey
  [h_i(m), h_j(n)] = (m <h_i,h_j> + <N h_i,h_j>) delta_{m+n,0}; the zero modes
  act on a zero-mode module (:class:`MatrixZeroModes` or, when the zero modes
  form a Weyl algebra, :class:`WeylZeroModes`).
* :class:`VirasoroModule`, a Verma-type module over a finite-dimensional
  L(0)-module.

:func:`induce` builds the span of generator-mode words applied to a seed
space and divides out its radical, the largest graded piece that never
returns to the seed under lowering modes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .linalg import Indexer, RowSpace, kernel
from .scalars import QQ, Scalar, binomial, root_of_unity
from .vectors import add_term, add_to, apply_linear, scaled, sub
from .voa import ModeEngine, VertexAlgebra
from .backends.virasoro import VirasoroWords, partitions

__all__ = [
    "MatrixZeroModes",
    "WeylZeroModes",
    "TwistedFockModule",
    "VirasoroModule",
    "InconsistentModule",
    "InducedModule",
    "induce",
    "omega_subspace",
    "o_action",
    "rho_action",
    "jacobi_defect",
    "commutator_defect",
    "associativity_defect",
    "log_coefficient",
    "log_coefficient_adjoint",
    "log_coefficients_adjoint",
    "nilpotent_orbit",
    "assemble",
    "lemma_suite",
    "identity_sweep",
]


class InconsistentModule(ValueError):
    """Zero-mode data violating the commutation relations; ``defects`` lists them."""

    def __init__(self, defects: list[dict]):
        self.defects = defects
        first = defects[0]
        super().__init__(f"relation {first['relation']} fails: {first['detail']}")


# ---------------------------------------------------------------------------
# zero-mode modules


class ZeroModes:
    """Action of the zero modes h_i(0), a_i = 0, on the lowest piece of a Fock module."""

    def __init__(self, voa):
        self.voa = voa
        self.zero_gens = [i for i in range(voa.rank) if voa.cosets[i] == 0]

    def labels(self) -> list:
        raise NotImplementedError

    def zero_mode(self, i: int, label) -> dict:
        raise NotImplementedError

    def admissible(self, label) -> bool:
        return True

    def zero_mode_vec(self, i: int, vec: Mapping) -> dict:
        return apply_linear(lambda b: self.zero_mode(i, b), vec)

    def nilpotent(self, label) -> dict:
        """N on the zero-mode module: -1/2 sum G^{ij} h_i(0) h_j(0) over the untwisted block."""
        cache = self.__dict__.setdefault("_nil_cache", {})
        if label not in cache:
            cache[label] = self._nilpotent(label)
        return cache[label]

    def _nilpotent(self, label) -> dict:
        ginv = self.voa.form_inverse
        out: dict = {}
        for i in self.zero_gens:
            for j in self.zero_gens:
                c = ginv[i][j]
                if c:
                    add_to(out, self.zero_mode_vec(i, self.zero_mode(j, label)), -c / 2)
        return out

    def relation_defects(self) -> list[dict]:
        """Violations of [h_i(0), h_j(0)] = <N h_i, h_j> on the listed labels."""
        voa = self.voa
        defects = []
        for i, j in itertools.combinations(self.zero_gens, 2):
            target = voa.skew_form(i, j)
            for b in self.labels():
                lhs = sub(self.zero_mode_vec(i, self.zero_mode(j, b)), self.zero_mode_vec(j, self.zero_mode(i, b)))
                diff = sub(lhs, {b: target} if target else {})
                if diff:
                    defects.append(
                        {
                            "relation": f"[{voa.names[i]}(0),{voa.names[j]}(0)] = {target}",
                            "detail": f"on basis vector {b!r} the difference is {_fmt(diff)}",
                        }
                    )
                    break
        return defects


def _fmt(vec: Mapping) -> str:
    return "{" + ", ".join(f"{k!r}: {v}" for k, v in sorted(vec.items(), key=repr)) + "}"


class MatrixZeroModes(ZeroModes):
    """Finite-dimensional zero-mode module; ``matrices[i][r][c]`` is the (r, c) entry of h_i(0)."""

    def __init__(self, voa, dim: int, matrices: Mapping[int, Sequence[Sequence]] | None = None):
        super().__init__(voa)
        self.dim = dim
        self.matrices = {}
        for i, mat in (matrices or {}).items():
            if i not in self.zero_gens:
                raise ValueError(f"generator {voa.names[i]} has no zero mode (nonzero coset)")
            if len(mat) != dim or any(len(r) != dim for r in mat):
                raise ValueError(f"zero-mode matrix for {voa.names[i]} must be {dim}x{dim}")
            self.matrices[i] = [[QQ(x) for x in row] for row in mat]

    def labels(self) -> list:
        return list(range(self.dim))

    def zero_mode(self, i: int, label) -> dict:
        mat = self.matrices.get(i)
        if mat is None:
            return {}
        return {r: mat[r][label] for r in range(self.dim) if mat[r][label]}


class WeylZeroModes(ZeroModes):
    """C[p_1..p_r] (x) C^dim with e_k(0) = d/dp_k, f_k(0) = p_k and central generators by matrices.

    Used when the zero modes satisfy [e_k(0), f_k(0)] = 1, which has no
    finite-dimensional representation.  ``labels`` lists the monomials of
    total degree at most ``max_degree``; operators are never truncated.
    """

    def __init__(
        self,
        voa,
        pairs: Sequence[tuple[int, int]],
        central: Mapping[int, Sequence[Sequence]],
        dim: int,
        max_degree: int = 2,
    ):
        super().__init__(voa)
        self.pairs = [tuple(p) for p in pairs]
        self.dim = dim
        self.max_degree = max_degree
        self.central = {i: [[QQ(x) for x in row] for row in m] for i, m in central.items()}
        self.role: dict = {}
        for k, (e, f) in enumerate(self.pairs):
            self.role[e] = ("d", k)
            self.role[f] = ("p", k)
        for i in self.central:
            if i in self.role:
                raise ValueError(f"generator {voa.names[i]} is both central and in a pair")
            self.role[i] = ("c", i)
        missing = [voa.names[i] for i in self.zero_gens if i not in self.role]
        if missing:
            raise ValueError(f"zero-mode generators without a role: {missing}")
        for i, m in self.central.items():
            if len(m) != dim or any(len(r) != dim for r in m):
                raise ValueError(f"central matrix for {voa.names[i]} must be {dim}x{dim}")
        defects = self.relation_defects()
        if defects:
            raise InconsistentModule(defects)

    def labels(self) -> list:
        r = len(self.pairs)
        out = []
        for total in range(self.max_degree + 1):
            for exps in _compositions(total, r):
                out.extend((exps, k) for k in range(self.dim))
        return out

    def admissible(self, label) -> bool:
        return sum(label[0]) <= self.max_degree

    def zero_mode(self, i: int, label) -> dict:
        exps, k = label
        kind, idx = self.role[i]
        if kind == "d":
            if not exps[idx]:
                return {}
            new = exps[:idx] + (exps[idx] - 1,) + exps[idx + 1 :]
            return {(new, k): QQ(exps[idx])}
        if kind == "p":
            new = exps[:idx] + (exps[idx] + 1,) + exps[idx + 1 :]
            return {(new, k): QQ(1)}
        mat = self.central[idx]
        return {(exps, r): mat[r][k] for r in range(self.dim) if mat[r][k]}


def _compositions(total: int, parts: int) -> list[tuple]:
    if parts == 0:
        return [()] if total == 0 else []
    return [(a,) + rest for a in range(total, -1, -1) for rest in _compositions(total - a, parts - 1)]


# ---------------------------------------------------------------------------
# modules


class GradedModule(ModeEngine):
    """Common enumeration helpers; subclasses define ``creation_slots`` and ``base_labels``."""

    def base_labels(self) -> list:
        raise NotImplementedError

    def creation_slots(self, max_degree) -> list[tuple]:
        """Sorted (slot, degree) pairs for the commuting creation operators."""
        raise NotImplementedError

    def make_label(self, slots: tuple, base) -> Hashable:
        raise NotImplementedError

    def admissible(self, label) -> bool:
        return True

    def states_upto(self, max_degree) -> dict:
        """{degree: [labels]} for all basis states of degree <= max_degree."""
        slots = self.creation_slots(max_degree)
        out: dict = {}
        bases = self.base_labels()

        def rec(start: int, chosen: tuple, deg):
            for b in bases:
                out.setdefault(deg, []).append(self.make_label(chosen, b))
            for idx in range(start, len(slots)):
                s, d = slots[idx]
                if deg + d <= max_degree:
                    rec(idx, chosen + (s,), deg + d)

        rec(0, (), QQ(0))
        return dict(sorted(out.items()))

    def generator_modes_from(self, deg, max_degree) -> Iterable[tuple]:
        """(i, q, out_degree) for generator modes taking degree ``deg`` into [0, max_degree]."""
        voa = self.voa
        for i in range(voa.generator_count):
            a = voa.generator_coset(i) if self.twisted else QQ(0)
            wt = voa.generator_weight(i)
            # out = deg + wt - q - 1 in [0, max_degree]
            lo, hi = deg + wt - 1 - max_degree, deg + wt - 1
            q = a + math.ceil(lo - a)
            while q <= hi:
                yield i, q, deg + wt - q - 1
                q += 1


class TwistedFockModule(GradedModule):
    """Fock module of the Heisenberg algebra twisted by g = sigma exp(tau N)."""

    twisted = True

    def __init__(self, voa, zero_modes: ZeroModes):
        super().__init__(voa)
        defects = zero_modes.relation_defects()
        if defects:
            raise InconsistentModule(defects)
        self.zero = zero_modes

    # labels are (creation tuple of (mode, gen), zero-mode label)
    def degree(self, label):
        return -sum((m for m, _ in label[0]), QQ(0))

    def base_labels(self) -> list:
        return self.zero.labels()

    def admissible(self, label) -> bool:
        return self.zero.admissible(label[1])

    def creation_slots(self, max_degree) -> list[tuple]:
        slots = []
        voa = self.voa
        for i in range(voa.rank):
            a = voa.cosets[i]
            k = 1
            while k - a <= max_degree:
                slots.append(((QQ(a - k), i), k - a))
                k += 1
        slots.sort()
        return slots

    def make_label(self, slots: tuple, base):
        return (tuple(sorted(slots)), base)

    def generator_mode(self, i: int, q, label) -> dict:
        q = QQ(q)
        voa = self.voa
        if (q - voa.cosets[i]).denominator != 1:
            return {}
        mono, base = label
        if q < 0:
            new = tuple(sorted(mono + ((q, i),)))
            return {(new, base): QQ(1)}
        if q == 0:
            return {(mono, b): c for b, c in self.zero.zero_mode(i, base).items()}
        out: dict = {}
        for p, (m, g) in enumerate(mono):
            if m == -q:
                c = q * voa.form[i][g] + voa.skew_form(i, g)
                if c:
                    add_term(out, (mono[:p] + mono[p + 1 :], base), c)
        return out

    def twisted_generator_mode(self, i: int, q, label) -> dict:
        return self.generator_mode(i, q, label)

    # -- automorphism on the module
    def nilpotent_state(self, label) -> dict:
        """N_W: derivation on creation operators plus the zero-mode part."""
        mono, base = label
        out: dict = {}
        for p, (m, g) in enumerate(mono):
            for j, c in self.voa.nil[g].items():
                new = tuple(sorted(mono[:p] + ((m, j),) + mono[p + 1 :]))
                add_term(out, (new, base), c)
        for b, c in self.zero.nilpotent(base).items():
            add_term(out, (mono, b), c)
        return out

    def nilpotent_vec(self, vec: Mapping) -> dict:
        return apply_linear(self.nilpotent_state, vec)

    def sigma_vec(self, vec: Mapping) -> dict:
        return {k: c * root_of_unity(-self.degree(k)) for k, c in vec.items()}

    def g_vec(self, vec: Mapping, tau=None) -> dict:
        t = Scalar.tau() if tau is None else tau
        acc: dict = {}
        term = dict(vec)
        k = 0
        while term:
            add_to(acc, term)
            k += 1
            term = scaled(self.nilpotent_vec(term), t / k)
            if k > 64:
                raise ArithmeticError("N on the module is not nilpotent on this vector")
        return self.sigma_vec(acc)


class VirasoroModule(GradedModule):
    """Verma-type Virasoro module: words L(-n_1)...L(-n_k) on a finite L(0)-module."""

    twisted = False

    def __init__(self, voa, l0: Sequence[Sequence]):
        super().__init__(voa)
        self.dim = len(l0)
        self.l0 = [[QQ(x) for x in row] for row in l0]

        def base_action(m: int, b: int) -> dict:
            if m > 0:
                return {}
            # m == 0 (m < 0 creates a factor)
            return {r: self.l0[r][b] for r in range(self.dim) if self.l0[r][b]}

        self.words = VirasoroWords(voa.central_charge, 1, base_action)

    def degree(self, label):
        return sum(label[0])

    def base_labels(self) -> list:
        return list(range(self.dim))

    def creation_slots(self, max_degree) -> list[tuple]:
        return [(-n, n) for n in range(int(max_degree), 0, -1)]

    def make_label(self, slots: tuple, base):
        return (tuple(sorted((-s for s in slots), reverse=True)), base)

    def generator_mode(self, i: int, q, label) -> dict:
        word, base = label
        return self.words.act(int(q) - 1, word, base)


# ---------------------------------------------------------------------------
# induction and lowest-weight spaces


@dataclass
class InducedModule:
    """Span of generator-mode words on a seed space, and its quotient by the radical."""

    module: GradedModule
    cutoff: object
    spans: dict = field(default_factory=dict)
    radical: dict = field(default_factory=dict)
    quotient: dict = field(default_factory=dict)

    def dims(self) -> dict:
        return {d: s.rank for d, s in self.spans.items()}

    def radical_dims(self) -> dict:
        return {d: s.rank for d, s in self.radical.items()}

    def quotient_dims(self) -> dict:
        return {d: len(q) for d, q in self.quotient.items()}

    def reduce(self, vec: Mapping) -> dict:
        """Canonical representative modulo the radical (vec homogeneous)."""
        if not vec:
            return {}
        d = self.module.degree(next(iter(vec)))
        space = self.radical.get(d)
        return space.reduce(vec) if space is not None else dict(vec)

    def omega(self, probe_weight: int = 2) -> dict:
        """{degree: basis} of the lowest-weight space of the quotient module."""
        voa = self.module.voa
        probes = voa.basis_upto(probe_weight)
        out = {}
        for d, reps in self.quotient.items():
            images = []
            for idx, x in enumerate(reps):
                img: dict = {}
                for u in probes:
                    for q, dd in _lowering_modes(self.module, u, d):
                        y = self.reduce(self.module.mode_vec({u: QQ(1)}, q, x))
                        for lab, c in y.items():
                            add_term(img, (u, q, lab), c)
                images.append((idx, img))
            ker = kernel(images)
            out[d] = [self.reduce(combine_reps(reps, k)) for k in ker]
        return out


def combine_reps(reps: Sequence[Mapping], coeffs: Mapping) -> dict:
    acc: dict = {}
    for idx, c in coeffs.items():
        add_to(acc, reps[idx], c)
    return acc


def _lowering_modes(module: GradedModule, u, deg) -> list:
    """Modes u(q) with out-degree in [0, deg), i.e. strictly lowering the real weight."""
    voa = module.voa
    wt = voa.weight(u)
    a = voa.coset(u) if module.twisted else QQ(0)
    out = []
    # out-degree deg + wt - q - 1 < deg  <=>  q > wt - 1 ; >= 0  <=> q <= deg + wt - 1
    q = a + math.floor(wt - 1 - a) + 1
    while q <= deg + wt - 1:
        out.append((q, deg + wt - q - 1))
        q += 1
    return out


def induce(module: GradedModule, cutoff, seed: Sequence[Mapping] | None = None) -> InducedModule:
    """Induced module to degree ``cutoff`` from the seed space (default: all degree-0 labels)."""
    if seed is None:
        seed = [{b: QQ(1)} for b in module.states_upto(0).get(QQ(0), [])]
    out = InducedModule(module, cutoff)
    order = Indexer()
    queue = []
    for v in seed:
        if v and out.spans.setdefault(QQ(0), RowSpace(order)).add(v):
            queue.append((QQ(0), v))
    if not queue:
        return out
    while queue:
        nxt = []
        for deg, vec in queue:
            for i, q, od in module.generator_modes_from(deg, cutoff):
                img: dict = {}
                for lab, c in vec.items():
                    r = module.generator_mode(i, q, lab)
                    if r:
                        add_to(img, r, c)
                if not img or not all(module.admissible(l) for l in img):
                    continue
                space = out.spans.setdefault(od, RowSpace(order))
                r = space.reduce(img)
                if r and space.add(r):
                    nxt.append((od, r))
        queue = nxt
    out.spans = dict(sorted(out.spans.items()))
    _radical(out)
    return out


def _radical(ind: InducedModule) -> None:
    module = ind.module
    order = Indexer()
    for d, span in ind.spans.items():
        basis = span.basis()
        rad = RowSpace(order)
        if d > 0:
            images = []
            for idx, x in enumerate(basis):
                img: dict = {}
                for i, q, od in module.generator_modes_from(d, d):
                    if od >= d:
                        continue
                    y: dict = {}
                    for lab, c in x.items():
                        r = module.generator_mode(i, q, lab)
                        if r:
                            add_to(y, r, c)
                    y = ind.reduce(y)
                    for lab, c in y.items():
                        add_term(img, (i, q, lab), c)
                images.append((idx, img))
            for k in kernel(images):
                rad.add(combine_reps(basis, k))
        ind.radical[d] = rad
        reps = []
        seen = RowSpace(order)
        for x in basis:
            r = rad.reduce(x)
            if r and seen.add(r):
                reps.append(r)
        ind.quotient[d] = reps


def omega_subspace(module: GradedModule, max_degree, probe_weight: int = 2) -> dict:
    """Joint kernel of all weight-lowering modes u(q), wt u <= probe_weight, per degree."""
    voa = module.voa
    probes = voa.basis_upto(probe_weight)
    out = {}
    for d, labels in module.states_upto(max_degree).items():
        images = []
        for w in labels:
            img: dict = {}
            for u in probes:
                for q, _ in _lowering_modes(module, u, d):
                    for lab, c in module.mode(u, q, w).items():
                        add_term(img, (u, q, lab), c)
            images.append((w, img))
        out[d] = kernel(images)
    return out


# ---------------------------------------------------------------------------
# zero-mode actions


def o_action(module: ModeEngine, v: Mapping, w: Mapping) -> dict:
    """o(v) = v(wt v - 1) for the untwisted coset, zero on the other cosets (split by components)."""
    voa = module.voa
    acc: dict = {}
    for (wt, a), part in voa.components(v).items():
        if module.twisted and a != 0:
            continue
        add_to(acc, module.mode_vec(part, wt - 1, w))
    return acc


def rho_action(module: ModeEngine, v: Mapping, w: Mapping, tau=None) -> dict:
    """rho(v) = o(U(1) v)."""
    return o_action(module, module.voa.U1(v, tau), w)


def lowering_defect(module: ModeEngine, w: Mapping, probe_weight: int = 2):
    """First weight-lowering mode not killing w, or None (membership test for the lowest-weight space)."""
    voa = module.voa
    degs = {module.degree(k) for k in w}
    for d in degs:
        part = {k: c for k, c in w.items() if module.degree(k) == d}
        for u in voa.basis_upto(probe_weight):
            for q, _ in _lowering_modes(module, u, d):
                if module.mode_vec({u: QQ(1)}, q, part):
                    return (u, q)
    return None


# ---------------------------------------------------------------------------
# identities


def nilpotent_binomial_vec(voa: VertexAlgebra, u: Mapping, m, j: int) -> dict:
    """C(m + N, j) u."""
    vec = dict(u)
    for r in range(j):
        nxt = scaled(vec, m - r) if m - r else {}
        add_to(nxt, voa.nilpotent(vec))
        vec = nxt
    return scaled(vec, QQ(1, math.factorial(j)))


def binomial_state(module: ModeEngine, u: Mapping, m, j: int) -> dict:
    """C(m + N, j) u on a twisted module; C(m, j) u on an untwisted one, where N plays no role."""
    if module.twisted:
        return nilpotent_binomial_vec(module.voa, u, m, j)
    c = binomial(m, j)
    return scaled(u, c) if c else {}


def _modes_on(module, u: Mapping, q, vec: Mapping) -> dict:
    return module.mode_vec(u, q, vec) if vec else {}


def jacobi_defect(module: ModeEngine, u, v, l: int, m, n, w) -> dict:
    """LHS - RHS of the component twisted Jacobi identity on the state w.

    LHS = sum_k (-1)^k C(l,k) u(l-k+m) v(k+n) - sum_k (-1)^(k-l) C(l,k) v(l-k+n) u(k+m)
    RHS = sum_j ((C(m+N, j) u)_(l+j) v)(m+n-j)
    """
    voa = module.voa
    U, Vv, W = _vec(u), _vec(v), _vec(w)
    dw = max(module.degree(k) for k in W)
    wu, wv = voa.weight(next(iter(U))), voa.weight(next(iter(Vv)))
    acc: dict = {}
    k = 0
    while dw + wv - (k + n) - 1 >= 0:
        c = binomial(l, k)
        inner = module.mode_vec(Vv, k + n, W)
        if c and inner:
            add_to(acc, module.mode_vec(U, l - k + m, inner), c if k % 2 == 0 else -c)
        k += 1
    k = 0
    while dw + wu - (k + m) - 1 >= 0:
        c = binomial(l, k)
        inner = module.mode_vec(U, k + m, W)
        if c and inner:
            add_to(acc, module.mode_vec(Vv, l - k + n, inner), -c if (k - l) % 2 == 0 else c)
        k += 1
    j = 0
    while wu + wv - (l + j) - 1 >= 0:
        x = binomial_state(module, U, m, j)
        if x:
            state = voa.mode_vec(x, l + j, Vv)
            if state:
                add_to(acc, module.mode_vec(state, m + n - j, W), -1)
        j += 1
    return acc


def commutator_defect(module: ModeEngine, u, v, m, n, w) -> dict:
    """[u(m), v(n)] w - sum_j ((C(m+N, j) u)_j v)(m+n-j) w."""
    voa = module.voa
    U, Vv, W = _vec(u), _vec(v), _vec(w)
    acc = module.mode_vec(U, m, module.mode_vec(Vv, n, W))
    add_to(acc, module.mode_vec(Vv, n, module.mode_vec(U, m, W)), -1)
    wu, wv = voa.weight(next(iter(U))), voa.weight(next(iter(Vv)))
    for j in range(0, wu + wv):
        x = binomial_state(module, U, m, j)
        state = voa.mode_vec(x, j, Vv) if x else {}
        if state:
            add_to(acc, module.mode_vec(state, m + n - j, W), -1)
    return acc


def associativity_defect(module: ModeEngine, u, v, r: int, s, w, extra: int = 0) -> dict:
    """Coefficient of x0^(-r-1) x2^(-s-1) in the weak associativity relation applied to w.

    With l in a + Z chosen so that u(p) w = 0 for p >= l (plus ``extra``):
    sum_i C(i-r-1, i) u(l+r-i) v(i+s) w
      = sum_{i,t} C(l, i) ((C(N, t) u)_(i+t+r) v)(l-i-t+s) w.
    """
    voa = module.voa
    U, Vv, W = _vec(u), _vec(v), _vec(w)
    dw = max(module.degree(k) for k in W)
    wu, wv = voa.weight(next(iter(U))), voa.weight(next(iter(Vv)))
    a = voa.coset(next(iter(U))) if module.twisted else QQ(0)
    l = a + math.floor(dw + wu - 1 - a) + 1 + extra
    acc: dict = {}
    i = 0
    while dw + wv - (i + s) - 1 >= 0:
        inner = module.mode_vec(Vv, i + s, W)
        c = binomial(i - r - 1, i)
        if inner and c:
            add_to(acc, module.mode_vec(U, l + r - i, inner), c)
        i += 1
    for t in range(max(wu + wv - r, 0)):
        x = binomial_state(module, U, 0, t)
        if not x:
            continue
        i = 0
        while wu + wv - (i + t + r) - 1 >= 0:
            c = binomial(l, i)
            state = voa.mode_vec(x, i + t + r, Vv)
            if c and state:
                add_to(acc, module.mode_vec(state, l - i - t + s, W), -c)
            i += 1
    return acc


def _vec(x) -> dict:
    return x if isinstance(x, dict) else {x: QQ(1)}


# ---------------------------------------------------------------------------
# logarithmic vertex operators


def log_coefficient(module: ModeEngine, u: Mapping, n, k: int, w: Mapping) -> dict:
    """Y^g_{n,k}(u) w, the coefficient of x^(-n-1) (log x)^k, from Y^g(u,x) = Y_0(x^(-N) u, x)."""
    voa = module.voa
    powers = voa.nilpotent_powers(u)
    if k >= len(powers):
        return {}
    c = QQ((-1) ** k, math.factorial(k))
    return scaled(module.mode_vec(powers[k], n, w), c)


def assemble(module: ModeEngine, u: Mapping, w: Mapping, exponents: Iterable) -> dict:
    """{(n, k): Y^g_{n,k}(u) w} over the given exponents n and all log powers."""
    voa = module.voa
    K = voa.nilpotency_index(u)
    out = {}
    for n in exponents:
        for k in range(K):
            r = log_coefficient(module, u, n, k, w)
            if r:
                out[(n, k)] = r
    return out


def nilpotent_orbit(module: "TwistedFockModule", w: Mapping, count: int) -> list:
    """[w, N_W w, ..., N_W^(count-1) w]."""
    out = [dict(w)]
    while len(out) < count:
        out.append(module.nilpotent_vec(out[-1]) if out[-1] else {})
    return out


def log_coefficients_adjoint(module: "TwistedFockModule", u: Mapping, n, orbit: Sequence) -> list:
    """[Y^g_{n,k}(u) w for k < len(orbit)] read off the module, with orbit = nilpotent_orbit(w).

    Uses Y^g_{n,k}(u) = (-1)^k/k! ad(N_W)^k u(n); independent of
    :func:`log_coefficient`, which applies N on V instead.
    """
    images = [module.mode_vec(u, n, p) if p else {} for p in orbit]
    out = []
    for k in range(len(orbit)):
        acc: dict = {}
        for i in range(k + 1):
            vec = images[k - i]
            for _ in range(i):
                if not vec:
                    break
                vec = module.nilpotent_vec(vec)
            if vec:
                add_to(acc, vec, QQ(math.comb(k, i) * (-1) ** (k - i)))
        out.append(scaled(acc, QQ((-1) ** k, math.factorial(k))))
    return out


def log_coefficient_adjoint(module: "TwistedFockModule", u: Mapping, n, k: int, w: Mapping) -> dict:
    return log_coefficients_adjoint(module, u, n, nilpotent_orbit(module, w, k + 1))[k]


def lemma_suite(
    module: "TwistedFockModule",
    us: Sequence,
    states: Sequence,
    mode_bound: int = 3,
    which: Sequence[str] = ("sigma=xdx", "n=dy", "yg-y0", "monodromy", "L(-1)derivative", "g-compatibility"),
    describe: Callable = repr,
) -> dict:
    """Coefficient-wise checks of the basic properties of Y^g on the given states.

    Exponents n run over the grid (1/T)Z, |n| <= mode_bound, with T the
    conductor of sigma, so that off-coset exponents (where every side must
    vanish) are included.  Log powers run up to the nilpotency index.
    """
    voa = module.voa
    T = voa.conductor
    grid = [QQ(i, T) for i in range(-mode_bound * T, mode_bound * T + 1)]
    tau = Scalar.tau()
    results = {name: SweepResult(name) for name in which}

    def record(name, defect, u, w, **params):
        res = results[name]
        res.checked += 1
        if defect and res.counterexample is None:
            res.counterexample = _cx(describe, u, None, w, defect, **params)

    for u in us:
        U = {u: QQ(1)}
        K = voa.nilpotency_index(U)
        NU = voa.nilpotent(U)
        gU = voa.g(U)
        sU = voa.sigma(U)
        LU = voa.L(-1, U)
        for w in states:
            Wv = {w: QQ(1)}
            orbit = nilpotent_orbit(module, Wv, K + 1)
            gW = module.g_vec(Wv) if "g-compatibility" in results else None
            for n in grid:
                phase = root_of_unity(n)
                adj = log_coefficients_adjoint(module, U, n, orbit)
                if "sigma=xdx" in results:
                    lhs = log_coefficients_adjoint(module, sU, n, orbit)
                    for k in range(K):
                        record("sigma=xdx", sub(lhs[k], scaled(adj[k], phase)), u, w, n=n, k=k)
                if "n=dy" in results:
                    lhs = log_coefficients_adjoint(module, NU, n, orbit) if NU else [{}] * K
                    for k in range(K):
                        record("n=dy", add_to(dict(lhs[k]), adj[k + 1], k + 1), u, w, n=n, k=k)
                if "yg-y0" in results:
                    for k in range(K):
                        record("yg-y0", sub(adj[k], log_coefficient(module, U, n, k, Wv)), u, w, n=n, k=k)
                if "monodromy" in results:
                    lhs = log_coefficients_adjoint(module, gU, n, orbit)
                    for k in range(K):
                        rhs: dict = {}
                        for j in range(K - k):
                            add_to(rhs, adj[k + j], (-tau) ** j * math.comb(k + j, j))
                        record("monodromy", sub(lhs[k], scaled(rhs, phase)), u, w, n=n, k=k)
                if "g-compatibility" in results:
                    for k in range(K):
                        lhs = module.g_vec(log_coefficient(module, U, n, k, Wv))
                        rhs = log_coefficient(module, gU, n, k, gW)
                        record("g-compatibility", sub(lhs, rhs), u, w, n=n, k=k)
                if "L(-1)derivative" in results:
                    lhs = module.mode_vec(LU, n, Wv)
                    add_to(lhs, module.mode_vec(U, n - 1, Wv), n)
                    add_to(lhs, module.mode_vec(NU, n - 1, Wv))
                    record("L(-1)derivative", lhs, u, w, n=n)
    return results


# ---------------------------------------------------------------------------
# tabulated sweeps


class _Tables:
    """Memo of u(p)v(q)w, v(q)u(p)w and ((C(N,t)u)_s v)(r)w for one triple (u, v, w)."""

    def __init__(self, module: ModeEngine, u, v, w):
        self.module, self.u, self.v, self.w = module, u, v, w
        voa = module.voa
        self.wu, self.wv = voa.weight(u), voa.weight(v)
        self.dw = module.degree(w)
        self._uv: dict = {}
        self._vu: dict = {}
        self._it: dict = {}
        self._binom_n: dict = {}

    def binom_n(self, t: int) -> dict:
        """C(N, t) u, or u at t = 0 only on an untwisted module (callers bound t by weight)."""
        r = self._binom_n.get(t)
        if r is None:
            r = self._binom_n[t] = binomial_state(self.module, {self.u: QQ(1)}, 0, t)
        return r

    def uv(self, p, q) -> dict:
        key = (p, q)
        r = self._uv.get(key)
        if r is None:
            inner = self.module.mode(self.v, q, self.w)
            r = self.module.mode_vec({self.u: QQ(1)}, p, inner) if inner else {}
            self._uv[key] = r
        return r

    def vu(self, q, p) -> dict:
        key = (q, p)
        r = self._vu.get(key)
        if r is None:
            inner = self.module.mode(self.u, p, self.w)
            r = self.module.mode_vec({self.v: QQ(1)}, q, inner) if inner else {}
            self._vu[key] = r
        return r

    def iterate(self, t: int, s: int, r) -> dict:
        """((C(N,t) u)_s v)(r) w."""
        key = (t, s, r)
        out = self._it.get(key)
        if out is None:
            voa = self.module.voa
            x = self.binom_n(t)
            state = voa.mode_vec(x, s, {self.v: QQ(1)}) if x else {}
            out = self.module.mode_vec(state, r, {self.w: QQ(1)}) if state else {}
            self._it[key] = out
        return out

    def rhs_iterate(self, m, j: int, s: int, r) -> dict:
        """((C(m+N, j) u)_s v)(r) w via C(m+N, j) = sum_t C(m, j-t) C(N, t)."""
        acc: dict = {}
        for t in range(j + 1):
            c = binomial(m, j - t)
            if c:
                add_to(acc, self.iterate(t, s, r), c)
        return acc


def _jacobi_from_tables(T: _Tables, l: int, m, n) -> dict:
    acc: dict = {}
    k = 0
    while T.dw + T.wv - (k + n) - 1 >= 0:
        c = binomial(l, k)
        if c:
            r = T.uv(l - k + m, k + n)
            if r:
                add_to(acc, r, c if k % 2 == 0 else -c)
        k += 1
    k = 0
    while T.dw + T.wu - (k + m) - 1 >= 0:
        c = binomial(l, k)
        if c:
            r = T.vu(l - k + n, k + m)
            if r:
                add_to(acc, r, -c if (k - l) % 2 == 0 else c)
        k += 1
    j = 0
    while T.wu + T.wv - (l + j) - 1 >= 0:
        r = T.rhs_iterate(m, j, l + j, m + n - j)
        if r:
            add_to(acc, r, -1)
        j += 1
    return acc


def _assoc_from_tables(T: _Tables, r: int, s, l) -> dict:
    acc: dict = {}
    i = 0
    while T.dw + T.wv - (i + s) - 1 >= 0:
        c = binomial(i - r - 1, i)
        if c:
            x = T.uv(l + r - i, i + s)
            if x:
                add_to(acc, x, c)
        i += 1
    for t in range(max(T.wu + T.wv - r, 0)):
        i = 0
        while T.wu + T.wv - (i + t + r) - 1 >= 0:
            c = binomial(l, i)
            if c:
                x = T.iterate(t, i + t + r, l - i - t + s)
                if x:
                    add_to(acc, x, -c)
            i += 1
    return acc


def coset_range(a, bound) -> list:
    """Exponents in a + Z with |value| <= bound."""
    a = QQ(a)
    lo = a + math.ceil(-bound - a)
    out = []
    while lo <= bound:
        out.append(lo)
        lo += 1
    return out


@dataclass
class SweepResult:
    identity: str
    checked: int = 0
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def report(self, parameters: dict) -> dict:
        return {
            "identity": self.identity,
            "parameters": parameters,
            "status": "pass" if self.passed else "fail",
            "checked": self.checked,
            "first_counterexample": self.counterexample,
        }


def identity_sweep(
    module: ModeEngine,
    us: Sequence,
    vs: Sequence,
    states: Sequence,
    l_bound: int = 3,
    mode_bound: int = 3,
    which: Sequence[str] = ("jacobi", "commutator", "associativity"),
    describe: Callable = repr,
) -> dict:
    """Component Jacobi identity, commutator formula and weak associativity over all tuples.

    Returns {identity name: SweepResult}; stops recording at the first failure of each.
    """
    voa = module.voa
    results = {name: SweepResult(name) for name in which}
    for u in us:
        a = voa.coset(u) if module.twisted else QQ(0)
        ms = coset_range(a, mode_bound)
        for v in vs:
            b = voa.coset(v) if module.twisted else QQ(0)
            ns = coset_range(b, mode_bound)
            for w in states:
                T = _Tables(module, u, v, w)
                if "jacobi" in results:
                    res = results["jacobi"]
                    for l in range(-l_bound, l_bound + 1):
                        for m in ms:
                            for n in ns:
                                res.checked += 1
                                if res.counterexample is None:
                                    d = _jacobi_from_tables(T, l, m, n)
                                    if d:
                                        res.counterexample = _cx(describe, u, v, w, d, l=l, m=m, n=n)
                if "commutator" in results:
                    res = results["commutator"]
                    for m in ms:
                        for n in ns:
                            res.checked += 1
                            if res.counterexample is None:
                                d = _jacobi_from_tables(T, 0, m, n)
                                d2 = commutator_defect(module, u, v, m, n, w)
                                if d or d2:
                                    res.counterexample = _cx(describe, u, v, w, d or d2, m=m, n=n)
                if "associativity" in results:
                    res = results["associativity"]
                    base_l = a + math.floor(T.dw + T.wu - 1 - a) + 1
                    for r in range(-l_bound, l_bound + 1):
                        for s in ns:
                            for l in (base_l, base_l + 1):
                                res.checked += 1
                                if res.counterexample is None:
                                    d = _assoc_from_tables(T, r, s, l)
                                    if d:
                                        res.counterexample = _cx(describe, u, v, w, d, r=r, s=s, l=l)
    return results


def _cx(describe, u, v, w, defect, **params) -> dict:
    out = {"u": describe(u)}
    if v is not None:
        out["v"] = describe(v)
    out["w"] = repr(w)
    out.update({k: str(x) for k, x in params.items()})
    out["defect"] = _fmt(defect)
    return out
