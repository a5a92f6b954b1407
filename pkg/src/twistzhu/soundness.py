"""Exact consistency checks of the backends on V itself.

These exercise the mode engine on the adjoint module: the Virasoro bracket of
the L(n) (computed from the conformal vector through the engine, so for the
Heisenberg algebra this is the Sugawara construction) and the untwisted
commutator formula for composite states.
"""

from __future__ import annotations

from typing import Sequence

from .scalars import QQ
from .twisted import commutator_defect
from .vectors import add_to, sub
from .voa import VertexAlgebra
from .zhu import CheckResult, _fmt_vec

__all__ = ["virasoro_bracket_check", "commutator_check"]


def _L(voa: VertexAlgebra, n: int, v: dict) -> dict:
    return voa.mode_vec(voa.omega, n + 1, v)


def virasoro_bracket_check(voa: VertexAlgebra, max_weight: int, mode_bound: int = 4) -> CheckResult:
    """[L(m), L(n)] = (m - n) L(m + n) + c/12 (m^3 - m) delta_{m+n,0} on every basis vector of weight <= max_weight."""
    res = CheckResult("virasoro-bracket")
    c = voa.central_charge
    modes = range(-mode_bound, mode_bound + 1)
    for v in voa.basis_upto(max_weight):
        V = {v: QQ(1)}
        single = {n: _L(voa, n, V) for n in modes}
        for m in modes:
            for n in modes:
                res.checked += 1
                d = sub(_L(voa, m, single[n]), _L(voa, n, single[m]))
                add_to(d, _L(voa, m + n, V), -(m - n))
                if m + n == 0 and m**3 - m:
                    add_to(d, V, -c * (m**3 - m) / 12)
                if d:
                    res.fail(v=voa.format_label(v), m=m, n=n, defect=_fmt_vec(voa, d))
                    return res
    return res


def commutator_check(
    voa: VertexAlgebra,
    max_weight: int,
    mode_bound: int = 3,
    states: Sequence | None = None,
) -> CheckResult:
    """u(m)v(n) - v(n)u(m) = sum_j C(m,j) (u_j v)(m+n-j) for basis u, v of weight <= max_weight.

    ``states`` defaults to the same basis.
    """
    res = CheckResult("commutator")
    labels = voa.basis_upto(max_weight)
    targets = labels if states is None else states
    modes = range(-mode_bound, mode_bound + 1)
    for u in labels:
        for v in labels:
            for w in targets:
                for m in modes:
                    for n in modes:
                        res.checked += 1
                        d = commutator_defect(voa, u, v, m, n, w)
                        if d:
                            res.fail(
                                u=voa.format_label(u),
                                v=voa.format_label(v),
                                w=voa.format_label(w),
                                m=m,
                                n=n,
                                defect=_fmt_vec(voa, d),
                            )
                            return res
    return res
