"""Independent Wick-theorem evaluation of untwisted Heisenberg vertex operators.

Y(h_{i1}(-n1)...h_{ik}(-nk)1, x) is the normal-ordered product of the
derivatives h_i(x)^{(n-1)}/(n-1)!, so its modes are finite sums of
normal-ordered monomials in the generator modes.  Nothing here uses the
iterate recursion of the library.
"""

import itertools
import math

from twistzhu.scalars import QQ


def _binom(r, k):
    out = QQ(1)
    for i in range(k):
        out = out * (r - i)
    return out / math.factorial(k)


def apply_generator(form, i, p, state):
    """h_i(p) on a dict of sorted (mode, gen) tuples."""
    out = {}
    for lab, c in state.items():
        if p < 0:
            new = tuple(sorted(lab + ((p, i),)))
            out[new] = out.get(new, 0) + c
        elif p > 0:
            for pos, (m, g) in enumerate(lab):
                if m == -p and form[i][g]:
                    new = lab[:pos] + lab[pos + 1 :]
                    out[new] = out.get(new, 0) + c * p * form[i][g]
    return {k: v for k, v in out.items() if v}


def wick_mode(form, u, q, w):
    """u(q) w for a basis monomial u (tuple of (mode, gen)) and a basis monomial w."""
    deg = -sum(m for m, _ in w)
    factors = [(-m, g) for m, g in u]
    total = q + 1 - sum(n for n, _ in factors)
    k = len(factors)
    span = abs(total) + k * (deg + 1) + 2
    out = {}
    for ps in itertools.product(range(-span, deg + 1), repeat=k):
        if sum(ps) != total:
            continue
        coeff = QQ(1)
        for (n, _), p in zip(factors, ps):
            coeff *= _binom(-p - 1, n - 1)
        if not coeff:
            continue
        state = {w: coeff}
        order = sorted(range(k), key=lambda r: ps[r] < 0)
        for r in order:
            state = apply_generator(form, factors[r][1], ps[r], state)
            if not state:
                break
        for lab, c in state.items():
            out[lab] = out.get(lab, 0) + c
    return {key: v for key, v in out.items() if v}
