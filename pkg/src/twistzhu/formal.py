"""Truncated multivariable formal series with rational exponents.

A :class:`LogSeries` is a finite dictionary ``exponents -> coefficient`` over a
tuple of variable names.  Exponents of the first variable may be rational;
the remaining variables are used for logarithm powers or a formal nilpotent
operator and carry integer exponents.  Every variable has an optional
truncation bound: monomials whose exponent reaches the bound are discarded.

Coefficients may be ``mpq``, :class:`~twistzhu.scalars.Scalar` or anything
else that supports ``+`` and ``*`` (e.g. vectors with scalar actions).
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Mapping, Sequence

from .scalars import QQ, Scalar, binomial

__all__ = ["LogSeries", "TruncationError", "solve_u1_coefficients", "u1_coefficients"]


class TruncationError(ArithmeticError):
    """A requested coefficient lies outside the window where a series is known."""


def _is_zero(c) -> bool:
    return not c


class LogSeries:
    __slots__ = ("vars", "terms", "prec")

    def __init__(
        self,
        terms: Mapping | None = None,
        vars: Sequence[str] = ("x",),
        prec: Sequence | None = None,
    ):
        self.vars = tuple(vars)
        self.prec = tuple(prec) if prec is not None else (None,) * len(self.vars)
        if len(self.prec) != len(self.vars):
            raise ValueError("one truncation bound per variable")
        self.terms = {}
        for e, c in (terms or {}).items():
            e = e if isinstance(e, tuple) else (e,)
            if self._keep(e) and not _is_zero(c):
                self.terms[e] = c

    # -- construction
    @classmethod
    def monomial(cls, coeff, exps, vars=("x",), prec=None) -> "LogSeries":
        exps = exps if isinstance(exps, tuple) else (exps,)
        return cls({exps: coeff}, vars, prec)

    @classmethod
    def one(cls, vars=("x",), prec=None) -> "LogSeries":
        return cls.monomial(QQ(1), (0,) * len(vars), vars, prec)

    def _new(self, terms: dict, prec=None) -> "LogSeries":
        out = LogSeries.__new__(LogSeries)
        out.vars = self.vars
        out.prec = self.prec if prec is None else prec
        out.terms = terms
        return out

    def _keep(self, e: tuple) -> bool:
        return all(b is None or x < b for x, b in zip(e, self.prec))

    def _index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise KeyError(f"unknown variable {var!r}") from None

    # -- arithmetic
    def _check(self, other: "LogSeries") -> tuple:
        if other.vars != self.vars:
            raise ValueError(f"variable mismatch {self.vars} vs {other.vars}")
        return tuple(
            a if b is None else b if a is None else min(a, b)
            for a, b in zip(self.prec, other.prec)
        )

    def __add__(self, other):
        if not isinstance(other, LogSeries):
            other = LogSeries.monomial(other, (0,) * len(self.vars), self.vars, self.prec)
        prec = self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            if e in terms:
                s = terms[e] + c
                if _is_zero(s):
                    del terms[e]
                else:
                    terms[e] = s
            else:
                terms[e] = c
        out = self._new(terms, prec)
        return out._truncated()

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LogSeries):
            return self.scale(other)
        self._check(other)
        prec = self._product_prec(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if not all(b is None or x < b for x, b in zip(e, prec)):
                    continue
                p = c1 * c2
                if e in terms:
                    s = terms[e] + p
                    if _is_zero(s):
                        del terms[e]
                    else:
                        terms[e] = s
                elif not _is_zero(p):
                    terms[e] = p
        return self._new(terms, prec)

    def __rmul__(self, other):
        return self.scale(other)

    def _floor(self, i: int):
        """Lower bound for the exponents of variable i (the valuation, or the window if empty)."""
        if self.terms:
            return min(e[i] for e in self.terms)
        return self.prec[i]

    def _product_prec(self, other: "LogSeries") -> tuple:
        # a product is known below p1 + v2 and below p2 + v1; an exact zero imposes no bound
        out = []
        for i, (p1, p2) in enumerate(zip(self.prec, other.prec)):
            bounds = []
            v1, v2 = self._floor(i), other._floor(i)
            if p1 is not None and v2 is not None:
                bounds.append(p1 + v2)
            if p2 is not None and v1 is not None:
                bounds.append(p2 + v1)
            out.append(min(bounds) if bounds else None)
        return tuple(out)

    def scale(self, c) -> "LogSeries":
        terms = {}
        for e, v in self.terms.items():
            p = v * c
            if not _is_zero(p):
                terms[e] = p
        return self._new(terms)

    def _truncated(self) -> "LogSeries":
        self.terms = {e: c for e, c in self.terms.items() if self._keep(e)}
        return self

    def truncate(self, **bounds) -> "LogSeries":
        prec = list(self.prec)
        for var, b in bounds.items():
            i = self._index(var)
            prec[i] = b if prec[i] is None else min(prec[i], b)
        out = self._new(dict(self.terms), tuple(prec))
        return out._truncated()

    def __pow__(self, k: int) -> "LogSeries":
        if k < 0:
            return self.inverse() ** (-k)
        out = LogSeries.one(self.vars, self.prec)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if not isinstance(other, LogSeries):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        items = sorted(self.terms.items(), key=lambda t: t[0])
        body = " + ".join(
            f"({c})*" + "*".join(f"{v}^{e}" for v, e in zip(self.vars, es)) for es, c in items
        )
        return f"LogSeries[{','.join(self.vars)}]({body or '0'})"

    # -- calculus
    def derivative(self, var: str | None = None) -> "LogSeries":
        i = 0 if var is None else self._index(var)
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1 :]
                terms[ne] = c * e[i]
        return self._new(terms)

    def coefficient(self, exps) -> object:
        exps = exps if isinstance(exps, tuple) else (exps,)
        return self.terms.get(exps, QQ(0))

    def residue(self, var: str | None = None):
        """Coefficient of var^-1; a coefficient for univariate series, else a series in the rest."""
        i = 0 if var is None else self._index(var)
        if self.prec[i] is not None and self.prec[i] <= -1:
            raise TruncationError(f"residue in {self.vars[i]} needs the window to reach exponent -1")
        if len(self.vars) == 1:
            return self.terms.get((-1,), QQ(0))
        rest = self.vars[:i] + self.vars[i + 1 :]
        prec = self.prec[:i] + self.prec[i + 1 :]
        terms = {}
        for e, c in self.terms.items():
            if e[i] == -1:
                terms[e[:i] + e[i + 1 :]] = c
        return LogSeries(terms, rest, prec)

    def valuation(self, var: str | None = None):
        i = 0 if var is None else self._index(var)
        if not self.terms:
            return None
        return min(e[i] for e in self.terms)

    def map_coefficients(self, f: Callable) -> "LogSeries":
        terms = {}
        for e, c in self.terms.items():
            v = f(c)
            if not _is_zero(v):
                terms[e] = v
        return self._new(terms)

    def shift(self, var: str, k) -> "LogSeries":
        """Multiply by var^k; the truncation window moves along."""
        i = self._index(var)
        terms = {e[:i] + (e[i] + k,) + e[i + 1 :]: c for e, c in self.terms.items()}
        prec = list(self.prec)
        if prec[i] is not None:
            prec[i] = prec[i] + k
        return self._new(terms, tuple(prec))

    def inverse(self) -> "LogSeries":
        """Inverse of x^v * (c + higher terms) with c invertible; all other variables must be truncated."""
        if not self.terms:
            raise ZeroDivisionError("inverse of zero series")
        v = self.valuation()
        lead_terms = {e: c for e, c in self.terms.items() if e[0] == v and all(x == 0 for x in e[1:])}
        if len(lead_terms) != 1:
            raise ValueError("leading coefficient is not a unit")
        c0 = next(iter(lead_terms.values()))
        inv_c0 = 1 / c0
        unit = self.shift(self.vars[0], -v).scale(inv_c0)
        rest = unit - LogSeries.one(self.vars, unit.prec)
        bound = _nilpotency_bound(rest)
        out = LogSeries.one(self.vars, unit.prec)
        power = LogSeries.one(self.vars, unit.prec)
        for _ in range(bound):
            power = power * (-rest)
            if not power:
                break
            out = out + power
        return out.scale(inv_c0).shift(self.vars[0], -v)

    def exp(self) -> "LogSeries":
        """exp of a series with no constant term (needs truncation or nilpotency)."""
        if any(all(x == 0 for x in e) for e in self.terms):
            raise ValueError("exp needs a series without constant term")
        bound = _nilpotency_bound(self)
        out = LogSeries.one(self.vars, self.prec)
        power = LogSeries.one(self.vars, self.prec)
        for k in range(1, bound + 1):
            power = (power * self).scale(QQ(1, k))
            if not power:
                break
            out = out + power
        return out

    # -- standard series
    @classmethod
    def exponential(cls, coeff, var: str = "x", order: int = 8, vars=None, prec=None) -> "LogSeries":
        """exp(coeff * var) with terms of degree < order."""
        vars = vars or (var,)
        i = vars.index(var)
        prec = list(prec or (None,) * len(vars))
        prec[i] = order if prec[i] is None else min(prec[i], order)
        terms = {}
        c = QQ(1)
        for k in range(order):
            e = tuple(k if j == i else 0 for j in range(len(vars)))
            terms[e] = c
            c = c * coeff / (k + 1)
        return cls(terms, vars, prec)

    @classmethod
    def log1p(cls, var: str = "y", order: int = 8, vars=None, prec=None) -> "LogSeries":
        """log(1 + var) with terms of degree < order."""
        vars = vars or (var,)
        i = vars.index(var)
        prec = list(prec or (None,) * len(vars))
        prec[i] = order if prec[i] is None else min(prec[i], order)
        terms = {}
        for k in range(1, order):
            e = tuple(k if j == i else 0 for j in range(len(vars)))
            terms[e] = QQ((-1) ** (k + 1), k)
        return cls(terms, vars, prec)

    @classmethod
    def binomial_series(cls, alpha, var: str = "y", order: int = 8, vars=None, prec=None) -> "LogSeries":
        """(1 + var)^alpha for scalar alpha, terms of degree < order."""
        vars = vars or (var,)
        i = vars.index(var)
        prec = list(prec or (None,) * len(vars))
        prec[i] = order if prec[i] is None else min(prec[i], order)
        terms = {}
        for k in range(order):
            e = tuple(k if j == i else 0 for j in range(len(vars)))
            terms[e] = binomial(alpha, k)
        return cls(terms, vars, prec)

    @classmethod
    def expand_binomial(
        cls, alpha, var: str = "y", order: int = 8, nilpotent: str = "N", nil_order: int = 4
    ) -> "LogSeries":
        """(1 + var)^(alpha + N) with N a formal variable, N^nil_order = 0.

        Equals (1 + var)^alpha * sum_k N^k log(1 + var)^k / k!.
        """
        vars = (var, nilpotent)
        prec = (order, nil_order)
        base = cls.binomial_series(alpha, var, order, vars, prec)
        logs = cls.log1p(var, order, vars, prec) * cls.monomial(QQ(1), (0, 1), vars, prec)
        return base * logs.exp() if nil_order > 1 else base

    @classmethod
    def compose_log(cls, m: int, order: int, var: str = "y", tau=None) -> "LogSeries":
        """(tau^-1 log(1 + var))^m for integer m, keeping exponents < order."""
        tau = Scalar.tau() if tau is None else tau
        # log(1+y)/y is a unit series; need order - m terms of it
        width = max(order - m, 1)
        ratio = cls(
            {(k,): QQ((-1) ** k, k + 1) for k in range(width)}, (var,), (width,)
        )
        body = ratio ** m
        return LogSeries(
            {(e[0] + m,): c * tau ** (-m) for e, c in body.terms.items()}, (var,), (order,)
        )


def _nilpotency_bound(s: LogSeries) -> int:
    """Number of multiplications after which powers of s vanish under truncation."""
    if not s.terms:
        return 0
    bounds = []
    for i, b in enumerate(s.prec):
        low = min(e[i] for e in s.terms)
        if b is not None and low > 0:
            bounds.append(math.ceil(b / low))
        elif b is not None and low == 0:
            continue
        else:
            continue
    if not bounds:
        raise ValueError("series is not topologically nilpotent under its truncation")
    # every term has a positive exponent in some truncated variable of positive valuation
    return sum(bounds) + 1


def solve_u1_coefficients(order: int, tau=None) -> list:
    """A_1, ..., A_order defined by tau^-1 (e^{tau y} - 1) = exp(-sum_j A_j y^{j+1} d/dy) y.

    Solved order by order: with A_1..A_{j-1} fixed and A_j = 0, the y^{j+1}
    coefficient of the flow differs from the target by exactly A_j.
    """
    tau = Scalar.tau() if tau is None else tau
    A: list = []
    for j in range(1, order + 1):
        flow = _flow_of_y(A + [Scalar(0)], j + 2)
        got = flow.coefficient((j + 1,))
        target = tau ** j / math.factorial(j + 1)
        A.append(Scalar(got) - target)
    return A


def _flow_of_y(A: Sequence, prec: int) -> LogSeries:
    vars, p = ("y",), (prec,)
    field = LogSeries({(j + 2,): -a for j, a in enumerate(A)}, vars, p)
    y = LogSeries.monomial(Scalar(1), (1,), vars, p)
    out, term = y, y
    for k in range(1, prec):
        term = (field * term.derivative()).scale(QQ(1, k))
        if not term:
            break
        out = out + term
    return out


_U1_CACHE: list = []


def u1_coefficients(order: int) -> list:
    """Cached A_1..A_order (Scalars in tau)."""
    if len(_U1_CACHE) < order:
        _U1_CACHE[:] = solve_u1_coefficients(order)
    return _U1_CACHE[:order]
