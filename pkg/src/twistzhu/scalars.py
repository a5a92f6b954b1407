"""Exact scalars: the field Q(zeta_N)(tau) with tau a transcendental standing for 2*pi*i.

Elements of the cyclotomic field are stored in the power basis of Q[z]/Phi_N.
A :class:`Scalar` is a rational function in ``tau`` kept in canonical form
``tau^val * num(tau) / den(tau)`` with ``num(0) != 0``, ``den(0) != 0``,
``den`` monic and ``gcd(num, den) = 1``.  Monomials ``c * tau^k`` take a
fast path since they are by far the most common values.
"""

from __future__ import annotations

import ast
import math
from functools import lru_cache
from typing import Iterable, Sequence

from gmpy2 import mpq

QQ = mpq

__all__ = [
    "QQ",
    "Cyclotomic",
    "Scalar",
    "ParseError",
    "binomial",
    "conductor",
    "root_of_unity",
    "parse_scalar",
    "as_rational",
]


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# cyclotomic field Q(zeta_n), elements are tuples of mpq of length phi(n)


@lru_cache(maxsize=None)
def _cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("conductor must be positive")
    num = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            num = _int_exact_div(num, list(_cyclotomic_poly(d)))
    return tuple(num)


def _int_exact_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        q[i] = c
        for j, bj in enumerate(b):
            a[i + j] -= c * bj
    return q


def _degree(n: int) -> int:
    return len(_cyclotomic_poly(n)) - 1


def _freduce(n: int, coeffs: Sequence) -> tuple:
    phi = _cyclotomic_poly(n)
    d = len(phi) - 1
    c = list(coeffs)
    for i in range(len(c) - 1, d - 1, -1):
        t = c[i]
        if t:
            for j in range(d):
                if phi[j]:
                    c[i - d + j] -= t * phi[j]
        c[i] = 0
    c = c[:d] + [mpq(0)] * (d - len(c))
    return tuple(mpq(x) for x in c)


def _fmul(n: int, a: tuple, b: tuple) -> tuple:
    if len(a) == 1:
        return (a[0] * b[0],)
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _freduce(n, out)


def _fadd(a: tuple, b: tuple) -> tuple:
    if len(a) == 1:
        return (a[0] + b[0],)
    return tuple(x + y for x, y in zip(a, b))


def _fsub(a: tuple, b: tuple) -> tuple:
    if len(a) == 1:
        return (a[0] - b[0],)
    return tuple(x - y for x, y in zip(a, b))


def _fneg(a: tuple) -> tuple:
    return tuple(-x for x in a)


def _fzero(a: tuple) -> bool:
    return not any(a)


def _fone(n: int) -> tuple:
    return (mpq(1),) + (mpq(0),) * (_degree(n) - 1)


def _fconst(n: int, q) -> tuple:
    return (mpq(q),) + (mpq(0),) * (_degree(n) - 1)


def _qpoly_trim(p: list) -> list:
    while p and not p[-1]:
        p.pop()
    return p


def _qpoly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [mpq(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    return q, _qpoly_trim(a[: len(b) - 1])


def _finv(n: int, a: tuple) -> tuple:
    if len(a) == 1:
        if not a[0]:
            raise ZeroDivisionError("inverse of zero")
        return (1 / a[0],)
    # extended Euclid in Q[z] against Phi_n
    r0 = [mpq(x) for x in _cyclotomic_poly(n)]
    r1 = _qpoly_trim(list(a))
    if not r1:
        raise ZeroDivisionError("inverse of zero")
    s0, s1 = [], [mpq(1)]
    while len(r1) > 1:
        q, r = _qpoly_divmod(r0, r1)
        prod = _qpoly_mul(q, s1)
        s2 = _qpoly_trim([
            (s0[i] if i < len(s0) else 0) - (prod[i] if i < len(prod) else 0)
            for i in range(max(len(s0), len(prod)))
        ])
        r0, r1, s0, s1 = r1, r, s1, s2
    c = r1[0]
    return _freduce(n, [x / c for x in s1])


def _qpoly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def _zeta_power(n: int, k: int) -> tuple:
    k %= n
    return _freduce(n, [0] * k + [1])


def _flift(n: int, m: int, a: tuple) -> tuple:
    """Embed an element of Q(zeta_n) into Q(zeta_m), n | m."""
    if n == m:
        return a
    step = m // n
    out = [mpq(0)] * (_degree(m))
    for k, c in enumerate(a):
        if c:
            zk = _zeta_power(m, k * step)
            for i, z in enumerate(zk):
                out[i] += c * z
    return tuple(out)


def _mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def _totient(n: int) -> int:
    return _degree(n)


def _normalized_trace(n: int, a: tuple) -> mpq:
    # Tr(zeta^k)/phi(n) = mu(n/g)/phi(n/g) with g = gcd(n, k); invariant under lifting
    total = mpq(0)
    for k, c in enumerate(a):
        if c:
            m = n // math.gcd(n, k)
            total += c * mpq(_mobius(m), _totient(m))
    return total


def _fstr(n: int, a: tuple) -> str:
    if len(a) == 1 or not any(a[1:]):
        return str(a[0])
    out = ""
    for k, c in enumerate(a):
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        if k == 0:
            term = str(mag)
        else:
            z = f"zeta({n})" if k == 1 else f"zeta({n})^{k}"
            term = z if mag == 1 else f"{mag}*{z}"
        if not out:
            out = term if sign == "+" else "-" + term
        else:
            out += f" {sign} {term}"
    return out


class Cyclotomic:
    """Element of Q(zeta_n) in the power basis 1, z, ..., z^(phi(n)-1)."""

    __slots__ = ("n", "c")

    def __init__(self, n: int, coeffs: Iterable):
        self.n = n
        self.c = _freduce(n, list(coeffs))

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "Cyclotomic":
        out = cls.__new__(cls)
        out.n, out.c = n, _zeta_power(n, k)
        return out

    def _pair(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic(1, [other])
        m = math.lcm(self.n, other.n)
        return m, _flift(self.n, m, self.c), _flift(other.n, m, other.c)

    def _make(self, n, c):
        out = Cyclotomic.__new__(Cyclotomic)
        out.n, out.c = n, c
        return out

    def __add__(self, other):
        m, a, b = self._pair(other)
        return self._make(m, _fadd(a, b))

    __radd__ = __add__

    def __sub__(self, other):
        m, a, b = self._pair(other)
        return self._make(m, _fsub(a, b))

    def __rsub__(self, other):
        return -self + other

    def __neg__(self):
        return self._make(self.n, _fneg(self.c))

    def __mul__(self, other):
        m, a, b = self._pair(other)
        return self._make(m, _fmul(m, a, b))

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        return self._make(self.n, _finv(self.n, self.c))

    def __truediv__(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic(1, [other])
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self._make(self.n, _fone(self.n))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, (Cyclotomic, int, type(mpq(0)))):
            return NotImplemented
        _, a, b = self._pair(other)
        return a == b

    def __hash__(self):
        return hash(_normalized_trace(self.n, self.c))

    def __bool__(self):
        return not _fzero(self.c)

    def __repr__(self):
        return f"Cyclotomic({_fstr(self.n, self.c)})"

    __str__ = lambda self: _fstr(self.n, self.c)


# ---------------------------------------------------------------------------
# polynomials in tau over Q(zeta_n): lists of field tuples, lowest degree first


def _ptrim(p: list) -> list:
    while p and _fzero(p[-1]):
        p.pop()
    return p


def _padd(a: Sequence, b: Sequence) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] = _fadd(out[i], y)
    return _ptrim(out)


def _pmul(n: int, a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    z = _fconst(n, 0)
    out = [z] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if _fzero(x):
            continue
        for j, y in enumerate(b):
            if not _fzero(y):
                out[i + j] = _fadd(out[i + j], _fmul(n, x, y))
    return _ptrim(out)


def _pscale(n: int, a: Sequence, c: tuple) -> list:
    return _ptrim([_fmul(n, x, c) for x in a])


def _pshift(a: Sequence, k: int) -> list:
    if not a:
        return []
    z = tuple(mpq(0) for _ in a[0])
    return [z] * k + list(a)


def _pdivmod(n: int, a: Sequence, b: Sequence) -> tuple[list, list]:
    a = list(a)
    inv = _finv(n, b[-1])
    z = _fconst(n, 0)
    q = [z] * max(len(a) - len(b) + 1, 0)
    for i in range(len(a) - len(b), -1, -1):
        c = _fmul(n, a[i + len(b) - 1], inv)
        q[i] = c
        if not _fzero(c):
            for j, bj in enumerate(b):
                a[i + j] = _fsub(a[i + j], _fmul(n, c, bj))
    return _ptrim(q), _ptrim(a[: len(b) - 1])


def _pgcd(n: int, a: Sequence, b: Sequence) -> list:
    a, b = list(a), list(b)
    while b:
        _, r = _pdivmod(n, a, b)
        a, b = b, r
    return _pscale(n, a, _finv(n, a[-1]))


def _strip_tau(p: list) -> tuple[int, list]:
    k = 0
    while k < len(p) and _fzero(p[k]):
        k += 1
    return k, p[k:]


class Scalar:
    """Element of Q(zeta_n)(tau)."""

    __slots__ = ("n", "val", "num", "den")

    def __init__(self, value=0, n: int = 1):
        if isinstance(value, Scalar):
            self.n, self.val, self.num, self.den = value.n, value.val, value.num, value.den
            return
        if isinstance(value, Cyclotomic):
            n = math.lcm(n, value.n)
            c = _flift(value.n, n, value.c)
        else:
            c = _fconst(n, mpq(value))
        self.n, self.val, self.den = n, 0, (_fone(n),)
        self.num = () if _fzero(c) else (c,)

    # -- construction helpers
    @classmethod
    def _raw(cls, n, val, num, den) -> "Scalar":
        out = cls.__new__(cls)
        out.n, out.val, out.num, out.den = n, val, num, den
        return out

    @classmethod
    def _build(cls, n: int, val: int, num: list, den: list) -> "Scalar":
        """Canonicalise tau^val * num/den."""
        num = _ptrim(list(num))
        if not num:
            return cls._raw(n, 0, (), (_fone(n),))
        k, num = _strip_tau(num)
        j, den = _strip_tau(_ptrim(list(den)))
        val += k - j
        if len(den) > 1 and len(num) > 1:
            g = _pgcd(n, num, den)
            if len(g) > 1:
                num, _ = _pdivmod(n, num, g)
                den, _ = _pdivmod(n, den, g)
        lead = den[-1]
        if lead != _fone(n):
            inv = _finv(n, lead)
            num = _pscale(n, num, inv)
            den = _pscale(n, den, inv)
        return cls._raw(n, val, tuple(num), tuple(den))

    @classmethod
    def tau(cls, power: int = 1, n: int = 1) -> "Scalar":
        return cls._raw(n, power, (_fone(n),), (_fone(n),))

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "Scalar":
        return cls._raw(n, 0, (_zeta_power(n, k),), (_fone(n),))

    @classmethod
    def monomial(cls, coeff, power: int, n: int = 1) -> "Scalar":
        c = _fconst(n, mpq(coeff))
        if _fzero(c):
            return cls._raw(n, 0, (), (_fone(n),))
        return cls._raw(n, power, (c,), (_fone(n),))

    # -- inspection
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_monomial(self) -> bool:
        return len(self.num) == 1 and len(self.den) == 1

    def monomial_parts(self) -> tuple[int, Cyclotomic] | None:
        """Return (k, c) when self = c * tau^k, else None."""
        if not self.num:
            return None
        if self.is_monomial():
            return self.val, Cyclotomic(self.n, self.num[0])
        return None

    def tau_free(self) -> bool:
        return not self.num or (self.is_monomial() and self.val == 0)

    def is_rational(self) -> bool:
        if not self.num:
            return True
        return self.is_monomial() and self.val == 0 and not any(self.num[0][1:])

    def to_rational(self) -> mpq:
        if not self.num:
            return mpq(0)
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.num[0][0]

    def lift(self, m: int) -> "Scalar":
        if m == self.n:
            return self
        if m % self.n:
            raise ValueError("conductor must divide the target")
        f = lambda p: tuple(_flift(self.n, m, x) for x in p)
        return Scalar._raw(m, self.val, f(self.num), f(self.den))

    # -- arithmetic
    def _coerce(self, other) -> tuple["Scalar", "Scalar"] | None:
        if isinstance(other, Scalar):
            if other.n == self.n:
                return self, other
            m = math.lcm(self.n, other.n)
            return self.lift(m), other.lift(m)
        if isinstance(other, (int, type(mpq(0)))):
            return self, Scalar(other, self.n)
        if isinstance(other, Cyclotomic):
            o = Scalar(other)
            return self._coerce(o)
        try:
            return self, Scalar(mpq(other), self.n)
        except (TypeError, ValueError):
            return None

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        if not x.num:
            return y
        if not y.num:
            return x
        n = x.n
        if len(x.num) == 1 and len(y.num) == 1 and len(x.den) == 1 and len(y.den) == 1 and x.val == y.val:
            c = _fadd(x.num[0], y.num[0])
            if _fzero(c):
                return Scalar._raw(n, 0, (), (_fone(n),))
            return Scalar._raw(n, x.val, (c,), x.den)
        if x.val > y.val:
            x, y = y, x
        d = y.val - x.val
        if x.den == y.den:
            num = _padd(list(x.num), _pshift(list(y.num), d))
            den = list(x.den)
        else:
            num = _padd(_pmul(n, x.num, y.den), _pshift(_pmul(n, y.num, x.den), d))
            den = _pmul(n, x.den, y.den)
        return Scalar._build(n, x.val, num, den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(self.n, self.val, tuple(_fneg(c) for c in self.num), self.den)

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return pair[0] + (-pair[1])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        n = x.n
        if not x.num or not y.num:
            return Scalar._raw(n, 0, (), (_fone(n),))
        if len(x.num) == 1 and len(y.num) == 1 and len(x.den) == 1 and len(y.den) == 1:
            return Scalar._raw(n, x.val + y.val, (_fmul(n, x.num[0], y.num[0]),), x.den)
        return Scalar._build(n, x.val + y.val, _pmul(n, x.num, y.num), _pmul(n, x.den, y.den))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self.num:
            raise ZeroDivisionError("division by zero scalar")
        n = self.n
        if len(self.num) == 1 and len(self.den) == 1:
            return Scalar._raw(n, -self.val, (_finv(n, self.num[0]),), self.den)
        return Scalar._build(n, -self.val, list(self.den), list(self.num))

    def __truediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return pair[0] * pair[1].inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = Scalar(1, self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return x.val == y.val and x.num == y.num and x.den == y.den if x.num else not y.num

    def __hash__(self):
        if self.is_rational():
            return hash(self.to_rational())
        key = lambda p: tuple(_normalized_trace(self.n, c) for c in p)
        return hash((self.val, key(self.num), key(self.den)))

    # -- evaluation
    def substitute(self, tau_value) -> "Scalar":
        """Evaluate at tau = tau_value (a Scalar or rational)."""
        t = Scalar(tau_value) if not isinstance(tau_value, Scalar) else tau_value

        def ev(p):
            acc = Scalar(0, self.n)
            for c in reversed(p):
                acc = acc * t + Scalar(Cyclotomic(self.n, c))
            return acc

        return ev(self.num) * t ** self.val / ev(self.den)

    # -- text
    def __str__(self):
        if not self.num:
            return "0"
        num = _poly_str(self.n, self.num, self.val)
        if len(self.den) == 1:
            return num
        return f"({num})/({_poly_str(self.n, self.den, 0)})"

    def __repr__(self):
        return f"Scalar('{self}')"


def _poly_str(n: int, p: Sequence, shift: int) -> str:
    parts = []
    for i, c in enumerate(p):
        if _fzero(c):
            continue
        k = i + shift
        cs = _fstr(n, c)
        compound = " + " in cs or " - " in cs
        if k == 0:
            parts.append(f"({cs})" if compound and len(p) > 1 else cs)
            continue
        t = "tau" if k == 1 else f"tau^{k}"
        if cs == "1":
            parts.append(t)
        elif cs == "-1":
            parts.append("-" + t)
        elif compound:
            parts.append(f"({cs})*{t}")
        else:
            parts.append(f"{cs}*{t}")
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# parsing


def parse_scalar(text: str) -> Scalar:
    """Parse expressions built from integers, ``p/q``, ``tau`` and ``zeta(N)^k``.

    >>> str(parse_scalar("zeta(4)^2"))
    '-1'
    """
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}")
    src = text.strip().replace("^", "**")
    if not src:
        raise ParseError("empty scalar expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse scalar {text!r}: {exc.msg}") from None
    return _eval_node(tree.body, text)


def _eval_node(node, text: str):
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return Scalar(node.value)
    if isinstance(node, ast.Name) and node.id == "tau":
        return Scalar.tau()
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "zeta":
        if len(node.args) != 1 or node.keywords:
            raise ParseError(f"zeta takes one integer argument in {text!r}")
        order = _eval_int(node.args[0], text)
        if order < 1:
            raise ParseError(f"zeta order must be positive in {text!r}")
        return Scalar.zeta(order)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand, text)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            return _eval_node(node.left, text) ** _eval_int(node.right, text)
        left, right = _eval_node(node.left, text), _eval_node(node.right, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if right.is_zero():
                raise ParseError(f"division by zero in {text!r}")
            return left / right
    raise ParseError(f"unsupported token in scalar expression {text!r}")


def _eval_int(node, text: str) -> int:
    v = _eval_node(node, text)
    if not v.is_rational() or v.to_rational().denominator != 1:
        raise ParseError(f"expected an integer exponent in {text!r}")
    return int(v.to_rational())


# ---------------------------------------------------------------------------
# small helpers


def as_rational(x) -> mpq:
    if isinstance(x, Scalar):
        return x.to_rational()
    return mpq(x)


def binomial(r, k: int):
    """Generalised binomial coefficient r(r-1)...(r-k+1)/k! for rational (or Scalar) r."""
    if isinstance(r, Scalar):
        return _binomial(r, k)
    return _binomial_cached(mpq(r), k)


@lru_cache(maxsize=1 << 16)
def _binomial_cached(r: mpq, k: int) -> mpq:
    return _binomial(r, k)


def _binomial(r, k: int):
    if k < 0:
        return mpq(0)
    out = mpq(1)
    for i in range(k):
        out = out * (r - i)
    return out / math.factorial(k)


def conductor(weights: Iterable) -> int:
    """Least common multiple of the denominators of the given rationals."""
    n = 1
    for w in weights:
        n = math.lcm(n, int(mpq(w).denominator))
    return n


def root_of_unity(q) -> Scalar:
    """exp(2*pi*i*q) for rational q, an element of Q(zeta_N) with N the denominator of q."""
    q = mpq(q)
    n = int(q.denominator)
    return Scalar.zeta(n, int(q.numerator) % n)
