"""Sparse vectors as plain dicts ``label -> coefficient`` (zero coefficients never stored)."""

from __future__ import annotations

from typing import Callable, Hashable, Iterable, Mapping

Vector = dict


def add_to(acc: dict, vec: Mapping, c=1) -> dict:
    """acc += c * vec, in place."""
    if c == 1:
        for k, v in vec.items():
            x = acc.get(k)
            s = v if x is None else x + v
            if s:
                acc[k] = s
            elif x is not None:
                del acc[k]
    else:
        for k, v in vec.items():
            p = v * c
            x = acc.get(k)
            s = p if x is None else x + p
            if s:
                acc[k] = s
            elif x is not None:
                del acc[k]
    return acc


def add_term(acc: dict, key: Hashable, c) -> None:
    x = acc.get(key)
    s = c if x is None else x + c
    if s:
        acc[key] = s
    elif x is not None:
        del acc[key]


def scaled(vec: Mapping, c) -> dict:
    out = {}
    for k, v in vec.items():
        p = v * c
        if p:
            out[k] = p
    return out


def combine(pairs: Iterable[tuple]) -> dict:
    """sum of c * vec over (c, vec) pairs."""
    acc: dict = {}
    for c, vec in pairs:
        add_to(acc, vec, c)
    return acc


def sub(a: Mapping, b: Mapping) -> dict:
    return add_to(dict(a), b, -1)


def apply_linear(f: Callable[[Hashable], Mapping], vec: Mapping) -> dict:
    """Extend a map on labels linearly."""
    acc: dict = {}
    for k, c in vec.items():
        add_to(acc, f(k), c)
    return acc
