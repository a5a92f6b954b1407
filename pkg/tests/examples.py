"""Shared example algebras and modules for the tests."""

from functools import lru_cache

from twistzhu.backends import Heisenberg
from twistzhu.scalars import QQ
from twistzhu.twisted import MatrixZeroModes, TwistedFockModule, WeylZeroModes
from twistzhu.vectors import scaled

HYPERBOLIC = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
# N u = 0, N v = -w, N w = u
UNIPOTENT = [{}, {2: -1}, {0: 1}]
JORDAN = [[0, 1], [0, 0]]


def unipotent_voa() -> Heisenberg:
    return Heisenberg(HYPERBOLIC, nilpotent=UNIPOTENT, names="uvw")


def unipotent_module(voa=None, max_degree: int = 1, cls=TwistedFockModule):
    voa = voa or unipotent_voa()
    Z = WeylZeroModes(voa, pairs=[(2, 1)], central={0: JORDAN}, dim=2, max_degree=max_degree)
    return cls(voa, Z)


def mixed_voa() -> Heisenberg:
    form = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    return Heisenberg(form, cosets=[0, 0, 0, QQ(1, 2)], nilpotent=UNIPOTENT + [{}], names="uvwt")


def mixed_module(voa=None, max_degree: int = 1):
    voa = voa or mixed_voa()
    Z = WeylZeroModes(voa, pairs=[(2, 1)], central={0: JORDAN}, dim=2, max_degree=max_degree)
    return TwistedFockModule(voa, Z)


def rank_one_voa() -> Heisenberg:
    return Heisenberg([[1]], names="h")


def rank_one_module(voa=None, matrix=((QQ(1, 2), 1), (0, QQ(1, 2)))):
    voa = voa or rank_one_voa()
    return TwistedFockModule(voa, MatrixZeroModes(voa, 2, {0: [list(r) for r in matrix]}))


def lowest_states(module) -> list:
    return list(module.states_upto(0)[QQ(0)])


@lru_cache(maxsize=None)
def zhu_families(kind: str, cutoff: int):
    from twistzhu.zhu import ZhuFamily

    voa = unipotent_voa() if kind == "d3" else rank_one_voa()
    return voa, ZhuFamily(voa, cutoff, "tilde"), ZhuFamily(voa, cutoff, "plain")


# deliberately broken modules, used to show that the checks can fail


class DroppedSkew(TwistedFockModule):
    """Generator modes without the <N h, h'> term: inconsistent with N."""

    def generator_mode(self, i, q, label):
        q = QQ(q)
        if q <= 0:
            return super().generator_mode(i, q, label)
        mono, base = label
        out = {}
        for p, (m, g) in enumerate(mono):
            if m == -q and self.voa.form[i][g]:
                out[(mono[:p] + mono[p + 1 :], base)] = q * self.voa.form[i][g]
        return out


class FlippedNilpotent(TwistedFockModule):
    def nilpotent_state(self, label):
        return scaled(super().nilpotent_state(label), -1)
