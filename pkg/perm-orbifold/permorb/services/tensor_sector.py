"""
Tensor Sector Service
Twisted-sector bookkeeping for V^k: stable label sets, twisted conformal weights and
S-matrix entries of V^k between a g^r-twisted and a g^s-twisted module
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from loguru import logger
from mpmath import mp, mpc

from ..errors import InputError
from .modular_data import ModularData
from .permutation import DEFAULT_BUDGET, LabelTuple, check_budget, cycle_constants, minimal_period
from .scalars import Phase, phase_to_complex
from .sl2z import ModularRepresentation, build_A


@dataclass(frozen=True, order=True)
class TwistedLabel:
    """T_{g^s}^{M1..Md}; sector 0 carries the untwisted k-tuple W^{i1..ik}."""

    sector: int
    tuple: LabelTuple


def twisted_weight(md: ModularData, lbl: TwistedLabel, k: int) -> Fraction:
    if lbl.sector % k == 0:
        return sum((md.weights[i] for i in lbl.tuple), Fraction(0))
    d = gcd(lbl.sector, k)
    l = k // d
    total = sum((md.weights[i] for i in lbl.tuple), Fraction(0))
    return total / l + Fraction(d * (l * l - 1), 24 * l) * md.central_charge


def stable_set(s: int, r: int, k: int, rank: int, budget: int = DEFAULT_BUDGET) -> List[TwistedLabel]:
    """U(g^s, g^r): sector-s labels whose d-tuple is the (d/f)-fold repetition of an f-tuple."""
    return list(_stable_labels(s % k, r % k, k, rank, budget))


@lru_cache(maxsize=1024)
def _stable_labels(s: int, r: int, k: int, rank: int, budget: int) -> Tuple[TwistedLabel, ...]:
    cc = cycle_constants(s, r, k)
    check_budget(rank, cc.f, budget)
    return tuple(TwistedLabel(s, block * cc.b) for block in product(range(rank), repeat=cc.f))


@lru_cache(maxsize=1024)
def stable_lookup(s: int, r: int, k: int, rank: int, budget: int = DEFAULT_BUDGET) -> FrozenSet[TwistedLabel]:
    return frozenset(_stable_labels(s % k, r % k, k, rank, budget))


def _periodic_prefix(t: Sequence[int], period: int, what: str) -> LabelTuple:
    t = tuple(t)
    if len(t) % period or t != t[:period] * (len(t) // period):
        raise InputError(f"{what} {t} is not {period}-periodic")
    return t[:period]


class TensorSector:
    """S-matrix entries of V^k between twisted sectors, for one ModularData and one k.

    The kernel rho(S) rho(A^{r,s}) is computed once per (r, s) and reused for every label pair.
    """

    def __init__(self, md: ModularData, k: int):
        self.md = md
        self.k = k
        self.setup_kernels()

    def setup_kernels(self):
        self.rho = ModularRepresentation(self.md)
        self._kernels: Dict[Tuple[int, int, Optional[Tuple[int, int, int, int]]], object] = {}
        self._phases: Dict[Phase, mpc] = {}

    def phase(self, phi: Phase) -> mpc:
        if phi not in self._phases:
            self._phases[phi] = phase_to_complex(phi)
        return self._phases[phi]

    def kernel(self, r: int, s: int, witnesses: Optional[Tuple[int, int, int, int]] = None):
        key = (r, s, witnesses)
        if key not in self._kernels:
            a_matrix = build_A(r, s, self.k, witnesses)
            self._kernels[key] = self.rho.s * self.rho.evaluate(a_matrix)
            logger.debug(f"kernel rho(S)rho(A) for r={r}, s={s}, k={self.k}: A={a_matrix.rows()}")
        return self._kernels[key]

    def untwisted_twisted(self, s: int, untw: Sequence[int], tw: Sequence[int]) -> mpc:
        """Untwisted W^{i1..ik} (g^s-stable) against T_{g^s}^{j1..jd}: prod_t S_{i_t j_t}."""
        d = gcd(s, self.k)
        untw = tuple(untw)
        if len(untw) == self.k:
            if d % minimal_period(untw):
                raise InputError(f"Untwisted tuple {untw} is not g^{s}-stable for k={self.k}")
            untw = untw[:d]
        if len(untw) != d or len(tw) != d:
            raise InputError(f"Expected length-{d} tuples for sector {s}", detail=f"{untw}, {tuple(tw)}")
        value = mpc(1)
        for i, j in zip(untw, tw):
            value *= self.md.s(i, j)
        return value

    def twisted_twisted(self, r: int, s: int, i_tuple: Sequence[int], j_tuple: Sequence[int],
                        witnesses: Optional[Tuple[int, int, int, int]] = None) -> mpc:
        """Entry between an element of U(g^r, g^s) and one of U(g^s, g^-r), given by their f-blocks."""
        if r % self.k == 0:
            return self.untwisted_twisted(s, tuple(i_tuple) * (self.k // len(i_tuple)), j_tuple)
        cc = cycle_constants(s, r, self.k)
        if len(i_tuple) != cc.f or len(j_tuple) != cc.f:
            raise InputError(f"Expected length-{cc.f} blocks for r={r}, s={s}, k={self.k}")
        x, p = (cc.x, cc.p) if witnesses is None else (witnesses[0], witnesses[2])

        shift = cc.f * self.md.central_charge / 24
        lam_i = sum((self.md.weights[i] for i in i_tuple), Fraction(0)) - shift
        lam_j = sum((self.md.weights[j] for j in j_tuple), Fraction(0)) - shift
        phase = Phase(-p * s * lam_i / (cc.f * cc.l1) - x * r * lam_j / (cc.f * cc.l))

        kernel = self.kernel(r, s, witnesses)
        value = self.phase(phase)
        for i, j in zip(i_tuple, j_tuple):
            value *= kernel[i, j]
        return value

    def sector_entry(self, source: TwistedLabel, target: TwistedLabel) -> mpc:
        """S_{M,N} of V^k for M in U(g^a, g^b) (sector a) and N in U(g^b, g^-a) (sector b)."""
        alpha, beta = source.sector % self.k, target.sector % self.k
        f = cycle_constants(beta, alpha, self.k).f
        i_block = _periodic_prefix(source.tuple, f, "Source tuple")
        j_block = _periodic_prefix(target.tuple, f, "Target tuple")
        if alpha == 0:
            return self.untwisted_twisted(beta, source.tuple, target.tuple)
        return self.twisted_twisted(alpha, beta, i_block, j_block)

    def witness_sensitivity(self, r: int, s: int, i_tuple: Sequence[int], j_tuple: Sequence[int],
                            shifts: Sequence[Tuple[int, int]] = ((1, 0), (0, 1), (1, 1), (-1, 2))) -> mp.mpf:
        """Largest change of a twisted-twisted entry when x -> x + u*l and p -> p + v*l1."""
        cc = cycle_constants(s, r, self.k)
        base = self.twisted_twisted(r, s, i_tuple, j_tuple)
        worst = mp.mpf(0)
        for u, v in shifts:
            witnesses = (
                cc.x + u * cc.l, cc.y - u * cc.m,
                cc.p + v * cc.l1, cc.q - v * (cc.r // cc.d1),
            )
            worst = max(worst, abs(self.twisted_twisted(r, s, i_tuple, j_tuple, witnesses) - base))
        logger.debug(f"Bezout witness sensitivity r={r}, s={s}, k={self.k}: {mp.nstr(worst, 5)}")
        return worst


def s_tensor_untwisted_twisted(md: ModularData, k: int, s: int, untw: Sequence[int], tw: Sequence[int]) -> mpc:
    return TensorSector(md, k).untwisted_twisted(s, untw, tw)


def s_tensor_twisted_twisted(md: ModularData, k: int, r: int, s: int,
                             i_tuple: Sequence[int], j_tuple: Sequence[int]) -> mpc:
    return TensorSector(md, k).twisted_twisted(r, s, i_tuple, j_tuple)
