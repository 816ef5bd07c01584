"""
Orbifold Service
Irreducible modules of the cyclic permutation orbifold (V^k)^<g>, their conformal weights,
and the orbifold S-matrix from the closed-form case analysis or the generic orbit-sum engine
"""

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from math import gcd
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from loguru import logger
from mpmath import mp, mpc, mpf

from ..config import Engine
from ..errors import BudgetExceededError
from .modular_data import ModularData, ModularDataFile, ModuleRecord, t_matrix
from .permutation import (
    DEFAULT_BUDGET,
    LabelTuple,
    check_budget,
    is_constant,
    minimal_period,
    necklaces,
    rotate_tuple,
)
from .scalars import Phase, complex_to_json, format_rational
from .tensor_sector import TensorSector, TwistedLabel, stable_lookup, twisted_weight

DEFAULT_MAX_K = 24


class ModuleFamily(IntEnum):
    UNTWISTED_NECKLACE = 1
    UNTWISTED_DIAGONAL = 2
    TWISTED_CONSTANT = 3
    TWISTED_NECKLACE = 4


@dataclass(frozen=True)
class OrbifoldModule:
    """One irreducible orbifold module.

    `labels` is the full tuple of the twisted module it lives in: length k in sector 0,
    length gcd(s, k) in sector s. `eigen` indexes the character of the stabilizer.
    """

    sector: int
    labels: LabelTuple
    eigen: int
    weight: Fraction
    name: str = ""

    @property
    def family(self) -> ModuleFamily:
        if self.sector == 0:
            return ModuleFamily.UNTWISTED_DIAGONAL if is_constant(self.labels) else ModuleFamily.UNTWISTED_NECKLACE
        return ModuleFamily.TWISTED_CONSTANT if is_constant(self.labels) else ModuleFamily.TWISTED_NECKLACE

    @property
    def twisted_label(self) -> TwistedLabel:
        return TwistedLabel(self.sector, self.labels)

    def stabilizer_step(self, k: int) -> int:
        """e with stabilizer <g^e>: all of <g> for constant tuples, <g^d> for twisted necklaces."""
        family = self.family
        if family == ModuleFamily.UNTWISTED_NECKLACE:
            return k
        if family == ModuleFamily.TWISTED_NECKLACE:
            return len(self.labels)
        return 1

    def to_record(self) -> ModuleRecord:
        return ModuleRecord(
            family=int(self.family),
            sector=self.sector,
            tuple=list(self.labels),
            eigen=self.eigen,
            weight=format_rational(self.weight),
            label=self.name,
        )


def compute_orbifold_weight(md: ModularData, k: int, m: OrbifoldModule) -> Fraction:
    family = m.family
    if family == ModuleFamily.UNTWISTED_NECKLACE:
        return twisted_weight(md, m.twisted_label, k)
    if family == ModuleFamily.UNTWISTED_DIAGONAL:
        return md.weights[m.labels[0]] * k
    d = gcd(m.sector, k)
    l, step = k // d, m.sector // d
    offset = (-m.eigen * step) % l
    return twisted_weight(md, m.twisted_label, k) + Fraction(offset, l)


def _module_name(md: ModularData, k: int, sector: int, labels: LabelTuple, eigen: int) -> str:
    if k == 1:
        return md.labels[labels[0]]
    names = ",".join(md.labels[i] for i in labels)
    if sector == 0 and not is_constant(labels):
        return f"W({names})"
    if sector == 0:
        return f"W({names})^{eigen}"
    return f"T[g^{sector}]({names})^{eigen}"


def _make_module(md: ModularData, k: int, sector: int, labels: LabelTuple, eigen: int) -> OrbifoldModule:
    draft = OrbifoldModule(sector, labels, eigen, Fraction(0))
    return OrbifoldModule(sector, labels, eigen, compute_orbifold_weight(md, k, draft),
                          _module_name(md, k, sector, labels, eigen))


def check_orbifold_budget(md: ModularData, k: int, budget: int = DEFAULT_BUDGET, max_k: int = DEFAULT_MAX_K) -> None:
    """
    Refuse cycle lengths above max_k and label enumerations above the budget
    """
    if k > max_k:
        raise BudgetExceededError(f"k={k} exceeds the maximum cycle length {max_k}")
    check_budget(md.rank, k, budget)


def catalog(md: ModularData, k: int, budget: int = DEFAULT_BUDGET, max_k: int = DEFAULT_MAX_K) -> List[OrbifoldModule]:
    """Families 1-4 in order: untwisted necklaces, untwisted diagonals, then sector by sector."""
    if k < 1:
        raise ValueError("k must be at least 1")
    check_orbifold_budget(md, k, budget, max_k)
    modules: List[OrbifoldModule] = []
    for labels in necklaces(md.rank, k, exclude_constant=True, budget=budget):
        modules.append(_make_module(md, k, 0, labels, 0))
    for j in range(md.rank):
        for n in range(k):
            modules.append(_make_module(md, k, 0, (j,) * k, n))
    for s in range(1, k):
        d = gcd(s, k)
        for labels in necklaces(md.rank, d, budget=budget):
            for eigen in range(k if is_constant(labels) else k // d):
                modules.append(_make_module(md, k, s, labels, eigen))

    irregular = intermediate_period_tuples(md, k, budget)
    if irregular:
        logger.warning(
            f"{len(irregular)} label tuples of '{md.name}' at k={k} have an intermediate period "
            f"(first: sector {irregular[0][0]}, {irregular[0][1]}); the catalog may not be irreducible"
        )
    logger.info(f"Catalog of '{md.name}' at k={k}: {len(modules)} modules")
    return modules


def intermediate_period_tuples(md: ModularData, k: int, budget: int = DEFAULT_BUDGET) -> List[Tuple[int, LabelTuple]]:
    """(sector, tuple) pairs whose minimal period lies strictly between 1 and the tuple length."""
    found = []
    for s in range(k):
        length = gcd(s, k)
        for labels in necklaces(md.rank, length, exclude_constant=True, budget=budget):
            if minimal_period(labels) < length:
                found.append((s, labels))
    return found


def vacuum_index(modules: List[OrbifoldModule]) -> int:
    for index, m in enumerate(modules):
        if m.family == ModuleFamily.UNTWISTED_DIAGONAL and m.labels[0] == 0 and m.eigen == 0:
            return index
    raise ValueError("catalog has no vacuum module")


@dataclass
class OrbifoldResult:
    source: str
    k: int
    modules: List[OrbifoldModule]
    s_matrix: Any
    t_phases: List[Phase]
    central_charge: Fraction
    engine: Engine = Engine.THEOREM
    engine_diff: Optional[mpf] = None
    engines_agree: bool = True

    @property
    def size(self) -> int:
        return len(self.modules)

    @property
    def vacuum(self) -> int:
        return vacuum_index(self.modules)

    @property
    def name(self) -> str:
        return self.source if self.k == 1 else f"perm_orbifold({self.source}, k={self.k})"

    def to_modular_data(self) -> ModularData:
        """The output as ModularData with the vacuum moved to index 0."""
        v = self.vacuum
        order = [v] + [j for j in range(self.size) if j != v]
        return ModularData(
            name=self.name,
            s_matrix=mp.matrix([[self.s_matrix[i, j] for j in order] for i in order]),
            weights=tuple(self.modules[j].weight for j in order),
            central_charge=self.central_charge,
            labels=tuple(self.modules[j].name for j in order),
        )

    def to_file_model(self) -> ModularDataFile:
        n = self.size
        return ModularDataFile(
            name=self.name,
            rank=n,
            central_charge=format_rational(self.central_charge),
            weights=[format_rational(m.weight) for m in self.modules],
            s_matrix=[[complex_to_json(self.s_matrix[i, j]) for j in range(n)] for i in range(n)],
            labels=[m.name for m in self.modules],
            vacuum_index=self.vacuum,
            modules=[m.to_record() for m in self.modules],
        )


class OrbifoldEngine:
    """Orbifold S-matrix entries for one ModularData and one k, by either engine."""

    def __init__(self, md: ModularData, k: int, budget: int = DEFAULT_BUDGET, max_k: int = DEFAULT_MAX_K):
        self.md = md
        self.k = k
        self.budget = budget
        self.max_k = max_k
        self.setup_engine()

    def setup_engine(self):
        self.modules = catalog(self.md, self.k, self.budget, self.max_k)
        self.sector = TensorSector(self.md, self.k)
        self._unions: Dict[Tuple[int, int], FrozenSet[TwistedLabel]] = {}

    def character(self, numer: int) -> mpc:
        return self.sector.phase(Phase(Fraction(numer, self.k)))

    def _prod_s(self, left: LabelTuple, right: LabelTuple) -> mpc:
        value = mpc(1)
        for i, j in zip(left, right):
            value *= self.md.s(i, j)
        return value

    # -- closed forms ---------------------------------------------------------

    def theorem_entry(self, m1: OrbifoldModule, m2: OrbifoldModule) -> mpc:
        f1, f2 = m1.family, m2.family
        covered = (
            f1 in (ModuleFamily.TWISTED_CONSTANT, ModuleFamily.TWISTED_NECKLACE)
            or (f1 == ModuleFamily.UNTWISTED_NECKLACE and f2 in (ModuleFamily.UNTWISTED_NECKLACE, ModuleFamily.UNTWISTED_DIAGONAL))
            or (f1 == ModuleFamily.UNTWISTED_DIAGONAL and f2 == ModuleFamily.UNTWISTED_DIAGONAL)
        )
        if not covered:
            return self.theorem_entry(m2, m1)
        if f1 in (ModuleFamily.TWISTED_CONSTANT, ModuleFamily.TWISTED_NECKLACE):
            return self._twisted_row(m1, m2)
        return self._untwisted_row(m1, m2)

    def _untwisted_row(self, m1: OrbifoldModule, m2: OrbifoldModule) -> mpc:
        k = self.k
        if m1.family == ModuleFamily.UNTWISTED_DIAGONAL:
            return self.md.s(m1.labels[0], m2.labels[0]) ** k / k
        if m2.family == ModuleFamily.UNTWISTED_DIAGONAL:
            return self._prod_s(m1.labels, m2.labels)
        return mp.fsum(self._prod_s(m1.labels, rotate_tuple(m2.labels, n)) for n in range(k))

    def _twisted_row(self, m1: OrbifoldModule, m2: OrbifoldModule) -> mpc:
        k = self.k
        r, s = m1.sector, m2.sector
        d_r = gcd(r, k)
        f2 = m2.family
        if f2 == ModuleFamily.UNTWISTED_NECKLACE:
            return mpc(0)

        if m1.family == ModuleFamily.TWISTED_CONSTANT:
            prefactor = mpf(1) / k
        else:
            if s % d_r:
                return mpc(0)
            prefactor = mpf(1) / (k // d_r)

        if f2 == ModuleFamily.UNTWISTED_DIAGONAL:
            j = m2.labels[0]
            return prefactor * self.character(m2.eigen * r) * self._prod_s(m1.labels, (j,) * d_r)

        phase = self.character(m1.eigen * s + m2.eigen * r)
        f = gcd(d_r, s)
        i_block = m1.labels[:f]
        if f2 == ModuleFamily.TWISTED_CONSTANT:
            return prefactor * phase * self.sector.twisted_twisted(r, s, i_block, m2.labels[:1] * f)

        d_s = len(m2.labels)
        if r % d_s:
            return mpc(0)
        orbit_sum = mp.fsum(
            self.sector.twisted_twisted(r, s, i_block, rotate_tuple(m2.labels, u)[:f]) for u in range(d_s)
        )
        return prefactor * phase * orbit_sum

    # -- generic orbit sums -----------------------------------------------------

    def _stable_union(self, step: int, alpha: int) -> FrozenSet[TwistedLabel]:
        """Union of U(h, g^-alpha) over h in <g^step>."""
        key = (step, alpha)
        if key not in self._unions:
            union = set()
            for h in range(0, self.k, step):
                union |= stable_lookup(h, (-alpha) % self.k, self.k, self.md.rank, self.budget)
            self._unions[key] = frozenset(union)
        return self._unions[key]

    def generic_entry(self, m1: OrbifoldModule, m2: OrbifoldModule) -> mpc:
        k = self.k
        alpha, beta = m1.sector, m2.sector
        step = m1.stabilizer_step(k)
        orbit = {TwistedLabel(beta, rotate_tuple(m2.labels, u)) for u in range(len(m2.labels))}
        hits = sorted(orbit & self._stable_union(step, alpha))
        if not hits:
            return mpc(0)
        total = mp.fsum(self.sector.sector_entry(m1.twisted_label, target) for target in hits)
        order = k // step
        return total * self.character(m1.eigen * beta + m2.eigen * alpha) / order

    # -- assembly ------------------------------------------------------------------

    def s_matrix(self, engine: Engine):
        entry = self.theorem_entry if engine == Engine.THEOREM else self.generic_entry
        n = len(self.modules)
        result = mp.matrix(n, n)
        for i, m1 in enumerate(self.modules):
            for j, m2 in enumerate(self.modules):
                result[i, j] = entry(m1, m2)
        logger.info(f"{engine.value} engine filled the {n}x{n} orbifold S-matrix of '{self.md.name}' at k={self.k}")
        return result


def orbit_sum_entry(md: ModularData, k: int, m1: OrbifoldModule, m2: OrbifoldModule) -> mpc:
    return OrbifoldEngine(md, k).generic_entry(m1, m2)


def closed_form_entry(md: ModularData, k: int, m1: OrbifoldModule, m2: OrbifoldModule) -> mpc:
    return OrbifoldEngine(md, k).theorem_entry(m1, m2)


def orbifold_s_matrix(md: ModularData, k: int, engine: Engine = Engine.THEOREM, tol: float = 1e-30,
                      budget: int = DEFAULT_BUDGET, max_k: int = DEFAULT_MAX_K) -> OrbifoldResult:
    engine = Engine(engine)
    if md.central_charge % 8 != 0 and md.rank == 1:
        logger.warning(f"'{md.name}' is holomorphic with c not divisible by 8; orbifold data will not be modular")
    if k == 1:
        modules = catalog(md, 1, budget, max_k)
        return OrbifoldResult(
            source=md.name, k=1, modules=modules, s_matrix=md.s_matrix.copy(),
            t_phases=t_matrix(md), central_charge=md.central_charge,
            engine=engine, engine_diff=mpf(0) if engine == Engine.BOTH else None,
        )

    runner = OrbifoldEngine(md, k, budget, max_k)
    if engine == Engine.BOTH:
        s_matrix = runner.s_matrix(Engine.THEOREM)
        generic = runner.s_matrix(Engine.GENERIC)
        n = len(runner.modules)
        diff = max((abs(s_matrix[i, j] - generic[i, j]) for i in range(n) for j in range(n)), default=mpf(0))
    else:
        s_matrix = runner.s_matrix(engine)
        diff = None

    agree = diff is None or diff <= tol
    if not agree:
        logger.warning(f"Engines disagree on '{md.name}' at k={k}: max deviation {mp.nstr(diff, 5)} > {tol:g}")

    shift = k * md.central_charge / 24
    return OrbifoldResult(
        source=md.name, k=k, modules=runner.modules, s_matrix=s_matrix,
        t_phases=[Phase(m.weight - shift) for m in runner.modules],
        central_charge=k * md.central_charge,
        engine=engine, engine_diff=diff, engines_agree=agree,
    )
