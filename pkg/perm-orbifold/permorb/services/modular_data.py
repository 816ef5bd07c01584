"""
Modular Data Service
Rank, S-matrix, conformal weights and central charge of a rational VOA: builtins,
validation, T-matrix, Verlinde numbers and JSON persistence
"""

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from loguru import logger
from mpmath import mp, mpc, mpf
from pydantic import BaseModel, Field, ValidationError

from ..errors import InputError
from .scalars import (
    Phase,
    complex_from_json,
    complex_to_json,
    format_rational,
    parse_rational,
    phase_to_complex,
)


@dataclass(frozen=True, eq=False)
class ModularData:
    name: str
    s_matrix: Any  # mp.matrix, rank x rank
    weights: Tuple[Fraction, ...]
    central_charge: Fraction
    labels: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        rank = len(self.weights)
        if rank == 0:
            raise InputError(f"Modular data '{self.name}' has no simple modules")
        if self.s_matrix.rows != rank or self.s_matrix.cols != rank:
            raise InputError(
                f"S-matrix of '{self.name}' is {self.s_matrix.rows}x{self.s_matrix.cols}",
                detail=f"expected {rank}x{rank} from {rank} weights",
            )
        if self.weights[0] != 0:
            raise InputError(f"Vacuum weight of '{self.name}' must be 0", detail=str(self.weights[0]))
        if sum(1 for w in self.weights if w == 0) > 1:
            logger.warning(f"'{self.name}' has several zero weights; index 0 is taken as the vacuum")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"W{j}" for j in range(rank)))
        elif len(self.labels) != rank:
            raise InputError(f"'{self.name}' has {len(self.labels)} labels for rank {rank}")

    @property
    def rank(self) -> int:
        return len(self.weights)

    def s(self, i: int, j: int) -> mpc:
        return self.s_matrix[i, j]


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

class CheckOutcome(BaseModel):
    name: str
    passed: bool
    deviation: float
    elapsed: float = 0.0


class ValidationReport(BaseModel):
    checks: List[CheckOutcome] = []

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failed(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]


def timed_check(name: str, measure: Callable[[], Tuple[Any, bool]]) -> CheckOutcome:
    start = time.perf_counter()
    deviation, passed = measure()
    elapsed = time.perf_counter() - start
    logger.debug(f"check {name}: passed={passed} deviation={mp.nstr(mpf(deviation), 5)} in {elapsed:.3f}s")
    return CheckOutcome(name=name, passed=bool(passed), deviation=float(deviation), elapsed=elapsed)


def bounded(deviation: Callable[[], Any], tol: float) -> Callable[[], Tuple[Any, bool]]:
    def measure():
        value = deviation()
        return value, value <= tol
    return measure


# ---------------------------------------------------------------------------
# Matrix measurements shared with the verifier
# ---------------------------------------------------------------------------

def max_abs(m) -> mpf:
    return max((abs(m[i, j]) for i in range(m.rows) for j in range(m.cols)), default=mpf(0))


def phase_diagonal(phases: Sequence[Phase]):
    n = len(phases)
    t = mp.matrix(n, n)
    for j, phase in enumerate(phases):
        t[j, j] = phase_to_complex(phase)
    return t


def symmetry_deviation(s) -> mpf:
    return max_abs(s - s.T)


def unitarity_deviation(s) -> mpf:
    return max_abs(s * s.H - mp.eye(s.rows))


def s4_deviation(s) -> mpf:
    s2 = s * s
    return max_abs(s2 * s2 - mp.eye(s.rows))


def modular_relation_deviation(s, t_phases: Sequence[Phase]) -> mpf:
    st = s * phase_diagonal(t_phases)
    return max_abs(st * st * st - s * s)


def verlinde_numbers(s, vacuum: int = 0) -> Dict[Tuple[int, int, int], mpc]:
    """N_ab^c = sum_x S_ax S_bx conj(S_cx) / S_vac,x for a <= b."""
    n = s.rows
    inv_vac = [1 / s[vacuum, x] for x in range(n)]
    conj_rows = [[mp.conj(s[c, x]) for x in range(n)] for c in range(n)]
    numbers = {}
    for a in range(n):
        for b in range(a, n):
            weighted = [s[a, x] * s[b, x] * inv_vac[x] for x in range(n)]
            for c in range(n):
                numbers[(a, b, c)] = mp.fdot(weighted, conj_rows[c])
    return numbers


def verlinde_deviation(s, vacuum: int = 0) -> Tuple[mpf, bool]:
    """Largest distance of a Verlinde number from an integer, and whether any rounds negative."""
    worst = mpf(0)
    negative = False
    for value in verlinde_numbers(s, vacuum).values():
        nearest = int(mp.nint(value.real))
        worst = max(worst, abs(value - nearest))
        negative = negative or nearest < 0
    return worst, negative


def smallest_vacuum_entry(s, vacuum: int = 0) -> mpf:
    return min(abs(s[vacuum, j]) for j in range(s.cols))


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def t_matrix(md: ModularData) -> List[Phase]:
    """
    T-phases h_j - c/24 reduced mod 1, in the order of the simple modules
    """
    shift = md.central_charge / 24
    return [Phase(w - shift) for w in md.weights]


def validate(md: ModularData, tol: float) -> ValidationReport:
    """
    Run the modular axiom checks on input data and log the outcome
    """
    if not tol > 0:
        raise InputError("Tolerance must be positive", detail=str(tol))
    if md.s_matrix.rows != md.rank or md.s_matrix.cols != md.rank:
        raise InputError(f"Dimension mismatch in '{md.name}'")

    s = md.s_matrix
    phases = t_matrix(md)

    def verlinde():
        worst, negative = verlinde_deviation(s)
        return worst, worst <= tol and not negative

    def vacuum_row():
        smallest = smallest_vacuum_entry(s)
        return smallest, smallest > tol

    checks = [
        timed_check("symmetric", bounded(lambda: symmetry_deviation(s), tol)),
        timed_check("unitary", bounded(lambda: unitarity_deviation(s), tol)),
        timed_check("s4_identity", bounded(lambda: s4_deviation(s), tol)),
        timed_check("st_cubed", bounded(lambda: modular_relation_deviation(s, phases), tol)),
        timed_check("vacuum_row_nonzero", vacuum_row),
        timed_check("verlinde", verlinde),
    ]
    report = ValidationReport(checks=checks)
    if report.passed:
        logger.info(f"Modular data '{md.name}' passed validation at tol {tol:g}")
    else:
        logger.warning(f"Modular data '{md.name}' failed checks: {', '.join(report.failed())}")
    return report


def quantum_dimensions(md: ModularData) -> List[mpc]:
    return [md.s(0, j) / md.s(0, 0) for j in range(md.rank)]


def global_dimension(md: ModularData) -> mpf:
    """D^2 = 1 / S_00^2."""
    return 1 / abs(md.s(0, 0)) ** 2


def charge_conjugation(md: ModularData, tol: float) -> List[int]:
    """The permutation j -> j* read off S^2."""
    s2 = md.s_matrix * md.s_matrix
    perm = []
    for i in range(md.rank):
        hits = [j for j in range(md.rank) if abs(s2[i, j] - 1) <= tol]
        if len(hits) != 1:
            raise InputError(f"S^2 of '{md.name}' is not a permutation at row {i}")
        perm.append(hits[0])
    return perm


def fusion_rules(md: ModularData, tol: float) -> Dict[Tuple[int, int, int], int]:
    """Integer fusion coefficients N_ab^c (a <= b), nonzero entries only."""
    rules = {}
    for key, value in verlinde_numbers(md.s_matrix).items():
        nearest = int(mp.nint(value.real))
        if abs(value - nearest) > tol or nearest < 0:
            raise InputError(f"Verlinde number {key} of '{md.name}' is not a nonnegative integer")
        if nearest:
            rules[key] = nearest
    return rules


def describe(md: ModularData, tol: float) -> Dict[str, List[str]]:
    """
    Human-readable summary of validated data: quantum dimensions, duals and
    fusion products "a x b = c1 + 2 c2", one entry per unordered pair a <= b.
    Raises InputError when S^2 is not a permutation or the Verlinde numbers are not integral.
    """
    labels = md.labels
    dims = [f"{labels[j]}={mp.nstr(d.real, 12)}" for j, d in enumerate(quantum_dimensions(md))]
    duals = [f"{labels[j]}*={labels[dual]}" for j, dual in enumerate(charge_conjugation(md, tol))]
    rules = fusion_rules(md, tol)
    products = []
    for a in range(md.rank):
        for b in range(a, md.rank):
            terms = []
            for c in range(md.rank):
                n = rules.get((a, b, c), 0)
                if n:
                    terms.append(labels[c] if n == 1 else f"{n} {labels[c]}")
            products.append(f"{labels[a]} x {labels[b]} = {' + '.join(terms) or '0'}")
    return {"quantum_dimensions": dims, "duals": duals, "fusion": products}


# ---------------------------------------------------------------------------
# Builtins
# ---------------------------------------------------------------------------

def _matrix(rows: List[List[Any]]):
    return mp.matrix([[mpc(entry) for entry in row] for row in rows])


def holomorphic(c: Any = 8) -> ModularData:
    charge = parse_rational(c, "central charge")
    if charge % 8 != 0:
        logger.warning(f"Holomorphic data with c={format_rational(charge)} is not a modular representation (c must be 0 mod 8)")
    return ModularData(
        name=f"holomorphic(c={format_rational(charge)})",
        s_matrix=_matrix([[1]]),
        weights=(Fraction(0),),
        central_charge=charge,
        labels=("V",),
    )


def ising() -> ModularData:
    r2 = mp.sqrt(2)
    half = mpf(1) / 2
    return ModularData(
        name="ising",
        s_matrix=_matrix([[half, half, r2 / 2], [half, half, -r2 / 2], [r2 / 2, -r2 / 2, 0]]),
        weights=(Fraction(0), Fraction(1, 2), Fraction(1, 16)),
        central_charge=Fraction(1, 2),
        labels=("1", "epsilon", "sigma"),
    )


def fibonacci() -> ModularData:
    phi = (1 + mp.sqrt(5)) / 2
    norm = mp.sqrt(2 + phi)
    return ModularData(
        name="fibonacci",
        s_matrix=_matrix([[1 / norm, phi / norm], [phi / norm, -1 / norm]]),
        weights=(Fraction(0), Fraction(2, 5)),
        central_charge=Fraction(14, 5),
        labels=("1", "tau"),
    )


def z_n(n: int = 2) -> ModularData:
    """Pointed Z_N data of SU(N) level one: h_a = a(N-a)/2N, S_ab = e^{2 pi i ab/N}/sqrt(N), c = N-1."""
    if n is None or int(n) < 2:
        raise InputError("z_n needs N >= 2", detail=str(n))
    n = int(n)
    norm = mp.sqrt(n)
    rows = [[phase_to_complex(Phase(Fraction(a * b, n))) / norm for b in range(n)] for a in range(n)]
    return ModularData(
        name=f"z_n(N={n})",
        s_matrix=mp.matrix(rows),
        weights=tuple(Fraction(a * (n - a), 2 * n) for a in range(n)),
        central_charge=Fraction(n - 1),
        labels=tuple(f"[{a}]" for a in range(n)),
    )


BUILTINS: Dict[str, Callable[..., ModularData]] = {
    "holomorphic": holomorphic,
    "ising": ising,
    "fibonacci": fibonacci,
    "z_n": z_n,
}


def builtin(name: str, c: Optional[Any] = None, n: Optional[int] = None) -> ModularData:
    """
    Look up a builtin by name; holomorphic takes the central charge c, z_n takes N
    """
    if name not in BUILTINS:
        raise InputError(f"Unknown builtin '{name}'", detail=f"choose from {', '.join(BUILTINS)}")
    if name == "holomorphic":
        return holomorphic(8 if c is None else c)
    if name == "z_n":
        return z_n(2 if n is None else n)
    return BUILTINS[name]()


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

class ComplexEntry(BaseModel):
    re: str
    im: str


class ModuleRecord(BaseModel):
    family: int
    sector: int
    tuple: List[int]
    eigen: int
    weight: str
    label: str


class ModularDataFile(BaseModel):
    name: str
    rank: int
    central_charge: str
    weights: List[str]
    s_matrix: List[List[ComplexEntry]]
    labels: Optional[List[str]] = None
    vacuum_index: Optional[int] = Field(default=None, ge=0)
    modules: Optional[List[ModuleRecord]] = None


def to_file_model(md: ModularData, extra: Optional[Dict[str, Any]] = None) -> ModularDataFile:
    payload = {
        "name": md.name,
        "rank": md.rank,
        "central_charge": format_rational(md.central_charge),
        "weights": [format_rational(w) for w in md.weights],
        "s_matrix": [[complex_to_json(md.s(i, j)) for j in range(md.rank)] for i in range(md.rank)],
        "labels": list(md.labels),
    }
    payload.update(extra or {})
    return ModularDataFile(**payload)


def dumps(model: ModularDataFile) -> str:
    return json.dumps(model.model_dump(exclude_none=True), indent=2) + "\n"


def store(md: ModularData, path: str, extra: Optional[Dict[str, Any]] = None) -> None:
    """
    Write modular data as JSON, with optional extra top-level fields
    """
    Path(path).write_text(dumps(to_file_model(md, extra)), encoding="utf-8")
    logger.info(f"Stored '{md.name}' (rank {md.rank}) to {path}")


def from_file_model(model: ModularDataFile) -> ModularData:
    rank = model.rank
    if len(model.weights) != rank:
        raise InputError(f"File declares rank {rank} but lists {len(model.weights)} weights")
    if len(model.s_matrix) != rank or any(len(row) != rank for row in model.s_matrix):
        raise InputError(f"File declares rank {rank} but the S-matrix is not {rank}x{rank}")
    if model.labels is not None and len(model.labels) != rank:
        raise InputError(f"File declares rank {rank} but lists {len(model.labels)} labels")

    weights = [parse_rational(w, "weight") for w in model.weights]
    entries = [[complex_from_json(e.model_dump()) for e in row] for row in model.s_matrix]
    labels = list(model.labels) if model.labels is not None else [f"W{j}" for j in range(rank)]

    vacuum = model.vacuum_index
    if vacuum is not None and vacuum >= rank:
        raise InputError(f"Vacuum index {vacuum} is out of range for rank {rank}")
    if vacuum is None and weights[0] != 0:
        zeros = [j for j, w in enumerate(weights) if w == 0]
        if len(zeros) != 1:
            raise InputError("Cannot locate a unique zero-weight vacuum module", detail=f"zero weights at {zeros}")
        vacuum = zeros[0]
    if vacuum:
        logger.warning(f"Moving vacuum module {labels[vacuum]} from index {vacuum} to index 0")
        order = [vacuum] + [j for j in range(rank) if j != vacuum]
        weights = [weights[j] for j in order]
        labels = [labels[j] for j in order]
        entries = [[entries[i][j] for j in order] for i in order]

    return ModularData(
        name=model.name,
        s_matrix=mp.matrix(entries),
        weights=tuple(weights),
        central_charge=parse_rational(model.central_charge, "central charge"),
        labels=tuple(labels),
    )


def load(path: str) -> ModularData:
    """
    Read modular data from JSON, raising InputError for anything malformed
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise InputError(f"No such data file: {path}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"Data file {path} is not valid JSON", detail=str(e)) from e
    try:
        model = ModularDataFile.model_validate(raw)
    except ValidationError as e:
        raise InputError(f"Data file {path} does not match the modular data schema", detail=str(e)) from e
    md = from_file_model(model)
    logger.info(f"Loaded '{md.name}' (rank {md.rank}) from {path}")
    return md
