"""
Verification Service
Axiom suite for any (S, T) pair, orbifold cross-checks (engine comparison, counting
oracle, global dimension) and report rendering
"""

import json
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from mpmath import mpf
from pydantic import BaseModel

from ..config import Engine, ReportFormat
from .modular_data import (
    CheckOutcome,
    ModularData,
    bounded,
    global_dimension,
    modular_relation_deviation,
    s4_deviation,
    symmetry_deviation,
    timed_check,
    unitarity_deviation,
    verlinde_deviation,
)
from .orbifold import OrbifoldResult, catalog, orbifold_s_matrix
from .permutation import burnside_count, cycle_constants
from .scalars import Phase
from .tensor_sector import TensorSector


class CheckSuiteResult(BaseModel):
    subject: str
    checks: List[CheckOutcome] = []

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failed(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]


def s2_permutation_deviation(s, vacuum: int = 0) -> Tuple[mpf, bool]:
    """Distance of S^2 from the permutation matrix it is closest to, and whether that permutation
    is an involution fixing the vacuum."""
    s2 = s * s
    n = s.rows
    perm = np.array([max(range(n), key=lambda j: abs(s2[i, j])) for i in range(n)], dtype=int)
    worst = mpf(0)
    for i in range(n):
        for j in range(n):
            target = 1 if perm[i] == j else 0
            worst = max(worst, abs(s2[i, j] - target))
    structural = bool(perm[vacuum] == vacuum) and np.array_equal(perm[perm], np.arange(n))
    return worst, structural


def vacuum_row_positivity(s, vacuum: int, tol: float) -> Tuple[mpf, bool]:
    row = [s[vacuum, j] for j in range(s.cols)]
    imaginary = max(abs(z.imag) for z in row)
    positive = all(z.real > tol for z in row)
    return imaginary, positive and imaginary <= tol


def axiom_suite(s, t_phases: Sequence[Phase], tol: float, vacuum: int = 0, subject: str = "modular data") -> CheckSuiteResult:
    if s.rows != s.cols or s.rows != len(t_phases):
        raise ValueError(f"axiom_suite needs a square S matching {len(t_phases)} T-phases")

    def permutation():
        worst, structural = s2_permutation_deviation(s, vacuum)
        return worst, worst <= tol and structural

    def verlinde():
        worst, negative = verlinde_deviation(s, vacuum)
        return worst, worst <= tol and not negative

    checks = [
        timed_check("symmetric", bounded(lambda: symmetry_deviation(s), tol)),
        timed_check("unitary", bounded(lambda: unitarity_deviation(s), tol)),
        timed_check("s4_identity", bounded(lambda: s4_deviation(s), tol)),
        timed_check("st_cubed", bounded(lambda: modular_relation_deviation(s, t_phases), tol)),
        timed_check("s2_permutation", permutation),
        timed_check("verlinde", verlinde),
        timed_check("vacuum_row_positive", lambda: vacuum_row_positivity(s, vacuum, tol)),
    ]
    result = CheckSuiteResult(subject=subject, checks=checks)
    if not result.passed:
        logger.warning(f"Axiom suite on {subject} failed: {', '.join(result.failed())}")
    return result


def global_dimension_check(md: ModularData, result: OrbifoldResult, tol: float) -> CheckOutcome:
    """D^2 of the orbifold against k^2 D^2(V)^k, as a relative deviation."""

    def measure():
        expected = mpf(result.k) ** 2 * global_dimension(md) ** result.k
        observed = 1 / abs(result.s_matrix[result.vacuum, result.vacuum]) ** 2
        deviation = abs(observed - expected) / expected
        return deviation, deviation <= tol

    return timed_check("global_dimension", measure)


def orbifold_suite(md: ModularData, result: OrbifoldResult, tol: float) -> CheckSuiteResult:
    suite = axiom_suite(result.s_matrix, result.t_phases, tol, result.vacuum, subject=result.name)
    suite.checks.append(global_dimension_check(md, result, tol))
    if result.engine_diff is not None:
        suite.checks.append(CheckOutcome(name="engine_agreement", passed=result.engine_diff <= tol,
                                         deviation=float(result.engine_diff)))
    return suite


def witness_check(md: ModularData, k: int, tol: float) -> CheckOutcome:
    """Largest change of twisted-twisted entries under alternate Bezout witnesses, over the
    vacuum block and a mixed block with its reverse for every pair of twisted sectors."""

    def measure():
        sector = TensorSector(md, k)
        worst = mpf(0)
        for r in range(1, k):
            for s in range(1, k):
                f = gcd(gcd(s, k), r)
                mixed = tuple(j % md.rank for j in range(f))
                for i_block, j_block in (((0,) * f, (0,) * f), (mixed, mixed[::-1])):
                    worst = max(worst, sector.witness_sensitivity(r, s, i_block, j_block))
        return worst, worst <= tol

    return timed_check("bezout_witness_independence", measure)


def count_oracle(md: ModularData, k: int, budget: int = 10**7, max_k: int = 24) -> Tuple[int, int]:
    """(catalog size, independent count from necklace numbers)."""
    listed = len(catalog(md, k, budget, max_k))
    rank = md.rank
    expected = burnside_count(rank, k) - rank + rank * k
    for s in range(1, k):
        d = gcd(s, k)
        expected += rank * k + (burnside_count(rank, d) - rank) * (k // d)
    if listed != expected:
        logger.warning(f"Catalog of '{md.name}' at k={k} lists {listed} modules, necklace count gives {expected}")
    return listed, expected


def engine_diff(md: ModularData, k: int, budget: int = 10**7, max_k: int = 24) -> mpf:
    result = orbifold_s_matrix(md, k, Engine.BOTH, budget=budget, max_k=max_k)
    return result.engine_diff


def cycle_constants_table(k: int) -> pd.DataFrame:
    rows = [cycle_constants(s, r, k).to_dict() for s in range(k) for r in range(k)]
    return pd.DataFrame(rows, columns=["k", "s", "r", "d", "l", "m", "d1", "l1", "f", "b", "a", "x", "y", "p", "q"])


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

class VerificationReport(BaseModel):
    subject: str
    k: int
    precision: int
    tolerance: float
    catalog_size: int
    checks: List[CheckOutcome] = []
    counts: Optional[List[int]] = None
    engine_diff: Optional[float] = None
    cycle_constants: List[Dict[str, int]] = []
    input_summary: Optional[Dict[str, List[str]]] = None

    @property
    def passed(self) -> bool:
        counts_ok = self.counts is None or self.counts[0] == self.counts[1]
        return counts_ok and all(check.passed for check in self.checks)


def build_report(subject: str, k: int, precision: int, tolerance: float, catalog_size: int,
                 checks: List[CheckOutcome], counts: Optional[Tuple[int, int]] = None,
                 diff: Optional[mpf] = None, summary: Optional[Dict[str, List[str]]] = None) -> VerificationReport:
    table = cycle_constants_table(k)
    return VerificationReport(
        subject=subject,
        k=k,
        precision=precision,
        tolerance=tolerance,
        catalog_size=catalog_size,
        checks=checks,
        counts=list(counts) if counts is not None else None,
        engine_diff=float(diff) if diff is not None else None,
        cycle_constants=[{key: int(value) for key, value in row.items()} for row in table.to_dict("records")],
        input_summary=summary,
    )


def render(report: VerificationReport, fmt: ReportFormat = ReportFormat.HUMAN) -> str:
    if ReportFormat(fmt) == ReportFormat.MACHINE:
        payload = report.model_dump()
        payload["passed"] = report.passed
        return json.dumps(payload, indent=2)

    lines = [
        f"{report.subject}: k={report.k}, precision={report.precision}, tol={report.tolerance:g}",
        f"catalog size: {report.catalog_size}",
    ]
    if report.counts is not None:
        lines.append(f"catalog / necklace count: {report.counts[0]} / {report.counts[1]}")
    if report.engine_diff is not None:
        lines.append(f"engine diff: {report.engine_diff:.3e}")
    if report.checks:
        frame = pd.DataFrame([c.model_dump() for c in report.checks])
        frame["deviation"] = frame["deviation"].map(lambda v: f"{v:.3e}")
        frame["elapsed"] = frame["elapsed"].map(lambda v: f"{v:.3f}s")
        lines.extend(["", frame.to_string(index=False)])
    if report.input_summary is not None:
        lines.extend(["", "quantum dimensions: " + ", ".join(report.input_summary["quantum_dimensions"])])
        lines.append("duals: " + ", ".join(report.input_summary["duals"]))
        lines.extend(["fusion:"] + [f"  {product}" for product in report.input_summary["fusion"]])
    lines.extend(["", "cycle constants:", pd.DataFrame(report.cycle_constants).to_string(index=False)])
    lines.append("")
    lines.append("PASS" if report.passed else "FAIL")
    return "\n".join(lines)


def render_table(rows: List[Dict[str, Any]]) -> str:
    if not rows:
        return "(empty)"
    return pd.DataFrame(rows).to_string(index=False)
