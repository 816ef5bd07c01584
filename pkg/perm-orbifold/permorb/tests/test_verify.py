import json
from fractions import Fraction

import pytest
from mpmath import mp

from permorb.config import ReportFormat
from permorb.services.modular_data import CheckOutcome, builtin, t_matrix
from permorb.services.orbifold import orbifold_s_matrix
from permorb.services.scalars import Phase, precision_scope
from permorb.services.verify import (
    VerificationReport,
    axiom_suite,
    build_report,
    count_oracle,
    cycle_constants_table,
    engine_diff,
    global_dimension_check,
    render,
    s2_permutation_deviation,
    witness_check,
)

TOL = 1e-20


def test_axiom_suite_on_input(ising_md):
    suite = axiom_suite(ising_md.s_matrix, t_matrix(ising_md), TOL, subject="ising")
    assert suite.passed
    assert [c.name for c in suite.checks] == [
        "symmetric", "unitary", "s4_identity", "st_cubed", "s2_permutation", "verlinde", "vacuum_row_positive",
    ]


@pytest.mark.parametrize("name,params", [
    ("ising", {}),
    ("fibonacci", {}),
    ("holomorphic", {"c": "8"}),
    ("holomorphic", {"c": "16"}),
    ("holomorphic", {"c": "24"}),
    ("z_n", {"n": 2}),
    ("z_n", {"n": 3}),
    ("z_n", {"n": 4}),
])
def test_axiom_suite_on_builtins(name, params):
    with precision_scope(60):
        md = builtin(name, **params)
        suite = axiom_suite(md.s_matrix, t_matrix(md), 1e-30, subject=md.name)
    assert suite.passed, suite.failed()


def test_axiom_suite_flags_wrong_central_charge(ising_md):
    shifted = [phase + Phase.of(Fraction(1, 48)) for phase in t_matrix(ising_md)]
    suite = axiom_suite(ising_md.s_matrix, shifted, TOL)
    assert suite.failed() == ["st_cubed"]


def test_axiom_suite_shape(ising_md):
    with pytest.raises(ValueError):
        axiom_suite(ising_md.s_matrix, t_matrix(ising_md)[:2], TOL)


def test_s2_permutation(z3_md):
    worst, structural = s2_permutation_deviation(z3_md.s_matrix)
    assert worst <= TOL
    assert structural


def test_s2_permutation_detects_non_permutation():
    s = mp.matrix([[1, 1], [1, -1]]) * mp.mpf("0.5")
    worst, _ = s2_permutation_deviation(s)
    assert worst > 0.1


@pytest.mark.parametrize("name,k,expected", [
    ("holomorphic", 4, 16),
    ("ising", 2, 15),
    ("ising", 3, 35),
    ("fibonacci", 3, 20),
    ("holomorphic", 6, 36),
])
def test_count_oracle(name, k, expected):
    """Test the catalog size against the necklace count"""
    assert count_oracle(builtin(name), k) == (expected, expected)


RANK_CASES = [("holomorphic", {}), ("fibonacci", {}), ("z_n", {"n": 2}), ("ising", {}), ("z_n", {"n": 3}), ("z_n", {"n": 4})]


@pytest.mark.parametrize("name,params", RANK_CASES)
@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_count_oracle_small_ranks(name, params, k):
    catalog_count, formula_count = count_oracle(builtin(name, **params), k)
    assert catalog_count == formula_count


@pytest.mark.parametrize("k", range(1, 9))
def test_count_oracle_rank_one(holomorphic_md, k):
    """Test that rank one gives k^2 modules: k untwisted eigenvalues and k in each twisted sector"""
    assert count_oracle(holomorphic_md, k) == (k * k, k * k)


def test_engine_diff(holomorphic_md, fibonacci_md):
    assert engine_diff(holomorphic_md, 3) <= TOL
    assert engine_diff(fibonacci_md, 2) <= TOL


@pytest.mark.parametrize("k", [2, 4, 6])
def test_witness_check_on_mixed_blocks(ising_md, k):
    outcome = witness_check(ising_md, k, TOL)
    assert outcome.name == "bezout_witness_independence"
    assert outcome.passed
    assert outcome.deviation <= TOL


def test_witness_check_without_twisted_sectors(fibonacci_md):
    assert witness_check(fibonacci_md, 1, TOL).deviation == 0.0


def test_global_dimension_check(ising_md):
    result = orbifold_s_matrix(ising_md, 2)
    outcome = global_dimension_check(ising_md, result, TOL)
    assert outcome.passed
    assert outcome.deviation <= TOL


def test_cycle_constants_table():
    table = cycle_constants_table(6)
    assert table.shape == (36, 15)
    row = table[(table["s"] == 2) & (table["r"] == 4)].iloc[0]
    assert (row["d"], row["f"], row["l1"]) == (2, 2, 3)


def test_report_counts_gate_passing():
    checks = [CheckOutcome(name="symmetric", passed=True, deviation=0.0)]
    assert build_report("x", 2, 60, TOL, 4, checks, counts=(4, 4)).passed
    assert not build_report("x", 2, 60, TOL, 4, checks, counts=(4, 5)).passed
    failing = [CheckOutcome(name="unitary", passed=False, deviation=1.0)]
    assert not build_report("x", 2, 60, TOL, 4, failing).passed


def test_render_machine_and_human(holomorphic_md):
    result = orbifold_s_matrix(holomorphic_md, 2)
    checks = [CheckOutcome(name="symmetric", passed=True, deviation=0.0)]
    report = build_report(result.name, 2, 60, TOL, result.size, checks, counts=(4, 4), diff=mp.mpf(0))
    payload = json.loads(render(report, ReportFormat.MACHINE))
    assert payload["passed"] is True
    assert payload["catalog_size"] == 4
    assert len(payload["cycle_constants"]) == 4
    text = render(report, ReportFormat.HUMAN)
    assert text.splitlines()[0].startswith("perm_orbifold(holomorphic(c=8), k=2)")
    assert text.rstrip().endswith("PASS")


def test_report_model_defaults():
    report = VerificationReport(subject="empty", k=1, precision=60, tolerance=TOL, catalog_size=1)
    assert report.passed
    assert "PASS" in render(report)
