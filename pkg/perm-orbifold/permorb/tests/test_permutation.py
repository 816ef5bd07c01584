from itertools import product
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from permorb.errors import BudgetExceededError, InputError
from permorb.services.permutation import (
    burnside_count,
    canonical_rotation,
    cycle_constants,
    divisors,
    minimal_period,
    necklaces,
    phi,
    rotate_tuple,
)

label_tuples = st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=12).map(tuple)


def test_cycle_constants_examples():
    """Test the constants of the (s, r) = (2, 4) and (3, 2) pairs at k = 6"""
    cc = cycle_constants(2, 4, 6)
    assert (cc.d, cc.l, cc.m, cc.d1, cc.l1, cc.f, cc.b, cc.a) == (2, 3, 1, 2, 3, 2, 1, 1)
    assert cc.s * cc.x + cc.k * cc.y == cc.d
    cc = cycle_constants(3, 2, 6)
    assert (cc.d, cc.l, cc.m, cc.d1, cc.l1, cc.f, cc.b, cc.a) == (3, 2, 1, 2, 3, 1, 3, 2)


def test_cycle_constants_identities():
    for k in range(1, 25):
        for s in range(k):
            for r in range(k):
                cc = cycle_constants(s, r, k)
                assert cc.d * cc.l == k
                assert cc.d1 * cc.l1 == k
                assert cc.b * cc.l == cc.a * cc.l1
                assert gcd(cc.m, cc.l) == 1
                assert cc.s * cc.x + k * cc.y == cc.d
                assert cc.r * cc.p + k * cc.q == cc.d1


def test_cycle_constants_reduce_mod_k():
    assert cycle_constants(8, -1, 6) == cycle_constants(2, 5, 6)
    with pytest.raises(InputError):
        cycle_constants(1, 1, 0)


def test_cycle_constants_zero_sector():
    cc = cycle_constants(0, 3, 6)
    assert (cc.d, cc.l, cc.f) == (6, 1, 3)


def test_necklaces_examples():
    assert necklaces(2, 3) == [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)]
    assert necklaces(3, 2, exclude_constant=True) == [(0, 1), (0, 2), (1, 2)]
    assert necklaces(5, 1, exclude_constant=True) == []


@pytest.mark.parametrize("alphabet", [1, 2, 3, 4])
@pytest.mark.parametrize("length", [1, 2, 3, 4, 5, 6, 8])
def test_necklace_count_matches_burnside(alphabet, length):
    found = necklaces(alphabet, length)
    assert len(found) == burnside_count(alphabet, length)
    assert all(canonical_rotation(t) == t for t in found)
    assert found == sorted(found)


def orbit_minima(alphabet, length):
    return sorted({min(t[i:] + t[:i] for i in range(length)) for t in product(range(alphabet), repeat=length)})


SMALL_WORDS = [(a, n) for a in range(1, 7) for n in range(1, 11) if a ** n <= 10**5]


@pytest.mark.parametrize("alphabet,length", SMALL_WORDS)
def test_necklaces_match_brute_force_orbits(alphabet, length):
    """Test FKM necklaces against a direct partition of all words into rotation orbits"""
    expected = orbit_minima(alphabet, length)
    assert necklaces(alphabet, length) == expected
    assert len(expected) == burnside_count(alphabet, length)
    non_constant = [t for t in expected if len(set(t)) > 1]
    assert necklaces(alphabet, length, exclude_constant=True) == non_constant
    assert len(non_constant) == burnside_count(alphabet, length, exclude_constant=True)


def mobius(n):
    sign, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            sign = -sign
        p += 1
    return -sign if m > 1 else sign


def lyndon_count(alphabet, length):
    return sum(mobius(d) * alphabet ** (length // d) for d in divisors(length)) // length


@pytest.mark.parametrize("alphabet", range(1, 7))
@pytest.mark.parametrize("length", range(1, 11))
def test_burnside_count_matches_lyndon_decomposition(alphabet, length):
    """Test that every orbit is a repeated aperiodic word of some period dividing the length"""
    assert burnside_count(alphabet, length) == sum(lyndon_count(alphabet, p) for p in divisors(length))
    if burnside_count(alphabet, length) <= 2 * 10**4:
        assert len(necklaces(alphabet, length)) == burnside_count(alphabet, length)


def test_necklaces_budget():
    with pytest.raises(BudgetExceededError):
        necklaces(3, 20, budget=1000)


def test_divisors_and_phi():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert divisors(1) == [1]
    assert [phi(n) for n in range(1, 11)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]
    assert burnside_count(3, 2, exclude_constant=True) == 3


def test_rotate_tuple_direction():
    assert rotate_tuple((0, 1, 2), 1) == (2, 0, 1)
    assert rotate_tuple((), 3) == ()


@given(label_tuples, st.integers(min_value=-20, max_value=20), st.integers(min_value=-20, max_value=20))
def test_rotation_is_a_group_action(t, a, b):
    assert rotate_tuple(rotate_tuple(t, a), b) == rotate_tuple(t, a + b)
    assert rotate_tuple(t, len(t)) == t


@given(label_tuples)
def test_minimal_period_laws(t):
    period = minimal_period(t)
    assert len(t) % period == 0
    assert t == t[:period] * (len(t) // period)
    assert canonical_rotation(t) == canonical_rotation(rotate_tuple(t, 1))
