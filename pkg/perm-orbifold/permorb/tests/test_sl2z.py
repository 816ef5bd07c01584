import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from permorb.errors import InputError
from permorb.services.modular_data import builtin, ising, max_abs, phase_diagonal, t_matrix
from permorb.services.sl2z import (
    GeneratorWord,
    ModularRepresentation,
    SL2ZMatrix,
    bezout_x,
    build_A,
    decompose,
    extended_gcd,
    rho_eval,
)

TOL = 1e-20

syllable = st.one_of(
    st.tuples(st.just("S"), st.integers(min_value=1, max_value=3)),
    st.tuples(st.just("T"), st.integers(min_value=-6, max_value=6)),
)
words = st.builds(GeneratorWord, st.lists(syllable, max_size=8).map(tuple), st.booleans())


@pytest.mark.parametrize("s,k,expected", [(4, 6, 2), (1, 5, 1), (3, 6, 1), (0, 6, 0)])
def test_bezout_x(s, k, expected):
    """Test the minimal Bezout witness and its identity"""
    x, y = bezout_x(s, k)
    assert x == expected
    assert s * x + k * y == np.gcd(s, k)


def test_extended_gcd():
    g, x, y = extended_gcd(240, 46)
    assert g == 2
    assert 240 * x + 46 * y == 2


@pytest.mark.parametrize("r,s,k,rows", [
    (1, 1, 2, [[2, 1], [-1, 0]]),
    (0, 1, 2, [[1, 0], [0, 1]]),
    (1, 1, 3, [[3, 1], [-1, 0]]),
])
def test_build_A_examples(r, s, k, rows):
    assert build_A(r, s, k).rows() == rows


def test_build_A_in_sl2z_for_every_sector_pair():
    """Test integrality and determinant one for all k up to 24"""
    for k in range(1, 25):
        for r in range(k):
            for s in range(k):
                matrix = np.array(build_A(r, s, k).rows(), dtype=np.int64)
                assert matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0] == 1


def test_build_A_rejects_out_of_range():
    with pytest.raises(InputError):
        build_A(2, 1, 2)


def test_build_A_with_alternate_witnesses():
    # x -> x + l for s = 2, k = 6 keeps 2x + 6y = 2
    x, y = bezout_x(2, 6)
    shifted = build_A(3, 2, 6, witnesses=(x + 3, y - 1, *bezout_x(3, 6)))
    assert shifted.det() == 1
    with pytest.raises(ValueError):
        build_A(3, 2, 6, witnesses=(x + 1, y, *bezout_x(3, 6)))


def test_sl2z_matrix_rejects_det():
    with pytest.raises(ValueError):
        SL2ZMatrix(1, 1, 1, 1)


def test_generator_relations():
    s, t = SL2ZMatrix.s(), SL2ZMatrix.t()
    assert (s @ s).rows() == [[-1, 0], [0, -1]]
    assert (s @ t @ s @ t @ s @ t).rows() == [[-1, 0], [0, -1]]
    assert (t @ t.inverse()) == SL2ZMatrix.identity()


def word_length_bound(gamma):
    largest = max(abs(v) for row in gamma.rows() for v in row)
    return 4 * (1 + math.log2(largest)) + 8


def test_decompose_random_matrices():
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 1000:
        gamma = SL2ZMatrix.identity()
        for power in rng.integers(-9, 10, size=int(rng.integers(1, 7))):
            gamma = gamma @ SL2ZMatrix.t(int(power)) @ SL2ZMatrix.s()
        if max(abs(v) for row in gamma.rows() for v in row) > 10**4:
            continue
        word = decompose(gamma)
        assert word.to_matrix() == gamma
        assert len(word) <= word_length_bound(gamma)
        checked += 1


@given(words)
def test_decompose_remultiplies(word):
    """Test that the decomposed word multiplies back to the same matrix"""
    gamma = word.to_matrix()
    decomposed = decompose(gamma)
    assert decomposed.to_matrix() == gamma
    assert len(decomposed) <= word_length_bound(gamma)


def test_decompose_examples():
    assert str(decompose(SL2ZMatrix.identity())) == "I"
    assert decompose(SL2ZMatrix.t(5)).syllables == (("T", 5),)
    minus = decompose(-SL2ZMatrix.identity())
    assert minus.negate and len(minus) == 0
    assert decompose(build_A(1, 1, 2)).to_matrix().rows() == [[2, 1], [-1, 0]]


def test_rho_generators():
    md = ising()
    assert max_abs(rho_eval(md, SL2ZMatrix.s()) - md.s_matrix) <= TOL
    assert max_abs(rho_eval(md, SL2ZMatrix.t()) - phase_diagonal(t_matrix(md))) <= TOL


def test_rho_minus_identity_is_charge_conjugation():
    md = ising()
    minus = rho_eval(md, -SL2ZMatrix.identity())
    assert max_abs(minus - md.s_matrix * md.s_matrix) <= TOL


@pytest.mark.parametrize("name", ["ising", "fibonacci", "z_n", "holomorphic"])
def test_rho_independent_of_word(name):
    md = builtin(name)
    rho = ModularRepresentation(md)
    word = decompose(build_A(1, 1, 3))
    padded = GeneratorWord(word.syllables + (("S", 1),) * 4, word.negate)
    assert max_abs(rho.of_word(word) - rho.of_word(padded)) <= TOL
    braid = GeneratorWord((("S", 1), ("T", 1)) * 3)
    assert braid.to_matrix() == -SL2ZMatrix.identity()
    assert max_abs(rho.of_word(braid) - rho.evaluate(braid.to_matrix())) <= TOL


@settings(max_examples=25, deadline=None)
@given(words, words)
def test_rho_is_homomorphism(first, second):
    md = ising()
    rho = ModularRepresentation(md)
    product = first.to_matrix() @ second.to_matrix()
    expected = rho.evaluate(first.to_matrix()) * rho.evaluate(second.to_matrix())
    assert max_abs(rho.evaluate(product) - expected) <= mp.mpf("1e-30")
