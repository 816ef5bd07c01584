"""
Permutation Service
Cyclic-group combinatorics: gcd constants of sector pairs, necklace enumeration
and the rotation action on label tuples
"""

from dataclasses import asdict, dataclass
from functools import lru_cache
from math import gcd
from typing import Dict, List, Sequence, Tuple

from loguru import logger

from ..errors import BudgetExceededError, InputError
from .sl2z import bezout_x

LabelTuple = Tuple[int, ...]

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class CycleConstants:
    k: int
    s: int
    r: int
    d: int
    l: int
    m: int
    d1: int
    l1: int
    f: int
    b: int
    a: int
    x: int
    y: int
    p: int
    q: int

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


@lru_cache(maxsize=None)
def cycle_constants(s: int, r: int, k: int) -> CycleConstants:
    if k <= 0:
        raise InputError("k must be positive", detail=str(k))
    s, r = s % k, r % k
    d, d1 = gcd(s, k), gcd(r, k)
    f = gcd(d, r)
    x, y = bezout_x(s, k)
    p, q = bezout_x(r, k)
    return CycleConstants(
        k=k, s=s, r=r,
        d=d, l=k // d, m=s // d,
        d1=d1, l1=k // d1,
        f=f, b=d // f, a=d1 // f,
        x=x, y=y, p=p, q=q,
    )


def divisors(n: int) -> List[int]:
    small = [e for e in range(1, int(n**0.5) + 1) if n % e == 0]
    return sorted(set(small + [n // e for e in small]))


def phi(n: int) -> int:
    """Euler's totient."""
    return sum(1 for j in range(1, n + 1) if gcd(n, j) == 1)


def burnside_count(alphabet: int, length: int, exclude_constant: bool = False) -> int:
    """Number of rotation orbits of length-`length` words over `alphabet` letters."""
    total = sum(phi(e) * alphabet ** (length // e) for e in divisors(length)) // length
    return total - alphabet if exclude_constant else total


def rotate_tuple(t: Sequence[int], steps: int) -> LabelTuple:
    """Apply the cycle (M1, ..., Md) -> (Md, M1, ..., Md-1) `steps` times."""
    t = tuple(t)
    if not t:
        return t
    shift = steps % len(t)
    return t[len(t) - shift:] + t[:len(t) - shift]


def minimal_period(t: Sequence[int]) -> int:
    t = tuple(t)
    for e in divisors(len(t)):
        if rotate_tuple(t, e) == t:
            return e
    return len(t)


def canonical_rotation(t: Sequence[int]) -> LabelTuple:
    """Lexicographically smallest rotation, the orbit representative used everywhere."""
    t = tuple(t)
    return min(rotate_tuple(t, j) for j in range(max(len(t), 1)))


def is_constant(t: Sequence[int]) -> bool:
    return len(set(t)) <= 1


def check_budget(alphabet: int, length: int, budget: int = DEFAULT_BUDGET) -> None:
    """
    Raise BudgetExceededError when alphabet**length exceeds the budget
    """
    if alphabet ** length > budget:
        raise BudgetExceededError(
            f"Enumerating {alphabet}^{length} label tuples exceeds the budget",
            detail=f"budget {budget}",
        )


def necklaces(alphabet: int, length: int, exclude_constant: bool = False,
              budget: int = DEFAULT_BUDGET) -> List[LabelTuple]:
    """Minimal-rotation representatives in lexicographic order."""
    return list(_necklace_tuple(alphabet, length, exclude_constant, budget))


@lru_cache(maxsize=256)
def _necklace_tuple(alphabet: int, length: int, exclude_constant: bool, budget: int) -> Tuple[LabelTuple, ...]:
    # FKM generation: emits each necklace once, already in lexicographic order
    if alphabet < 1 or length < 1:
        raise InputError("necklaces needs a positive alphabet and length", detail=f"{alphabet}, {length}")
    check_budget(alphabet, length, budget)

    found: List[LabelTuple] = []
    word = [0] * (length + 1)

    def generate(t: int, p: int):
        if t > length:
            if length % p == 0:
                found.append(tuple(word[1:]))
            return
        word[t] = word[t - p]
        generate(t + 1, p)
        for letter in range(word[t - p] + 1, alphabet):
            word[t] = letter
            generate(t + 1, t)

    generate(1, 1)
    if exclude_constant:
        found = [t for t in found if not is_constant(t)]
    logger.debug(f"necklaces({alphabet}, {length}, exclude_constant={exclude_constant}): {len(found)}")
    return tuple(found)
