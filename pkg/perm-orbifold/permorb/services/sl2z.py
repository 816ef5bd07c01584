"""
SL2Z Service
Integer SL(2,Z) matrices, Bezout witnesses, generator words and evaluation of the
modular representation rho on arbitrary group elements
"""

from dataclasses import dataclass
from math import gcd
from typing import Dict, List, Optional, Tuple

from loguru import logger
from mpmath import mp

from ..errors import InputError
from .modular_data import ModularData, t_matrix
from .scalars import phase_to_complex


@dataclass(frozen=True)
class SL2ZMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.det() != 1:
            raise ValueError(f"Not in SL(2,Z): {self.rows()} has determinant {self.det()}")

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def rows(self) -> List[List[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def __matmul__(self, other: "SL2ZMatrix") -> "SL2ZMatrix":
        return SL2ZMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "SL2ZMatrix":
        return SL2ZMatrix(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "SL2ZMatrix":
        return SL2ZMatrix(self.d, -self.b, -self.c, self.a)

    def to_dict(self) -> Dict[str, int]:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}

    @classmethod
    def identity(cls) -> "SL2ZMatrix":
        return cls(1, 0, 0, 1)

    @classmethod
    def s(cls) -> "SL2ZMatrix":
        return cls(0, -1, 1, 0)

    @classmethod
    def t(cls, power: int = 1) -> "SL2ZMatrix":
        return cls(1, power, 0, 1)


@dataclass(frozen=True)
class GeneratorWord:
    """Product of syllables ("S", 1) or ("T", n) read left to right, times -I when negate is set."""

    syllables: Tuple[Tuple[str, int], ...]
    negate: bool = False

    def to_matrix(self) -> SL2ZMatrix:
        result = SL2ZMatrix.identity()
        for name, power in self.syllables:
            step = SL2ZMatrix.t(power) if name == "T" else _s_power(power)
            result = result @ step
        return -result if self.negate else result

    def __len__(self) -> int:
        return len(self.syllables)

    def __str__(self) -> str:
        body = " ".join(name if (name, power) == ("S", 1) else f"{name}^{power}" for name, power in self.syllables)
        return f"-({body or 'I'})" if self.negate else (body or "I")


def _s_power(power: int) -> SL2ZMatrix:
    result = SL2ZMatrix.identity()
    for _ in range(power % 4):
        result = result @ SL2ZMatrix.s()
    return result


def extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def bezout_x(s: int, k: int) -> Tuple[int, int]:
    """Smallest x >= 0 with s*x = gcd(s, k) mod k, and y with s*x + k*y = gcd(s, k).

    s = 0 gives (0, 1) under the convention gcd(0, k) = k.
    """
    if k <= 0:
        raise InputError("k must be positive", detail=str(k))
    d = gcd(s, k)
    _, x, _ = extended_gcd(s, k)
    x %= k // d
    y = (d - s * x) // k
    return x, y


def build_A(r: int, s: int, k: int, witnesses: Optional[Tuple[int, int, int, int]] = None) -> SL2ZMatrix:
    """The matrix of the twisted-twisted S-entry, assembled from the cycle constants of (s, r).

    `witnesses` = (x, y, p, q) replaces the minimal Bezout solutions sx + ky = d, rp + kq = d1.
    """
    if not (0 <= r < k and 0 <= s < k):
        raise InputError("build_A needs 0 <= r, s < k", detail=f"r={r}, s={s}, k={k}")
    d, d1 = gcd(s, k), gcd(r, k)
    f = gcd(d, r)
    l1, b = k // d1, d // f
    if witnesses is None:
        x, y = bezout_x(s, k)
        p, q = bezout_x(r, k)
    else:
        x, y, p, q = witnesses
        if s * x + k * y != d or r * p + k * q != d1:
            raise ValueError(f"Witnesses {witnesses} do not solve the Bezout identities for r={r}, s={s}, k={k}")

    def exact(numer: int, denom: int) -> int:
        quotient, remainder = divmod(numer, denom)
        if remainder:
            raise ArithmeticError(f"build_A({r}, {s}, {k}): {numer}/{denom} is not integral")
        return quotient

    return SL2ZMatrix(
        exact(l1, b),
        exact(r * x, d1),
        exact(-s * p, d),
        exact(d * q + y * d1 - y * q * k, f),
    )


def _nearest_quotient(a: int, c: int) -> int:
    q, rem = divmod(a, c)
    if 2 * abs(rem) > abs(c):
        q += 1
    return q


def decompose(gamma: SL2ZMatrix) -> GeneratorWord:
    """Write gamma as T^n1 S T^n2 S ... T^b (times -I) by a nearest-integer Euclid on the first column."""
    a, b, c, d = gamma.a, gamma.b, gamma.c, gamma.d
    syllables: List[Tuple[str, int]] = []
    while c != 0:
        n = _nearest_quotient(a, c)
        syllables.append(("T", n))
        syllables.append(("S", 1))
        a, b, c, d = c, d, -(a - n * c), -(b - n * d)
    negate = a == -1
    syllables.append(("T", -b if negate else b))
    return GeneratorWord(tuple(item for item in syllables if not (item[0] == "T" and item[1] == 0)), negate)


class ModularRepresentation:
    """rho(S) = S and rho(T) = diag e^{2 pi i (lambda - c/24)} of one ModularData, with rho(-I) = S^2."""

    def __init__(self, md: ModularData):
        self.md = md
        self.setup_generators()

    def setup_generators(self):
        self.s = self.md.s_matrix
        self.t_phases = t_matrix(self.md)
        self.s_squared = self.s * self.s
        logger.debug(f"rho generators ready for '{self.md.name}' (rank {self.md.rank})")

    def t_power(self, n: int):
        rank = self.md.rank
        m = mp.matrix(rank, rank)
        for j, phase in enumerate(self.t_phases):
            m[j, j] = phase_to_complex(phase.times(n))
        return m

    def of_word(self, word: GeneratorWord):
        result = mp.eye(self.md.rank)
        for name, power in word.syllables:
            if name == "T":
                result = result * self.t_power(power)
            else:
                for _ in range(power % 4):
                    result = result * self.s
        if word.negate:
            result = result * self.s_squared
        return result

    def evaluate(self, gamma: SL2ZMatrix):
        return self.of_word(decompose(gamma))


def rho_eval(md: ModularData, gamma: SL2ZMatrix):
    """
    Evaluate the representation of the input data on an arbitrary SL2(Z) matrix
    """
    return ModularRepresentation(md).evaluate(gamma)
