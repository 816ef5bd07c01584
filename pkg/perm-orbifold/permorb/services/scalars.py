"""
Scalars Service
Exact rationals, rational phases mod 1 and high-precision complex numbers
"""

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterator, Union

from loguru import logger
from mpmath import mp, mpc, mpf

from ..errors import InputError

Rational = Fraction
ComplexHP = mpc

MIN_PRECISION = 50
DEFAULT_PRECISION = 60
DEFAULT_TOLERANCE = 1e-30


@contextmanager
def precision_scope(digits: int) -> Iterator[int]:
    """Run a block at `digits` decimal digits, restoring the previous mpmath precision after."""
    if digits < MIN_PRECISION:
        raise InputError(f"Working precision must be at least {MIN_PRECISION} digits", detail=f"got {digits}")
    saved = mp.dps
    mp.dps = digits
    try:
        yield digits
    finally:
        mp.dps = saved


@dataclass(frozen=True, order=True)
class Phase:
    """A rational multiple of a full turn, e^{2 pi i value}, kept reduced into [0, 1)."""

    value: Fraction = Fraction(0)

    def __post_init__(self):
        reduced = self.value - (self.value.numerator // self.value.denominator)
        object.__setattr__(self, "value", reduced)

    @classmethod
    def of(cls, q: Union[Fraction, int]) -> "Phase":
        return cls(Fraction(q))

    def __add__(self, other: "Phase") -> "Phase":
        return Phase(self.value + other.value)

    def __sub__(self, other: "Phase") -> "Phase":
        return Phase(self.value - other.value)

    def __neg__(self) -> "Phase":
        return Phase(-self.value)

    def times(self, n: int) -> "Phase":
        return Phase(self.value * n)

    def is_zero(self) -> bool:
        return self.value == 0

    def __str__(self) -> str:
        return format_rational(self.value)


def make_phase(numer: int, denom: int) -> Phase:
    """
    Exact phase numer/denom mod 1
    """
    if denom == 0:
        raise InputError("Phase denominator must be nonzero", detail=f"{numer}/{denom}")
    return Phase(Fraction(numer, denom))


def phase_to_complex(phi: Phase) -> mpc:
    """e^{2 pi i phi} at the current working precision, exact at multiples of a quarter turn."""
    v = phi.value
    if (v * 4).denominator == 1:
        quarter = int(v * 4)
        return [mpc(1, 0), mpc(0, 1), mpc(-1, 0), mpc(0, -1)][quarter]
    angle = mpf(2 * v.numerator) / v.denominator
    return mpc(mp.cospi(angle), mp.sinpi(angle))


def approx_eq(a, b, tol: float) -> bool:
    """
    Compare two scalars by absolute difference
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    return mp.fabs(mpc(a) - mpc(b)) <= tol


def parse_rational(text: Union[str, int, Fraction], what: str = "value") -> Fraction:
    """Parse "p/q" or "n"; non-reduced input is accepted with a warning."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    raw = str(text).strip()
    try:
        if "/" in raw:
            p_text, q_text = raw.split("/", 1)
            p, q = int(p_text), int(q_text)
            if q == 0:
                raise InputError(f"Zero denominator in {what}", detail=raw)
            if gcd(p, q) != 1 or q < 0:
                logger.warning(f"Non-reduced rational {raw} for {what}, using {Fraction(p, q)}")
            return Fraction(p, q)
        return Fraction(int(raw))
    except ValueError as e:
        raise InputError(f"Malformed rational for {what}", detail=raw) from e


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def complex_to_json(z) -> Dict[str, str]:
    z = mpc(z)
    return {"re": mp.nstr(z.real, mp.dps), "im": mp.nstr(z.imag, mp.dps)}


def complex_from_json(entry: Dict[str, str]) -> mpc:
    try:
        return mpc(mpf(entry["re"]), mpf(entry["im"]))
    except (KeyError, ValueError, TypeError) as e:
        raise InputError("Malformed complex entry", detail=str(entry)) from e
