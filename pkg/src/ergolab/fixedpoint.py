"""Exact circle arithmetic in 64-bit fixed point.

A point on the circle [0, 1) is stored as an unsigned 64-bit integer u,
standing for u / 2^64.  Addition wraps exactly; n*alpha is the low 64 bits
of the integer product, so orbits of rotations never drift.  Irrational
angles are quantized to the nearest multiple of 2^-64 at construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

U64 = 1 << 64
MASK = U64 - 1


@dataclass(frozen=True)
class CirclePoint:
    """A circle point u/2^64 with exact wrap-around arithmetic."""

    frac: int

    def __post_init__(self):
        if not 0 <= self.frac < U64:
            raise ValueError("frac out of u64 range")

    def advance(self, other: "CirclePoint", n: int = 1) -> "CirclePoint":
        """self + n*other, exact mod 1."""
        if n < 0:
            raise ValueError("n must be >= 0")
        return CirclePoint((self.frac + n * other.frac) & MASK)

    def scale(self, k: int) -> "CirclePoint":
        """k*self mod 1 for any integer k (negative allowed)."""
        return CirclePoint((k * self.frac) & MASK)

    def negate(self) -> "CirclePoint":
        return CirclePoint((-self.frac) & MASK)

    def to_float(self) -> float:
        return self.frac / U64

    def decimal(self, digits: int = 24) -> str:
        q = Fraction(self.frac, U64)
        scaled = q * 10**digits
        return f"0.{int(scaled):0{digits}d}"

    def as_json(self) -> dict:
        return {"u64": str(self.frac), "decimal": self.decimal()}


def from_fraction(q) -> CirclePoint:
    """Quantize a rational (or anything Fraction accepts) to fixed point."""
    q = Fraction(q)
    q -= q.__floor__()
    u = round(q * U64) % U64
    return CirclePoint(u)


def from_float(x: float) -> CirclePoint:
    return from_fraction(Fraction(x))


def from_any(spec) -> CirclePoint:
    """Accept a CirclePoint, float, decimal string, {'u64': ...}, [p, q],
    or the named constants 'golden' / 'sqrt2'."""
    if isinstance(spec, CirclePoint):
        return spec
    if isinstance(spec, dict):
        if "u64" in spec:
            return CirclePoint(int(spec["u64"]) % U64)
        raise ValueError(f"bad circle point spec {spec!r}")
    if isinstance(spec, str):
        name = spec.strip().lower()
        if name == "golden":
            return GOLDEN
        if name == "sqrt2":
            return SQRT2M1
        return from_fraction(Fraction(spec))
    if isinstance(spec, (list, tuple)) and len(spec) == 2:
        return from_fraction(Fraction(int(spec[0]), int(spec[1])))
    if isinstance(spec, (int, float)):
        return from_fraction(Fraction(spec))
    raise ValueError(f"bad circle point spec {spec!r}")


def _quantized_sqrt_frac(radicand: int, shift: int, denom: int = 1) -> int:
    """Nearest-u64 quantization of (sqrt(radicand) - shift) / denom."""

    def at_bits(bits):
        s = isqrt(radicand << (2 * bits))
        return round(Fraction(s - (shift << bits), denom << bits) * U64) % U64

    a, b = at_bits(96), at_bits(160)
    if a != b:  # would mean the value sits on a rounding boundary
        raise AssertionError("sqrt quantization ambiguous")
    return a


# (sqrt(5)-1)/2 and sqrt(2)-1, the two pinned irrational angles
GOLDEN = CirclePoint(_quantized_sqrt_frac(5, 1, 2))
SQRT2M1 = CirclePoint(_quantized_sqrt_frac(2, 1))
