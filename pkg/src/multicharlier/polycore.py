"""
Exact scalar and univariate-polynomial arithmetic.

Rationals are fractions.Fraction, which normalizes after every operation,
so equality of coefficients is plain ==. Polynomials are dense tuples of
Fraction indexed by the power of the spectral variable k. All values are
immutable and safe to share between threads.
"""

import operator
import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Iterator

from errors import ConfigError, ParameterError

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:/(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or "p" (decimal integers, optional leading minus).

    Decimal points and exponents are rejected on purpose: they would let an
    inexact value into an exact pipeline.
    """
    match = _RATIONAL_RE.match(text)
    if not match:
        raise ConfigError(f"Not an exact rational: {text!r} (expected 'p/q' or 'p')")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise ConfigError(f"Zero denominator in {text!r}")
    return Fraction(numerator, denominator)


def format_rational(value) -> str:
    return str(Fraction(value))


def pochhammer(a, m: int) -> Fraction:
    """Rising factorial (a)_m = a(a+1)...(a+m-1); 1 for m = 0."""
    if m < 0:
        raise ParameterError(f"Pochhammer length must be natural, got {m}")
    result = Fraction(1)
    for t in range(m):
        result *= a + t
    return result


def max_bit_length(values: Iterable[Fraction]) -> int:
    """Peak numerator+denominator bit length over a collection of rationals."""
    peak = 0
    for value in values:
        q = Fraction(value)
        peak = max(peak, abs(q.numerator).bit_length() + q.denominator.bit_length())
    return peak


# ============================================================================
# Multi-indices
# ============================================================================

class MultiIndex(tuple):
    """Lattice index / exponent vector (n_1, ..., n_r).

    Subclasses tuple so it hashes and compares like the plain tuple; series
    coefficient maps can be probed with either. Directions are 1-based.
    """

    def __new__(cls, entries: Iterable[int]):
        try:
            values = tuple(operator.index(e) for e in entries)
        except TypeError:
            raise ParameterError(f"Multi-index entries must be integers: {entries!r}") from None
        if any(e < 0 for e in values):
            raise ParameterError(f"Multi-index entries must be natural: {values}")
        return super().__new__(cls, values)

    @classmethod
    def zero(cls, r: int) -> "MultiIndex":
        return cls((0,) * r)

    @classmethod
    def unit(cls, j: int, r: int) -> "MultiIndex":
        return cls.zero(r).plus(j)

    @property
    def r(self) -> int:
        return len(self)

    @property
    def total(self) -> int:
        return sum(self)

    def plus(self, j: int) -> "MultiIndex":
        if not 1 <= j <= len(self):
            raise ParameterError(f"Direction {j} out of range 1..{len(self)}")
        entries = list(self)
        entries[j - 1] += 1
        return MultiIndex(entries)

    def minus(self, j: int) -> "MultiIndex":
        if not 1 <= j <= len(self):
            raise ParameterError(f"Direction {j} out of range 1..{len(self)}")
        if self[j - 1] == 0:
            raise ParameterError(f"Cannot step below zero in direction {j} from {tuple(self)}")
        entries = list(self)
        entries[j - 1] -= 1
        return MultiIndex(entries)

    def factorial(self) -> int:
        result = 1
        for e in self:
            result *= factorial(e)
        return result

    def __repr__(self) -> str:
        return f"MultiIndex({tuple(self)})"


def grlex_key(index) -> tuple:
    """Total degree ascending, then lexicographically descending within a shell."""
    return (sum(index), tuple(-e for e in index))


def iter_shell(r: int, m: int) -> Iterator[MultiIndex]:
    """All indices of length r and total m, in graded-lex order."""
    if r == 1:
        yield MultiIndex((m,))
        return
    for first in range(m, -1, -1):
        for rest in iter_shell(r - 1, m - first):
            yield MultiIndex((first,) + tuple(rest))


def iter_indices(r: int, max_total: int) -> Iterator[MultiIndex]:
    for m in range(max_total + 1):
        yield from iter_shell(r, m)


# ============================================================================
# e^{sigma}-scaled scalars
# ============================================================================

@dataclass(frozen=True, eq=False)
class ScaledScalar:
    """Exact value mantissa * exp(sum_j exponents[j] * sigma_j)."""

    mantissa: Fraction
    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mantissa", Fraction(self.mantissa))
        object.__setattr__(self, "exponents", tuple(int(c) for c in self.exponents))

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    def _check_compatible(self, other: "ScaledScalar") -> None:
        if len(self.exponents) != len(other.exponents):
            raise ParameterError(
                f"Exponent vectors differ in length: {len(self.exponents)} vs {len(other.exponents)}"
            )

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScaledScalar):
            return NotImplemented
        if self.is_zero and other.is_zero:
            return True
        return self.mantissa == other.mantissa and self.exponents == other.exponents

    def __hash__(self) -> int:
        if self.is_zero:
            return hash(0)
        return hash((self.mantissa, self.exponents))

    def __mul__(self, other):
        if isinstance(other, ScaledScalar):
            self._check_compatible(other)
            return ScaledScalar(
                self.mantissa * other.mantissa,
                tuple(a + b for a, b in zip(self.exponents, other.exponents)),
            )
        if isinstance(other, (int, Fraction)):
            return ScaledScalar(self.mantissa * other, self.exponents)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScaledScalar):
            self._check_compatible(other)
            return ScaledScalar(
                self.mantissa / other.mantissa,
                tuple(a - b for a, b in zip(self.exponents, other.exponents)),
            )
        if isinstance(other, (int, Fraction)):
            return ScaledScalar(self.mantissa / other, self.exponents)
        return NotImplemented

    def __str__(self) -> str:
        terms = []
        for j, c in enumerate(self.exponents, start=1):
            if c == 0:
                continue
            terms.append(f"sigma_{j}" if c == 1 else f"{c}*sigma_{j}")
        if not terms or self.is_zero:
            return str(self.mantissa)
        return f"{self.mantissa}*exp({' + '.join(terms)})".replace("+ -", "- ")

    def to_dict(self) -> dict:
        return {"mantissa": str(self.mantissa), "exponents": list(self.exponents)}


def _unit_vector(j: int, r: int, scale: int = 1) -> tuple[int, ...]:
    if not 1 <= j <= r:
        raise ParameterError(f"Direction {j} out of range 1..{r}")
    return tuple(scale if t == j - 1 else 0 for t in range(r))


def poisson_mass(j: int, r: int) -> ScaledScalar:
    """Total mass e^{sigma_j} of the j-th Poisson weight."""
    return ScaledScalar(1, _unit_vector(j, r))


def gamma_factor(i: int, r: int) -> ScaledScalar:
    """gamma_i = e^{sigma_1 - sigma_i}, the ratio between S_i|k>* and S_1|k>*."""
    exps = [a + b for a, b in zip(_unit_vector(1, r), _unit_vector(i, r, -1))]
    return ScaledScalar(1, tuple(exps))


def vacuum_amplitude(r: int) -> ScaledScalar:
    """N_0 = <0|S_1|0> = e^{-sigma_1}."""
    return ScaledScalar(1, _unit_vector(1, r, -1))


# ============================================================================
# Univariate polynomials in k
# ============================================================================

def _strip(coeffs: Iterable) -> tuple[Fraction, ...]:
    values = [Fraction(c) for c in coeffs]
    while values and values[-1] == 0:
        values.pop()
    return tuple(values)


@dataclass(frozen=True)
class UniPoly:
    """Dense polynomial sum_i coeffs[i] * k**i with trailing zeros stripped."""

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(self.coeffs))

    @classmethod
    def constant(cls, c) -> "UniPoly":
        return cls((c,))

    @classmethod
    def variable(cls) -> "UniPoly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_monic(self) -> bool:
        return self.leading == 1

    def coeff(self, power: int) -> Fraction:
        return self.coeffs[power] if 0 <= power < len(self.coeffs) else Fraction(0)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UniPoly.constant(other)
        if not isinstance(other, UniPoly):
            return NotImplemented
        size = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self.coeff(i) + other.coeff(i) for i in range(size))

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UniPoly.constant(other)
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, UniPoly):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "UniPoly":
        c = Fraction(c)
        return UniPoly(c * a for a in self.coeffs)

    def evaluate(self, k0) -> Fraction:
        """Horner evaluation at an exact point."""
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * k0 + c
        return result

    def shift(self, s: int) -> "UniPoly":
        return unipoly_shift(self, s)

    def to_strings(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for power in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[power]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if power == 0:
                body = str(mag)
            else:
                mono = "k" if power == 1 else f"k^{power}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def unipoly_shift(p: UniPoly, s: int) -> UniPoly:
    """q(k) = p(k + s), by binomial expansion."""
    out = [Fraction(0)] * len(p.coeffs)
    for i, a in enumerate(p.coeffs):
        if a == 0:
            continue
        for t in range(i + 1):
            out[t] += a * comb(i, t) * Fraction(s) ** (i - t)
    return UniPoly(out)


def falling_factorial_poly(m: int) -> UniPoly:
    """k(k-1)...(k-m+1) as a polynomial in k."""
    result = UniPoly.constant(1)
    for t in range(m):
        result = result * UniPoly((-t, 1))
    return result


def neg_pochhammer_poly(m: int) -> UniPoly:
    """(-k)_m = (-k)(-k+1)...(-k+m-1) as a polynomial in k."""
    result = UniPoly.constant(1)
    for t in range(m):
        result = result * UniPoly((t, -1))
    return result


def to_falling_factorial(p: UniPoly) -> list[Fraction]:
    """Coefficients c_m with p(k) = sum_m c_m k(k-1)...(k-m+1).

    Uses forward differences at 0: c_m = (Delta^m p)(0) / m!.
    """
    if p.is_zero:
        return []
    row = [p.evaluate(t) for t in range(p.degree + 1)]
    out = []
    for m in range(p.degree + 1):
        out.append(row[0] / factorial(m))
        row = [b - a for a, b in zip(row, row[1:])]
    while out and out[-1] == 0:
        out.pop()
    return out


def from_falling_factorial(coeffs: Iterable) -> UniPoly:
    result = UniPoly()
    for m, c in enumerate(coeffs):
        if c != 0:
            result = result + falling_factorial_poly(m).scale(c)
    return result
