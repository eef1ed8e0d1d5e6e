"""
Truncated multivariate power series in z_1..z_r with rational coefficients.

An MSeries keeps every monomial of total degree <= cutoff; absent
exponents are zero. In the Bargmann picture z^m stands for sqrt(m!)|m>,
so a state with amplitude c_m on |m> is stored as c_m / sqrt(m!) and every
stored value stays rational.
"""

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable

from charlier import CharlierParams, CharlierTable
from errors import ParameterError, TruncationError
from polycore import MultiIndex, grlex_key, iter_indices


@dataclass(frozen=True, eq=False)
class MSeries:
    r: int
    cutoff: int
    coeffs: dict

    def __post_init__(self):
        if self.r < 1:
            raise ParameterError(f"r must be at least 1, got {self.r}")
        if self.cutoff < 0:
            raise ParameterError(f"cutoff must be natural, got {self.cutoff}")
        clean = {}
        for m, c in self.coeffs.items():
            m = MultiIndex(m)
            if len(m) != self.r:
                raise ParameterError(f"Exponent {tuple(m)} has length {len(m)}, expected {self.r}")
            if m.total > self.cutoff:
                raise TruncationError(f"Exponent {tuple(m)} exceeds cutoff {self.cutoff}")
            if c != 0:
                clean[m] = Fraction(c)
        object.__setattr__(self, "coeffs", clean)

    def __eq__(self, other) -> bool:
        # Coefficient-wise; the cutoff is bookkeeping, not value.
        if not isinstance(other, MSeries):
            return NotImplemented
        return self.r == other.r and self.coeffs == other.coeffs

    __hash__ = None

    def get(self, m) -> Fraction:
        return self.coeffs.get(MultiIndex(m), Fraction(0))

    def terms(self) -> list[tuple[MultiIndex, Fraction]]:
        return sorted(self.coeffs.items(), key=lambda item: grlex_key(item[0]))

    @property
    def max_degree(self) -> int:
        return max((m.total for m in self.coeffs), default=-1)

    def __add__(self, other: "MSeries") -> "MSeries":
        return series_add(self, other)

    def __sub__(self, other: "MSeries") -> "MSeries":
        return series_sub(self, other)

    def __neg__(self) -> "MSeries":
        return series_scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, MSeries):
            return series_mul(self, other)
        if isinstance(other, (int, Fraction)):
            return series_scale(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return series_scale(self, other)
        return NotImplemented


def _collect(r: int, cutoff: int, items: Iterable[tuple]) -> MSeries:
    """Accumulate (exponent, coefficient) pairs, discarding everything above the cutoff."""
    acc = defaultdict(Fraction)
    for m, c in items:
        if sum(m) <= cutoff:
            acc[m] += c
    return MSeries(r, cutoff, acc)


def _same_r(a: MSeries, b: MSeries) -> None:
    if a.r != b.r:
        raise ParameterError(f"Series dimensions differ: r={a.r} vs r={b.r}")


# ============================================================================
# Builders
# ============================================================================

def zero_series(r: int, cutoff: int) -> MSeries:
    return MSeries(r, cutoff, {})


def monomial(m, r: int, cutoff: int, c=1) -> MSeries:
    m = MultiIndex(m)
    if m.total > cutoff:
        raise TruncationError(f"Monomial {tuple(m)} exceeds cutoff {cutoff}")
    return MSeries(r, cutoff, {m: c})


def constant_series(c, r: int, cutoff: int) -> MSeries:
    return monomial(MultiIndex.zero(r), r, cutoff, c)


def linear_form(c: Iterable, const, r: int, cutoff: int) -> MSeries:
    """const + sum_j c_j z_j."""
    items = [(MultiIndex.zero(r), Fraction(const))]
    items += [(MultiIndex.unit(j, r), Fraction(cj)) for j, cj in enumerate(c, start=1)]
    return _collect(r, cutoff, items)


def exp_linear(c: Iterable, cutoff: int) -> MSeries:
    """Truncated exp(sum_j c_j z_j): coefficient of z^m is prod_j c_j^{m_j} / m_j!."""
    c = [Fraction(x) for x in c]
    r = len(c)
    coeffs = {}
    for m in iter_indices(r, cutoff):
        value = Fraction(1)
        for cj, mj in zip(c, m):
            value *= cj ** mj / factorial(mj)
        coeffs[m] = value
    return MSeries(r, cutoff, coeffs)


# ============================================================================
# Arithmetic
# ============================================================================

def series_add(a: MSeries, b: MSeries) -> MSeries:
    _same_r(a, b)
    return _collect(a.r, min(a.cutoff, b.cutoff), list(a.coeffs.items()) + list(b.coeffs.items()))


def series_scale(a: MSeries, c) -> MSeries:
    c = Fraction(c)
    return MSeries(a.r, a.cutoff, {m: c * v for m, v in a.coeffs.items()})


def series_sub(a: MSeries, b: MSeries) -> MSeries:
    return series_add(a, series_scale(b, -1))


def series_mul(a: MSeries, b: MSeries) -> MSeries:
    """Cauchy product; terms above min(cutoff_a, cutoff_b) are discarded."""
    _same_r(a, b)
    cutoff = min(a.cutoff, b.cutoff)
    acc = defaultdict(Fraction)
    b_terms = [(m, m.total, c) for m, c in b.coeffs.items()]
    for ma, ca in a.coeffs.items():
        da = ma.total
        if da > cutoff:
            continue
        for mb, db, cb in b_terms:
            if da + db <= cutoff:
                acc[tuple(x + y for x, y in zip(ma, mb))] += ca * cb
    return MSeries(a.r, cutoff, acc)


def series_pow(f: MSeries, k: int) -> MSeries:
    if k < 0:
        raise ParameterError(f"Exponent must be natural, got {k}")
    result = constant_series(1, f.r, f.cutoff)
    for _ in range(k):
        result = series_mul(result, f)
    return result


def derivative(f: MSeries, i: int) -> MSeries:
    """d/dz_i. The top shell of the result is unreliable when f is a truncated infinite series."""
    if not 1 <= i <= f.r:
        raise ParameterError(f"Direction {i} out of range 1..{f.r}")
    items = [(m.minus(i), c * m[i - 1]) for m, c in f.coeffs.items() if m[i - 1]]
    return _collect(f.r, f.cutoff, items)


def mul_var(f: MSeries, i: int) -> MSeries:
    """z_i * f, truncated."""
    if not 1 <= i <= f.r:
        raise ParameterError(f"Direction {i} out of range 1..{f.r}")
    return _collect(f.r, f.cutoff, [(m.plus(i), c) for m, c in f.coeffs.items()])


def shift_var(f: MSeries, i: int) -> MSeries:
    """Substitute z_i -> z_i + 1. Exact: total degree never increases."""
    if not 1 <= i <= f.r:
        raise ParameterError(f"Direction {i} out of range 1..{f.r}")
    items = []
    for m, c in f.coeffs.items():
        mi = m[i - 1]
        for t in range(mi + 1):
            items.append((m[: i - 1] + (t,) + m[i:], c * comb(mi, t)))
    return _collect(f.r, f.cutoff, items)


def coeff(f: MSeries, m) -> Fraction:
    """Stored coefficient; an exponent above the cutoff was truncated away, not zero."""
    m = MultiIndex(m)
    if len(m) != f.r:
        raise ParameterError(f"Exponent {tuple(m)} has length {len(m)}, expected {f.r}")
    if m.total > f.cutoff:
        raise TruncationError(f"Exponent {tuple(m)} is above cutoff {f.cutoff}")
    return f.get(m)


# ============================================================================
# Generating function
# ============================================================================

def gen_lhs(k: int, params: CharlierParams, cutoff: int) -> MSeries:
    """exp(-sigma.z) (1 + z_1 + ... + z_r)^k; [z^n] equals C_n(k) / n!."""
    r = params.r
    weights = exp_linear([-s for s in params.sigma], cutoff)
    return series_mul(weights, series_pow(linear_form([1] * r, 1, r, cutoff), k))


def check_generating_function(table: CharlierTable, kmax: int, cutoff: int | None = None) -> dict:
    """n! [z^n] gen_lhs(k) equals the table entry at k, for all k <= kmax."""
    cutoff = table.max_total_degree if cutoff is None else cutoff
    failures, checked = [], 0
    for k in range(kmax + 1):
        series = gen_lhs(k, table.params, cutoff)
        for n in table.indices():
            if n.total > cutoff:
                continue
            value = n.factorial() * coeff(series, n)
            expected = table[n].evaluate(k)
            checked += 1
            if value != expected:
                failures.append({"index": list(n), "k": k, "lhs": str(value), "rhs": str(expected)})
    return {"check": "genfunc", "pass": not failures, "checked": checked, "failures": failures}
