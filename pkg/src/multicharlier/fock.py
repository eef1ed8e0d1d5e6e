"""
Bargmann-representation operator engine.

a_i = d/dz_i and a_i^+ = z_i act on truncated MSeries. Operators are
linear composition trees (FockOp) over a handful of primitives. Every
identity is checked under a guard band: coefficients of total degree above
the interior degree are never compared, because truncation corrupts
exactly the top shells an operator reads from or writes into.

Irrational scalars (e^{-sigma_i}, r^{-k/2}, 1/sqrt(k!)) are never
represented. States are unnormalized representatives:

    w_k = (z_1 + ... + z_r)^k          stands for |k>*
    u_k = e^{-sigma.z} (1 + sum z)^k   stands for |k>>

and square-root statements are checked in squared or rationalized form.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial

from charlier import CharlierParams, CharlierTable, monic_charlier
from errors import ParameterError, TruncationError, VerificationError
from polycore import grlex_key, iter_indices, iter_shell
from series import (
    MSeries,
    coeff,
    derivative,
    exp_linear,
    linear_form,
    monomial,
    mul_var,
    series_add,
    series_mul,
    series_pow,
    series_scale,
    shift_var,
    zero_series,
)

logger = logging.getLogger("multicharlier.fock")


# ============================================================================
# Operators
# ============================================================================

@dataclass(frozen=True, eq=False)
class FockOp:
    """Linear operator on MSeries, stored as a composition tree.

    kind is one of "diff", "mulz", "series", "scalar", "add", "compose".
    `net` is the largest net change of total degree along any path,
    raising_degree floors it at 0, lowering_depth counts derivatives along
    the worst path (the guard band needed on a truncated infinite series).
    """

    r: int
    kind: str
    arg: object = None
    children: tuple = ()
    net: int = 0
    lowering_depth: int = 0

    @property
    def raising_degree(self) -> int:
        return max(0, self.net)

    def apply(self, f: MSeries) -> MSeries:
        if f.r != self.r:
            raise ParameterError(f"Operator acts on r={self.r}, series has r={f.r}")
        if self.kind == "diff":
            return derivative(f, self.arg)
        if self.kind == "mulz":
            return mul_var(f, self.arg)
        if self.kind == "scalar":
            return series_scale(f, self.arg)
        if self.kind == "series":
            return series_mul(self.arg, f)
        if self.kind == "add":
            result = zero_series(f.r, f.cutoff)
            for child in self.children:
                result = series_add(result, child.apply(f))
            return result
        outer, inner = self.children
        return outer.apply(inner.apply(f))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = scalar_op(other, self.r)
        if not isinstance(other, FockOp):
            return NotImplemented
        _same_r(self, other)
        return FockOp(
            self.r,
            "add",
            children=(self, other),
            net=max(self.net, other.net),
            lowering_depth=max(self.lowering_depth, other.lowering_depth),
        )

    __radd__ = __add__

    def __neg__(self) -> "FockOp":
        return scalar_op(-1, self.r) @ self

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = scalar_op(other, self.r)
        return self + (-other)

    def __rmul__(self, c):
        if not isinstance(c, (int, Fraction)):
            return NotImplemented
        return scalar_op(c, self.r) @ self

    def __matmul__(self, other: "FockOp") -> "FockOp":
        """self @ other applies other first."""
        _same_r(self, other)
        return FockOp(
            self.r,
            "compose",
            children=(self, other),
            net=self.net + other.net,
            lowering_depth=self.lowering_depth + other.lowering_depth,
        )


def _same_r(a: FockOp, b: FockOp) -> None:
    if a.r != b.r:
        raise ParameterError(f"Operators act on different r: {a.r} vs {b.r}")


def _check_direction(i: int, r: int) -> None:
    if not 1 <= i <= r:
        raise ParameterError(f"Direction {i} out of range 1..{r}")


def annihilate(i: int, r: int) -> FockOp:
    _check_direction(i, r)
    return FockOp(r, "diff", arg=i, net=-1, lowering_depth=1)


def create(i: int, r: int) -> FockOp:
    _check_direction(i, r)
    return FockOp(r, "mulz", arg=i, net=1)


def scalar_op(c, r: int) -> FockOp:
    return FockOp(r, "scalar", arg=Fraction(c))


def series_factor(f: MSeries) -> FockOp:
    return FockOp(f.r, "series", arg=f, net=max(0, f.max_degree))


def number(i: int, r: int) -> FockOp:
    return create(i, r) @ annihilate(i, r)


def commutator(a: FockOp, b: FockOp) -> FockOp:
    return a @ b - b @ a


def _total(ops: list) -> FockOp:
    result = ops[0]
    for op in ops[1:]:
        result = result + op
    return result


def h0(r: int) -> FockOp:
    return _total([number(j, r) for j in range(1, r + 1)])


def make_hamiltonian(i: int, params: CharlierParams) -> FockOp:
    """H_i = sum_j z_j d_j + sum_j sigma_j z_j + d_i + sigma_i."""
    r = params.r
    _check_direction(i, r)
    terms = [number(j, r) for j in range(1, r + 1)]
    terms += [params.sigma_of(j) * create(j, r) for j in range(1, r + 1)]
    terms += [annihilate(i, r), scalar_op(params.sigma_of(i), r)]
    return _total(terms)


def make_lowering(j: int, params: CharlierParams) -> FockOp:
    """X_j = a_j + sigma_j."""
    return annihilate(j, params.r) + params.sigma_of(j)


def make_raising(r: int) -> FockOp:
    """Y = a_1^+ + ... + a_r^+ + 1."""
    return _total([create(j, r) for j in range(1, r + 1)]) + 1


def make_symmetry(i: int, j: int, params: CharlierParams) -> FockOp:
    """R_ij = Y (a_i + sigma_i - a_j - sigma_j)."""
    r = params.r
    shift = annihilate(i, r) - annihilate(j, r) + (params.sigma_of(i) - params.sigma_of(j))
    return make_raising(r) @ shift


# ============================================================================
# States
# ============================================================================

def state_w(k: int, r: int, cutoff: int) -> MSeries:
    """(z_1 + ... + z_r)^k, the unnormalized |k>*."""
    if k > cutoff:
        raise TruncationError(f"state_w({k}) does not fit under cutoff {cutoff}")
    kf = factorial(k)
    return MSeries(r, cutoff, {m: Fraction(kf, m.factorial()) for m in iter_shell(r, k)})


def apply_S_projective(i: int, f: MSeries, params: CharlierParams) -> MSeries:
    """exp(-sigma.z) * f(z_i -> z_i + 1); the scalar e^{-sigma_1} is dropped."""
    if f.r != params.r:
        raise ParameterError(f"Series has r={f.r}, params have r={params.r}")
    return series_mul(exp_linear([-s for s in params.sigma], f.cutoff), shift_var(f, i))


def state_u(k: int, params: CharlierParams, cutoff: int) -> MSeries:
    """Unnormalized |k>>: [z^n] equals C_n(k) / n!."""
    return apply_S_projective(1, state_w(k, params.r, cutoff), params)


def bargmann_norm_sq(f: MSeries) -> Fraction:
    """<f|f> with <z^m|z^m> = m_1! ... m_r!."""
    return sum((c * c * m.factorial() for m, c in f.coeffs.items()), Fraction(0))


# ============================================================================
# Interior-exact comparison
# ============================================================================

@dataclass
class InteriorReport:
    check: str
    params: dict
    cutoff: int
    interior_degree: int
    max_residual_degree_checked: int = -1
    probes: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def compare(self, lhs: MSeries, rhs: MSeries, probe: str, degree: int | None = None) -> None:
        """Record every coefficient of total degree <= degree where lhs and rhs differ."""
        degree = self.interior_degree if degree is None else degree
        self.probes += 1
        top = min(degree, max(lhs.max_degree, rhs.max_degree))
        self.max_residual_degree_checked = max(self.max_residual_degree_checked, top)
        exponents = sorted(
            (m for m in set(lhs.coeffs) | set(rhs.coeffs) if m.total <= degree),
            key=grlex_key,
        )
        for m in exponents:
            if lhs.get(m) != rhs.get(m):
                self.failures.append({
                    "exp": list(m),
                    "lhs": str(lhs.get(m)),
                    "rhs": str(rhs.get(m)),
                    "probe": probe,
                })

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "cutoff": self.cutoff,
            "interior_degree": self.interior_degree,
            "max_residual_degree_checked": self.max_residual_degree_checked,
            "probes": self.probes,
            "pass": self.passed,
            "failures": self.failures,
        }


def _params_dict(params: CharlierParams, **extra) -> dict:
    return {**params.to_dict(), **extra}


def _require_cutoff(cutoff: int, guard: int, check: str) -> int:
    interior = cutoff - guard
    if interior < 0:
        raise ParameterError(f"{check} needs cutoff >= {guard}, got {cutoff}")
    return interior


def _monomials(r: int, max_degree: int, cutoff: int):
    for m in iter_indices(r, max_degree):
        yield m, monomial(m, r, cutoff)


def check_canonical(r: int, cutoff: int) -> InteriorReport:
    """[a_i, a_j^+] = delta_ij on every monomial of degree <= cutoff - 1."""
    interior = _require_cutoff(cutoff, 1, "check_canonical")
    report = InteriorReport("canonical", {"r": r}, cutoff, interior)
    for i in range(1, r + 1):
        for j in range(1, r + 1):
            op = commutator(annihilate(i, r), create(j, r))
            for m, f in _monomials(r, interior, cutoff):
                expected = f if i == j else zero_series(r, cutoff)
                report.compare(op.apply(f), expected, f"[a_{i},a+_{j}] z^{tuple(m)}")
    return report


def check_number_operator(r: int, cutoff: int) -> InteriorReport:
    """z_i d_i z^m = m_i z^m for every stored monomial."""
    report = InteriorReport("number", {"r": r}, cutoff, cutoff)
    for i in range(1, r + 1):
        op = number(i, r)
        for m, f in _monomials(r, cutoff, cutoff):
            report.compare(op.apply(f), series_scale(f, m[i - 1]), f"N_{i} z^{tuple(m)}")
    return report


def check_commutator_HH(i: int, j: int, params: CharlierParams, cutoff: int, k_list=None) -> InteriorReport:
    """[H_i, H_j] = a_i - a_j + (sigma_i - sigma_j), and it annihilates u_k."""
    interior = _require_cutoff(cutoff, 2, "check_commutator_HH")
    r = params.r
    bracket = commutator(make_hamiltonian(i, params), make_hamiltonian(j, params))
    expected_op = annihilate(i, r) - annihilate(j, r) + (params.sigma_of(i) - params.sigma_of(j))
    report = InteriorReport("commutator_HH", _params_dict(params, i=i, j=j), cutoff, interior)
    for m, f in _monomials(r, interior, cutoff):
        report.compare(bracket.apply(f), expected_op.apply(f), f"z^{tuple(m)}")
    zero = zero_series(r, cutoff)
    for k in (range(interior + 1) if k_list is None else k_list):
        u = state_u(k, params, cutoff)
        report.compare(bracket.apply(u), zero, f"[H_{i},H_{j}] u_{k}")
        report.compare(expected_op.apply(u), zero, f"(a_{i}-a_{j}+s) u_{k}", degree=cutoff - 1)
    logger.debug(f"commutator_HH({i},{j}): {report.probes} probes, {len(report.failures)} failures")
    return report


def check_eigen(i: int, k: int, params: CharlierParams, cutoff: int) -> InteriorReport:
    """H_i u_k = k u_k below the top shell."""
    if k > cutoff - 1:
        raise ParameterError(f"check_eigen needs k <= cutoff - 1, got k={k}, cutoff={cutoff}")
    report = InteriorReport("eigen", _params_dict(params, i=i, k=k), cutoff, cutoff - 1)
    u = state_u(k, params, cutoff)
    report.compare(make_hamiltonian(i, params).apply(u), series_scale(u, k), f"H_{i} u_{k}")
    return report


def check_similarity(i: int, params: CharlierParams, cutoff: int) -> InteriorReport:
    """H_i S_i f = S_i H_0 f on every monomial of degree <= cutoff - 2."""
    interior = _require_cutoff(cutoff, 2, "check_similarity")
    hamiltonian, free = make_hamiltonian(i, params), h0(params.r)
    report = InteriorReport("similarity", _params_dict(params, i=i), cutoff, interior)
    for m, f in _monomials(params.r, interior, cutoff):
        lhs = hamiltonian.apply(apply_S_projective(i, f, params))
        rhs = apply_S_projective(i, free.apply(f), params)
        report.compare(lhs, rhs, f"z^{tuple(m)}")
    return report


def check_ladder_X(j: int, k: int, params: CharlierParams, cutoff: int) -> InteriorReport:
    """(a_j + sigma_j) u_k = k u_{k-1}."""
    if not 1 <= k <= cutoff:
        raise ParameterError(f"check_ladder_X needs 1 <= k <= cutoff, got k={k}, cutoff={cutoff}")
    report = InteriorReport("ladder_X", _params_dict(params, j=j, k=k), cutoff, cutoff - 1)
    lhs = make_lowering(j, params).apply(state_u(k, params, cutoff))
    report.compare(lhs, series_scale(state_u(k - 1, params, cutoff), k), f"X_{j} u_{k}")
    return report


def check_ladder_Y(k: int, params: CharlierParams, cutoff: int) -> InteriorReport:
    """(a_1^+ + ... + a_r^+ + 1) u_k = u_{k+1}."""
    if k + 1 > cutoff:
        raise ParameterError(f"check_ladder_Y needs k + 1 <= cutoff, got k={k}, cutoff={cutoff}")
    report = InteriorReport("ladder_Y", _params_dict(params, k=k), cutoff, cutoff - 1)
    lhs = make_raising(params.r).apply(state_u(k, params, cutoff))
    report.compare(lhs, state_u(k + 1, params, cutoff), f"Y u_{k}")
    return report


def check_R(i: int, j: int, k_list, params: CharlierParams, cutoff: int, seed: int = 0, max_pairs: int = 9) -> InteriorReport:
    """R_ij annihilates u_k, commutes with every H_m and with every R_kl.

    Sub-assertions use guard bands 2, 3 and 4; interior_degree reports the
    strictest one. When there are more than max_pairs involution pairs a
    seeded sample is checked.
    """
    _require_cutoff(cutoff, 4, "check_R")
    r = params.r
    symmetry = make_symmetry(i, j, params)
    report = InteriorReport("R", _params_dict(params, i=i, j=j), cutoff, cutoff - 4)
    zero = zero_series(r, cutoff)

    for k in k_list:
        report.compare(symmetry.apply(state_u(k, params, cutoff)), zero, f"R_{i}{j} u_{k}", degree=cutoff - 2)

    for m in range(1, r + 1):
        bracket = commutator(make_hamiltonian(m, params), symmetry)
        for e, f in _monomials(r, cutoff - 3, cutoff):
            report.compare(bracket.apply(f), zero, f"[H_{m},R_{i}{j}] z^{tuple(e)}", degree=cutoff - 3)

    pairs = list(combinations(range(1, r + 1), 2))
    if len(pairs) > max_pairs:
        pairs = sorted(random.Random(seed).sample(pairs, max_pairs))
    for k, l in pairs:
        bracket = commutator(symmetry, make_symmetry(k, l, params))
        for e, f in _monomials(r, cutoff - 4, cutoff):
            report.compare(bracket.apply(f), zero, f"[R_{i}{j},R_{k}{l}] z^{tuple(e)}", degree=cutoff - 4)

    logger.debug(f"R({i},{j}): {report.probes} probes over {len(pairs)} involution pairs")
    return report


def check_state_symmetry(r: int, cutoff: int) -> InteriorReport:
    """(a_i - a_j) w_k = 0, a_i w_k = k w_{k-1}, (sum z) w_k = w_{k+1}; all exact."""
    report = InteriorReport("state_symmetry", {"r": r}, cutoff, cutoff)
    zero = zero_series(r, cutoff)
    total_z = linear_form([1] * r, 0, r, cutoff)
    for k in range(cutoff + 1):
        w = state_w(k, r, cutoff)
        for i, j in combinations(range(1, r + 1), 2):
            diff = series_add(derivative(w, i), series_scale(derivative(w, j), -1))
            report.compare(diff, zero, f"(a_{i}-a_{j}) w_{k}")
        if k >= 1:
            lower = series_scale(state_w(k - 1, r, cutoff), k)
            for i in range(1, r + 1):
                report.compare(derivative(w, i), lower, f"a_{i} w_{k}")
        if k + 1 <= cutoff:
            report.compare(series_mul(total_z, w), state_w(k + 1, r, cutoff), f"(sum z) w_{k}")
    return report


def check_S_independence(params: CharlierParams, cutoff: int) -> InteriorReport:
    """S_i w_k does not depend on i (gamma_i absorbed into dropped scalars)."""
    report = InteriorReport("S_independence", params.to_dict(), cutoff, cutoff)
    for k in range(cutoff + 1):
        w = state_w(k, params.r, cutoff)
        reference = apply_S_projective(1, w, params)
        for i in range(2, params.r + 1):
            report.compare(apply_S_projective(i, w, params), reference, f"S_{i} w_{k}")
    return report


def check_state_table_agreement(table: CharlierTable, cutoff: int, kmax: int) -> dict:
    """n! [z^n] u_k equals the table entry at k."""
    failures, checked = [], 0
    for k in range(min(kmax, cutoff) + 1):
        u = state_u(k, table.params, cutoff)
        for n in table.indices():
            if n.total > cutoff:
                continue
            value = n.factorial() * coeff(u, n)
            expected = table[n].evaluate(k)
            checked += 1
            if value != expected:
                failures.append({"index": list(n), "k": k, "lhs": str(value), "rhs": str(expected)})
    return {"check": "states", "pass": not failures, "checked": checked, "failures": failures}


def check_norm_bookkeeping(r: int, kmax: int) -> dict:
    """Squared-norm forms of the |k>* normalization and ladder constants."""
    cutoff = kmax + 1
    norms = [bargmann_norm_sq(state_w(k, r, cutoff)) for k in range(cutoff + 1)]
    failures = []

    def expect(name: str, k: int, value: Fraction, target: Fraction) -> None:
        if value != target:
            failures.append({"relation": name, "k": k, "value": str(value), "expected": str(target)})

    for k in range(kmax + 1):
        expect("norm_sq", k, norms[k], Fraction(factorial(k) * r ** k))
        if k >= 1:
            expect("lowering", k, k * k * norms[k - 1] / norms[k], Fraction(k, r))
        expect("raising", k, norms[k + 1] / norms[k], Fraction(r * (k + 1)))
    return {"check": "norms", "r": r, "pass": not failures, "checked": 3 * kmax + 2, "failures": failures}


# ============================================================================
# Matrix elements of e^{-sigma a^+} e^{a} (single mode)
# ============================================================================

def psi_rationalized(n: int, k: int, sigma1, cutoff: int) -> Fraction:
    """phi_{n,k} = k! [z^k] e^{-sigma z}(1+z)^n = sqrt(n! k!) psi_{n,k}.

    Raises VerificationError unless phi_{n,k} = (-sigma)^{k-n} p_n(k).
    """
    sigma1 = Fraction(sigma1)
    if sigma1 == 0:
        raise ParameterError("psi_rationalized requires sigma1 != 0")
    if max(n, k) > cutoff:
        raise ParameterError(f"psi_rationalized needs max(n, k) <= cutoff, got n={n}, k={k}, cutoff={cutoff}")
    series = series_mul(exp_linear([-sigma1], cutoff), series_pow(linear_form([1], 1, 1, cutoff), n))
    phi = factorial(k) * coeff(series, (k,))
    closed = (-sigma1) ** (k - n) * monic_charlier(n, sigma1).evaluate(k)
    if phi != closed:
        raise VerificationError(f"phi_{n},{k} = {phi} but (-sigma)^(k-n) p_n(k) = {closed}")
    return phi


def check_psi(nmax: int, kmax: int, sigma1) -> dict:
    """Closed form, initial value and rationalized recurrence

        k phi_{n,k} = (n + sigma) phi_{n,k} - n phi_{n-1,k} - sigma phi_{n+1,k}
    """
    sigma1 = Fraction(sigma1)
    cutoff = max(nmax + 1, kmax)
    failures = []
    phi = {}
    for n in range(nmax + 2):
        for k in range(kmax + 1):
            try:
                phi[n, k] = psi_rationalized(n, k, sigma1, cutoff)
            except VerificationError as e:
                failures.append({"relation": "closed_form", "n": n, "k": k, "message": str(e)})
    if not failures:
        for k in range(kmax + 1):
            if phi[0, k] != (-sigma1) ** k:
                failures.append({"relation": "initial", "n": 0, "k": k, "value": str(phi[0, k])})
            for n in range(nmax + 1):
                lhs = k * phi[n, k]
                rhs = (n + sigma1) * phi[n, k] - sigma1 * phi[n + 1, k]
                if n:
                    rhs -= n * phi[n - 1, k]
                if lhs != rhs:
                    failures.append({"relation": "recurrence", "n": n, "k": k, "lhs": str(lhs), "rhs": str(rhs)})
    return {
        "check": "psi",
        "sigma1": str(sigma1),
        "pass": not failures,
        "checked": (nmax + 2) * (kmax + 1),
        "failures": failures,
    }
