from fractions import Fraction

import pytest

from charlier import build_table
from errors import ParameterError, TruncationError
from fock import (
    InteriorReport,
    annihilate,
    apply_S_projective,
    bargmann_norm_sq,
    check_canonical,
    check_commutator_HH,
    check_eigen,
    check_ladder_X,
    check_ladder_Y,
    check_norm_bookkeeping,
    check_number_operator,
    check_psi,
    check_R,
    check_S_independence,
    check_similarity,
    check_state_symmetry,
    check_state_table_agreement,
    commutator,
    create,
    h0,
    make_hamiltonian,
    make_raising,
    make_symmetry,
    psi_rationalized,
    state_u,
    state_w,
)
from polycore import iter_indices
from series import MSeries, constant_series, monomial, series_scale


def test_operator_degree_bookkeeping(params_12):
    """Test raising degree and lowering depth of the model operators."""
    h = make_hamiltonian(1, params_12)
    assert h.raising_degree == 1
    assert h.lowering_depth == 1
    assert (h @ h).raising_degree == 2
    assert make_symmetry(1, 2, params_12).raising_degree == 1
    assert annihilate(1, 2).raising_degree == 0
    assert commutator(annihilate(1, 2), create(1, 2)).lowering_depth == 1


def test_hamiltonian_on_vacuum(params_12):
    """Test H_1 1 = sigma_1 z_1 + sigma_2 z_2 + sigma_1."""
    out = make_hamiltonian(1, params_12).apply(constant_series(1, 2, 3))
    assert out == MSeries(2, 3, {(0, 0): 1, (1, 0): 1, (0, 1): 2})


def test_h0_counts_total_degree():
    f = monomial((2, 1), 2, 4)
    assert h0(2).apply(f) == series_scale(f, 3)


def test_operator_algebra():
    """Test +, -, scalar * and @ act linearly."""
    f = monomial((1, 1), 2, 4)
    a1, c2 = annihilate(1, 2), create(2, 2)
    assert (a1 + c2).apply(f) == monomial((0, 1), 2, 4) + monomial((1, 2), 2, 4)
    assert (a1 - a1).apply(f) == MSeries(2, 4, {})
    assert (3 * a1).apply(f) == monomial((0, 1), 2, 4, 3)
    assert (c2 @ a1).apply(f) == monomial((0, 2), 2, 4)
    assert (make_raising(2) + Fraction(-1)).apply(constant_series(1, 2, 2)) == monomial((1, 0), 2, 2) + monomial((0, 1), 2, 2)


def test_operator_rejects_other_dimension():
    with pytest.raises(ParameterError):
        annihilate(1, 2).apply(monomial((1,), 1, 2))
    with pytest.raises(ParameterError):
        annihilate(3, 2)
    with pytest.raises(ParameterError):
        annihilate(1, 2) + annihilate(1, 3)


def test_state_w():
    """Test (z_1 + z_2)^2 and its squared norm 2! * 2^2."""
    w = state_w(2, 2, 3)
    assert w == MSeries(2, 3, {(2, 0): 1, (1, 1): 2, (0, 2): 1})
    assert bargmann_norm_sq(w) == 8
    with pytest.raises(TruncationError):
        state_w(4, 2, 3)


def test_state_u_coefficients_are_table_values(params_12):
    """Test n! [z^n] u_k = C_n(k)."""
    table = build_table(params_12, 4)
    u = state_u(3, params_12, 4)
    for n in table.indices():
        assert n.factorial() * u.get(n) == table[n].evaluate(3)
    assert check_state_table_agreement(table, 4, 4)["pass"]


def test_S_projective_on_vacuum(params_12):
    """Test S_i 1 = exp(-sigma.z) for every i."""
    one = constant_series(1, 2, 3)
    assert apply_S_projective(1, one, params_12) == apply_S_projective(2, one, params_12)
    assert check_S_independence(params_12, 4).passed


def test_canonical_and_number():
    assert check_canonical(2, 4).passed
    assert check_canonical(3, 3).passed
    assert check_number_operator(3, 3).passed
    assert check_state_symmetry(3, 4).passed


def test_commutator_HH(params_12, params_r3):
    """Test [H_i, H_j] = a_i - a_j + sigma_i - sigma_j and on-shell annihilation."""
    report = check_commutator_HH(1, 2, params_12, 5)
    assert report.passed
    assert report.interior_degree == 3
    assert report.probes > 0
    assert check_commutator_HH(2, 3, params_r3, 4).passed


def test_eigen_relation(params_12, params_r3):
    """Test H_i u_k = k u_k below the top shell."""
    for i in (1, 2):
        for k in range(5):
            assert check_eigen(i, k, params_12, 5).passed
    assert check_eigen(3, 2, params_r3, 4).passed
    with pytest.raises(ParameterError):
        check_eigen(1, 5, params_12, 5)


def test_eigen_top_shell_is_unreliable(params_12):
    """Test the guard band is needed: comparing at degree D picks up truncation damage."""
    D = 4
    u = state_u(1, params_12, D)
    report = InteriorReport("eigen", params_12.to_dict(), D, D)
    report.compare(make_hamiltonian(1, params_12).apply(u), series_scale(u, 1), "top shell")
    assert not report.passed
    assert all(sum(f["exp"]) == D for f in report.failures)


def test_similarity(params_default, params_r3):
    assert check_similarity(1, params_default, 5).passed
    assert check_similarity(2, params_default, 5).passed
    assert check_similarity(3, params_r3, 4).passed


def test_ladders(params_default):
    """Test X_j u_k = k u_{k-1} and Y u_k = u_{k+1}."""
    for j in (1, 2):
        for k in range(1, 6):
            assert check_ladder_X(j, k, params_default, 6).passed
    for k in range(6):
        assert check_ladder_Y(k, params_default, 6).passed
    with pytest.raises(ParameterError):
        check_ladder_X(1, 0, params_default, 6)
    with pytest.raises(ParameterError):
        check_ladder_Y(6, params_default, 6)


def test_symmetry_operator(params_12):
    """Test R_12 annihilates u_k and commutes with both Hamiltonians."""
    report = check_R(1, 2, [0, 1, 2, 3], params_12, 6)
    assert report.passed
    assert report.interior_degree == 2
    with pytest.raises(ParameterError):
        check_R(1, 2, [0], params_12, 3)


def test_symmetry_operator_three_directions(params_r3):
    assert check_R(1, 3, [0, 1, 2], params_r3, 5, seed=3, max_pairs=2).passed


def test_symmetry_operators_r12_r13_commute(params_r3):
    """Test [R_12, R_13] vanishes through degree 4 on every monomial of degree <= 3 at cutoff 8."""
    bracket = commutator(make_symmetry(1, 2, params_r3), make_symmetry(1, 3, params_r3))
    for e in iter_indices(3, 3):
        image = bracket.apply(monomial(e, 3, 8))
        assert [m for m, c in image.coeffs.items() if m.total <= 4] == [], e


def test_check_r_covers_every_pair_for_three_directions(params_r3):
    """Test r = 3 has three involution pairs, all checked under the default sample size."""
    report = check_R(1, 2, [0, 1], params_r3, 8)
    assert report.passed
    assert report.interior_degree == 4


def test_report_dict_shape(params_12):
    data = check_eigen(1, 1, params_12, 3).to_dict()
    assert data["check"] == "eigen"
    assert data["pass"] is True
    assert data["cutoff"] == 3
    assert data["interior_degree"] == 2
    assert data["failures"] == []


def test_norm_bookkeeping():
    """Test squared-norm identities for k <= 8 and r <= 3."""
    for r in (1, 2, 3):
        assert check_norm_bookkeeping(r, 8)["pass"]


def test_psi_closed_form():
    """Test phi_{0,k} = (-sigma)^k and phi_{1,0} = 1."""
    s = Fraction(1, 2)
    assert psi_rationalized(0, 3, s, 3) == (-s) ** 3
    assert psi_rationalized(1, 0, 1, 1) == 1
    assert psi_rationalized(2, 2, 3, 2) == -1
    with pytest.raises(ParameterError):
        psi_rationalized(1, 1, 0, 2)
    with pytest.raises(ParameterError):
        psi_rationalized(4, 1, 1, 3)


@pytest.mark.parametrize("sigma", [Fraction(1, 2), Fraction(1), Fraction(3)])
def test_psi_recurrence(sigma):
    assert check_psi(10, 10, sigma)["pass"]
