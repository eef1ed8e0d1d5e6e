from fractions import Fraction

import pytest

from charlier import (
    CharlierParams,
    build_table,
    check_backward,
    check_classical_reduction,
    check_combined_difference,
    check_compatibility,
    check_forward,
    check_method_agreement,
    check_monicity,
    check_normalization,
    check_orthogonality,
    check_path_independence,
    check_rij_polynomial,
    eval_explicit,
    inject_corruption,
    monic_charlier,
    normalization_ledger,
    poisson_functional,
    recompute_via,
)
from errors import ParameterError
from polycore import ScaledScalar, UniPoly


def test_params_validation():
    """Test that sigma must be positive, distinct and of length r."""
    with pytest.raises(ParameterError):
        CharlierParams(2, (Fraction(1), Fraction(1)))
    with pytest.raises(ParameterError):
        CharlierParams(2, (Fraction(1), Fraction(0)))
    with pytest.raises(ParameterError):
        CharlierParams(2, (Fraction(1),))
    with pytest.raises(ParameterError):
        CharlierParams(0, ())


def test_first_entries(table_12):
    """Test C_0 = 1, C_e1 = k - 1, C_e2 = k - 2 and C_(1,1) = k^2 - 4k + 2."""
    assert table_12[(0, 0)] == UniPoly.constant(1)
    assert table_12[(1, 0)] == UniPoly((-1, 1))
    assert table_12[(0, 1)] == UniPoly((-2, 1))
    assert table_12[(1, 1)] == UniPoly((2, -4, 1))
    assert table_12[(1, 1)].evaluate(3) == -1


def test_table_shape(table_12):
    """Test the table holds exactly the indices with |n| <= max and orders them graded-lex."""
    assert len(table_12.entries) == 15
    assert table_12.indices()[:4] == [(0, 0), (1, 0), (0, 1), (2, 0)]
    assert all(n.total <= 3 for n in table_12.interior())
    assert (5, 0) not in table_12
    with pytest.raises(KeyError):
        table_12[(5, 0)]


def test_with_entry_leaves_original(table_12):
    """Test replacing an entry returns a new table and keeps the source intact."""
    edited = table_12.with_entry((1, 0), UniPoly((0, 1)))
    assert edited[(1, 0)] == UniPoly((0, 1))
    assert table_12[(1, 0)] == UniPoly((-1, 1))
    assert edited.indices() == table_12.indices()


def test_zero_degree_table(params_12):
    """Test a degree-0 table is the single constant 1."""
    table = build_table(params_12, 0)
    assert list(table.entries.values()) == [UniPoly.constant(1)]


def test_negative_degree_rejected(params_12):
    with pytest.raises(ParameterError):
        build_table(params_12, -1)


def test_path_independence_on_11(table_12):
    """Test C_(1,1) is the same when raised along either direction."""
    assert recompute_via(table_12, (1, 1), 1) == recompute_via(table_12, (1, 1), 2)
    assert check_path_independence(table_12)["pass"]


def test_explicit_formula_matches_recurrence(table_12, table_r3):
    """Test the closed-form sum against the recurrence table."""
    assert eval_explicit((1, 1), table_12.params) == UniPoly((2, -4, 1))
    assert eval_explicit((0, 0), table_12.params) == UniPoly.constant(1)
    assert check_method_agreement(table_12)["pass"]
    assert check_method_agreement(table_r3)["pass"]


def test_explicit_rejects_wrong_length(params_12):
    with pytest.raises(ParameterError):
        eval_explicit((1, 1, 0), params_12)


def test_monic_charlier_low_degrees():
    """Test p_1 = k - sigma and p_2 = k^2 - (2 sigma + 1) k + sigma^2."""
    s = Fraction(1, 2)
    assert monic_charlier(0, s) == UniPoly.constant(1)
    assert monic_charlier(1, s) == UniPoly((-s, 1))
    assert monic_charlier(2, s) == UniPoly((s * s, -(2 * s + 1), 1))
    with pytest.raises(ParameterError):
        monic_charlier(2, 0)


def test_classical_reduction(params_r1, table_12):
    """Test r = 1 tables are the classical polynomials, and r > 1 is skipped."""
    table = build_table(params_r1, 10)
    assert check_classical_reduction(table)["pass"]
    assert table[(1,)].evaluate(0) == -1
    report = check_classical_reduction(table_12)
    assert report["pass"] and report["skipped"] == "r > 1"


def test_poisson_functional_of_constant(params_12):
    """Test sum_k sigma^k / k! = e^sigma as a scaled scalar."""
    value = poisson_functional(2, UniPoly.constant(1), params_12)
    assert value == ScaledScalar(1, (0, 1))


def test_orthogonality_11(table_12):
    """Test both orthogonality conditions of C_(1,1) vanish exactly."""
    report = check_orthogonality((1, 1), table_12)
    assert report["pass"]
    assert [(c["j"], c["l"]) for c in report["conditions"]] == [(1, 0), (2, 0)]
    assert all(c["mantissa"] == "0" for c in report["conditions"])


def test_orthogonality_every_entry(table_r3):
    for n in table_r3.indices():
        assert check_orthogonality(n, table_r3)["pass"], n


def test_orthogonality_of_constant_is_vacuous(table_12):
    report = check_orthogonality((0, 0), table_12)
    assert report["pass"] and report["conditions"] == []


def test_orthogonality_detects_corruption(table_12):
    """Test a +1 in the constant term of C_(1,1) yields a nonzero mantissa."""
    bad = inject_corruption(table_12, (1, 1), 0, 1)
    report = check_orthogonality((1, 1), bad)
    assert not report["pass"]
    assert any(c["mantissa"] != "0" for c in report["conditions"])


def test_polynomial_identities_hold(table_12, table_r3):
    """Test compatibility, backward, forward and combined difference relations."""
    for table in (table_12, table_r3):
        assert check_compatibility(table)["pass"]
        assert check_backward(table)["pass"]
        assert check_forward(table)["pass"]
        assert check_combined_difference(table)["pass"]
        assert check_monicity(table)["pass"]


def test_compatibility_vacuous_for_r1(params_r1):
    report = check_compatibility(build_table(params_r1, 5))
    assert report["pass"] and report["checked"] == 0


def test_backward_at_zero(table_12):
    """Test k C_0(k-1) = C_e1 + sigma_1 C_0 reduces to k = k."""
    k = UniPoly.variable()
    assert table_12[(1, 0)] + table_12[(0, 0)].scale(1) == k


def test_rij_corrected_holds_printed_variant_fails(table_12):
    """Test the corrected R_ij relation passes while the printed index placement does not."""
    report = check_rij_polynomial(table_12, 1, 2)
    assert report["pass"]
    assert report["printed_variant"]["holds"] is False
    assert report["printed_variant"]["first_violation"] == [1, 0]
    assert check_rij_polynomial(table_12, 2, 1)["pass"]


def test_rij_on_three_directions(table_r3):
    for i, j in [(1, 2), (1, 3), (2, 3), (3, 1)]:
        assert check_rij_polynomial(table_r3, i, j)["pass"]


def test_rij_requires_distinct_directions(table_12):
    with pytest.raises(ParameterError):
        check_rij_polynomial(table_12, 1, 1)


def test_corruption_breaks_identities(table_12):
    """Test that a single changed coefficient fails several checks."""
    bad = inject_corruption(table_12, (1, 1), 1, Fraction(1, 3))
    assert not check_method_agreement(bad)["pass"]
    assert not check_path_independence(bad)["pass"]
    assert not check_compatibility(bad)["pass"]
    failure = check_method_agreement(bad)["failures"][0]
    assert failure["index"] == [1, 1]


def test_corruption_of_leading_coefficient_breaks_monicity(table_12):
    bad = inject_corruption(table_12, (2, 0), 2, 1)
    report = check_monicity(bad)
    assert not report["pass"]
    assert report["failures"][0]["leading"] == "2"


def test_normalization_ledger():
    """Test N_k^2 = e^{-2 sigma_1} / (k! r^k) and the ratio N_{k-1}^2 / N_k^2 = r k."""
    ledger = normalization_ledger(2, 3)
    assert ledger.n_sq == ScaledScalar(Fraction(1, 18), (-2, 0, 0))
    assert check_normalization(3, 8)["pass"]
    with pytest.raises(ParameterError):
        normalization_ledger(-1, 2)
