from fractions import Fraction

import pytest

from tce_dynamics.cf import (
    GammaTable,
    cf_expand,
    convergents,
    fibonacci,
    gamma_closed_form,
    gamma_sequences,
    golden_eta,
    golden_index,
    golden_lambda,
    intermediate_fraction,
    semiconvergents,
)
from tce_dynamics.numeric import PHI, GoldenRational


def test_expansions():
    assert cf_expand(PHI, 10).coeffs == (0,) + (1,) * 10
    assert cf_expand(golden_lambda(2), 8).coeffs == (0, 2) + (1,) * 7
    half = cf_expand(Fraction(1, 2), 10)
    assert half.coeffs == (0, 2) and half.terminated
    for k in range(1, 6):
        exp = cf_expand(golden_lambda(k), 12)
        assert exp.coeffs[:2] == (0, k) and set(exp.coeffs[2:]) == {1}
        assert not exp.terminated


def test_golden_lambda_identities():
    assert golden_lambda(1) == PHI
    assert golden_lambda(2) == PHI ** 2 == 1 - PHI
    for k in range(1, 6):
        assert golden_eta(k) == golden_lambda(k) * PHI
        assert golden_index(golden_lambda(k), golden_eta(k)) == k
    assert golden_index(PHI, PHI ** 3) is None
    assert golden_index(0.618, 0.38) is None


@pytest.mark.parametrize("k", range(1, 6))
def test_convergents_are_fibonacci(k):
    conv = convergents(cf_expand(golden_lambda(k), 20).coeffs)
    assert conv[0] == (0, 1)
    for n, (p, q) in enumerate(conv):
        assert p == fibonacci(n)
        assert q == fibonacci(n) * k + fibonacci(n - 1)


def test_convergent_example():
    assert convergents(cf_expand(PHI, 5).coeffs)[3] == (2, 3)


def test_intermediate_fraction():
    coeffs = cf_expand(golden_lambda(3), 6).coeffs
    # [0; 3, 2] = 1/(3 + 1/2) = 2/7
    assert intermediate_fraction(coeffs, 1, 2) == Fraction(2, 7)


def test_semiconvergents_small():
    up, low = semiconvergents(cf_expand(PHI, 8).coeffs)
    assert up[0] == (1, 1)
    assert low[:2] == [(0, 1), (1, 2)]
    up2, low2 = semiconvergents(cf_expand(golden_lambda(2), 8).coeffs)
    # [0; 1] then [0; 2]
    assert up2[:2] == [(1, 1), (1, 2)]
    assert low2[0] == (0, 1)
    for p, q in up + up2:
        assert Fraction(p, q) > (PHI if (p, q) in up else golden_lambda(2))
    with pytest.raises(ValueError):
        semiconvergents((1, 2))


def test_gamma_examples():
    assert gamma_closed_form(1, 0, "prime") == PHI ** 2
    assert gamma_closed_form(1, 1, "double") == PHI ** 3
    assert gamma_closed_form(2, 0, "double") == PHI ** 2
    gs = gamma_sequences(PHI, 3)
    assert gs.double[0] == PHI and gs.prime[0] == PHI ** 2 and gs.double[1] == PHI ** 3
    with pytest.raises(ValueError):
        gamma_closed_form(1, 0, "other")


@pytest.mark.parametrize("k", range(1, 6))
def test_general_route_equals_closed_form(k):
    N = 21
    gs = gamma_sequences(golden_lambda(k), N)
    for n in range(N):
        assert gs.prime[n] == gamma_closed_form(k, n, "prime")
        assert gs.double[n] == gamma_closed_form(k, n, "double")
    for n in range(2 * N):
        assert gs.merged[n] == gamma_closed_form(k, n, "merged")
        half = gs.prime[(n - 1) // 2] if n % 2 else gs.double[n // 2]
        assert gs.merged[n] == half


@pytest.mark.parametrize("k", range(1, 6))
def test_fibonacci_identities(k):
    lam = golden_lambda(k)
    F = fibonacci
    for n in range(21):
        assert lam * PHI ** (2 * n + 1) == F(2 * n + 1) - (F(2 * n + 1) * k + F(2 * n)) * lam
        assert lam * PHI ** (2 * n) == (F(2 * n) * k + F(2 * n - 1)) * lam - F(2 * n)


@pytest.mark.parametrize("lam", [PHI, golden_lambda(3), GoldenRational(Fraction(1, 3), Fraction(1, 5))])
def test_sequences_monotone_and_merged(lam):
    gs = gamma_sequences(lam, 12)
    for seq in (gs.prime, gs.double, gs.merged):
        assert all(v > 0 for v in seq)
        assert all(a > b for a, b in zip(seq, seq[1:]))
    assert sorted(gs.prime + gs.double, reverse=True) == list(gs.merged)


@pytest.mark.parametrize("lam", [PHI, golden_lambda(2), golden_lambda(4)])
def test_best_approximation_from_above(lam):
    up, _ = semiconvergents(cf_expand(lam, 20).coeffs)
    for p, q in up:
        if q > 50:
            break
        err = p - q * lam
        for b in range(1, q + 1):
            for a in range(0, b + 1):
                if (a, b) == (p, q) or Fraction(a, b) == Fraction(p, q):
                    continue
                e = a - b * lam
                if e > 0:
                    assert e > err


def test_fibonacci_values():
    assert [fibonacci(n) for n in range(-1, 8)] == [1, 0, 1, 1, 2, 3, 5, 8, 13]
    with pytest.raises(ValueError):
        fibonacci(-2)


@pytest.mark.parametrize("k", [None, 1, 3])
def test_first_below_matches_scan(k):
    lam = PHI if k in (None, 1) else golden_lambda(k)
    table = GammaTable(lam, k=k, exact=True)
    ref = gamma_sequences(lam, 40)
    for ell in [Fraction(1, 2), Fraction(3, 10), Fraction(1, 997), Fraction(1, 10 ** 6), PHI ** 7, PHI ** 12]:
        for which, seq in (("prime", ref.prime), ("double", ref.double)):
            expect = next(n for n, v in enumerate(seq) if v < ell)
            assert table.first_below(which, ell) == expect
    with pytest.raises(ValueError):
        table.first_below("prime", 0)


def test_float_table_close_to_exact():
    table = GammaTable(PHI, k=1)
    for n in range(30):
        assert table.prime(n) == float(gamma_closed_form(1, n, "prime"))
