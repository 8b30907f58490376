from fractions import Fraction

import pytest

from tce_dynamics.bifurcation import (
    bracket_index,
    compute_bifurcation_sequences,
    endpoint_hitting_report,
    is_bifurcation_point,
    verify_bifurcation_equivalence,
)
from tce_dynamics.cf import cf_expand, convergents, golden_lambda
from tce_dynamics.iet import first_hitting, g_orbit
from tce_dynamics.numeric import PHI, GoldenRational

ELL = Fraction(3, 10)


def test_sequences_for_phi():
    s = compute_bifurcation_sequences(PHI, 4)
    assert s.k_prime == (2, 5, 13, 34)
    assert s.k_double == (1, 3, 8, 21)
    assert s.s_prime[:2] == (PHI ** 2, PHI ** 4)
    assert s.s_double[:3] == (PHI, PHI ** 3, PHI ** 5)
    assert g_orbit(PHI, GoldenRational(1, 0), 8)[8] == 1 + PHI ** 5
    with pytest.raises(ValueError):
        compute_bifurcation_sequences(PHI, 0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_hit_indices_are_convergent_sums(k):
    lam = golden_lambda(k)
    s = compute_bifurcation_sequences(lam, 6)
    conv = convergents(cf_expand(lam, 14).coeffs)
    for n in range(6):
        assert s.k_double[n] == sum(conv[2 * n])
        assert s.k_prime[n] == sum(conv[2 * n + 1])


def test_bifurcation_point_examples():
    assert is_bifurcation_point(PHI, PHI ** 2, "right")
    assert is_bifurcation_point(PHI, PHI, "left")
    assert not is_bifurcation_point(PHI, ELL, "right")
    assert not is_bifurcation_point(PHI, ELL, "left")
    with pytest.raises(ValueError):
        is_bifurcation_point(PHI, ELL, "up")


@pytest.mark.parametrize("k,N", [(1, 12), (3, 8)])
def test_bifurcation_equivalence_rows(k, N):
    rep = verify_bifurcation_equivalence(k, N)
    assert rep["ok"]
    assert len(rep["rows"]) == N


def test_bifurcation_equivalence_general_route():
    rep = verify_bifurcation_equivalence(None, 8, lam=golden_lambda(2))
    assert rep["ok"]


def test_bifurcation_equivalence_vacuous():
    rep = verify_bifurcation_equivalence(1, 0)
    assert rep["ok"] and rep["rows"] == []


def test_endpoint_example():
    rep = endpoint_hitting_report(PHI, ELL, k=1)
    assert rep.ok
    assert (rep.n1, rep.n2) == (0, 0)
    assert rep.r_right == 1 + ELL - PHI ** 4 and rep.n_right == 5
    assert rep.r_left == 1 + PHI ** 3 and rep.n_left == 3


def test_endpoint_exact_gamma():
    rep = endpoint_hitting_report(PHI, PHI ** 4, k=1)
    assert rep.ok
    assert rep.r_right == 1


@pytest.mark.parametrize("ell", [PHI, PHI ** 2, Fraction(1, 7), Fraction(1, 50), PHI ** 9, Fraction(3, 5)])
def test_endpoint_general_route(ell):
    assert endpoint_hitting_report(PHI, ell).ok


def test_bracket_index():
    vals = [Fraction(1, 2 ** n) for n in range(10)]
    assert bracket_index(vals, 2) == -1
    assert bracket_index(vals, Fraction(1, 3)) == 1
    assert bracket_index(vals, Fraction(1, 4)) == 1
    with pytest.raises(ValueError):
        bracket_index(vals, Fraction(1, 10 ** 6))


def test_hitting_times_monotone_on_grid():
    seqs = compute_bifurcation_sequences(PHI, 8)
    grid = [Fraction(i, 400) for i in range(1, 248)]  # up to 0.6175 < phi
    prev_l = prev_r = None
    for ell in grid:
        nl = first_hitting(PHI, ell, GoldenRational(1, 0))[0]
        nr = first_hitting(PHI, ell, 1 + ell)[0]
        if prev_l is not None:
            assert nl <= prev_l[1] and nr <= prev_r[1]
            # strict drops happen only across a bifurcation value
            if nl < prev_l[1]:
                assert any(prev_l[0] < s <= ell for s in seqs.s_double)
            if nr < prev_r[1]:
                assert any(prev_r[0] < s <= ell for s in seqs.s_prime)
        prev_l, prev_r = (ell, nl), (ell, nr)


def test_bifurcation_iff_in_prefix():
    seqs = compute_bifurcation_sequences(PHI, 6)
    lo = seqs.s_prime[-1]
    for i in range(1, 198):
        ell = Fraction(i, 320)
        if ell <= lo:
            continue
        assert is_bifurcation_point(PHI, ell, "right") == (ell in seqs.s_prime)
    for s in seqs.s_prime:
        assert is_bifurcation_point(PHI, s, "right")
    for s in seqs.s_double:
        assert is_bifurcation_point(PHI, s, "left")
