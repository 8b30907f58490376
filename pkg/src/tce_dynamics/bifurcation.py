"""
Bifurcation values of ell -> r_ell by direct orbit simulation of g.

The records of the orbit of 1 approaching 1 from below give the right
bifurcation values s'_n, and records from above give the left ones s''_n.
The index sequences k'_n, k''_n are the hitting times at which the records
are set.
"""
from __future__ import annotations

from dataclasses import dataclass

from .cf import GammaTable, cf_expand, gamma_closed_form, gamma_sequences
from .iet import DEFAULT_CAP, CapExceeded, first_hitting

__all__ = [
    "BifurcationSequences",
    "compute_bifurcation_sequences",
    "is_bifurcation_point",
    "verify_bifurcation_equivalence",
    "EndpointReport",
    "endpoint_hitting_report",
    "bracket_index",
]


@dataclass(frozen=True)
class BifurcationSequences:
    lam: object
    s_prime: tuple     # s'_0, s'_1, ...
    k_prime: tuple     # k'_0, k'_1, ...
    s_double: tuple    # s''_0 = lam, s''_1, ...
    k_double: tuple    # k''_0 = 1, k''_1, ...


def compute_bifurcation_sequences(lam, N: int, cap: int = DEFAULT_CAP) -> BifurcationSequences:
    """
    First N terms of (s'_n, k'_n) and (s''_n, k''_n).

    k'_0 = l1 + 1 and k'_n is the first time g^k(1) lands strictly between
    g^{k'_{n-1}}(1) and 1; k''_n is the first time g^k(1) lands strictly
    between 1 and g^{k''_{n-1}}(1), starting from k''_0 = 1, g(1) = 1 + lam.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    l1 = cf_expand(lam, 1).coeffs[1]
    one = lam * 0 + 1
    x = one
    kp, sp, kd, sd = [], [], [], []
    rec_below = None
    rec_above = None
    k = 0
    while len(kp) < N or len(kd) < N:
        if k >= cap:
            raise CapExceeded("bifurcation records not complete within %d steps" % cap, cap)
        x = x + lam if x <= one else x - one
        k += 1
        if len(kp) < N:
            if k == l1 + 1:
                rec_below = x
                kp.append(k)
                sp.append(one - x)
            elif rec_below is not None and rec_below < x < one:
                rec_below = x
                kp.append(k)
                sp.append(one - x)
        if len(kd) < N:
            if k == 1:
                rec_above = x
                kd.append(k)
                sd.append(x - one)
            elif one < x < rec_above:
                rec_above = x
                kd.append(k)
                sd.append(x - one)
    return BifurcationSequences(lam, tuple(sp), tuple(kp), tuple(sd), tuple(kd))


def is_bifurcation_point(lam, ell, side: str, cap: int = DEFAULT_CAP) -> bool:
    """Right: r_ell(1 + ell) = 1.  Left: r_ell(1) = 1 + ell."""
    if side == "right":
        return first_hitting(lam, ell, 1 + ell, cap)[1] == 1
    if side == "left":
        return first_hitting(lam, ell, lam * 0 + 1, cap)[1] == 1 + ell
    raise ValueError("side must be 'right' or 'left'")


def verify_bifurcation_equivalence(k: int | None, N: int, lam=None, cap: int = DEFAULT_CAP, check_points: bool = True):
    """
    Compare the orbit records with the semiconvergent errors, term by term.

    Returns a dict of per-term rows.  With ``check_points`` each record is
    also confirmed as a bifurcation value by an independent g_ell orbit.
    """
    if lam is None:
        from .cf import golden_lambda
        lam = golden_lambda(k)
    if N == 0:
        return {"rows": [], "k_prime_increasing": True, "k_double_increasing": True, "ok": True}
    seqs = compute_bifurcation_sequences(lam, N, cap)
    if k is not None:
        gp = [gamma_closed_form(k, n, "prime") for n in range(N)]
        gd = [gamma_closed_form(k, n, "double") for n in range(N)]
    else:
        gs = gamma_sequences(lam, N)
        gp, gd = list(gs.prime), list(gs.double)
    rows = []
    for n in range(N):
        row = {
            "n": n,
            "lambda_prime": seqs.s_prime[n],
            "gamma_prime": gp[n],
            "k_prime": seqs.k_prime[n],
            "lambda_double": seqs.s_double[n],
            "gamma_double": gd[n],
            "k_double": seqs.k_double[n],
        }
        row["equal"] = seqs.s_prime[n] == gp[n] and seqs.s_double[n] == gd[n]
        if check_points:
            row["right_point"] = is_bifurcation_point(lam, seqs.s_prime[n], "right", cap)
            row["left_point"] = is_bifurcation_point(lam, seqs.s_double[n], "left", cap)
        rows.append(row)
    inc_p = all(a < b for a, b in zip(seqs.k_prime, seqs.k_prime[1:]))
    inc_d = all(a < b for a, b in zip(seqs.k_double, seqs.k_double[1:]))
    ok = all(r["equal"] for r in rows) and inc_p and inc_d
    if check_points:
        ok = ok and all(r["right_point"] and r["left_point"] for r in rows)
    return {"rows": rows, "k_prime_increasing": inc_p, "k_double_increasing": inc_d, "ok": ok}


def bracket_index(values, ell) -> int:
    """
    The n >= -1 with values[n+1] <= ell < values[n], values[-1] read as +inf.

    ``values`` is decreasing and must reach below ell.
    """
    for n in range(-1, len(values) - 1):
        upper_ok = n == -1 or ell < values[n]
        if upper_ok and values[n + 1] <= ell:
            return n
    raise ValueError("too few terms to bracket ell")


@dataclass(frozen=True)
class EndpointReport:
    ell: object
    r_right: object          # r_ell(1 + ell)
    n_right: int
    r_left: object           # r_ell(1)
    n_left: int
    n1: int
    n2: int
    predicted_r_right: object
    predicted_n_right: int
    predicted_r_left: object
    predicted_n_left: int

    @property
    def ok(self) -> bool:
        return (
            self.r_right == self.predicted_r_right
            and self.n_right == self.predicted_n_right
            and self.r_left == self.predicted_r_left
            and self.n_left == self.predicted_n_left
        )


def endpoint_hitting_report(lam, ell, k: int | None = None, cap: int = DEFAULT_CAP,
                            seqs: BifurcationSequences | None = None) -> EndpointReport:
    """
    Simulated r_ell(1 + ell), r_ell(1) and hitting times next to the values
    predicted from the bracketing G'_{n1+1} <= ell < G'_{n1} and
    G''_{n2+1} <= ell < G''_{n2}.
    """
    n_right, r_right = first_hitting(lam, ell, 1 + ell, cap)
    n_left, r_left = first_hitting(lam, ell, lam * 0 + 1, cap)
    table = GammaTable(lam, k=k, exact=True)
    n1 = _bracket_from_table(table.prime, ell)
    n2 = _bracket_from_table(table.double, ell)
    need = max(n1, n2) + 2
    if seqs is None or len(seqs.k_prime) < need:
        seqs = compute_bifurcation_sequences(lam, need, cap)
    return EndpointReport(
        ell, r_right, n_right, r_left, n_left, n1, n2,
        1 + ell - table.prime(n1 + 1), seqs.k_prime[n1 + 1],
        1 + table.double(n2 + 1), seqs.k_double[n2 + 1],
    )


def _bracket_from_table(get, ell) -> int:
    n = -1
    while not get(n + 1) <= ell:
        n += 1
    return n
