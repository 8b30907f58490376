"""
Continued fractions, semiconvergents and their approximation errors.

For lam in (0, 1) with lam = [0; l1, l2, ...] the two error sequences are

    G'_n  = p'_{n+l1-1} - q'_{n+l1-1} * lam     (upper semiconvergents)
    G''_n = q''_n * lam - p''_n                 (lower semiconvergents)

and G is their merge in decreasing order.  For lam = 1/(k + phi) they reduce
to G'_n = lam*phi**(2n+1), G''_n = lam*phi**(2n), G_n = lam*phi**n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .numeric import PHI, GoldenRational, gr_floor

__all__ = [
    "CfExpansion",
    "cf_expand",
    "convergents",
    "intermediate_fraction",
    "semiconvergents",
    "GammaSequences",
    "gamma_sequences",
    "golden_lambda",
    "golden_eta",
    "gamma_closed_form",
    "fibonacci",
    "GammaTable",
    "golden_index",
]


@dataclass(frozen=True)
class CfExpansion:
    coeffs: tuple  # (a0, a1, ...)
    terminated: bool


def _floor(x) -> int:
    if isinstance(x, GoldenRational):
        return gr_floor(x)
    return math.floor(x)


def cf_expand(x, depth: int) -> CfExpansion:
    """
    Coefficients a0, a1, ..., at most depth + 1 of them.

    Exact for GoldenRational and Fraction input.  Floats give a finite
    expansion whose tail coefficients are not meaningful.
    """
    coeffs = []
    y = x
    for _ in range(depth + 1):
        a = _floor(y)
        coeffs.append(a)
        frac = y - a
        if frac == 0:
            return CfExpansion(tuple(coeffs), True)
        if isinstance(frac, float) and frac < 1e-12:
            return CfExpansion(tuple(coeffs), True)
        y = 1 / frac
    return CfExpansion(tuple(coeffs), False)


def convergents(coeffs):
    """[(p_0, q_0), (p_1, q_1), ...] for [a0; a1, ...]."""
    out = []
    p2, q2 = 0, 1   # p_{-2}, q_{-2}
    p1, q1 = 1, 0   # p_{-1}, q_{-1}
    for a in coeffs:
        p, q = a * p1 + p2, a * q1 + q2
        out.append((p, q))
        p2, q2, p1, q1 = p1, q1, p, q
    return out


def intermediate_fraction(coeffs, m: int, n: int) -> Fraction:
    """[a0; a1, ..., a_m, n] = (n p_m + p_{m-1}) / (n q_m + q_{m-1})."""
    conv = convergents(coeffs[: m + 1])
    pm, qm = conv[m]
    pm1, qm1 = conv[m - 1] if m >= 1 else (1, 0)
    return Fraction(n * pm + pm1, n * qm + qm1)


def semiconvergents(coeffs):
    """
    Upper and lower semiconvergents of [0; l1, l2, ...], as (p, q) pairs.

    Upper: [0; 1], ..., [0; l1], [0; l1, l2, 1], ..., [0; l1, l2, l3], ...
    Lower: 0, [0; l1, 1], ..., [0; l1, l2], [0; l1, l2, l3, 1], ...
    """
    if coeffs[0] != 0:
        raise ValueError("expected an expansion of a number in (0, 1)")
    conv = convergents(coeffs)
    upper = []
    lower = [(0, 1)]
    for n in range(1, len(coeffs)):
        pm2, qm2 = conv[n - 2] if n >= 2 else (1, 0)
        pm1, qm1 = conv[n - 1]
        target = upper if n % 2 == 1 else lower
        for m in range(1, coeffs[n] + 1):
            target.append((pm2 + m * pm1, qm2 + m * qm1))
    return upper, lower


@dataclass(frozen=True)
class GammaSequences:
    prime: tuple       # G'_0, G'_1, ...
    double: tuple      # G''_0, G''_1, ...
    merged: tuple      # G_0 > G_1 > ...
    prime_fracs: tuple
    double_fracs: tuple


def gamma_sequences(lam, N: int, max_depth: int = 400) -> GammaSequences:
    """First N terms of G' and G'' (and 2N terms of G) from semiconvergents."""
    if not (0 < lam < 1):
        raise ValueError("lam must lie in (0, 1)")
    depth = 4
    while True:
        exp = cf_expand(lam, depth)
        coeffs = exp.coeffs
        upper, lower = semiconvergents(coeffs)
        l1 = coeffs[1]
        if len(upper) >= N + l1 - 1 and len(lower) >= N:
            break
        if exp.terminated or depth >= max_depth:
            raise ValueError("lam has too short an expansion for %d terms" % N)
        depth *= 2
    pf = tuple(upper[n + l1 - 1] for n in range(N))
    df = tuple(lower[n] for n in range(N))
    prime = tuple(p - q * lam for p, q in pf)
    double = tuple(q * lam - p for p, q in df)
    merged = tuple(sorted(prime + double, reverse=True))
    return GammaSequences(prime, double, merged, pf, df)


def fibonacci(n: int) -> int:
    """F_n with F_0 = 0, F_1 = 1 and F_{-1} = 1."""
    if n == -1:
        return 1
    if n < 0:
        raise ValueError("index below -1")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def golden_lambda(k: int) -> GoldenRational:
    """lam = 1/(k + phi)."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    return (PHI + k).inverse()


def golden_eta(k: int) -> GoldenRational:
    """eta = 1 - k*lam = lam*phi."""
    return 1 - k * golden_lambda(k)


def gamma_closed_form(k: int, n: int, which: str) -> GoldenRational:
    """lam*phi**(2n+1) for 'prime', lam*phi**(2n) for 'double', lam*phi**n for 'merged'."""
    lam = golden_lambda(k)
    if which == "prime":
        return lam * PHI ** (2 * n + 1)
    if which == "double":
        return lam * PHI ** (2 * n)
    if which == "merged":
        return lam * PHI ** n
    raise ValueError("which must be 'prime', 'double' or 'merged'")


class GammaTable:
    """
    Lazy G' and G'' values with index search.

    With ``k`` set the golden closed forms are used and the search starts from
    a logarithmic estimate; otherwise the semiconvergent errors are computed.
    ``exact`` keeps GoldenRational values, else floats are cached.
    """

    def __init__(self, lam, k: int | None = None, exact: bool = False):
        self.lam = lam
        self.k = k
        self.exact = exact
        self._prime = []
        self._double = []
        self._lam_f = float(lam)

    def _extend(self, n: int):
        if n < len(self._prime):
            return
        size = max(n + 1, 2 * len(self._prime), 8)
        if self.k is not None:
            vals_p = [gamma_closed_form(self.k, i, "prime") for i in range(size)]
            vals_d = [gamma_closed_form(self.k, i, "double") for i in range(size)]
        else:
            gs = gamma_sequences(self.lam, size)
            vals_p, vals_d = list(gs.prime), list(gs.double)
        if not self.exact:
            vals_p = [float(v) for v in vals_p]
            vals_d = [float(v) for v in vals_d]
        self._prime = vals_p
        self._double = vals_d

    def prime(self, n: int):
        self._extend(n)
        return self._prime[n]

    def double(self, n: int):
        self._extend(n)
        return self._double[n]

    def first_below(self, which: str, ell) -> int:
        """min{n : G_n < ell} for which in ('prime', 'double')."""
        if not ell > 0:
            raise ValueError("ell must be positive")
        get = self.prime if which == "prime" else self.double
        n = 0
        if self.k is not None:
            # G'_n ~ lam*phi**(2n+1), G''_n ~ lam*phi**(2n)
            off = 1 if which == "prime" else 0
            est = (math.log(float(ell) / self._lam_f) / math.log(float(PHI)) - off) / 2
            n = max(0, int(math.floor(est)) - 1)
            while n > 0 and get(n - 1) < ell:
                n -= 1
        while not get(n) < ell:
            n += 1
        return n


def golden_index(lam, eta) -> int | None:
    """k when lam = 1/(k + phi) and eta = 1 - k*lam exactly, else None."""
    if not isinstance(lam, GoldenRational) or not isinstance(eta, GoldenRational):
        return None
    t = 1 / lam - PHI
    if t.b != 0 or t.a.denominator != 1 or t.a < 1:
        return None
    k = int(t.a)
    return k if eta == 1 - k * lam else None
