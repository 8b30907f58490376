"""
Interval exchange transformations and the two-interval family on [0, 1 + lam].

All maps are generic over the scalar type: GoldenRational (or Fraction) for
exact orbits, float for fast ones.  Comparisons drive every branch, so an
exact scalar gives an exact orbit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

__all__ = [
    "IetSpec",
    "CapExceeded",
    "DEFAULT_CAP",
    "translation_vector",
    "is_irreducible",
    "iet_apply",
    "g_apply",
    "g_ell_apply",
    "g_orbit",
    "first_hitting",
    "return_point",
    "d_bounds",
    "d_minus_local",
]

DEFAULT_CAP = 10**6


class CapExceeded(RuntimeError):
    """No hit within the iteration cap."""

    def __init__(self, msg, cap):
        super().__init__(msg)
        self.cap = cap


def is_irreducible(perm: Sequence[int]) -> bool:
    d = len(perm)
    for k in range(1, d):
        if set(perm[:k]) == set(range(1, k + 1)):
            return False
    return True


def translation_vector(lengths, perm):
    """
    w_j = sum of a_k over pi(k) < pi(j), minus the sum of a_k over k < j.

    ``perm`` is in one-line notation, 1-based: perm[j-1] = pi(j).
    """
    d = len(lengths)
    zero = lengths[0] - lengths[0]
    w = []
    for j in range(d):
        s = zero
        for k in range(d):
            if perm[k] < perm[j]:
                s = s + lengths[k]
        for k in range(j):
            s = s - lengths[k]
        w.append(s)
    return tuple(w)


@dataclass(frozen=True)
class IetSpec:
    """
    Lengths and a one-line permutation of {1..d}.

    Irreducibility is enforced unless ``require_irreducible`` is False, which
    the circle-at-infinity map of a cone exchange needs (its permutation
    fixes both ends).
    """

    lengths: tuple
    perm: tuple
    require_irreducible: bool = True
    breakpoints: tuple = field(init=False, repr=False, compare=False)
    translations: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lengths = tuple(self.lengths)
        perm = tuple(int(p) for p in self.perm)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "perm", perm)
        d = len(lengths)
        if d == 0 or len(perm) != d:
            raise ValueError("lengths and permutation must have the same positive size")
        if sorted(perm) != list(range(1, d + 1)):
            raise ValueError("not a permutation of 1..%d: %r" % (d, perm))
        if any(not a > 0 for a in lengths):
            raise ValueError("interval lengths must be positive")
        if self.require_irreducible and not is_irreducible(perm):
            raise ValueError("permutation %r is reducible" % (perm,))
        xs = []
        s = lengths[0] - lengths[0]
        for a in lengths:
            s = s + a
            xs.append(s)
        object.__setattr__(self, "breakpoints", tuple(xs))
        object.__setattr__(self, "translations", translation_vector(lengths, perm))

    @property
    def d(self) -> int:
        return len(self.lengths)

    @property
    def total(self):
        return self.breakpoints[-1]

    def interval_index(self, x) -> int:
        """0-based j with x in [x_{j-1}, x_j)."""
        if x < 0 or not x < self.total:
            raise ValueError("point %r outside [0, %r)" % (x, self.total))
        for j, xj in enumerate(self.breakpoints):
            if x < xj:
                return j
        raise AssertionError("unreachable")


def iet_apply(spec: IetSpec, x):
    j = spec.interval_index(x)
    return x + spec.translations[j]


def g_apply(lam, x):
    """x + lam on [0, 1], x - 1 on (1, 1 + lam]."""
    if x < 0 or x > 1 + lam:
        raise ValueError("point %r outside [0, 1 + lam]" % (x,))
    if x <= 1:
        return x + lam
    return x - 1


def g_ell_apply(lam, ell, x):
    """x + lam on [0, 1], identity on (1, 1 + ell), x - 1 on [1 + ell, 1 + lam]."""
    if x < 0 or x > 1 + lam:
        raise ValueError("point %r outside [0, 1 + lam]" % (x,))
    if x <= 1:
        return x + lam
    if x < 1 + ell:
        return x
    return x - 1


def g_orbit(lam, x, n):
    """[x, g(x), ..., g^n(x)]."""
    out = [x]
    one = 1
    for _ in range(n):
        x = x + lam if x <= one else x - one
        out.append(x)
    return out


def _check_ell(lam, ell):
    if not (0 < ell <= lam):
        raise ValueError("ell must lie in (0, lam], got %r" % (ell,))


def first_hitting(lam, ell, x, cap: int = DEFAULT_CAP):
    """
    (n, g_ell^n(x)) for the least n >= 1 with g_ell^n(x) in [1, 1 + ell].

    Raises CapExceeded after ``cap`` iterations.
    """
    _check_ell(lam, ell)
    if x < 0 or x > 1 + lam:
        raise ValueError("point %r outside [0, 1 + lam]" % (x,))
    top = 1 + ell
    y = x
    for n in range(1, cap + 1):
        # before the hit the orbit avoids (1, 1 + ell), so g_ell acts as g
        if y <= 1:
            y = y + lam
        elif y < top:
            pass
        else:
            y = y - 1
        if 1 <= y <= top:
            return n, y
    raise CapExceeded("no hit of [1, 1 + ell] within %d steps" % cap, cap)


def return_point(lam, ell, x, cap: int = DEFAULT_CAP):
    """r'_ell: x itself on [1, 1 + ell], the first-return point elsewhere."""
    if 1 <= x <= 1 + ell:
        return x
    return first_hitting(lam, ell, x, cap)[1]


def d_bounds(lam, N: int):
    """
    (d_minus, d_plus) for the orbit g(1), ..., g^N(1).

    d_minus = 1 - max{g^n(1) <= 1}, d_plus = min{g^n(1) >= 1} - 1, with
    defaults 1 and lam when the sets are empty.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    below = None
    above = None
    x = lam * 0 + 1  # keeps the scalar type of lam
    for _ in range(N):
        x = x + lam if x <= 1 else x - 1
        if x <= 1 and (below is None or x > below):
            below = x
        if x >= 1 and (above is None or x < above):
            above = x
    d_minus = 1 - below if below is not None else lam * 0 + 1
    d_plus = above - 1 if above is not None else lam
    return d_minus, d_plus


def d_minus_local(lam, ell, x, cap: int = DEFAULT_CAP):
    """1 - max{g^n(x) <= 1 : 0 <= n <= n_ell(x)}, or 1 if that set is empty."""
    n_hit, _ = first_hitting(lam, ell, x, cap)
    best = None
    y = x
    for n in range(n_hit + 1):
        if n:
            y = g_ell_apply(lam, ell, y)
        if y <= 1 and (best is None or y > best):
            best = y
    return 1 - best if best is not None else lam * 0 + 1
