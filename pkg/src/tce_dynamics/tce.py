"""
Translated cone exchange transformations F = G o E on the closed upper half-plane.

The half-plane is cut into cones P_0, P_1, ..., P_d, P_{d+1} by rays from the
origin at angles beta, beta + a_1, ..., pi - beta where beta = pi/2 - |alpha|/2.
E rotates P_j (1 <= j <= d) by theta_j and fixes the outer cones; G translates
by -1 on P_0, by -eta on the middle cone P_c and by +lam on P_{d+1}.

Points are Python complex numbers.  Cone tests use the sign of the cross
product with each boundary direction rather than arguments.  Orbit
segments spent in the outer cones are pure translations, so they are
accumulated as integer counts of -1 and +lam steps and only converted to a
position (with lam split into three doubles) when needed.  That keeps long
return orbits at a few ulps of error instead of one ulp per step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .iet import DEFAULT_CAP, CapExceeded, IetSpec, first_hitting, g_ell_apply, is_irreducible, translation_vector
from .numeric import GoldenRational

__all__ = [
    "TceParams",
    "DEFAULT_GUARD",
    "BoundaryError",
    "ReturnResult",
    "classify",
    "boundary_distance",
    "F_apply",
    "hat_F_spec",
    "return_map",
    "hitting_time",
    "orbit",
    "in_reduction_region",
    "conjugacy_check",
    "return_map_via_interval",
    "return_map_batch",
    "iterate_batch",
]

DEFAULT_GUARD = 1e-12


class BoundaryError(ValueError):
    pass


def _split(x: float) -> tuple[float, float]:
    c = 134217729.0 * x  # 2**27 + 1
    hi = c - (c - x)
    return hi, x - hi


@dataclass(frozen=True)
class TceParams:
    """
    alpha: cone angles a_1..a_d (radians, |alpha| < pi)
    tau:   one-line permutation of 1..d
    lam, eta: translation lengths, GoldenRational or float
    """

    alpha: tuple
    tau: tuple
    lam: object
    eta: object
    require_irreducible: bool = False

    beta: float = field(init=False, repr=False, compare=False)
    nu: float = field(init=False, repr=False, compare=False)
    theta: tuple = field(init=False, repr=False, compare=False)
    rot: tuple = field(init=False, repr=False, compare=False)
    bangles: tuple = field(init=False, repr=False, compare=False)
    bdirs: tuple = field(init=False, repr=False, compare=False)
    lam_f: float = field(init=False, repr=False, compare=False)
    eta_f: float = field(init=False, repr=False, compare=False)
    lam_parts: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        tau = tuple(int(t) for t in self.tau)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "tau", tau)
        d = len(alpha)
        if d < 1 or len(tau) != d:
            raise ValueError("alpha and tau must have the same positive length")
        if sorted(tau) != list(range(1, d + 1)):
            raise ValueError("tau is not a permutation of 1..%d" % d)
        if self.require_irreducible and d > 1 and not is_irreducible(tau):
            raise ValueError("tau %r is reducible" % (tau,))
        if any(not a > 0 for a in alpha):
            raise ValueError("cone angles must be positive")
        total = math.fsum(alpha)
        if not total < math.pi:
            raise ValueError("|alpha| = %r must be below pi" % total)
        if not (self.lam > 0 and self.eta > 0):
            raise ValueError("lam and eta must be positive")
        if not self.eta < self.lam:
            raise ValueError("need eta < lam")
        beta = math.pi / 2 - total / 2
        theta = translation_vector(alpha, tau)
        bangles = [beta]
        acc = beta
        for a in alpha[:-1]:
            acc += a
            bangles.append(acc)
        bangles.append(math.pi - beta)
        lam_f = float(self.lam)
        if isinstance(self.lam, (GoldenRational, Fraction, int)):
            lam_lo = float(self.lam - Fraction(lam_f))
        else:
            lam_lo = 0.0
        lam_a, lam_b = _split(lam_f)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "nu", math.tan(beta))
        object.__setattr__(self, "theta", tuple(theta))
        object.__setattr__(self, "rot", tuple(complex(math.cos(t), math.sin(t)) for t in theta))
        object.__setattr__(self, "bangles", tuple(bangles))
        object.__setattr__(self, "bdirs", tuple((math.cos(b), math.sin(b)) for b in bangles))
        object.__setattr__(self, "lam_f", lam_f)
        object.__setattr__(self, "eta_f", float(self.eta))
        object.__setattr__(self, "lam_parts", (lam_a, lam_b, lam_lo))

    @property
    def d(self) -> int:
        return len(self.alpha)

    @property
    def cot_beta(self) -> float:
        return 1.0 / self.nu

    def cone_interval(self, j: int) -> tuple[float, float]:
        """Angular extent (lo, hi) of cone j."""
        if j == 0:
            return 0.0, self.beta
        if j == self.d + 1:
            return math.pi - self.beta, math.pi
        return self.bangles[j - 1], self.bangles[j]

    def offset(self, n0: int, nd: int) -> float:
        """nd*lam - n0 to within an ulp of the result."""
        a, b, lo = self.lam_parts
        return ((nd * a - n0) + nd * b) + nd * lo


def _cross(c: float, s: float, z: complex) -> float:
    return c * z.imag - s * z.real


def classify(p: TceParams, z: complex) -> int:
    """Index 0..d+1 of the cone containing z."""
    if z == 0:
        raise ValueError("the origin belongs to no cone")
    if z.imag < 0:
        raise ValueError("point below the real axis")
    bd = p.bdirs
    if _cross(bd[0][0], bd[0][1], z) < 0:
        return 0
    for j in range(1, p.d + 1):
        c, s = bd[j]
        if _cross(c, s, z) <= 0:
            return j
    return p.d + 1


def boundary_distance(p: TceParams, z: complex) -> float:
    """Distance from z to the union of the cone boundary rays."""
    best = math.inf
    for c, s in p.bdirs:
        along = c * z.real + s * z.imag
        dist = abs(_cross(c, s, z)) if along >= 0 else abs(z)
        best = min(best, dist)
    return best


def F_apply(p: TceParams, z: complex) -> tuple[complex, int]:
    """One step of F and the symbol of the cone it was taken from."""
    j = classify(p, z)
    if j == 0:
        return z - 1.0, 0
    if j == p.d + 1:
        return z + p.lam_f, j
    w = z * p.rot[j - 1]
    jw = classify(p, w)
    if jw == 0:
        return w - 1.0, j
    if jw == p.d + 1:
        return w + p.lam_f, j
    return w - p.eta_f, j


def hat_F_spec(p: TceParams) -> IetSpec:
    """The circle-at-infinity exchange: lengths (beta, a_1..a_d, beta), ends fixed."""
    d = p.d
    perm = (1,) + tuple(t + 1 for t in p.tau) + (d + 2,)
    return IetSpec((p.beta,) + p.alpha + (p.beta,), perm, require_irreducible=False)


@dataclass
class ReturnResult:
    point: complex
    k: int
    cone: int            # cone of the starting point
    landing_cone: int
    n0: int              # number of -1 steps taken in P_0
    nd: int              # number of +lam steps taken in P_{d+1}
    hit_boundary: bool
    min_boundary: float
    translation: complex  # R(z) minus the rotated start


def _outer_code(p: TceParams, z: complex) -> tuple[int, float]:
    """(-1 for P_0, +1 for P_{d+1}, 0 for middle), distance proxy."""
    c0, s0 = p.bdirs[0]
    c1, s1 = p.bdirs[-1]
    a = c0 * z.imag - s0 * z.real
    b = c1 * z.imag - s1 * z.real
    m = min(abs(a), abs(b))
    if a < 0:
        return -1, m
    if b > 0:
        return 1, m
    return 0, m


def return_map(p: TceParams, z: complex, cap: int = DEFAULT_CAP, guard: float = DEFAULT_GUARD) -> ReturnResult:
    """
    R(z) = F^{k(z)}(z), k(z) the least n >= 1 with F^n(z) in the middle cone.

    ``hit_boundary`` is set when any orbit point (including z) comes within
    ``guard`` of a cone boundary; such results are unreliable.
    """
    j = classify(p, z)
    min_b = boundary_distance(p, z)
    n0 = nd = 0
    if j == 0:
        base = z
        n0 = 1
    elif j == p.d + 1:
        base = z
        nd = 1
    else:
        w = z * p.rot[j - 1]
        jw = classify(p, w)
        min_b = min(min_b, boundary_distance(p, w))
        if jw == 0:
            base, n0 = w, 1
        elif jw == p.d + 1:
            base, nd = w, 1
        else:
            base = w - p.eta_f
    bre, bim = base.real, base.imag
    for k in range(1, cap + 1):
        pos = complex(bre + p.offset(n0, nd), bim)
        code, m = _outer_code(p, pos)
        if m < min_b:
            min_b = m
        if code == 0:
            landing = classify(p, pos)
            min_b = min(min_b, boundary_distance(p, pos))
            turned = z * p.rot[j - 1] if 1 <= j <= p.d else z
            return ReturnResult(pos, k, j, landing, n0, nd, min_b < guard, min_b, pos - turned)
        if code < 0:
            n0 += 1
        else:
            nd += 1
    raise CapExceeded("no return to the middle cone within %d steps" % cap, cap)


def hitting_time(p: TceParams, z: complex, cap: int = DEFAULT_CAP) -> int:
    """k(z), the least n >= 1 with F^n(z) in a middle cone."""
    return return_map(p, z, cap).k


def orbit(p: TceParams, z: complex, steps: int) -> list[tuple[complex, int]]:
    """
    [(z_0, s_0), (z_1, s_1), ...] with z_{n+1} = F(z_n) and s_n the cone of z_n.

    Outer-cone runs use exact translation counts between middle visits.
    """
    out = []
    base = z
    n0 = nd = 0
    for _ in range(steps + 1):
        pos = complex(base.real + p.offset(n0, nd), base.imag) if (n0 or nd) else base
        j = classify(p, pos)
        out.append((pos, j))
        if j == 0:
            n0 += 1
        elif j == p.d + 1:
            nd += 1
        else:
            base, _ = F_apply(p, pos)
            n0 = nd = 0
    return out


def in_reduction_region(p: TceParams, z: complex) -> bool:
    """z outside P_c with Re z + Im z cot(beta) in [-1, lam] and 2 Im z cot(beta) <= lam."""
    if z == 0 or z.imag < 0:
        return False
    j = classify(p, z)
    if 1 <= j <= p.d:
        return False
    cb = p.cot_beta
    t = z.real + z.imag * cb
    return -1 <= t <= p.lam_f and 2 * z.imag * cb <= p.lam_f


def conjugacy_check(p: TceParams, z: complex, n: int) -> float:
    """
    Max deviation between F^m(z) and s^-1 g_ell^m s(Re z) + i Im z for
    m <= min(n, k(z)), where ell = 2 Im z cot(beta), s(x) = x + 1 + ell/2.
    """
    if not in_reduction_region(p, z):
        raise ValueError("point outside the reduction region")
    ell = 2 * z.imag * p.cot_beta
    x = z.real + 1 + ell / 2
    pts = orbit(p, z, n)
    dev = 0.0
    for m, (w, j) in enumerate(pts):
        if m:
            x = g_ell_apply(p.lam_f, ell, x)
        dev = max(dev, abs(w.real - (x - 1 - ell / 2)), abs(w.imag - z.imag))
        if m and 1 <= j <= p.d:
            break
    return dev


def return_map_via_interval(p: TceParams, z: complex, cap: int = DEFAULT_CAP) -> tuple[complex, int]:
    """
    R(z) for z in a middle cone through the interval map:
    R(z) = s^-1 r'_ell s(Re F(z)) + i Im F(z), ell = 2 Im F(z) cot(beta).
    """
    j = classify(p, z)
    if not 1 <= j <= p.d:
        raise ValueError("start must lie in a middle cone")
    w, _ = F_apply(p, z)
    ell = 2 * w.imag * p.cot_beta
    if ell > p.lam_f:
        raise ValueError("height too large for the interval reduction")
    x = w.real + 1 + ell / 2
    if 1 <= x <= 1 + ell:
        return complex(x - 1 - ell / 2, w.imag), 1
    n, r = first_hitting(p.lam_f, ell, x, cap)
    return complex(r - 1 - ell / 2, w.imag), n + 1


# batch versions

def _classify_arrays(p: TceParams, x, y):
    d = p.d
    out = np.full(x.shape, d + 1, dtype=np.int64)
    undecided = np.ones(x.shape, dtype=bool)
    c, s = p.bdirs[0]
    cr = c * y - s * x
    m = cr < 0
    out[m] = 0
    undecided &= ~m
    for j in range(1, d + 1):
        c, s = p.bdirs[j]
        cr = c * y - s * x
        m = undecided & (cr <= 0)
        out[m] = j
        undecided &= ~m
    return out


def _bdist_arrays(p: TceParams, x, y):
    best = np.full(x.shape, np.inf)
    r = np.hypot(x, y)
    for c, s in p.bdirs:
        along = c * x + s * y
        cr = np.abs(c * y - s * x)
        best = np.minimum(best, np.where(along >= 0, cr, r))
    return best


@dataclass
class BatchReturn:
    points: np.ndarray        # complex
    k: np.ndarray
    cone: np.ndarray
    landing_cone: np.ndarray
    n0: np.ndarray
    nd: np.ndarray
    min_boundary: np.ndarray
    word_hash: np.ndarray     # hash of the outer-cone itinerary

    def hit_boundary(self, guard: float = DEFAULT_GUARD) -> np.ndarray:
        return self.min_boundary < guard


_HASH_MUL = np.uint64(1000003)


def return_map_batch(p: TceParams, zs, cap: int = DEFAULT_CAP) -> BatchReturn:
    """Vectorised return_map over an array of starting points."""
    zs = np.asarray(zs, dtype=complex).ravel()
    n = zs.size
    x0, y0 = zs.real.copy(), zs.imag.copy()
    if np.any(y0 < 0) or np.any((x0 == 0) & (y0 == 0)):
        raise ValueError("points must lie in the upper half-plane, away from the origin")
    cone = _classify_arrays(p, x0, y0)
    minb = _bdist_arrays(p, x0, y0)
    rot = np.array([1.0 + 0j] + list(p.rot) + [1.0 + 0j])
    w = zs * rot[cone]
    wc = _classify_arrays(p, w.real, w.imag)
    mid = (cone >= 1) & (cone <= p.d)
    minb = np.where(mid, np.minimum(minb, _bdist_arrays(p, w.real, w.imag)), minb)
    n0 = np.zeros(n, dtype=np.int64)
    nd = np.zeros(n, dtype=np.int64)
    bre = w.real.copy()
    bim = w.imag.copy()
    n0[wc == 0] = 1
    nd[wc == p.d + 1] = 1
    wmid = (wc >= 1) & (wc <= p.d)
    bre[wmid] -= p.eta_f
    h = np.zeros(n, dtype=np.uint64)
    h[:] = cone.astype(np.uint64) + np.uint64(1)

    res_pts = np.zeros(n, dtype=complex)
    res_k = np.zeros(n, dtype=np.int64)
    res_land = np.zeros(n, dtype=np.int64)
    res_n0 = np.zeros(n, dtype=np.int64)
    res_nd = np.zeros(n, dtype=np.int64)
    res_minb = np.zeros(n)
    res_h = np.zeros(n, dtype=np.uint64)

    a, b, lo = p.lam_parts
    c0, s0 = p.bdirs[0]
    c1, s1 = p.bdirs[-1]
    idx = np.arange(n)
    k = 0
    with np.errstate(over="ignore"):
        while idx.size:
            k += 1
            if k > cap:
                raise CapExceeded("no return to the middle cone within %d steps" % cap, cap)
            ndf = nd.astype(float)
            off = ((ndf * a - n0) + ndf * b) + ndf * lo
            px = bre + off
            sa = c0 * bim - s0 * px
            sb = c1 * bim - s1 * px
            minb = np.minimum(minb, np.minimum(np.abs(sa), np.abs(sb)))
            in0 = sa < 0
            ind = (~in0) & (sb > 0)
            done = ~(in0 | ind)
            if np.any(done):
                di = idx[done]
                pts = px[done] + 1j * bim[done]
                res_pts[di] = pts
                res_k[di] = k
                res_land[di] = _classify_arrays(p, px[done], bim[done])
                res_n0[di] = n0[done]
                res_nd[di] = nd[done]
                res_minb[di] = np.minimum(minb[done], _bdist_arrays(p, px[done], bim[done]))
                res_h[di] = h[done]
                keep = ~done
                idx, bre, bim, n0, nd, minb, h = (
                    idx[keep], bre[keep], bim[keep], n0[keep], nd[keep], minb[keep], h[keep]
                )
                in0 = in0[keep]
                ind = ind[keep]
            n0 = n0 + in0
            nd = nd + ind
            h = h * _HASH_MUL + np.where(in0, np.uint64(1), np.uint64(2))
    return BatchReturn(res_pts, res_k, cone, res_land, res_n0, res_nd, res_minb, res_h)


def iterate_batch(p: TceParams, zs, steps: int, callback=None):
    """
    F^steps on an array of points, rebasing at every middle-cone visit.

    ``callback(step, points)`` is called after each step with the complex
    positions.  Returns (points, min boundary distance along each orbit).
    """
    zs = np.asarray(zs, dtype=complex).ravel().copy()
    bre = zs.real.copy()
    bim = zs.imag.copy()
    n0 = np.zeros(zs.size, dtype=np.int64)
    nd = np.zeros(zs.size, dtype=np.int64)
    minb = np.full(zs.size, np.inf)
    a, b, lo = p.lam_parts
    rot = np.array([1.0 + 0j] + list(p.rot) + [1.0 + 0j])
    d = p.d
    for step in range(1, steps + 1):
        ndf = nd.astype(float)
        px = bre + (((ndf * a - n0) + ndf * b) + ndf * lo)
        cone = _classify_arrays(p, px, bim)
        minb = np.minimum(minb, _bdist_arrays(p, px, bim))
        in0 = cone == 0
        ind = cone == d + 1
        mid = ~(in0 | ind)
        if np.any(mid):
            w = (px[mid] + 1j * bim[mid]) * rot[cone[mid]]
            wc = _classify_arrays(p, w.real, w.imag)
            shift = np.where(wc == 0, -1.0, np.where(wc == d + 1, p.lam_f, -p.eta_f))
            bre[mid] = w.real + shift
            bim[mid] = w.imag
            n0[mid] = 0
            nd[mid] = 0
        n0 = n0 + in0
        nd = nd + ind
        if callback is not None:
            ndf = nd.astype(float)
            cur = bre + (((ndf * a - n0) + ndf * b) + ndf * lo) + 1j * bim
            callback(step, cur)
    ndf = nd.astype(float)
    final = bre + (((ndf * a - n0) + ndf * b) + ndf * lo) + 1j * bim
    return final, minb
