"""
Return maps along section lines and their self-similarity near the origin.

A line L'_S of slope mu' through the origin inside a middle cone P_j is
carried by E to the line of slope mu = (mu' + tan theta_j)/(1 - mu' tan theta_j)
with heights stretched by gamma.  Parametrising L'_S by the height y of its
image, xi_S(y) = (1/mu' + i) y / gamma, the return map restricted to the line
is rho(y) = R(xi_S(y)).  rho is piecewise affine with slope 1/mu, breaking at
the dynamical sequence y_n for (nu, mu).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cf import GammaTable, golden_index
from .dynseq import DynSeq, DynSeqParams, compute_dynseq
from .iet import DEFAULT_CAP
from .numeric import PHI, PHI_FLOAT, GoldenRational
from .tce import TceParams, classify, return_map, return_map_batch

__all__ = [
    "SingularSlope",
    "SlopePair",
    "slope_pair",
    "slope_pair_from_angle",
    "gamma_of_image_angle",
    "gamma_of_line_angle",
    "xi_S",
    "section_params",
    "section_dynseq",
    "rho",
    "RhoProfile",
    "rho_profile",
    "y_bar_bounds",
    "renorm_check",
    "atom_census",
    "SAFETY",
]

# the bound on Im z for the self-similar region is shrunk by this factor
SAFETY = 0.99


class SingularSlope(ValueError):
    pass


@dataclass(frozen=True)
class SlopePair:
    j: int
    mu_prime: float
    mu: float
    gamma: float
    phi_prime: float   # angle of L'_S
    phi: float         # angle of its image


def _angle_of_slope(m: float) -> float:
    """Angle in (0, pi) of the ray of slope m in the upper half-plane."""
    a = math.atan(m)
    return a if a > 0 else a + math.pi


def slope_pair_from_angle(p: TceParams, phi_prime: float, j: int | None = None) -> SlopePair:
    if j is None:
        j = classify(p, complex(math.cos(phi_prime), math.sin(phi_prime)))
    if not 1 <= j <= p.d:
        raise ValueError("the section line must lie in a middle cone")
    lo, hi = p.cone_interval(j)
    if not lo < phi_prime < hi:
        raise ValueError("angle %r not inside cone %d" % (phi_prime, j))
    phi = phi_prime + p.theta[j - 1]
    if abs(math.cos(phi)) < 1e-15:
        raise SingularSlope("the image line is vertical")
    if abs(math.cos(phi_prime)) < 1e-15:
        raise SingularSlope("the section line is vertical")
    mu_prime = math.tan(phi_prime)
    mu = math.tan(phi)
    gamma = math.sin(phi) / math.sin(phi_prime)
    return SlopePair(j, mu_prime, mu, gamma, phi_prime, phi)


def slope_pair(p: TceParams, mu_prime: float, j: int) -> SlopePair:
    """
    Pair (mu', mu) for the line of slope mu' in cone j.

    Raises SingularSlope when mu' tan(theta_j) = 1 (vertical image).
    """
    if not abs(mu_prime) > p.nu:
        raise ValueError("need |mu'| > nu")
    t = math.tan(p.theta[j - 1])
    if abs(1 - mu_prime * t) < 1e-15:
        raise SingularSlope("mu' tan(theta_j) = 1")
    pair = slope_pair_from_angle(p, _angle_of_slope(mu_prime), j)
    return pair


def gamma_of_image_angle(p: TceParams, j: int, phi: float) -> float:
    """|cos theta_j - sin theta_j cot phi|^-1, phi the angle of the image line."""
    t = p.theta[j - 1]
    return 1.0 / abs(math.cos(t) - math.sin(t) / math.tan(phi))


def gamma_of_line_angle(p: TceParams, j: int, phi_prime: float) -> float:
    """|cos theta_j + sin theta_j cot phi'|, phi' the angle of the section line."""
    t = p.theta[j - 1]
    return abs(math.cos(t) + math.sin(t) / math.tan(phi_prime))


def xi_S(pair: SlopePair, y: float) -> complex:
    """Point of L'_S whose image under F has height y."""
    h = y / pair.gamma
    return complex(h / pair.mu_prime, h)


def section_params(p: TceParams, mu: float) -> DynSeqParams:
    return DynSeqParams(p.nu, mu, p.lam, p.eta, k=golden_index(p.lam, p.eta))


def section_dynseq(p: TceParams, pair: SlopePair, N: int) -> DynSeq:
    return compute_dynseq(section_params(p, pair.mu), N)


def rho(p: TceParams, pair: SlopePair, y: float, cap: int = DEFAULT_CAP):
    return return_map(p, xi_S(pair, y), cap)


@dataclass
class RhoProfile:
    pair: SlopePair
    dynseq: DynSeq
    breakpoints: list          # detected, decreasing
    predicted: list            # y_0..y_N
    slopes: list               # fitted slope of Re rho on each piece, piece n = [y_{n+1}, y_n)
    piece_k: list              # hitting time on each piece
    sides: list                # detected landing side of rho(y_n): 'L1' or 'Ld'
    side_residual: list        # distance of the extrapolated rho(y_n) from that line
    x: list                    # Re rho(y_n^-)
    p_empirical: list          # x_n / ell(y_n) + 1/2
    x_identity_dev: list       # |x_n - (+-(y_n/nu) -+ Upsilon_n)|
    upper_slope: float         # slope above y_0
    samples: int = 0

    def summary(self) -> dict:
        ds = self.dynseq
        n = min(len(self.breakpoints), len(self.predicted))
        bp = [abs(self.breakpoints[i] - self.predicted[i]) / self.predicted[i] for i in range(n)]
        slope_dev = [abs(s - 1 / self.pair.mu) for s in self.slopes + [self.upper_slope]]
        sides_ok = [self.sides[i] == ds.side(i) for i in range(len(self.sides))]
        p_dev = [abs(self.p_empirical[i] - ds.p[i]) for i in range(len(self.p_empirical))]
        return {
            "count_detected": len(self.breakpoints),
            "count_predicted": len(self.predicted),
            "max_breakpoint_rel_dev": max(bp) if bp else math.inf,
            "max_slope_dev": max(slope_dev) if slope_dev else math.inf,
            "sides_ok": all(sides_ok) and len(sides_ok) == len(self.predicted),
            "max_side_residual": max(self.side_residual) if self.side_residual else math.inf,
            "max_p_dev": max(p_dev) if p_dev else math.inf,
            "max_x_identity_dev": max(self.x_identity_dev) if self.x_identity_dev else math.inf,
        }


def _piece_key(pair: SlopePair, y: float, res) -> tuple[int, float]:
    return res.k, res.point.real - y / pair.mu


def rho_profile(p: TceParams, pair: SlopePair, N: int, per_efold: int = 60,
                cap: int = DEFAULT_CAP, jump_tol: float = 1e-9) -> RhoProfile:
    """
    Reconstruct rho on (y_{N+1}, y_0 * 1.5) from samples alone.

    Breakpoints are located as jumps of the offset Re rho(y) - y/mu (or of
    the hitting time) and refined by bisection; the dynamical sequence only
    sets the sampling window.
    """
    ds = section_dynseq(p, pair, N + 1)
    if len(ds.y) < N + 2:
        raise ValueError("dynamical sequence terminated before n = %d" % (N + 1))
    predicted = [float(v) for v in ds.y[: N + 1]]
    y_top = predicted[0] * 1.5
    y_bot = float(ds.y[N + 1]) * (1 + 1e-6)
    count = max(8, int(per_efold * math.log(y_top / y_bot)))
    ys = np.exp(np.linspace(math.log(y_top), math.log(y_bot), count))
    zs = ys / pair.gamma * (1 / pair.mu_prime + 1j)
    br = return_map_batch(p, zs, cap)
    off = br.points.real - ys / pair.mu
    ks = br.k

    def same(i, i2):
        return ks[i] == ks[i2] and abs(off[i] - off[i2]) < jump_tol

    # group consecutive samples into pieces
    groups = [[0]]
    for i in range(1, count):
        if same(groups[-1][-1], i):
            groups[-1].append(i)
        else:
            groups.append([i])

    breakpoints = []
    for g_hi, g_lo in zip(groups, groups[1:]):
        a = ys[g_hi[-1]]
        b = ys[g_lo[0]]
        key_hi = (ks[g_hi[-1]], off[g_hi[-1]])
        # invariant: a is on the upper piece, b is not
        for _ in range(200):
            m = 0.5 * (a + b)
            if m == a or m == b:
                break
            r = rho(p, pair, m, cap)
            km, om = _piece_key(pair, m, r)
            if km == key_hi[0] and abs(om - key_hi[1]) < jump_tol:
                a = m
            else:
                b = m
        breakpoints.append(b if rho_belongs(p, pair, b, key_hi, cap, jump_tol) else a)

    def fit(g):
        if len(g) < 2:
            return math.nan
        i0, i1 = g[0], g[-1]
        return (br.points[i0].real - br.points[i1].real) / (ys[i0] - ys[i1])

    upper_slope = fit(groups[0])
    slopes, piece_k, sides, side_res, xs, p_emp, x_dev = [], [], [], [], [], [], []
    for n, bpt in enumerate(breakpoints):
        g_up, g_lo = groups[n], groups[n + 1]
        c_up = off[g_up[0]]
        c_lo = off[g_lo[0]]
        slopes.append(fit(g_lo))
        piece_k.append(int(ks[g_lo[0]]))
        re_up = c_up + bpt / pair.mu
        d1 = abs(re_up - bpt / p.nu)
        dd = abs(re_up + bpt / p.nu)
        side = "L1" if d1 < dd else "Ld"
        sides.append(side)
        side_res.append(min(d1, dd))
        x_n = c_lo + bpt / pair.mu
        xs.append(x_n)
        ell = 2 * bpt / p.nu
        p_emp.append(x_n / ell + 0.5)
        if n < len(ds.upsilon):
            ups = float(ds.upsilon[n])
            yn = predicted[n] if n < len(predicted) else bpt
            pred_x = yn / p.nu - ups if side == "L1" else ups - yn / p.nu
            x_dev.append(abs(x_n - pred_x))
    return RhoProfile(pair, ds, breakpoints, predicted, slopes, piece_k, sides, side_res,
                      xs, p_emp, x_dev, upper_slope, count)


def rho_belongs(p, pair, y, key, cap, tol) -> bool:
    r = rho(p, pair, y, cap)
    k, o = _piece_key(pair, y, r)
    return k == key[0] and abs(o - key[1]) < tol


# self-similar neighbourhood of the origin

def _y_values(p: TceParams, mu: float, which: int, table: GammaTable) -> float:
    ds = compute_dynseq(section_params(p, mu), which, table=table, precision="double")
    return float(ds.y[which])


def y_bar_bounds(p: TceParams, grid: int = 4000, safety: float = SAFETY, refine: int = 400) -> dict:
    """
    Heights below which the return map is self-similar.

    For z in cone j at angle phi' the image of the section line through z has
    slope mu(phi') and stretch gamma(phi').  Self-similarity needs
    Im F(z) = gamma Im z < y_1(mu).  Returned keys:

    y_bar_0        inf of y_0(mu)/gamma over all middle-cone directions
    y_bar_1_scaled phi**2 * y_bar_0
    y_bar_1_direct inf of y_1(mu)/gamma
    y_bar_1        min of the two, times ``safety``
    """
    t = np.linspace(0.0, 1.0, grid + 1)[1:-1]
    # cluster nodes near the cone edges, where the infimum tends to sit
    t = np.concatenate([t, np.geomspace(1e-9, 1e-3, 200), 1 - np.geomspace(1e-9, 1e-3, 200)])
    inf0 = math.inf
    inf1 = math.inf
    per_cone = {}
    table = GammaTable(p.lam, k=golden_index(p.lam, p.eta), exact=False)
    for j in range(1, p.d + 1):
        lo, hi = p.cone_interval(j)

        def heights(tt, lo=lo, hi=hi, j=j):
            php = lo + (hi - lo) * tt
            ph = php + p.theta[j - 1]
            if abs(math.cos(ph)) < 1e-12:
                return math.inf, math.inf
            mu = math.tan(ph)
            if not abs(mu) > p.nu * (1 + 1e-12):
                return math.inf, math.inf
            gamma = math.sin(ph) / math.sin(php)
            y0 = p.eta_f * p.nu / (1 + p.nu / mu)
            try:
                y1 = _y_values(p, mu, 1, table)
            except ValueError:
                y1 = math.inf
            return y0 / gamma, y1 / gamma

        ts = np.sort(t)
        vals = [heights(tt) for tt in ts]
        c0 = min(v[0] for v in vals)
        c1 = min(v[1] for v in vals)
        # refine between the neighbours of each grid minimum
        for col in (0, 1):
            i = min(range(len(ts)), key=lambda m: vals[m][col])
            a_t = ts[max(i - 1, 0)]
            b_t = ts[min(i + 1, len(ts) - 1)]
            for tt in np.linspace(a_t, b_t, refine):
                v = heights(float(tt))
                c0, c1 = min(c0, v[0]), min(c1, v[1])
        per_cone[j] = (c0, c1)
        inf0 = min(inf0, c0)
        inf1 = min(inf1, c1)
    scaled = PHI_FLOAT ** 2 * inf0
    return {
        "y_bar_0": inf0,
        "y_bar_1_scaled": scaled,
        "y_bar_1_direct": inf1,
        "y_bar_1": safety * min(scaled, inf1),
        "per_cone": per_cone,
    }


def _sample_U(p: TceParams, height: float, n: int, rng) -> np.ndarray:
    u = rng.random((n, 2))
    y = height * np.sqrt(u[:, 0])
    x = (2 * u[:, 1] - 1) * y / p.nu
    return x + 1j * y


def renorm_check(p: TceParams, samples: int = 10_000, depth: int = 3, seed: int = 0,
                 tol: float = 1e-9, guard: float = 1e-12, cap: int = DEFAULT_CAP,
                 bounds: dict | None = None) -> dict:
    """
    Compare R(phi**(2m) z) with phi**(2m) R(z), m = 1..depth, for z uniform
    in U = {z in P_c : Im z < y_bar_1}.  Samples whose orbits pass within
    ``guard`` of a cone boundary are redrawn and counted.
    """
    if bounds is None:
        bounds = y_bar_bounds(p)
    height = bounds["y_bar_1"]
    rng = np.random.default_rng(seed)
    accepted = []
    resampled = 0
    per_level = [0.0] * depth
    per_level_rel = [0.0] * depth
    need = samples
    while need > 0:
        zs = _sample_U(p, height, need, rng)
        res0 = return_map_batch(p, zs, cap)
        bad = res0.min_boundary < guard
        outs = []
        for m in range(1, depth + 1):
            s = PHI_FLOAT ** (2 * m)
            rm = return_map_batch(p, zs * s, cap)
            bad |= rm.min_boundary < guard * s
            outs.append((s, rm))
        good = ~bad
        resampled += int(bad.sum())
        for lvl, (s, rm) in enumerate(outs):
            dev = np.abs(rm.points[good] - s * res0.points[good])
            if dev.size:
                rel = dev / (s * np.abs(res0.points[good]))
                per_level[lvl] = max(per_level[lvl], float(dev.max()))
                per_level_rel[lvl] = max(per_level_rel[lvl], float(rel.max()))
        accepted.append(int(good.sum()))
        need -= int(good.sum())
    max_dev = max(per_level)
    return {
        "samples": samples,
        "depth": depth,
        "seed": seed,
        "y_bar_1": height,
        "max_dev": max_dev,
        "max_rel_dev": max(per_level_rel),
        "per_level_dev": per_level,
        "per_level_rel_dev": per_level_rel,
        "resample_count": resampled,
        "tol": tol,
        "ok": max_dev < tol,
    }


def _exact_translation(p: TceParams, n0: int, nd: int) -> object:
    lam = p.lam if isinstance(p.lam, GoldenRational) else p.lam_f
    eta = p.eta if isinstance(p.eta, GoldenRational) else p.eta_f
    return -eta + nd * lam - n0


def atom_census(p: TceParams, levels: int = 3, grid: int = 60, bounds: dict | None = None,
                cap: int = DEFAULT_CAP) -> dict:
    """
    Distinct return-map isometries on the bands phi**(2m) (U minus phi**2 U).

    The level-m grid is the level-0 grid scaled by phi**(2m).  An isometry is
    keyed by (cone, #(-1) steps, #(+lam) steps); an atom by (cone, hitting
    time, itinerary hash).
    """
    if bounds is None:
        bounds = y_bar_bounds(p)
    h = bounds["y_bar_1"]
    s2 = PHI_FLOAT ** 2
    ys = h * (s2 + (1 - s2) * (np.arange(grid) + 0.5) / grid)
    ts = (np.arange(grid) + 0.5) / grid * 2 - 1
    Y, T = np.meshgrid(ys, ts)
    base = (T * Y / p.nu + 1j * Y).ravel()
    per_level = []
    trans_sets = []
    union = set()
    for m in range(levels):
        zs = base * PHI_FLOAT ** (2 * m)
        br = return_map_batch(p, zs, cap)
        iso = set()
        atoms = set()
        exact_t = set()
        for c, n0, nd, k, wh in zip(br.cone, br.n0, br.nd, br.k, br.word_hash):
            iso.add((int(c), int(n0), int(nd)))
            atoms.add((int(c), int(k), int(wh)))
            exact_t.add((int(c), _exact_translation(p, int(n0), int(nd))))
        new = len(exact_t - union)
        union |= exact_t
        trans_sets.append(exact_t)
        per_level.append({"level": m, "isometries": len(iso), "atoms_by_itinerary": len(atoms),
                          "new": new, "cumulative": len(union)})
    scaled_ok = True
    if isinstance(p.lam, GoldenRational) and isinstance(p.eta, GoldenRational):
        for m in range(1, levels):
            expect = {(c, t * PHI ** (2 * m)) for c, t in trans_sets[0]}
            scaled_ok = scaled_ok and expect == trans_sets[m]
    growing = all(a["new"] > 0 for a in per_level)
    return {
        "levels": per_level,
        "strictly_growing": growing,
        "translations_scale_exactly": scaled_ok,
    }
