"""
Horizontal periodic orbits and the invariant discs around them.

For a middle cone P_j with theta_j != 0 the line of slope
-mu_j = -tan((pi + theta_j)/2) is carried by P_j's rotation onto the line of
slope mu_j with heights preserved.  Where the return profile rho along that
line crosses the line itself, the section point returns to itself: a
periodic orbit at constant height.  Any disc around it small enough to miss
the cone boundaries along the orbit is rotated rigidly by F^period, so the
concentric circles are invariant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cf import cf_expand, convergents
from .dynseq import DynSeq
from .iet import DEFAULT_CAP, CapExceeded, translation_vector
from .numeric import PHI_FLOAT
from .renorm import SingularSlope, SlopePair, section_dynseq, slope_pair_from_angle, xi_S, rho
from .tce import F_apply, TceParams, boundary_distance, iterate_batch, orbit, return_map

__all__ = [
    "reflective_test",
    "reflective_indices",
    "mu_special",
    "special_pair",
    "height_preservation",
    "p_window",
    "island_window",
    "IslandCandidate",
    "find_horizontal_orbits",
    "verify_island",
    "rotation_report",
    "construct_island_alpha",
    "check_island_construction",
    "ConstructionError",
    "trap_check",
    "EPS_FACTOR",
]

EPS_FACTOR = 0.9
CLOSE_TOL = 1e-10
HEIGHT_TOL = 1e-12


def reflective_indices(alpha, tau) -> list[int]:
    """j with |sum_{tau(k) > tau(j)} a_k - sum_{k < j} a_k| < a_j (1-based)."""
    d = len(alpha)
    out = []
    for j in range(d):
        s = math.fsum(alpha[k] for k in range(d) if tau[k] > tau[j]) - math.fsum(alpha[:j])
        if abs(s) < alpha[j]:
            out.append(j + 1)
    return out


def reflective_test(alpha, tau) -> tuple[bool, set]:
    w = set(reflective_indices(alpha, tau))
    return bool(w), w


def mu_special(p: TceParams, j: int) -> float:
    """tan((pi + theta_j)/2); the incoming line has slope -mu_j."""
    t = p.theta[j - 1]
    if t == 0:
        raise SingularSlope("theta_j = 0 gives a vertical special line")
    return math.tan((math.pi + t) / 2)


def special_pair(p: TceParams, j: int) -> SlopePair:
    """Section line of slope -mu_j in cone j; raises if it misses the cone."""
    mu_special(p, j)
    return slope_pair_from_angle(p, (math.pi - p.theta[j - 1]) / 2, j)


def height_preservation(p: TceParams, j: int, samples: int = 100, seed: int = 0) -> float:
    """max |Im F(z) - Im z| over sampled z on the incoming special line."""
    pair = special_pair(p, j)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for y in rng.uniform(0.01, 1.0, samples):
        z = xi_S(pair, float(y))
        w, _ = F_apply(p, z)
        worst = max(worst, abs(w.imag - z.imag))
    return worst


def p_window(mu, nu) -> tuple[float, float]:
    """(1/D, 1/C) for mu > nu, (1/C, 1/D) for mu < -nu."""
    mu, nu = float(mu), float(nu)
    if not abs(mu) > nu:
        raise ValueError("need |mu| > nu")
    C = 2 * mu / (mu + nu)
    D = 2 * mu / (mu - nu)
    return (1 / D, 1 / C) if mu > 0 else (1 / C, 1 / D)


def island_window(ds: DynSeq) -> tuple[float, float]:
    return p_window(ds.params.mu, ds.params.nu)


@dataclass
class IslandCandidate:
    j: int
    n_index: int               # the gap (y_{n+1}, y_n) holding the orbit
    height: float
    predicted_height: float    # straight from the dynamical sequence
    seed: complex
    period: int
    itinerary: tuple
    return_residual: float
    height_variation: float
    epsilon: float
    rotation_angle: float      # sum of theta over middle-cone visits, mod 2 pi
    orbit_points: tuple
    d: int

    @property
    def middle_counts(self) -> tuple:
        """m'_j: visits of the orbit to each middle cone over one period."""
        return tuple(sum(1 for s in self.itinerary if s == j) for j in range(1, self.d + 1))

    @property
    def middle_visits(self) -> int:
        return sum(self.middle_counts)


def _crossing(c: float, pair: SlopePair) -> float:
    # Re rho(y) = c + y/mu meets Re xi_S(y) = y/(gamma mu')
    return c / (1 / (pair.gamma * pair.mu_prime) - 1 / pair.mu)


def find_horizontal_orbits(p: TceParams, j: int, N: int = 8, cap: int = DEFAULT_CAP,
                           rejected: list | None = None) -> list[IslandCandidate]:
    """
    One candidate per n <= N with p_n inside the island window.

    The crossing height is first predicted from the dynamical sequence, then
    recomputed from the affine fit of two sampled rho values on the same
    piece, and finally checked by a forward return.  Gaps that fail a check
    are appended to ``rejected`` as (n, reason).
    """
    if j not in reflective_indices(p.alpha, p.tau):
        raise ValueError("cone %d is not a reflective witness" % j)
    pair = special_pair(p, j)
    ds = section_dynseq(p, pair, N + 1)
    lo, hi = island_window(ds)
    invc = 1 / float(ds.params.C)
    out = []
    d = p.d

    def reject(n, why):
        if rejected is not None:
            rejected.append((n, why))

    for n in range(min(N + 1, len(ds.y) - 1)):
        pn = float(ds.p[n])
        if not lo < pn < hi:
            reject(n, "p_n outside the window")
            continue
        y_hi, y_lo = float(ds.y[n]), float(ds.y[n + 1])
        s = 1.0 if pn > invc else -1.0
        c_pred = s * y_lo / p.nu - y_lo / pair.mu
        yhat_pred = _crossing(c_pred, pair)
        if not y_lo < yhat_pred < y_hi:
            reject(n, "predicted crossing outside the gap")
            continue
        ya = y_lo + (y_hi - y_lo) / 3
        yb = y_lo + 2 * (y_hi - y_lo) / 3
        ra, rb = rho(p, pair, ya, cap), rho(p, pair, yb, cap)
        if ra.k != rb.k:
            reject(n, "gap not a single piece")
            continue
        slope = (rb.point.real - ra.point.real) / (yb - ya)
        c_emp = ra.point.real - slope * ya
        yhat = c_emp / (1 / (pair.gamma * pair.mu_prime) - slope)
        if not y_lo < yhat < y_hi:
            reject(n, "fitted crossing outside the gap")
            continue
        seed = xi_S(pair, yhat)
        try:
            res = return_map(p, seed, cap)
        except CapExceeded:
            reject(n, "no return within cap")
            continue
        if res.hit_boundary or res.k != ra.k:
            reject(n, "return leaves the piece")
            continue
        resid = abs(res.point - seed)
        if not resid < CLOSE_TOL:
            reject(n, "orbit does not close")
            continue
        pts = orbit(p, seed, res.k - 1)
        itin = tuple(sym for _, sym in pts)
        hvar = max(abs(z.imag - seed.imag) for z, _ in pts)
        if not hvar < HEIGHT_TOL:
            reject(n, "height not constant along the orbit")
            continue
        if not any(1 <= sym <= d for sym in itin):
            reject(n, "itinerary avoids the middle cones")
            continue
        dist = min(min(boundary_distance(p, z), z.imag) for z, _ in pts)
        rot = math.fsum(p.theta[sym - 1] for sym in itin if 1 <= sym <= d) % (2 * math.pi)
        out.append(IslandCandidate(
            j, n, yhat, yhat_pred, seed, res.k, itin, resid, hvar,
            EPS_FACTOR * dist, rot, tuple(z for z, _ in pts), d,
        ))
    return out


def _wrap(a):
    return np.remainder(a + math.pi, 2 * math.pi) - math.pi


def verify_island(p: TceParams, cand: IslandCandidate, deltas=None, samples: int = 1000,
                  revolutions: int = 1, seed: int = 0) -> dict:
    """
    Iterate circles of radius delta (default: 5 fractions of epsilon) about
    the seed through ``revolutions`` periods; report the radius drift, the
    spread of each orbit point's image circle and the fitted rotation angle.
    """
    if cand.middle_visits == 0:
        raise ValueError("itinerary never visits a middle cone; not an island candidate")
    if not cand.epsilon > 0:
        raise ValueError("candidate has no certified radius")
    if deltas is None:
        deltas = [cand.epsilon * f for f in (0.1, 0.3, 0.5, 0.7, 0.9)]
    for r in deltas:
        if not 0 < r < cand.epsilon:
            raise ValueError("delta %r not inside (0, epsilon)" % r)
    rng = np.random.default_rng(seed)
    steps = cand.period * revolutions
    expect = math.remainder(cand.rotation_angle * revolutions, 2 * math.pi)
    pts = np.array(cand.orbit_points)
    per_delta = []
    for r in deltas:
        psi = rng.uniform(0, 2 * math.pi, samples)
        zs = cand.seed + r * np.exp(1j * psi)
        union = [0.0]

        def cb(step, cur, r=r, union=union):
            c = pts[step % cand.period]
            union[0] = max(union[0], float(np.max(np.abs(np.abs(cur - c) - r))))

        final, _ = iterate_batch(p, zs, steps, callback=cb)
        rad = np.abs(final - cand.seed)
        drift = float(np.max(np.abs(rad - r)))
        turn = _wrap(np.angle((final - cand.seed) / (zs - cand.seed)) - expect)
        fitted = math.remainder(expect + float(np.mean(turn)), 2 * math.pi)
        per_delta.append({
            "delta": r,
            "drift": drift,
            "rel_drift": drift / r,
            "union_dev": union[0],
            "fitted_rotation": fitted,
            "rotation_err": abs(math.remainder(fitted - expect, 2 * math.pi)),
            "max_angle_err": float(np.max(np.abs(turn))),
        })
    return {
        "n_index": cand.n_index,
        "height": cand.height,
        "period": cand.period,
        "epsilon": cand.epsilon,
        "revolutions": revolutions,
        "rotation_angle": cand.rotation_angle,
        "middle_counts": list(cand.middle_counts),
        "max_drift": max(x["drift"] for x in per_delta),
        "max_rel_drift": max(x["rel_drift"] for x in per_delta),
        "max_union_dev": max(x["union_dev"] for x in per_delta),
        "max_rotation_err": max(x["rotation_err"] for x in per_delta),
        "density": rotation_report(cand.rotation_angle),
        "per_delta": per_delta,
    }


def rotation_report(angle: float, q_limit: int = 10**8, depth: int = 40) -> dict:
    """
    Continued fraction of angle/pi up to denominators of ``q_limit``.

    ``clean_depth`` counts the leading terms before the first coefficient
    above 1000, a crude marker of a nearby small-denominator rational.
    """
    x = math.remainder(angle / math.pi, 2.0) % 2.0
    exp = cf_expand(x, depth)
    coeffs = []
    dens = []
    for a, (pp, q) in zip(exp.coeffs, convergents(exp.coeffs)):
        coeffs.append(int(a))
        dens.append(int(q))
        if q > q_limit:
            break
    clean = 0
    for a in coeffs[1:]:
        if a > 1000:
            break
        clean += 1
    return {"angle_over_pi": x, "coeffs": coeffs, "denominators": dens, "clean_depth": clean,
            "terminated": exp.terminated and dens[-1] <= q_limit}


class ConstructionError(ValueError):
    pass


def construct_island_alpha(d: int, j1: int, j2: int, delta: float, total: float, tau=None) -> tuple:
    """
    Angles with a_{j1} = T delta/6, a_{j2} = T (1 - delta/4) and the rest
    T delta/(12 (d - 2)); for d = 2 the pair (delta/2, 1 - delta/2) T.

    With ``tau`` given the result is checked (see check_island_construction)
    and ConstructionError raised when a condition fails.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not 0 < total < math.pi:
        raise ValueError("total angle must lie in (0, pi)")
    if d < 2:
        raise ValueError("d must be at least 2")
    if not (1 <= j1 < j2 <= d):
        raise ValueError("need 1 <= j1 < j2 <= d")
    if d == 2:
        alpha = (total * delta / 2, total * (1 - delta / 2))
    else:
        lst = [total * delta / (12 * (d - 2))] * d
        lst[j1 - 1] = total * delta / 6
        lst[j2 - 1] = total * (1 - delta / 4)
        alpha = tuple(lst)
    if tau is not None:
        rep = check_island_construction(alpha, tau, j1, delta, j2=j2)
        if not rep["off_hyperplanes"]:
            raise ConstructionError(
                "alpha lies on a degenerate hyperplane (k = %s); perturb the free angles slightly"
                % rep["hyperplanes_hit"])
        failed = [k for k in ("pair_ok", "theta_large", "reflective", "steep", "ratio_small") if not rep[k]]
        if failed:
            raise ConstructionError("construction conditions fail: %s (try a smaller delta)" % ", ".join(failed))
    return alpha


def check_island_construction(alpha, tau, j1: int, delta: float, j2: int | None = None,
                              tol: float = 1e-12) -> dict:
    """The inequalities and nondegeneracy conditions behind the construction."""
    d = len(alpha)
    total = math.fsum(alpha)
    theta = translation_vector(tuple(alpha), tuple(tau))
    th = theta[j1 - 1]
    nu = math.tan(math.pi / 2 - total / 2)
    mu = math.tan((math.pi + th) / 2)
    planes = [total - th - 2 * math.fsum(alpha[:k]) for k in range(d + 1)]
    hit = [k for k, v in enumerate(planes) if abs(v) <= tol]
    pair_ok = True if j2 is None else (j1 < j2 and tau[j2 - 1] < tau[j1 - 1])
    return {
        "pair_ok": pair_ok,
        "theta_large": th > total * (1 - delta),
        "reflective": j1 in reflective_indices(alpha, tau),
        "off_hyperplanes": not hit,
        "hyperplanes_hit": hit,
        "steep": mu / nu < -1,
        "ratio_small": (mu + nu) / (mu - nu) < PHI_FLOAT,
        "mu": mu,
        "nu": nu,
    }


def trap_check(p: TceParams, islands: list, steps: int = 100_000, inside: int = 32,
               outside: int = 64, seed: int = 0, tol: float = 1e-9) -> dict:
    """
    Orbits started inside a certified disc stay on their circle around the
    periodic orbit; sampled orbits started outside every disc never come
    within epsilon of any orbit point.
    """
    rng = np.random.default_rng(seed)
    heights = np.array([c.height for c in islands])
    eps = np.array([c.epsilon for c in islands])
    orbit_re = [np.sort(np.array([z.real for z in c.orbit_points])) for c in islands]

    # inside starts: every island's samples in one batch, tracked against the
    # orbit point they should be circling at each step
    zs_in, r_in, isl, per = [], [], [], []
    width = max(c.period for c in islands)
    table = np.zeros((len(islands), width), dtype=complex)
    for i, c in enumerate(islands):
        table[i, :c.period] = c.orbit_points
        r = c.epsilon * rng.uniform(0.05, 0.95, inside)
        psi = rng.uniform(0, 2 * math.pi, inside)
        zs_in.append(c.seed + r * np.exp(1j * psi))
        r_in.append(r)
        isl.append(np.full(inside, i))
        per.append(np.full(inside, c.period))
    zs_in = np.concatenate(zs_in)
    r_in = np.concatenate(r_in)
    isl = np.concatenate(isl)
    per = np.concatenate(per)
    n_in = zs_in.size

    # outside starts: heights spread over the island band, positions across the middle cone
    ymax = float(heights.max()) * 1.2
    ymin = float(heights.min()) * 0.8
    ys = rng.uniform(ymin, ymax, outside * 4)
    xs = rng.uniform(-1, 1, ys.size) * ys / p.nu
    zs_out = xs + 1j * ys
    keep = np.ones(zs_out.size, dtype=bool)
    for c in islands:
        pts = np.array(c.orbit_points)
        dmin = np.min(np.abs(zs_out[:, None] - pts[None, :]), axis=1)
        keep &= dmin > c.epsilon
    zs_out = zs_out[keep][:outside]

    worst = [0.0]
    closest = [math.inf]

    def cb(step, cur):
        centre = table[isl, step % per]
        worst[0] = max(worst[0], float(np.max(np.abs(np.abs(cur[:n_in] - centre) - r_in))))
        out = cur[n_in:]
        for h, e, ore in zip(heights, eps, orbit_re):
            near = np.abs(out.imag - h) < e
            if not np.any(near):
                continue
            sub = out[near]
            idx = np.clip(np.searchsorted(ore, sub.real), 1, ore.size - 1) if ore.size > 1 else np.zeros(sub.size, int)
            dx = np.abs(sub.real - ore[idx])
            if ore.size > 1:
                dx = np.minimum(dx, np.abs(sub.real - ore[idx - 1]))
            dist = np.hypot(dx, sub.imag - h)
            closest[0] = min(closest[0], float((dist / e).min()))

    iterate_batch(p, np.concatenate([zs_in, zs_out]), steps, callback=cb)
    inside_dev = worst[0]
    return {
        "steps": steps,
        "inside_max_radius_dev": inside_dev,
        "inside_ok": inside_dev < tol,
        "outside_samples": int(zs_out.size),
        "outside_min_dist_over_eps": closest[0],
        "outside_ok": closest[0] > 1.0,
    }
