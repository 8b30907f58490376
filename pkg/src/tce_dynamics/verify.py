"""
Acceptance checks, one runner per criterion.

Every runner returns a dict with at least ``name``, ``ok`` and ``seconds``;
the remaining keys are the measured quantities behind the verdict.
"""
from __future__ import annotations

import math
import random
import time
from fractions import Fraction

from .bifurcation import compute_bifurcation_sequences, endpoint_hitting_report, verify_bifurcation_equivalence
from .cf import GammaTable, gamma_closed_form, gamma_sequences, golden_lambda
from .dynseq import closed_form, compute_dynseq, golden_dynseq_params, regime
from .iet import d_bounds, d_minus_local, first_hitting, g_apply, g_ell_apply
from .numeric import PHI, GoldenRational
from .periodic import find_horizontal_orbits, trap_check, verify_island, construct_island_alpha
from .renorm import atom_census, renorm_check, rho_profile, slope_pair_from_angle, y_bar_bounds
from .tce import TceParams

__all__ = [
    "swap_params",
    "reflective_params",
    "island_alpha_params",
    "check_golden_closed_forms",
    "check_bifurcation_sequences",
    "check_endpoint_formulas",
    "check_dynseq_closed_forms",
    "check_rho_structure",
    "check_renormalization",
    "check_islands",
    "check_circle_invariance",
    "check_properties",
    "check_non_ergodicity",
    "run_all",
    "CRITERIA",
]


def swap_params() -> TceParams:
    return TceParams((0.5, math.pi - 2.5), (2, 1), PHI, 1 - PHI)


def reflective_params() -> TceParams:
    return TceParams((0.7, math.pi - 2.7), (2, 1), PHI, PHI ** 2)


def island_alpha_params(delta: float = 0.1) -> TceParams:
    tau = (2, 1, 3)
    alpha = construct_island_alpha(3, 1, 2, delta, math.pi - 0.1, tau)
    return TceParams(alpha, tau, PHI, PHI ** 2)


def _timed(name, fn):
    t0 = time.perf_counter()
    out = fn()
    out["seconds"] = time.perf_counter() - t0
    out["name"] = name
    return out


# --- 1 -------------------------------------------------------------------

def check_golden_closed_forms(ks=(1, 2, 3, 5), n_max: int = 20) -> dict:
    def run():
        mismatches = []
        for k in ks:
            gs = gamma_sequences(golden_lambda(k), n_max + 1)
            for n in range(n_max + 1):
                if gs.prime[n] != gamma_closed_form(k, n, "prime"):
                    mismatches.append((k, n, "prime"))
                if gs.double[n] != gamma_closed_form(k, n, "double"):
                    mismatches.append((k, n, "double"))
        return {"ks": list(ks), "n_max": n_max, "mismatches": mismatches}

    out = _timed("golden closed forms", run)
    out["ok"] = not out["mismatches"] and out["seconds"] < 1.0
    return out


# --- 2 -------------------------------------------------------------------

def check_bifurcation_sequences(ks=(1, 2, 3), terms: int = 10) -> dict:
    def run():
        per_k = {}
        for k in ks:
            # compared against the semiconvergent errors, not the closed forms
            rep = verify_bifurcation_equivalence(None, terms, lam=golden_lambda(k))
            per_k[k] = {
                "ok": rep["ok"],
                "k_prime": [r["k_prime"] for r in rep["rows"]],
                "k_double": [r["k_double"] for r in rep["rows"]],
            }
        return {"terms": terms, "per_k": per_k}

    out = _timed("bifurcation sequences", run)
    out["ok"] = all(v["ok"] for v in out["per_k"].values()) and out["seconds"] < 10.0
    return out


# --- 3 -------------------------------------------------------------------

def _endpoint_samples(lam, table: GammaTable, count: int, rng: random.Random, lo: float = 1e-3) -> list:
    lam_f = float(lam)
    special = []
    n = 0
    while table.prime(n) >= lo or table.double(n) >= lo:
        for v in (table.prime(n), table.double(n)):
            if lo <= v <= lam:
                special.append(v)
        n += 1
    out = list(special[: count // 4])
    while len(out) < count:
        u = rng.uniform(math.log(lo), math.log(lam_f))
        ell = Fraction(math.exp(u)).limit_denominator(10 ** 9)
        if 0 < ell <= lam:
            out.append(ell)
    return out


def check_endpoint_formulas(ks=(1, 2), samples: int = 200, seed: int = 0) -> dict:
    def run():
        rng = random.Random(seed)
        per_k = {}
        for k in ks:
            lam = golden_lambda(k)
            table = GammaTable(lam, k=k, exact=True)
            ells = _endpoint_samples(lam, table, samples, rng)
            depth = max(table.first_below("prime", min(ells)), table.first_below("double", min(ells))) + 2
            seqs = compute_bifurcation_sequences(lam, depth)
            bad = []
            for ell in ells:
                rep = endpoint_hitting_report(lam, ell, k=k, seqs=seqs)
                if not rep.ok:
                    bad.append(str(ell))
            per_k[k] = {"samples": len(ells), "exact_gamma_samples": sum(isinstance(e, GoldenRational) for e in ells),
                        "failures": bad}
        return {"per_k": per_k}

    out = _timed("endpoint formulas", run)
    out["ok"] = all(not v["failures"] and v["samples"] >= samples for v in out["per_k"].values())
    return out


# --- 4 -------------------------------------------------------------------

def _mu_grid(nu: float) -> dict:
    mb = nu / float(PHI) ** 3
    outer = [s * mb * f for f in (1.07, 1.5, 2.3, 4.0, 9.0, 31.0) for s in (1, -1)]
    inner = [nu + (mb - nu) * f for f in (0.03, 0.15, 0.3, 0.45, 0.6, 0.72, 0.85, 0.93, 0.98)]
    return {"outer": outer, "negative": [-m for m in inner], "positive": inner}


def _rel(a, b) -> float:
    a, b = float(a), float(b)
    return abs(a - b) / max(abs(b), 1e-300)


def check_dynseq_closed_forms(ks=(1, 2, 3), n_max: int = 25, nu: float = math.tan(1.0)) -> dict:
    """Float parameters against the closed forms, plus an exact rational subset."""
    def run():
        grid = _mu_grid(nu)
        worst = 0.0
        worst_double = 0.0
        regimes_seen = set()
        count = 0
        for k in ks:
            for label, mus in grid.items():
                for mu in mus:
                    params = golden_dynseq_params(k, nu, mu)
                    reg = regime(params)
                    regimes_seen.add(reg)
                    if reg != label:
                        raise AssertionError("mu grid misplaced: %r is %s" % (mu, reg))
                    count += 1
                    ds = compute_dynseq(params, n_max)
                    raw = compute_dynseq(params, n_max, precision="double")
                    for n in range(len(ds.p)):
                        cp, cl = closed_form(params, n)
                        worst = max(worst, _rel(ds.p[n], cp), _rel(params.ell(ds.y[n]), cl))
                        if n < len(raw.p):
                            worst_double = max(worst_double, _rel(raw.p[n], cp), _rel(params.ell(raw.y[n]), cl))
        exact_bad = []
        exact_mus = [Fraction(10), Fraction(-10), Fraction(-2), Fraction(2), Fraction(5, 2),
                     Fraction(-7, 2), Fraction(3), Fraction(-4), Fraction(100, 3)]
        for k in ks:
            for mu in exact_mus:
                params = golden_dynseq_params(k, Fraction(1), mu)
                ds = compute_dynseq(params, n_max)
                for n in range(len(ds.p)):
                    cp, cl = closed_form(params, n)
                    if ds.p[n] != cp or params.ell(ds.y[n]) != cl:
                        exact_bad.append((k, str(mu), n))
        return {
            "nu": nu,
            "mu_values": sum(len(v) for v in grid.values()),
            "runs": count,
            "regimes": sorted(regimes_seen),
            "max_rel_dev": worst,
            "double_recursion_max_rel_dev": worst_double,
            "exact_runs": len(ks) * len(exact_mus),
            "exact_mismatches": exact_bad,
        }

    out = _timed("dynamical sequence closed forms", run)
    out["ok"] = (out["max_rel_dev"] < 1e-10 and not out["exact_mismatches"]
                 and out["mu_values"] >= 30 and len(out["regimes"]) == 3)
    return out


# --- 5 -------------------------------------------------------------------

SWAP_SECTION_LINES = ((1.95, 2), (1.03, 1), (1.3, 1), (1.7, 2))


def check_rho_structure(lines=SWAP_SECTION_LINES, N: int = 8) -> dict:
    def run():
        p = swap_params()
        rows = []
        for phi_prime, j in lines:
            pair = slope_pair_from_angle(p, phi_prime, j)
            prof = rho_profile(p, pair, N)
            s = prof.summary()
            s["regime"] = regime(prof.dynseq.params)
            s["mu"] = pair.mu
            s["phi_prime"] = phi_prime
            s["j"] = j
            rows.append(s)
        return {"lines": rows}

    out = _timed("return profile structure", run)
    out["ok"] = all(
        r["count_detected"] >= r["count_predicted"]
        and r["max_slope_dev"] < 1e-8
        and r["max_breakpoint_rel_dev"] < 1e-9
        and r["sides_ok"]
        and r["max_p_dev"] < 1e-9
        for r in out["lines"]
    )
    return out


# --- 6 -------------------------------------------------------------------

def check_renormalization(samples: int = 10_000, depth: int = 3, seed: int = 0) -> dict:
    def run():
        p = swap_params()
        bounds = y_bar_bounds(p)
        rep = renorm_check(p, samples, depth, seed, bounds=bounds)
        census = atom_census(p, levels=3, bounds=bounds)
        rep["y_bar_0"] = bounds["y_bar_0"]
        rep["census_new"] = [lv["new"] for lv in census["levels"]]
        rep["census_strictly_growing"] = census["strictly_growing"]
        return rep

    out = _timed("renormalization", run)
    out["ok"] = out["max_dev"] < 1e-9 and out["seconds"] < 60.0
    return out


# --- 7, 8 and 10 share the island search ---------------------------------

def _island_sets(max_n: int = 5):
    sets = []
    for label, p, j in (("reflective2", reflective_params(), 1), ("alpha_tilde_d3", island_alpha_params(), 1)):
        rejected = []
        cands = find_horizontal_orbits(p, j, max_n, rejected=rejected)
        sets.append((label, p, cands, rejected))
    return sets


def _geometric(heights) -> tuple[bool, list]:
    ratios = [b / a for a, b in zip(heights, heights[1:])]
    ok = len(ratios) >= 2 and all(0 < r < 1 for r in ratios)
    ok = ok and max(ratios) - min(ratios) < 1e-3 * max(ratios)
    return ok, ratios


def check_islands(max_n: int = 5, samples: int = 1000) -> dict:
    def run():
        rows = {}
        for label, p, cands, rejected in _island_sets(max_n):
            heights = [c.height for c in cands]
            geo, ratios = _geometric(heights)
            drifts = []
            for c in cands:
                v = verify_island(p, c, deltas=[c.epsilon / 2], samples=samples)
                drifts.append(v["max_rel_drift"])
            rows[label] = {
                "islands": len(cands),
                "heights": heights,
                "periods": [c.period for c in cands],
                "height_ratios": ratios,
                "geometric": geo,
                "distinct": len(set(heights)) == len(heights),
                "max_rel_drift": max(drifts) if drifts else math.inf,
                "rejected": rejected,
            }
        return {"sets": rows}

    out = _timed("periodic islands", run)
    out["ok"] = out["seconds"] < 120.0 and all(
        r["islands"] >= 3 and r["geometric"] and r["distinct"] and r["max_rel_drift"] < 1e-9
        for r in out["sets"].values()
    )
    return out


def check_circle_invariance(max_n: int = 5, samples: int = 1000) -> dict:
    def run():
        rows = {}
        for label, p, cands, _ in _island_sets(max_n):
            worst = 0.0
            outer_only = 0
            for c in cands:
                if c.middle_visits == 0:
                    outer_only += 1
                    continue
                v = verify_island(p, c, samples=samples)
                worst = max(worst, v["max_drift"], v["max_union_dev"])
            rows[label] = {"islands": len(cands), "max_abs_dev": worst, "outer_only_itineraries": outer_only}
        return {"sets": rows, "radii_per_island": 5, "samples_per_radius": samples}

    out = _timed("circle invariance", run)
    out["ok"] = all(r["islands"] > 0 and r["max_abs_dev"] < 1e-10 and r["outer_only_itineraries"] == 0
                    for r in out["sets"].values())
    return out


# --- 9 -------------------------------------------------------------------

def _rand_gr(rng: random.Random) -> GoldenRational:
    def q():
        return Fraction(rng.randint(-50, 50), rng.randint(1, 30))
    return GoldenRational(q(), q())


def _field_laws(rng, cases: int) -> int:
    bad = 0
    for _ in range(cases):
        x, y, z = _rand_gr(rng), _rand_gr(rng), _rand_gr(rng)
        ok = (x + y) + z == x + (y + z) and (x * y) * z == x * (y * z)
        ok = ok and x + y == y + x and x * y == y * x and x * (y + z) == x * y + x * z
        ok = ok and (x * y).norm() == x.norm() * y.norm()
        if x != 0:
            ok = ok and x * x.inverse() == 1
        if not ok:
            bad += 1
    return bad


def _g_orbit_list(lam, x, n):
    out = [x]
    for _ in range(n):
        x = g_apply(lam, x)
        out.append(x)
    return out


def _displacement_failures(rng, Ns=range(1, 31), per_N: int = 3) -> int:
    lam = PHI
    one = lam * 0 + 1
    bad = 0
    for N in Ns:
        dm, dp = d_bounds(lam, N)
        base = _g_orbit_list(lam, one, N)
        for _ in range(per_N):
            ell = dp * Fraction(rng.randint(0, 999), 1000)
            orb = _g_orbit_list(lam, one - ell, N)
            bad += sum(1 for n in range(N + 1) if orb[n] != base[n] - ell)
            if N >= 2:
                ell = dm * Fraction(rng.randint(0, 1000), 1000)
                orb = _g_orbit_list(lam, one + ell, N)
                bad += sum(1 for n in range(2, N + 1) if orb[n] != base[n] + ell)
    return bad


def _l2(rng, cases: int = 60) -> int:
    lam = PHI
    bad = 0
    done = 0
    while done < cases:
        ell = Fraction(rng.randint(50, 600), 1000)
        ellp = ell * Fraction(rng.randint(1, 99), 100)
        x = Fraction(rng.randint(0, 1618), 1000)
        if 1 <= x <= 1 + ell:
            continue
        dm = d_minus_local(lam, ell, x)
        lo = x - (ell - ellp)
        t = Fraction(rng.randint(1, 999), 1000)
        xp = lo + t * (x + dm - lo)
        if not (0 <= xp <= 1 + lam):
            continue
        n_hit, _ = first_hitting(lam, ell, x)
        a, b = x, xp
        for n in range(n_hit + 1):
            if n:
                a, b = g_ell_apply(lam, ell, a), g_ell_apply(lam, ellp, b)
            if a - b != x - xp:
                bad += 1
                break
        done += 1
    return bad


def _monotone(points: int = 500) -> dict:
    lam = PHI
    limit = 810  # points/limit < phi keeps the grid inside (0, lam]
    left = []
    right = []
    for i in range(1, points + 1):
        ell = Fraction(i, limit)
        left.append(first_hitting(lam, ell, lam * 0 + 1)[0])
        right.append(first_hitting(lam, ell, 1 + ell)[0])
    return {
        "left_nonincreasing": all(a >= b for a, b in zip(left, left[1:])),
        "right_nonincreasing": all(a >= b for a, b in zip(right, right[1:])),
    }


def _holder(rng, cases: int = 2000) -> int:
    bad = 0
    for _ in range(cases):
        nu = Fraction(rng.randint(1, 1000), rng.randint(1, 100))
        mu = nu + Fraction(rng.randint(1, 10 ** 6), rng.randint(1, 1000))
        if rng.random() < 0.5:
            mu = -mu
        C = 2 * mu / (mu + nu)
        D = 2 * mu / (mu - nu)
        if 1 / C + 1 / D != 1:
            bad += 1
    return bad


def check_properties(seed: int = 0, field_cases: int = 10_000) -> dict:
    def run():
        rng = random.Random(seed)
        return {
            "field_law_failures": _field_laws(rng, field_cases),
            "field_cases": field_cases,
            "displacement_failures": _displacement_failures(rng),
            "interval_shadow_failures": _l2(rng),
            "monotonicity": _monotone(),
            "conjugacy_failures": _holder(rng),
        }

    out = _timed("property suites", run)
    out["ok"] = (out["field_law_failures"] == 0 and out["displacement_failures"] == 0
                 and out["interval_shadow_failures"] == 0 and all(out["monotonicity"].values())
                 and out["conjugacy_failures"] == 0)
    return out


# --- 10 ------------------------------------------------------------------

def check_non_ergodicity(steps: int = 100_000, max_n: int = 3, inside: int = 16, outside: int = 64,
                         seed: int = 0) -> dict:
    def run():
        rows = {}
        for label, p, cands, _ in _island_sets(max_n):
            rows[label] = trap_check(p, cands[:3], steps=steps, inside=inside, outside=outside, seed=seed)
        return {
            "sets": rows,
            "not_checked": [
                "existence of continuous embeddings and barrier sets",
                "ergodicity for generic parameters",
            ],
            "reason": "both rest on non-constructive existence arguments; the trapped discs stand in as a "
                      "positive-measure invariant set witnessing non-ergodicity",
        }

    out = _timed("non-ergodicity witness", run)
    out["ok"] = all(r["inside_ok"] and r["outside_ok"] and r["outside_samples"] > 0 for r in out["sets"].values())
    return out


CRITERIA = (
    (1, check_golden_closed_forms),
    (2, check_bifurcation_sequences),
    (3, check_endpoint_formulas),
    (4, check_dynseq_closed_forms),
    (5, check_rho_structure),
    (6, check_renormalization),
    (7, check_islands),
    (8, check_circle_invariance),
    (9, check_properties),
    (10, check_non_ergodicity),
)


def run_all(k: int | None = None, only=None) -> dict:
    """Run every criterion (or those numbered in ``only``); ``k`` narrows the golden-family lists."""
    results = []
    for num, fn in CRITERIA:
        if only is not None and num not in only:
            continue
        kwargs = {}
        if k is not None and num in (1, 2, 3, 4):
            kwargs["ks"] = (k,)
        res = fn(**kwargs)
        res["criterion"] = num
        results.append(res)
    return {"ok": all(r["ok"] for r in results), "results": results}
