"""
Acceptance criteria, each at its stated tolerance and run size.

Every criterion prints one PASS/FAIL line (collected into the pytest summary).
Runs standalone too: python tests/test_acceptance.py
"""
import sys

import pytest

from tce_dynamics.verify import CRITERIA

# wall-clock limits that are part of the criteria themselves
RUNTIME_LIMITS = {1: 1.0, 2: 10.0, 6: 60.0, 7: 120.0}

# short keys for a readable line; details live in the result dicts
DETAIL_KEYS = (
    "max_rel_dev", "max_dev", "mismatches", "islands", "max_rel_drift", "max_radius_dev",
    "outside_min_dist_over_eps", "inside_max_radius_dev",
)


def line_for(num: int, res: dict) -> str:
    limit = RUNTIME_LIMITS.get(num)
    timing = res["seconds"] <= limit if limit else True
    status = "PASS" if res["ok"] and timing else "FAIL"
    bits = ["%s=%s" % (k, _short(res[k])) for k in DETAIL_KEYS if k in res]
    t = "%.2fs" % res["seconds"] + (" (limit %gs)" % limit if limit else "")
    return "%s criterion %d %s [%s] %s" % (status, num, res["name"], t, " ".join(bits))


def _short(v):
    if isinstance(v, float):
        return "%.3g" % v
    if isinstance(v, (list, tuple)):
        return str(len(v))
    return str(v)


@pytest.mark.acceptance
@pytest.mark.parametrize("num,fn", CRITERIA, ids=["criterion_%d" % n for n, _ in CRITERIA])
def test_criterion(num, fn, acceptance_log):
    res = fn()
    line = line_for(num, res)
    acceptance_log.append((num, line))
    print(line)
    assert res["ok"], line
    if num in RUNTIME_LIMITS:
        assert res["seconds"] <= RUNTIME_LIMITS[num], line


if __name__ == "__main__":
    failed = 0
    for num, fn in CRITERIA:
        res = fn()
        line = line_for(num, res)
        failed += line.startswith("FAIL")
        print(line, flush=True)
    sys.exit(1 if failed else 0)
