import json
import os
from fractions import Fraction

import pytest

import gfe

ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


def test_arith():
    assert gfe.factor(720) == {2: 4, 3: 2, 5: 1}
    assert gfe.radical(2**10 * 3**4 * 7) == 42
    assert gfe.nth_root(2**70 + 1, 7) == (1024, False)
    assert gfe.nth_root(65**7, 7) == (65, True)
    with pytest.raises(gfe.DomainError):
        gfe.factor(0)


def test_known_solutions():
    ks = gfe.known_solutions()
    assert len(ks) == 10
    assert all(ok for _, ok in ks)
    assert ("2^5 + 7^2 = 3^4", True) in ks


def test_curve():
    d = gfe.curve("general", -1, 16, -15)
    assert d["j"] * d["delta"] == Fraction(d["c4"]) ** 3
    assert d["N"] == d["j"].denominator
    with pytest.raises(gfe.DomainError):
        gfe.curve("general", 2, 4, 6)


def test_catalog():
    assert gfe.status(2, 4, 4)["chi"] == "Euclidean"
    assert gfe.status(4, 5, 11)["clause"] == "4-5-n"
    assert gfe.status(2, 3, 5)["status"] == "OutOfScope"
    ge4 = gfe.count("ge4")
    assert ge4["count"] == 244
    with open(os.path.join(ROOT, "tests", "golden", "catalog_ge4.json")) as f:
        assert ge4["signatures"] == json.load(f)["signatures"]
    beal = gfe.count("beal")
    assert beal["discrepancy"] is None or beal["discrepancy"]["expected"] == 2446


def test_interval():
    assert gfe.forbidden_interval(Fraction(1, 2), 10, 30) == (20, 30)
    with pytest.raises(gfe.DomainError):
        gfe.forbidden_interval(Fraction(1, 2), 20, 30)


def test_small_z1_scan():
    got = gfe.scan_small_z1(height=1000)
    assert len(got) == 3


def test_desk_campaign():
    plan = os.path.join(ROOT, "data", "plans", "desk.json")
    a = gfe.run_campaign(plan, threads=1)
    b = gfe.run_campaign(plan, threads=4)
    assert a["hash"] == b["hash"]
    assert [r for r in a["records"]] == [r for r in b["records"]]
    assert len(a["records"]) == 1
