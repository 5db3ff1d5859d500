"""Generalized Fermat equation toolkit: exact arithmetic, Frey curves, signature catalog and searches."""
import json
import os
from fractions import Fraction

_here = os.path.dirname(__file__)
if os.path.exists(os.path.join(_here, "data", "gfe_config.json")):
    os.environ.setdefault("GFE_CONFIG", os.path.join(_here, "data", "gfe_config.json"))

from . import _core  # noqa: E402
from ._core import ConfigError, DomainError  # noqa: E402,F401

__all__ = [
    "ConfigError", "DomainError", "factor", "radical", "nth_root", "curve", "status",
    "count", "known_solutions", "forbidden_interval", "scan_small_z1", "run_campaign",
]


def factor(n):
    """{prime: exponent} for a positive integer."""
    return {int(p): e for p, e in _core.factor(str(n)).items()}


def radical(n):
    return int(_core.radical(str(n)))


def nth_root(n, t):
    """(floor(n^(1/t)), exact)."""
    r, exact = _core.nth_root(str(n), t)
    return int(r), exact


def curve(family, a, b, c):
    d = json.loads(_core.curve(family, str(a), str(b), str(c)))
    d["c4"] = int(d["c4"])
    d["N"] = int(d["N"])
    d["delta"] = Fraction(d["delta"])
    d["j"] = Fraction(d["j"])
    return d


def status(r, s, t, exclusions=True):
    return json.loads(_core.status(r, s, t, exclusions))


def count(mode="ge4", exclusions=True):
    """Ledger of remaining signatures; mode is "ge4" or "beal"."""
    return json.loads(_core.count(mode, exclusions))


def known_solutions():
    return _core.known_solutions()


def forbidden_interval(b1, b2, ceiling):
    lo, hi = _core.forbidden_interval(str(Fraction(b1)), str(Fraction(b2)), str(Fraction(ceiling)))
    return Fraction(lo), Fraction(hi)


def scan_small_z1(z1_bound=19, t_min=7, t_max=9, height=10**10):
    return _core.scan_small_z1(z1_bound, t_min, t_max, height)


def run_campaign(plan, threads=1):
    """Runs a campaign plan (dict or path to JSON) and returns the report."""
    if isinstance(plan, (str, os.PathLike)):
        with open(plan) as f:
            plan = json.load(f)
    return json.loads(_core.run_campaign(json.dumps(plan), threads))
