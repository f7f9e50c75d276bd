"""Additive functionals on random m-ary search trees."""

import json
from fractions import Fraction

from ._core import (
    Moments,
    MsearchError,
    brute_force_count,
    is_degenerate,
    j_integral,
    philox_block,
)
from . import _core

__all__ = [
    "Moments",
    "MsearchError",
    "brute_force_count",
    "constants",
    "is_degenerate",
    "j_integral",
    "limit_moments",
    "moment",
    "philox_block",
    "sample_tree",
    "simulate",
    "tree_counts",
    "verify",
]


def tree_counts(m, n):
    """Tree counts tau_0..tau_n as Python ints."""
    return [int(c) for c in _core.tree_counts(m, n)]


def constants(m, toll, bits=128):
    """Singular expansion and theorem constants as a dict of decimal strings."""
    return json.loads(_core.constants_json(m, toll, bits))


def limit_moments(law, m=2, s_max=6, bits=192):
    """Moments of a limit law ("yalpha:A", "yhalf", "shape", "space", "leaves")."""
    return json.loads(_core.limits_json(law, m, s_max, bits))


def moment(toll, m, s, n):
    """Exact E X_n^s for a rational toll."""
    return Fraction(Moments(toll, m, s, n, "exact").moment(s, n))


def simulate(m, n, toll, reps, seed=1, threads=1, model="uniform", bins=50):
    """Monte Carlo summary of X_n."""
    return json.loads(_core.simulate_json(m, n, toll, reps, seed, threads, model, bins))


def sample_tree(m, n, seed=1, stream=0):
    """One uniformly random tree as nested {"size", "children"} dicts."""
    return json.loads(_core.sample_tree_json(m, n, seed, stream))


def verify(suite="fast", only=(), threads=1, seed=1):
    """Run verification checks; returns the report dict."""
    return json.loads(_core.verify_json(suite, list(only), threads, seed))
