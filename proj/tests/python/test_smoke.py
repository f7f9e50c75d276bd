from fractions import Fraction

import pytest

import msearch


def test_tree_counts_binary_are_catalan():
    assert msearch.tree_counts(2, 6) == [1, 1, 2, 5, 14, 42, 132]
    assert int(msearch.brute_force_count(3, 5)) == msearch.tree_counts(3, 5)[5]


def test_exact_moments():
    assert msearch.moment("leaves", 2, 1, 3) == Fraction(6, 5)
    m = msearch.Moments("space", 2, 2, 20)
    assert m.exact
    assert m.central(2, 20) == "0"
    assert m.csv().startswith("n,s,mu_exact,mean,var,skew,kurt\n")


def test_constants_m2():
    c = msearch.constants(2, "leaves")
    assert c["rho"] == "0.25"
    assert c["d1"] == "0.25"
    assert float(c["sigma_m"]) == pytest.approx(2 ** -0.5, abs=1e-15)


def test_limits_and_quadrature():
    seq = msearch.limit_moments("yalpha:1", s_max=2)
    assert float(seq["moments"][2]) == pytest.approx(5 / 3, abs=1e-15)
    value, err = msearch.j_integral(1, 1, 0)
    assert value == pytest.approx(3.141592653589793, abs=1e-12)
    with pytest.raises(msearch.MsearchError):
        msearch.j_integral(0, 1, 0)


def test_degeneracy():
    assert msearch.is_degenerate("space", 2)
    assert not msearch.is_degenerate("leaves", 2)


def test_philox_known_answer():
    assert msearch.philox_block(0, 0, 0, 0, 0, 0) == [0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8]


def test_simulation_is_reproducible():
    a = msearch.simulate(2, 60, "leaves", 500, seed=9)
    b = msearch.simulate(2, 60, "leaves", 500, seed=9, threads=2)
    assert a == b
    assert a["reps"] == 500
    assert sum(a["histogram"]["counts"]) == 500


def test_sample_tree():
    t = msearch.sample_tree(3, 12, seed=4)
    assert t["size"] == 12
    assert len(t["children"]) == 3
    assert sum(c["size"] for c in t["children"]) == 12 - 2


def test_verify_subset():
    report = msearch.verify(only=["constants-m2"])
    assert report["passed"] == 1
    assert report["checks"][0]["check_id"] == "constants-m2"


def test_errors():
    with pytest.raises(msearch.MsearchError):
        msearch.constants(2, "power:x")
