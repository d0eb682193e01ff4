from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tdl.census import census, triangle_count
from tdl.constructions import as_fraction, build, lower_bound_exponent, plan, relabel, triangles_per_cluster
from tdl.errors import CapacityError, SpecError
from tdl.graphs import validate
from fractions import Fraction


class TestPlan:
    def test_kout_example(self):
        p = plan("k-out", 30, 2, 16)
        assert (p.cluster_size, p.triangles_per_cluster, p.cluster_count, p.remainder) == (3, 8, 2, 24)

    def test_kout_k3(self):
        p = plan("k-out", 40, 3, 32)
        assert p.triangles_per_cluster == 32 and p.cluster_count == 1

    def test_general_clique(self):
        p = plan("general", 50, 2, 20)
        assert p.cluster_size == 6 and p.links_used_in_clusters == 15 and p.remainder_links == 85

    def test_per_cluster(self):
        assert triangles_per_cluster("k-out", 2) == 8
        assert triangles_per_cluster("k-regular", 3) == 4

    def test_not_divisible_names_neighbours(self):
        with pytest.raises(CapacityError, match="16 and 24") as exc:
            plan("k-out", 30, 2, 17)
        assert exc.value.constraint == "cluster divisibility"

    def test_general_not_binomial(self):
        with pytest.raises(CapacityError, match="20 and 35"):
            plan("general", 60, 3, 21)

    def test_too_many_clusters(self):
        with pytest.raises(CapacityError, match="nodes"):
            plan("k-out", 10, 2, 8 * 4)

    def test_regular_parity(self):
        with pytest.raises(CapacityError, match="even"):
            plan("k-regular", 15, 3, 4)

    def test_k1_only_zero(self):
        with pytest.raises(CapacityError):
            plan("k-out", 10, 1, 1)
        assert plan("k-out", 10, 1, 0).predicted_t == 0

    def test_bad_model(self):
        with pytest.raises(SpecError):
            plan("tournament", 10, 2, 0)


FEASIBLE = [
    ("k-out", 30, 2, 16),
    ("k-out", 40, 3, 32),
    ("k-out", 100, 2, 0),
    ("k-regular", 20, 3, 4),
    ("k-regular", 31, 2, 3),
    ("general", 50, 2, 20),
    ("general", 40, 3, 35),
]


@pytest.mark.parametrize("model,n,k,t", FEASIBLE)
def test_build_exact(model, n, k, t):
    p = plan(model, n, k, t)
    g = build(p)
    assert validate(g, model, k).ok
    assert census(g, model).t == p.predicted_t == t
    assert census(g.restrict(p.remainder_nodes)).t == 0


def test_kout_example_links():
    r = census(build(plan("k-out", 30, 2, 16)))
    assert r.t == 16 and r.ell_triang == 12


def test_permuted_build_keeps_count():
    p = plan("k-regular", 40, 3, 8)
    g = build(p, permute_seed=5)
    assert g != build(p)
    assert census(g).t == 8 and validate(g, "k-regular", 3).ok


def test_relabel_identity():
    g = build(plan("k-out", 12, 2, 8))
    assert relabel(g, range(1, 13)) == g


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["k-out", "k-regular"]), st.integers(2, 3), st.integers(0, 5), st.integers(0, 30))
def test_plans_are_exact(model, k, clusters, extra):
    per = triangles_per_cluster(model, k)
    rem = 2 * k + 2 * extra
    n = (k + 1) * clusters + rem
    p = plan(model, n, k, per * clusters)
    g = build(p)
    assert validate(g, model, k).ok
    assert triangle_count(g) == p.predicted_t


class TestLowerBound:
    def test_kout(self):
        assert lower_bound_exponent("k-out", 2, Fraction("0.3")).ratio == Fraction(37, 40)

    def test_zero_alpha(self):
        assert lower_bound_exponent("k-out", 7, 0).ratio == 1

    def test_regular_vacuous(self):
        lb = lower_bound_exponent("k-regular", 3, 1)
        assert lb.vacuous and lb.ratio < 0

    def test_general(self):
        assert lower_bound_exponent("general", 2, 5).ratio == 1

    def test_negative_alpha(self):
        with pytest.raises(SpecError):
            lower_bound_exponent("k-out", 2, -1)


def test_as_fraction():
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction("3/4") == Fraction(3, 4)
