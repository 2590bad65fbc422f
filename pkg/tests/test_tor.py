import pytest

from extkoszul.checks import delta_linearity_violations, delta_snake_mismatches, euler_characteristic
from extkoszul.exact.sparse import SparseMatrix
from extkoszul.koszul import Element, KoszulIndex
from extkoszul.tor import (
    SCHEMA,
    delta,
    delta_snake,
    expected_graded_rank,
    ext_ranks,
    freeness_certificate,
    product_triviality_check,
    tor_graded,
    tor_power,
    tor_quotient,
    tor_subquotient,
)


def test_graded_ranks():
    assert tor_graded(3, 0).ranks() == [1, 3, 3, 1]
    assert tor_graded(2, 2).ranks() == [3, 6, 3]
    for n in (1, 2, 3, 4):
        for s in range(4):
            assert tor_graded(n, s).ranks() == [expected_graded_rank(n, s, k) for k in range(n + 1)]


@pytest.mark.parametrize("n,s,ranks", [(2, 1, [2, 1, 0]), (2, 2, [3, 2, 0]), (3, 1, [3, 3, 1, 0])])
def test_power_tables(n, s, ranks):
    tab = tor_power(n, s)
    assert tab.ranks() == ranks
    assert all(r.free_certified and r.exact_certified for r in tab.rows)


def test_power_basis_is_delta_image():
    tab = tor_power(2, 1)
    assert [b.format() for b in tab.rows[1].basis] == ["-1*e[2]*x[1,0]+1*e[1]*x[0,1]"]


def test_quotient_tables():
    tab = tor_quotient(2, 2)
    assert tab.ranks() == [1, 3, 2]
    assert [r.reduced_rank for r in tab.rows] == [0, 3, 2]
    s1 = tor_quotient(2, 1)
    assert s1.ranks() == [1, 2, 1]
    assert [r.reduced_rank for r in s1.rows] == [0, 2, 1]


@pytest.mark.parametrize("n,s", [(1, 1), (2, 1), (2, 3), (3, 2)])
def test_quotient_matches_homology_oracle(n, s):
    q = tor_quotient(n, s)
    assert q.ranks() == tor_subquotient(n, 0, s).ranks()
    assert euler_characteristic(q.ranks()) == 0


def test_subquotient_tables():
    assert tor_subquotient(2, 1, 2).ranks() == [2, 4, 2]
    assert tor_subquotient(2, 1, 3).ranks() == [2, 5, 3]


def test_delta_examples():
    assert delta(Element.e(2, 1, 2)).format() == "-1*e[2]*x[1,0]+1*e[1]*x[0,1]"
    assert delta(Element.x((1, 0))).is_zero()
    with pytest.raises(ValueError):
        delta(Element.e(2, 1) + Element.e(2, 1, 2))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("s", [0, 1, 2])
def test_delta_agrees_with_snake(n, s):
    assert delta_snake_mismatches(n, s) == []
    assert delta_linearity_violations(n, s) == []


def test_snake_example():
    xi = Element.basis(KoszulIndex((1, 2), (1, 0, 0)))
    assert delta_snake(xi).format() == "-1*e[2]*x[2,0,0]+1*e[1]*x[1,1,0]"
    with pytest.raises(ValueError):
        delta_snake(xi, 2)


def test_freeness_certificate_negative_control():
    assert not freeness_certificate([SparseMatrix.diagonal([2])]).ok
    assert freeness_certificate([SparseMatrix.from_dense([[1, -1]])]).ok


def test_ext_needs_certificate():
    tab = tor_power(2, 1)
    assert ext_ranks(tab) == [2, 1, 0]
    broken = tab._replace(rows=[tab.rows[0]._replace(free_certified=False)] + tab.rows[1:])
    with pytest.raises(ValueError):
        ext_ranks(broken)


@pytest.mark.parametrize("n,s", [(2, 1), (2, 2), (3, 1)])
def test_power_products_are_boundaries(n, s):
    rep = product_triviality_check(n, s, "power")
    assert rep["ok"] and rep["pairs"]


@pytest.mark.parametrize("s", [2, 3])
def test_reduced_quotient_products_vanish(s):
    assert product_triviality_check(3, s, "quotient")["ok"]


def test_json_table():
    data = tor_power(2, 1).to_json()
    assert data["schema"] == SCHEMA
    assert data["ranks"] == [2, 1, 0]
    for key in ("n", "s", "mode", "bound"):
        assert key in data
