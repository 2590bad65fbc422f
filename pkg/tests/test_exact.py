import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extkoszul import _core
from extkoszul._core import fallback
from extkoszul.exact.domains import GF, QQ, ZZ, ModP
from extkoszul.exact.linalg import (
    Echelon,
    chain_divisors,
    is_unimodular_certificate,
    rank,
    rank_and_kernel,
    smith_normal_form,
    solve,
)
from extkoszul.exact.polynomial import Polynomial, PolynomialRing, monomials_of_degree, monomials_up_to
from extkoszul.exact.sparse import SparseMatrix

small_ints = st.integers(min_value=-5, max_value=5)


def matrices(max_rows=5, max_cols=5, elements=small_ints):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(elements, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


# -- domains -------------------------------------------------------------


def test_modp_arithmetic():
    F = GF(7)
    a, b = F.convert(3), F.convert(5)
    assert a + b == F.convert(1)
    assert a * b == F.convert(1)
    assert a / b == F.convert(3 * 3)
    assert -a == F.convert(4)
    assert F.inverse(a) * a == F.one


def test_gf_rejects_composite():
    with pytest.raises(ValueError):
        GF(6)


def test_rational_convert():
    assert QQ.convert(3) == Fraction(3)
    assert ZZ.convert(Fraction(4, 1)) == 4
    with pytest.raises((TypeError, ValueError)):
        ZZ.convert(Fraction(1, 2))


# -- polynomials ---------------------------------------------------------

polys = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-4, 4), max_size=4
).map(lambda d: Polynomial(2, d))


@given(polys, polys, polys)
def test_polynomial_ring_axioms(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == Polynomial(2)
    assert f * 1 == f


@given(polys, polys, st.tuples(small_ints, small_ints))
def test_evaluation_is_a_ring_map(f, g, pt):
    assert (f * g).evaluate(pt) == f.evaluate(pt) * g.evaluate(pt)
    assert (f + g).evaluate(pt) == f.evaluate(pt) + g.evaluate(pt)


def test_polynomial_format_and_degree():
    R = PolynomialRing(QQ, 2)
    y1, y2 = R.gens()
    f = y1 * y1 - 2 * y2 + 3
    assert f.degree() == 2
    assert not f.is_homogeneous()
    assert (y1 * y2).is_homogeneous()
    assert "y1^2" in f.format()


def test_monomial_counts():
    assert len(monomials_of_degree(3, 4)) == 15
    assert len(monomials_up_to(2, 3)) == 10
    assert monomials_of_degree(2, 2) == [(2, 0), (1, 1), (0, 2)]


# -- sparse matrices -----------------------------------------------------


def test_sparse_basics():
    A = SparseMatrix.from_dense([[1, 2], [0, 3]])
    B = SparseMatrix.identity(2)
    assert A @ B == A
    assert (A - A).is_zero()
    assert A.transpose().to_dense() == [[1, 0], [2, 3]]
    assert A.apply([1, 1]) == [3, 3]


# -- Smith normal form ---------------------------------------------------


def test_snf_small_examples():
    assert smith_normal_form(SparseMatrix.from_dense([[2, 4], [6, 8]])).divisors == [2, 4]
    assert smith_normal_form(SparseMatrix.diagonal([6, 4])).divisors == [2, 12]
    assert smith_normal_form(SparseMatrix.from_dense([[1, 1], [1, 1]])).divisors == [1]
    assert smith_normal_form(SparseMatrix.zero(3, 2)).divisors == []


def test_unimodular_certificate_negative_control():
    assert is_unimodular_certificate(SparseMatrix.from_dense([[1, 2], [3, 5]]))
    assert not is_unimodular_certificate(SparseMatrix.diagonal([2]))
    assert not is_unimodular_certificate(SparseMatrix.from_dense([[2, 0], [0, 1]]))


def test_chain_divisors_divisibility():
    d = chain_divisors([12, 18, 8])
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))
    assert d[0] * d[1] * d[2] == 12 * 18 * 8


@given(matrices())
def test_snf_invariant_under_permutations(rows):
    M = SparseMatrix.from_dense(rows)
    rng = random.Random(len(rows) * 31 + len(rows[0]))
    perm_r = list(range(len(rows)))
    perm_c = list(range(len(rows[0])))
    rng.shuffle(perm_r)
    rng.shuffle(perm_c)
    P = SparseMatrix.from_dense([[rows[i][j] for j in perm_c] for i in perm_r])
    assert smith_normal_form(M) == smith_normal_form(P)
    assert smith_normal_form(M) == smith_normal_form(M.transpose())


@given(matrices())
def test_snf_determinant_for_square(rows):
    n = min(len(rows), len(rows[0]))
    sq = [r[:n] for r in rows[:n]]
    M = SparseMatrix.from_dense(sq)
    snf = smith_normal_form(M)
    det = _det(sq)
    if det == 0:
        assert snf.rank < n
    else:
        prod = 1
        for d in snf.divisors:
            prod *= d
        assert snf.rank == n and prod == abs(det)


def _det(rows):
    m = [[Fraction(v) for v in r] for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return int(det)


@given(matrices(6, 6, st.integers(-50, 50)))
def test_compiled_and_fallback_agree(rows):
    ncols = len(rows[0])
    ref = chain_divisors(fallback.diagonalize_int([list(r) for r in rows], ncols))
    got = chain_divisors(_core.diagonalize_int([list(r) for r in rows], ncols))
    assert ref == got
    p = 10007
    assert fallback.rank_mod_p([list(r) for r in rows], ncols, p) == _core.rank_mod_p(
        [list(r) for r in rows], ncols, p
    )


def test_fallback_handles_big_entries():
    big = 2**70
    rows = [[big, 1], [1, big]]
    assert chain_divisors(_core.diagonalize_int(rows, 2)) == [1, big * big - 1]


# -- ranks and kernels ---------------------------------------------------


@settings(max_examples=60)
@given(matrices())
def test_rank_q_equals_rank_mod_large_prime(rows):
    # |minors| <= (5 sqrt 5)^5 < p, so no minor vanishes modulo p by accident
    p = 1000003
    Mq = SparseMatrix.from_dense(rows, QQ)
    Mp = SparseMatrix.from_dense(rows, GF(p))
    assert rank(Mq) == rank(Mp)


def test_rank_drops_mod_small_prime():
    M = SparseMatrix.from_dense([[2, 0], [0, 3]])
    assert rank(M.change_domain(QQ)) == 2
    assert rank(M.change_domain(GF(2))) == 1


@given(matrices())
def test_kernel_is_kernel(rows):
    M = SparseMatrix.from_dense(rows, QQ)
    r, kernel = rank_and_kernel(M)
    assert r + len(kernel) == M.ncols
    for v in kernel:
        assert all(x == 0 for x in M.apply(list(v)))


def test_kernel_over_prime_field():
    F = GF(5)
    M = SparseMatrix.from_dense([[1, 2, 3], [2, 4, 2]], F)
    r, kernel = rank_and_kernel(M)
    assert r == 2 and len(kernel) == 1
    v = kernel[0]
    assert all(isinstance(x, ModP) for x in v)
    assert all(x == 0 for x in M.apply(list(v)))


def test_echelon_and_solve():
    ech = Echelon(QQ, track=True)
    assert ech.add({0: 1, 1: 1}, "u")
    assert ech.add({1: 1, 2: 1}, "v")
    assert not ech.add({0: 1, 1: 2, 2: 1}, "w")
    assert ech.express({0: 2, 1: 3, 2: 1}) == {"u": 2, "v": 1}
    assert ech.express({2: 5, 0: 1}) is None
    M = SparseMatrix.from_dense([[1, 1], [0, 2]])
    assert solve(M, [3, 4]) == [1, 2]
    assert solve(SparseMatrix.from_dense([[1], [1]]), [1, 2]) is None
