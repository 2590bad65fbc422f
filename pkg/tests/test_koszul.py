import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extkoszul.checks import clean_model_violations, generator_commutation_violations
from extkoszul.complexes import (
    ANTICOMMUTING,
    TruncationError,
    condense,
    homology_ranks,
    verify_complex,
)
from extkoszul.exact.domains import QQ, ZZ
from extkoszul.koszul import (
    CONCRETE,
    FORMAL,
    MULTIPLICATIVE,
    Element,
    ExtendedKoszul,
    KoszulIndex,
    apply_D,
    apply_dh,
    apply_dv,
    augmentation,
    augmentation_violations,
    build_elementary,
    build_extended,
    build_koszul,
    column_rescaling,
    delta_mult,
    generic_values,
    leibniz_delta_violations,
    leibniz_dh_violations,
    multiply_central,
    normalize_factor_form,
    quotient_ranks,
    slice_window,
    tensor_route,
)


def lab(J, a):
    return KoszulIndex.of(J, a)


# -- labels --------------------------------------------------------------


def test_label_gradings():
    L = lab((1, 3), (0, 4, 0))
    assert L.bidegree == (-4, 6)
    assert L.total_degree == 2
    assert L.weight == (1, 4, 1)
    assert L.format() == "e[1,3]*x[0,4,0]"
    assert lab((), (1, 0)).format() == "x[1,0]"


def test_label_validation():
    with pytest.raises(ValueError):
        KoszulIndex.of((1, 1), (0, 0))
    with pytest.raises(ValueError):
        KoszulIndex.of((3,), (0, 0))
    with pytest.raises(ValueError):
        KoszulIndex.of((), (-1, 0))


# -- elementary and extended complexes -----------------------------------


def test_elementary_block():
    D = build_elementary(5, 2, domain=ZZ)
    assert sum(len(D.basis(pq)) for pq in D.bidegrees()) == 6
    ex = KoszulIndex((1,), (1,))
    col = D.apply_v({ex: 1})
    assert col == {KoszulIndex((), (1,)): -5}
    assert D.convention == ANTICOMMUTING
    assert verify_complex(D, check_product=False) == []


def test_elementary_bound_zero_is_classical_block():
    D = build_elementary(5, 0, domain=ZZ)
    C = condense(D)
    assert C.ranks() == {0: 1, 1: 1}
    assert C.diff(1).to_dense() == [[-5]]


def test_formal_vertical_maps_vanish():
    K = ExtendedKoszul(2, FORMAL, bound=2)
    assert all(M.is_zero() for M in K.double.dv.values())
    with pytest.raises(ValueError):
        K.dv(Element.e(2, 1))


def test_extended_sizes():
    K = build_extended(2, CONCRETE, (2, 3), bound=1)
    C = condense(K.double)
    assert [C.rank(k) for k in range(3)] == [3, 6, 3]


def test_construction_errors():
    with pytest.raises(ValueError):
        ExtendedKoszul(0, bound=1)
    with pytest.raises(ValueError):
        ExtendedKoszul(2, CONCRETE, bound=1)
    with pytest.raises(ValueError):
        ExtendedKoszul(2, FORMAL)


def test_n1_agrees_with_elementary():
    K = ExtendedKoszul(1, CONCRETE, (7,), bound=3)
    assert K.double.same_as(build_elementary(7, 3, domain=ZZ))


def test_bound_zero_is_classical_koszul():
    K = ExtendedKoszul(3, CONCRETE, (2, 3, 5), bound=0)
    C = condense(K.double)
    assert C.ranks() == build_koszul(3, (2, 3, 5)).ranks()
    a = homology_ranks(condense(ExtendedKoszul(3, CONCRETE, (2, 3, 5), bound=0).double), mode="integral")
    b = homology_ranks(build_koszul(3, (2, 3, 5)), mode="integral")
    assert a.ranks == b.ranks and a.torsion == b.torsion


def test_tensor_route_matches_closed_formulas():
    for n in (1, 2, 3):
        r = (2, 3, 5)[:n]
        T = tensor_route(n, r, 2, ZZ)
        K = ExtendedKoszul(n, CONCRETE, r, bound=2).window(0, 3, MULTIPLICATIVE)
        assert T.same_as(K)


# -- differentials -------------------------------------------------------


def test_horizontal_examples():
    assert apply_dh(Element.e(2, 1, 2)).format() == "-1*e[2]*x[1,0]+1*e[1]*x[0,1]"
    assert apply_dh(Element.e(3, 1, 2, 3)).format() == "1*e[2,3]*x[1,0,0]-1*e[1,3]*x[0,1,0]+1*e[1,2]*x[0,0,1]"
    xi = Element.basis(lab((1, 2), (1, 0, 0)))
    assert apply_dh(xi).format() == "-1*e[2]*x[2,0,0]+1*e[1]*x[1,1,0]"


def test_horizontal_truncation_is_reported():
    with pytest.raises(TruncationError):
        apply_dh(Element.basis(lab((1,), (2, 0))), bound=2)
    assert apply_dh(Element.basis(lab((1,), (1, 0))), bound=2).format() == "1*x[2,0]"


def test_vertical_examples():
    r = (2, 3)
    assert apply_dv(Element.e(2, 1), r) == Element.unit(2).scale(-2)
    assert apply_dv(Element.e(2, 1, 2), r) == Element.e(2, 2).scale(2) - Element.e(2, 1).scale(3)
    with pytest.raises(ValueError):
        apply_dv(Element.e(2, 1), None)


def test_total_differential_of_generator():
    r = (2, 3)
    assert apply_D(Element.e(2, 1), r) == Element.x((1, 0)) - Element.unit(2).scale(2)


def test_multiplicative_and_stored_vertical_differ_by_sign():
    r = (2, 3, 5)
    for J in [(1,), (1, 2), (1, 2, 3), (2, 3)]:
        xi = Element.e(3, *J)
        assert apply_dv(xi, r) == delta_mult(xi, r).scale((-1) ** len(J))


def test_augmentation():
    r = (2, 3)
    assert augmentation(Element.x((2, 1)), r) == 12
    assert augmentation(Element.e(2, 1), r) == 0


# -- products ------------------------------------------------------------


def test_twisted_product_example():
    u = Element.basis(lab((2,), (1, 0, 0)))
    v = Element.basis(lab((3,), (0, 1, 0)))
    assert (u * v).format() == "-1*e[2,3]*x[1,1,0]"
    assert multiply_central(u, v).format() == "1*e[2,3]*x[1,1,0]"


def test_unit():
    xi = Element.basis(lab((1, 3), (0, 4, 0)))
    assert Element.unit(3) * xi == xi
    assert xi * Element.unit(3) == xi


def test_factor_form_signs():
    # sign (-1)^(sum_u j_u (a_1 + ... + a_{u-1}))
    assert normalize_factor_form([(1, 0), (1, 0)]) == (1, lab((1, 2), (0, 0)))
    assert normalize_factor_form([(0, 1), (1, 0)]) == (-1, lab((2,), (1, 0)))
    # an even power crossing e_3 gives no sign
    assert normalize_factor_form([(1, 0), (0, 4), (1, 0)]) == (1, lab((1, 3), (0, 4, 0)))
    assert normalize_factor_form([(1, 0), (0, 3), (1, 0)]) == (-1, lab((1, 3), (0, 3, 0)))


def test_factor_form_agrees_with_product():
    e1, e3 = Element.e(3, 1), Element.e(3, 3)
    x = Element.x((0, 4, 0))
    assert (e1 * x) * e3 == Element.basis(lab((1, 3), (0, 4, 0)))


def test_generators_commute_as_stated():
    for n in (1, 2, 3, 4):
        assert generator_commutation_violations(n) == []


labels3 = st.builds(
    lambda J, a: KoszulIndex.of(J, a),
    st.sets(st.integers(1, 3), max_size=3).map(sorted),
    st.tuples(*[st.integers(0, 2)] * 3),
)
elements3 = st.dictionaries(labels3, st.integers(-3, 3), max_size=3).map(lambda d: Element(3, d))


@settings(max_examples=60)
@given(elements3, elements3, elements3)
def test_twisted_product_is_associative(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert multiply_central(multiply_central(a, b), c) == multiply_central(a, multiply_central(b, c))


@settings(max_examples=60)
@given(elements3)
def test_dh_squares_to_zero(xi):
    assert apply_dh(apply_dh(xi)).is_zero()


@settings(max_examples=60)
@given(labels3, labels3)
def test_dh_is_a_derivation(u, v):
    a, b = Element.basis(u), Element.basis(v)
    p = -sum(u.a)
    assert apply_dh(a * b) == apply_dh(a) * b + (a * apply_dh(b)).scale((-1) ** p)


@settings(max_examples=60)
@given(labels3, labels3)
def test_delta_is_a_derivation(u, v):
    r = (2, 3, 5)
    a, b = Element.basis(u), Element.basis(v)
    q = len(u.J) + sum(u.a)
    assert delta_mult(a * b, r) == delta_mult(a, r) * b + (a * delta_mult(b, r)).scale((-1) ** q)


def test_exhaustive_identities_small():
    assert leibniz_dh_violations(3, 3) == []
    assert leibniz_delta_violations(3, 3) == []
    assert augmentation_violations(3, 3, (2, 3, 5)) == []
    ring, y = generic_values(3)
    assert clean_model_violations(3, 3, y) == []


def test_corrupted_sign_is_detected(monkeypatch):
    import extkoszul.koszul as kz

    orig = kz.dh_label

    def bad(label):
        out = orig(label)
        if label.J == (1, 2):
            out = [(-s, t) for s, t in out]
        return out

    monkeypatch.setattr(kz, "dh_label", bad)
    assert leibniz_dh_violations(2, 2)


# -- slices and columns --------------------------------------------------


def test_slice_windows():
    assert slice_window("K/s", 2, None, 3) == (0, 2)
    assert slice_window("Q^s", 2, None, 3) == (2, 3)
    assert slice_window("F^s", 1, None, 3) == (1, 4)
    assert slice_window("F^s/F^t", 1, 3, 3) == (1, 3)
    with pytest.raises(ValueError):
        slice_window("F^s/F^t", 3, 3, 3)
    with pytest.raises(ValueError):
        slice_window("Q^s", 5, None, 3)


def test_quotient_slice_ranks():
    K = ExtendedKoszul(2, CONCRETE, (2, 3), bound=1)
    assert condense(K.slice("K/s", 2)).ranks() == {0: 3, 1: 6, 2: 3}
    assert quotient_ranks(2, 2) == [3, 6, 3]
    assert K.slice("F^s", 0).same_as(K.double)


def test_column_rescaling_parity():
    for l in range(6):
        for s in (1, 3, 5):
            assert column_rescaling(l, s) % 2 == (l // 2) % 2
        assert column_rescaling(l, 0, "stored") == l * (l + 1) // 2


def test_multiplicative_form_commutes():
    K = ExtendedKoszul(2, CONCRETE, (2, 3), bound=2)
    D = K.window(0, 3, MULTIPLICATIVE)
    assert verify_complex(D) == []


def test_rational_coefficients():
    K = ExtendedKoszul(2, CONCRETE, (QQ.convert(1) / 2, 3), bound=2, domain=QQ)
    assert verify_complex(condense(K.double)) == []
