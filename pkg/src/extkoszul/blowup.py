"""The bigraded algebra ``A = sum_s Tor(E, I^s)`` inside ``Lambda_E(e) (x) E[x]``.

Classes are represented through their images in the associated graded
algebra, i.e. as elements of ``ker d`` in the twisted algebra.  The
generators are ``x_i`` in bidegree ``(0, 1)`` and
``a_L = d(e_{i_0} ^ ... ^ e_{i_k})`` in bidegree ``(k, 1)``.
"""

from itertools import combinations
from math import comb
from typing import NamedTuple

from .exact.domains import QQ
from .exact.linalg import Echelon
from .exact.polynomial import Polynomial, monomial_key, monomials_of_degree
from .koszul import Element, KoszulIndex, apply_dh, multiply_central, multiply_twisted
from .tor import tor_graded, tor_power_row


class BlowupClass(NamedTuple):
    element: Element
    k: int
    s: int
    member: bool

    def format(self):
        return self.element.format()


def _classify(xi):
    kinds = xi.kinds()
    if len(kinds) > 1:
        raise ValueError(f"element is not homogeneous: {kinds}")
    return kinds[0] if kinds else (None, None)


def as_class(xi):
    k, s = _classify(xi)
    return BlowupClass(xi, k, s, apply_dh(xi).is_zero())


def generator(label, n=None):
    """``a_L = d(e_{i_0} ^ ... ^ e_{i_k})`` for a strictly increasing ``L`` of size >= 2."""
    L = tuple(label)
    if len(L) < 2:
        raise ValueError("generator labels have at least two indices (single indices give x_i)")
    if any(L[i] >= L[i + 1] for i in range(len(L) - 1)):
        raise ValueError(f"generator label {L} is not strictly increasing")
    n = n or L[-1]
    if L[0] < 1 or L[-1] > n:
        raise ValueError(f"generator label {L} out of range 1..{n}")
    xi = apply_dh(Element.e(n, *L))
    return BlowupClass(xi, len(L) - 1, 1, True)


def x_class(a):
    """The degree-0 class ``x^a``."""
    return as_class(Element.x(tuple(a)))


def multiply(u, v, convention="twisted"):
    """Product of classes; ``convention="central"`` uses the x-central product instead."""
    ue = u.element if isinstance(u, BlowupClass) else u
    ve = v.element if isinstance(v, BlowupClass) else v
    if convention == "twisted":
        w = multiply_twisted(ue, ve)
    elif convention == "central":
        w = multiply_central(ue, ve)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    if w.is_zero():
        k = s = None
        if isinstance(u, BlowupClass) and isinstance(v, BlowupClass) and u.k is not None and v.k is not None:
            k, s = u.k + v.k, u.s + v.s
        return BlowupClass(w, k, s, True)
    return as_class(w)


def membership(xi):
    """``(True, None)`` if ``xi`` lies in ``ker d``, else ``(False, d(xi))``."""
    _classify(xi)
    d = apply_dh(xi)
    return (True, None) if d.is_zero() else (False, d)


def polynomial_element(f, n):
    """A polynomial in ``x`` (ints or :class:`Polynomial`) as an element of column ``deg f``."""
    if isinstance(f, Polynomial):
        if f.nvars != n:
            raise ValueError("polynomial has the wrong number of variables")
        return Element(n, {KoszulIndex((), a): c for a, c in f.terms.items()})
    return Element.unit(n).scale(f)


def relation_check(coeffs, side="right", n=None):
    """Evaluate ``sum f_L a_L`` (``side="left"``) or ``sum a_L f_L`` (``side="right"``).

    ``coeffs`` is a list of ``(f, L)`` with ``f`` a homogeneous polynomial in
    ``x`` (or an integer) and ``L`` a generator label.
    """
    if not coeffs:
        raise ValueError("empty combination")
    if n is None:
        n = max(max(L) for _, L in coeffs)
        for f, _ in coeffs:
            if isinstance(f, Polynomial):
                n = f.nvars
    total = Element(n)
    kinds = set()
    for f, L in coeffs:
        a = generator(L, n).element
        p = polynomial_element(f, n)
        if isinstance(f, Polynomial) and not f.is_homogeneous():
            raise ValueError("coefficient polynomial is not homogeneous")
        deg = f.degree() if isinstance(f, Polynomial) else 0
        kinds.add((len(L) - 1, 1 + deg))
        total = total + (multiply_twisted(p, a) if side == "left" else multiply_twisted(a, p))
    if len(kinds) > 1:
        raise ValueError(f"inhomogeneous combination: parts in {sorted(kinds)}")
    return total


def generator_labels(n, k):
    """Generator labels ``L`` with ``|L| = k + 1``."""
    return [tuple(c) for c in combinations(range(1, n + 1), k + 1)]


def generation_check(n, s, k):
    """Compare ``span{x^b a_L : |b| = s - 1, |L| = k + 1}`` with ``Tor_k(E, I^s)`` per weight."""
    if s < 1 or k < 1:
        raise ValueError("need s >= 1 and k >= 1")
    spanning = []
    for L in generator_labels(n, k):
        a = generator(L, n).element
        for b in monomials_of_degree(n, s - 1):
            spanning.append((b, L, multiply_twisted(Element.x(b), a)))
    row = tor_power_row(n, s, k)
    by_w = {}
    for b, L, el in spanning:
        if el.is_zero():
            continue
        w = next(iter(el.terms)).weight
        by_w.setdefault(w, []).append(el)
    tor_w = {}
    for el in row.basis:
        w = next(iter(el.terms)).weight
        tor_w.setdefault(w, []).append(el)
    blocks = []
    ok = True
    for w in sorted(set(by_w) | set(tor_w), key=monomial_key):
        labels = sorted({lab for el in by_w.get(w, []) + tor_w.get(w, []) for lab in el.terms})
        pos = {lab: i for i, lab in enumerate(labels)}
        span = Echelon(QQ)
        for el in by_w.get(w, []):
            span.add({pos[lab]: c for lab, c in el.terms.items()})
        both = Echelon(QQ)
        for el in by_w.get(w, []) + tor_w.get(w, []):
            both.add({pos[lab]: c for lab, c in el.terms.items()})
        tor_rank = len(tor_w.get(w, []))
        good = span.rank == tor_rank == both.rank
        ok = ok and good
        blocks.append({"weight": list(w), "span_rank": span.rank, "tor_rank": tor_rank, "ok": good})
    return {
        "n": n,
        "s": s,
        "k": k,
        "ok": ok,
        "span_rank": sum(b["span_rank"] for b in blocks),
        "tor_rank": row.rank,
        "blocks": blocks,
        "spanning": [
            {"x": list(b), "a": list(L), "value": el.format()} for b, L, el in spanning
        ],
    }


def gr_algebra(n, max_s):
    """The twisted algebra ``Lambda_E(e) (x) E[x]`` column by column, checked against graded Tor."""
    columns = []
    for s in range(max_s + 1):
        ranks = [comb(n, k) * comb(n + s - 1, n - 1) for k in range(n + 1)]
        columns.append({"s": s, "ranks": ranks, "matches_graded_tor": ranks == tor_graded(n, s).ranks()})
    return {"n": n, "columns": columns, "product": "twisted", "ok": all(c["matches_graded_tor"] for c in columns)}


def bicharacter_sign(u, v):
    """``(-1)^(s_u s_v + (k_u + s_u)(k_v + s_v))``: the commutation sign of homogeneous classes."""
    pu, qu = -u.s, u.k + u.s
    pv, qv = -v.s, v.k + v.s
    return -1 if (pu * pv + qu * qv) & 1 else 1


def n2_structure(max_s):
    """Rank table of ``A`` for ``n = 2`` against ``Lambda_E(a_12) (x) P``."""
    a12 = generator((1, 2), 2)
    rows = []
    ok = multiply(a12, a12).element.is_zero()
    for s in range(1, max_s + 1):
        tor = [tor_power_row(2, s, k).rank for k in range(3)]
        model = [s + 1, s, 0]
        rows.append({"s": s, "tor": tor, "model": model})
        ok = ok and tor == model
        # a_12 times monomials of degree s-1 spans the k = 1 part
        if s >= 1:
            span = Echelon(QQ)
            labels = {}
            for b in monomials_of_degree(2, s - 1):
                el = multiply_twisted(Element.x(b), a12.element)
                span.add({labels.setdefault(lab, len(labels)): c for lab, c in el.terms.items()})
            ok = ok and span.rank == s
    return {"rows": rows, "a12_squared_zero": multiply(a12, a12).element.is_zero(), "ok": ok}


def example_report():
    """Computed values for the displayed identities of the blowup algebra.

    Includes the product ``a_12 a_23`` against ``-x_2 a_123``, the vanishing
    alternating relations, the all-plus combinations evaluated as printed,
    and both sides of the ``a_123 a_234`` display under both products.
    """
    n3 = 3
    a12, a23, a13 = (generator(L, n3).element for L in [(1, 2), (2, 3), (1, 3)])
    a123 = generator((1, 2, 3), n3).element
    x = [Element.x(tuple(1 if j == i else 0 for j in range(n3))) for i in range(n3)]
    lhs = multiply_twisted(a12, a23)
    rhs = multiply_twisted(x[1], a123).scale(-1)
    rhs_right = multiply_twisted(a123, x[1]).scale(-1)
    central = multiply_central(a12, a23)
    alt3 = multiply_twisted(a23, x[0]) - multiply_twisted(a13, x[1]) + multiply_twisted(a12, x[2])
    plus3 = multiply_twisted(x[0], a23) + multiply_twisted(x[1], a13) + multiply_twisted(x[2], a12)

    n4 = 4
    g = {L: generator(L, n4).element for L in generator_labels(n4, 2)}
    x4 = [Element.x(tuple(1 if j == i else 0 for j in range(n4))) for i in range(n4)]
    alt4 = (
        multiply_twisted(g[(2, 3, 4)], x4[0])
        - multiply_twisted(g[(1, 3, 4)], x4[1])
        + multiply_twisted(g[(1, 2, 4)], x4[2])
        - multiply_twisted(g[(1, 2, 3)], x4[3])
    )
    plus4 = (
        multiply_twisted(x4[0], g[(2, 3, 4)])
        + multiply_twisted(x4[1], g[(1, 3, 4)])
        + multiply_twisted(x4[2], g[(1, 2, 4)])
        + multiply_twisted(x4[3], g[(1, 2, 3)])
    )
    a1234 = generator((1, 2, 3, 4), n4).element
    p_tw = multiply_twisted(g[(1, 2, 3)], g[(2, 3, 4)])
    p_ce = multiply_central(g[(1, 2, 3)], g[(2, 3, 4)])
    x2x3 = Element.x((0, 1, 1, 0))
    other = multiply_twisted(x2x3, a1234)
    return {
        "a12*a23": lhs.format(),
        "-x2*a123": rhs.format(),
        "a12*a23 == -x2*a123": lhs == rhs,
        "-a123*x2": rhs_right.format(),
        "a12*a23 (x central)": central.format(),
        "alternating n=3": alt3.format(),
        "all-plus n=3 as displayed": plus3.format(),
        "alternating n=4": alt4.format(),
        "all-plus n=4 as displayed": plus4.format(),
        "a123*a234 (twisted)": p_tw.format(),
        "a123*a234 (x central)": p_ce.format(),
        "x2*x3*a1234": other.format(),
        "a123*a234 (k, s)": [4, 2],
        "x2*x3*a1234 (k, s)": [3, 3],
    }


__all__ = [
    "BlowupClass",
    "as_class",
    "bicharacter_sign",
    "example_report",
    "generation_check",
    "generator",
    "generator_labels",
    "gr_algebra",
    "membership",
    "multiply",
    "n2_structure",
    "relation_check",
    "x_class",
]
