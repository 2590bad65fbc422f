"""Named invariant suites, shared by the CLI and the acceptance tests.

Every check returns a :class:`CheckResult`; a suite is a list of them.
``n`` always means "every n' from 1 (or 2) up to n".
"""

from math import comb
from typing import NamedTuple

from .blowup import (
    bicharacter_sign,
    example_report,
    generation_check,
    generator,
    generator_labels,
    gr_algebra,
    multiply,
    n2_structure,
)
from .complexes import condense, expand_multigraded, homology_ranks, suspend, verify_complex
from .koszul import (
    CONCRETE,
    FORMAL,
    MULTIPLICATIVE,
    Element,
    ExtendedKoszul,
    apply_D,
    apply_dh,
    augmentation_violations,
    clean_model,
    column_rescaling,
    generic_values,
    koszul_tensor_monomials,
    labels_in_window,
    leibniz_delta_violations,
    leibniz_dh_violations,
    multiply_twisted,
    rescale_exterior,
)
from .resolutions import (
    augmentation_check,
    covering_report,
    resolution_of_power,
    resolution_of_quotient,
    resolution_of_subquotient,
    verify_exactness,
)
from .tor import (
    delta,
    delta_snake,
    expected_graded_rank,
    ext_ranks,
    product_triviality_check,
    tor_graded,
    tor_power,
    tor_quotient,
    tor_subquotient,
)


class CheckResult(NamedTuple):
    suite: str
    name: str
    ok: bool
    detail: dict

    def to_json(self):
        return {"suite": self.suite, "name": self.name, "ok": self.ok, "detail": self.detail}


def _result(suite, name, violations, **detail):
    if isinstance(violations, bool):
        return CheckResult(suite, name, violations, detail)
    shown = [str(v) for v in violations[:5]]
    return CheckResult(suite, name, not violations, dict(detail, violations=len(violations), first=shown))


def _sign(e):
    return -1 if e & 1 else 1


# ---------------------------------------------------------------------------
# signs


def clean_model_violations(n, bound, r):
    """Labels where ``D`` differs from the Koszul differential of ``x - r`` after
    ``e_J -> (-1)^floor(|J|/2) e_J``.  Only labels whose image stays below the bound."""
    bad = []
    for lab in labels_in_window(n, 0, bound):
        l = len(lab.J)
        if l == 0:
            continue
        sign = _sign(l // 2 + (l - 1) // 2)
        if apply_D(Element.basis(lab), r) != clean_model(lab, r).scale(sign):
            bad.append(lab)
    return bad


def generator_commutation_violations(n):
    """Twisted product on generators: x's commute, e's and e-x pairs anticommute."""
    gens = [Element.e(n, i) for i in range(1, n + 1)]
    gens += [Element.x(tuple(1 if j == i else 0 for j in range(n))) for i in range(n)]
    bad = []
    for u in gens:
        for v in gens:
            ue = bool(next(iter(u.terms)).J)
            ve = bool(next(iter(v.terms)).J)
            sign = 1 if not ue and not ve else -1
            if multiply_twisted(u, v) != multiply_twisted(v, u).scale(sign):
                bad.append((u.format(), v.format()))
    return bad


def suite_signs(n, bound):
    out = []
    for m in range(1, n + 1):
        ring, y = generic_values(m)
        K = ExtendedKoszul(m, CONCRETE, y, bound, ring)
        D = K.double
        tag = {"n": m, "bound": bound}
        rep = verify_complex(D, check_product=False)
        for ident in ("dh dh = 0", "dv dv = 0", "anticommuting squares"):
            out.append(_result("signs", ident, [v for v in rep if v["identity"] == ident], **tag))
        rep = verify_complex(K.window(0, bound + 1, MULTIPLICATIVE), check_product=False)
        out.append(_result("signs", "commuting squares (multiplicative form)", rep, **tag))
        out.append(_result("signs", "condensed D D = 0", verify_complex(condense(D)), **tag))
        out.append(_result("signs", "eps D = 0", augmentation_violations(m, bound, y), **tag))
        out.append(_result("signs", "Leibniz dh", leibniz_dh_violations(m, bound), **tag))
        out.append(_result("signs", "Leibniz delta", leibniz_delta_violations(m, bound), **tag))
        out.append(_result("signs", "clean model", clean_model_violations(m, bound, y), **tag))
        out.append(_result("signs", "generator commutation", generator_commutation_violations(m), n=m))
    return out


# ---------------------------------------------------------------------------
# rows and columns


def row_homology(n, q):
    """Integral homology of row ``q`` (formal coefficients) as ``(ranks, torsion)``."""
    K = ExtendedKoszul(n, FORMAL, bound=q)
    rep = homology_ranks(K.row(q), mode="integral")
    return {k: v for k, v in rep.ranks.items() if v}, rep.torsion


def suite_rows(n, bound):
    out = []
    for m in range(1, n + 1):
        for q in range(bound + 1):
            ranks, torsion = row_homology(m, q)
            want = {0: 1} if q == 0 else {}
            ok = ranks == want and not torsion
            out.append(CheckResult("rows", f"row q={q}", ok, {"n": m, "ranks": ranks, "torsion": torsion}))
    return out


def column_homology(n, s):
    """``y``-blockwise homology of column ``s`` over ``QQ[y]``; dict degree -> total rank."""
    ring, y = generic_values(n)
    K = ExtendedKoszul(n, CONCRETE, y, s, ring)
    C = K.column(s)
    expanded = expand_multigraded(C, lambda lab: lab.weight, s + n)
    rep = homology_ranks(expanded)
    return {k: v for k, v in rep.ranks.items() if v}


def column_identification(n, s):
    """Rescaled commuting column ``s`` against ``K (x) monomials of degree s``."""
    ring, y = generic_values(n)
    K = ExtendedKoszul(n, CONCRETE, y, s, ring)
    col = rescale_exterior(K.column(s), lambda l: column_rescaling(l, s))
    return col.same_as(koszul_tensor_monomials(n, y, s, ring))


def suspension_identity(n, s):
    """``condense(Q^s)`` against the commuting column suspended by ``-s``."""
    ring, y = generic_values(n)
    K = ExtendedKoszul(n, CONCRETE, y, s, ring)
    return condense(K.slice("Q", s)).same_as(suspend(K.column(s), -s))


def suite_columns(n, s):
    out = []
    for m in range(1, n + 1):
        for t in range(s + 1):
            ranks = column_homology(m, t)
            want = {t: comb(m + t - 1, m - 1)}
            out.append(CheckResult("columns", f"column s={t} homology", ranks == want, {"n": m, "ranks": ranks}))
            out.append(CheckResult("columns", f"column s={t} identification", column_identification(m, t), {"n": m}))
            out.append(CheckResult("columns", f"Q^{t} suspension", suspension_identity(m, t), {"n": m}))
    return out


# ---------------------------------------------------------------------------
# resolutions


def _resolution_checks(res, multidegree_bound, name):
    rep = verify_exactness(res, multidegree_bound)
    tag = {"n": res.n, "ranks": res.ranks()}
    return [
        _result("resolutions", f"{name} exact", rep["failures"], **tag),
        _result("resolutions", f"{name} augmentation", augmentation_check(res), **tag),
        _result("resolutions", f"{name} D D = 0", verify_complex(res.complex), **tag),
    ]


def suite_resolutions(n, s, bound, multidegree_bound=None, t_max=None):
    md = bound if multidegree_bound is None else multidegree_bound
    t_max = s + 1 if t_max is None else t_max
    out = []
    for m in range(1, n + 1):
        for u in range(1, s + 1):
            res = resolution_of_quotient(m, u)
            want = [comb(m, k) * comb(m + u - 1, m) for k in range(m + 1)]
            out.append(CheckResult("resolutions", f"R/I^{u} ranks", res.ranks() == want, {"n": m}))
            out += _resolution_checks(res, md, f"R/I^{u}")
            if bound >= u:
                out += _resolution_checks(resolution_of_power(m, u, bound), md, f"I^{u} (bound {bound})")
        for u in range(0, s + 1):
            for t in range(u + 1, t_max + 1):
                out += _resolution_checks(resolution_of_subquotient(m, u, t), md, f"I^{u}/I^{t}")
        for u in range(1, s + 1):
            out.append(_result("resolutions", f"covering maps s={u}", covering_report(m, u), n=m))
    # integers, n = 1
    for r in (2, 3, -5):
        for u in range(1, s + 1):
            for res, name in (
                (resolution_of_quotient(1, u, r=(r,)), f"ZZ R/I^{u}"),
                (resolution_of_power(1, u, max(bound, u), r=(r,)), f"ZZ I^{u}"),
            ):
                rep = verify_exactness(res, None)
                out.append(_result("resolutions", f"{name} r={r}", rep["failures"], H0=rep["H0"]))
    return out


# ---------------------------------------------------------------------------
# tor


def euler_characteristic(ranks):
    return sum(_sign(k) * r for k, r in enumerate(ranks))


def delta_snake_mismatches(n, s):
    out = []
    for lab in labels_in_window(n, s, s + 1):
        if not lab.J:
            continue
        xi = Element.basis(lab)
        if delta(xi) != delta_snake(xi, s):
            out.append(lab.format())
    return out


def delta_linearity_violations(n, s):
    """``delta`` squares to zero and is right ``P``-linear on basis labels."""
    bad = []
    for lab in labels_in_window(n, s, s + 1):
        xi = Element.basis(lab)
        if not apply_dh(delta(xi)).is_zero():
            bad.append(("d d", lab.format()))
        for i in range(n):
            xv = Element.x(tuple(1 if j == i else 0 for j in range(n)))
            if delta(multiply_twisted(xi, xv)) != multiply_twisted(delta(xi), xv):
                bad.append(("right linear", lab.format()))
    return bad


def suite_tor(n, s, products_s=2, quotient_products=(2, 3)):
    out = []
    for m in range(1, n + 1):
        for u in range(s + 1):
            ranks = tor_graded(m, u).ranks()
            want = [expected_graded_rank(m, u, k) for k in range(m + 1)]
            out.append(CheckResult("tor", f"graded s={u}", ranks == want, {"n": m, "ranks": ranks}))
        for u in range(1, s + 1):
            tab = tor_power(m, u)
            free = all(r.free_certified for r in tab.rows)
            exact = all(r.exact_certified for r in tab.rows)
            ok = free and exact and ext_ranks(tab) == tab.ranks()
            out.append(
                CheckResult(
                    "tor", f"power s={u}", ok, {"n": m, "ranks": tab.ranks(), "free": free, "exact": exact}
                )
            )
            q = tor_quotient(m, u)
            sub = tor_subquotient(m, 0, u)
            ok = (
                q.ranks() == sub.ranks()
                and euler_characteristic(q.ranks()) == 0
                and all(r.free_certified for r in q.rows)
                and ext_ranks(q) == q.ranks()
            )
            out.append(
                CheckResult(
                    "tor",
                    f"quotient s={u}",
                    ok,
                    {"n": m, "ranks": q.ranks(), "oracle": sub.ranks(), "reduced": [r.reduced_rank for r in q.rows]},
                )
            )
        for u in range(min(s, 2) + 1):
            out.append(_result("tor", f"delta = snake s={u}", delta_snake_mismatches(m, u), n=m))
            out.append(_result("tor", f"delta d=0, right linear s={u}", delta_linearity_violations(m, u), n=m))
        for u in range(1, min(s, products_s) + 1):
            rep = product_triviality_check(m, u, "power")
            out.append(CheckResult("tor", f"power products s={u}", rep["ok"], {"n": m, "pairs": len(rep["pairs"])}))
        for u in quotient_products:
            if u <= max(s, 2) + 1:
                rep = product_triviality_check(m, u, "quotient")
                out.append(
                    CheckResult("tor", f"quotient products s={u}", rep["ok"], {"n": m, "pairs": len(rep["pairs"])})
                )
    return out


# ---------------------------------------------------------------------------
# algebra


def alternating_relations(n, size):
    """``d d (e_L) = 0`` written in the ``a``-generators, for every ``|L| = size``."""
    bad = []
    for L in generator_labels(n, size - 1):
        total = Element(n)
        for j, i in enumerate(L, 1):
            rest = L[: j - 1] + L[j:]
            xv = Element.x(tuple(1 if t == i - 1 else 0 for t in range(n)))
            total = total + multiply_twisted(generator(rest, n).element, xv).scale(_sign(j + len(L)))
        if not total.is_zero():
            bad.append(L)
    return bad


def anticommutation_violations(n):
    gens = [generator(L, n) for k in range(1, n) for L in generator_labels(n, k)]
    bad = []
    for u in gens:
        for v in gens:
            if multiply(u, v).element != multiply(v, u).element.scale(bicharacter_sign(u, v)):
                bad.append((u.format(), v.format()))
    return bad


def suite_algebra(n, s):
    out = []
    for m in range(2, n + 1):
        rep = gr_algebra(m, s)
        out.append(CheckResult("algebra", "gr algebra ranks", rep["ok"], {"n": m}))
        for u in range(1, s + 1):
            for k in range(1, m):
                g = generation_check(m, u, k)
                out.append(
                    CheckResult(
                        "algebra",
                        f"generation s={u} k={k}",
                        g["ok"],
                        {"n": m, "span_rank": g["span_rank"], "tor_rank": g["tor_rank"]},
                    )
                )
        if m >= 3:
            out.append(_result("algebra", "alternating relations |L|=3", alternating_relations(m, 3), n=m))
        if m >= 4:
            out.append(_result("algebra", "alternating relations |L|=4", alternating_relations(m, 4), n=m))
        out.append(_result("algebra", "bicharacter commutation", anticommutation_violations(m), n=m))
    out.append(CheckResult("algebra", "n=2 structure", n2_structure(max(s, 1))["ok"], {}))
    if n >= 3:
        rep = example_report()
        out.append(CheckResult("algebra", "a12*a23 = -x2*a123", rep["a12*a23 == -x2*a123"], {}))
    return out


SUITES = ("signs", "rows", "columns", "resolutions", "tor", "algebra")


def run_suite(name, n, s=2, bound=4):
    if name == "all":
        out = []
        for sub in SUITES:
            out += run_suite(sub, n, s, bound)
        return out
    if name == "signs":
        return suite_signs(n, bound)
    if name == "rows":
        return suite_rows(n, bound)
    if name == "columns":
        return suite_columns(n, s)
    if name == "resolutions":
        return suite_resolutions(n, s, bound)
    if name == "tor":
        return suite_tor(n, s)
    if name == "algebra":
        return suite_algebra(n, s)
    raise ValueError(f"unknown suite {name!r}")


__all__ = [
    "CheckResult",
    "SUITES",
    "alternating_relations",
    "anticommutation_violations",
    "clean_model_violations",
    "column_homology",
    "column_identification",
    "delta_linearity_violations",
    "delta_snake_mismatches",
    "euler_characteristic",
    "generator_commutation_violations",
    "row_homology",
    "run_suite",
    "suite_algebra",
    "suite_columns",
    "suite_resolutions",
    "suite_rows",
    "suite_signs",
    "suite_tor",
    "suspension_identity",
]
