"""Free resolutions of ``I^s``, ``R/I^s`` and ``I^s/I^t`` cut out of the extended Koszul complex.

Each resolution is the total complex of a window ``lo <= |a| < hi`` of the
stored double complex:

=================  ============  ===================
target             window        slice
=================  ============  ===================
``R/I^s``          ``[0, s)``    ``K/s``
``I^s`` (trunc.)   ``[s, B+1)``  ``F^s`` at bound B
``I^s/I^t``        ``[s, t)``    ``F^s/F^t``
=================  ============  ===================

The augmentation sends the degree-0 label ``x^a`` to ``r^a``.
"""

from math import comb, gcd, prod

from .complexes import ChainMap, condense, expand_multigraded, homology_ranks
from .exact.domains import IntegerRing
from .exact.linalg import smith_normal_form
from .exact.polynomial import Polynomial, PolynomialRing, monomials_up_to
from .koszul import (
    CONCRETE,
    FORMAL,
    Element,
    ExtendedKoszul,
    apply_D,
    augmentation,
    generic_values,
    labels_in_window,
)

SCHEMA = "extkoszul.resolution/1"

QUOTIENT = "quotient"
POWER = "power"
SUBQUOTIENT = "subquotient"


class AugmentedResolution:
    """A condensed window of the extended Koszul complex with its augmentation."""

    def __init__(self, koszul, target, s, t, lo, hi):
        self.koszul = koszul
        self.target = target
        self.s = s
        self.t = t
        self.lo = lo
        self.hi = hi
        self.double = koszul.window(lo, hi)
        self.complex = condense(self.double)

    @property
    def n(self):
        return self.koszul.n

    @property
    def mode(self):
        return self.koszul.mode

    @property
    def bound(self):
        return self.koszul.bound

    @property
    def domain(self):
        return self.koszul.domain

    def ranks(self):
        return [self.complex.rank(k) for k in range(self.n + 1)]

    def augmentation(self, label):
        """Image of a degree-0 basis label (``x^a -> r^a``) in ``R``."""
        if label.J:
            raise ValueError("the augmentation lives on degree-0 labels")
        return augmentation(Element.basis(label, self.domain.one), self.koszul.r)

    def target_name(self):
        if self.target == QUOTIENT:
            return f"R/I^{self.s}"
        if self.target == POWER:
            return f"I^{self.s}"
        return f"I^{self.s}/I^{self.t}"

    def __repr__(self):
        return f"AugmentedResolution({self.target_name()}, n={self.n}, ranks={self.ranks()})"


def _koszul(n, mode, r, bound, domain=None):
    if mode == CONCRETE and r is None:
        domain, r = generic_values(n)
    if mode == FORMAL:
        r = None
    return ExtendedKoszul(n, mode, r, bound, domain)


def resolution_of_quotient(n, s, mode=CONCRETE, r=None, domain=None):
    """``(K/s)`` resolving ``R/I^s``; length ``n`` with ranks ``C(n,k) C(n+s-1,n)``."""
    if s < 1:
        raise ValueError("s must be at least 1: for s = 0 the target R/I^0 is the zero ring")
    K = _koszul(n, mode, r, s - 1, domain)
    return AugmentedResolution(K, QUOTIENT, s, None, 0, s)


def resolution_of_power(n, s, bound, mode=CONCRETE, r=None, domain=None):
    """``F^s`` resolving ``I^s``, truncated to ``|a| <= bound``.

    The truncation is the quotient by ``F^(bound+1)``, so the complex is an
    honest resolution of ``I^s/I^(bound+1)``; it agrees with ``I^s`` in
    multidegrees of total degree at most ``bound``.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    if bound < s:
        raise ValueError(f"bound must be at least s (got bound {bound} < s {s})")
    K = _koszul(n, mode, r, bound, domain)
    return AugmentedResolution(K, POWER, s, None, s, bound + 1)


def resolution_of_subquotient(n, s, t, mode=CONCRETE, r=None, domain=None):
    """``F^s/F^t`` resolving ``I^s/I^t``; for ``t = s + 1`` this is ``Q^s``."""
    if s < 0:
        raise ValueError("s must be non-negative")
    if s >= t:
        raise ValueError(f"need s < t (got s={s}, t={t})")
    K = _koszul(n, mode, r, t - 1, domain)
    return AugmentedResolution(K, SUBQUOTIENT, s, t, s, t)


def hilbert_target(res, m):
    """Dimension of the target module in multidegree ``m`` (monomial counting)."""
    d = sum(m)
    if res.target == QUOTIENT:
        return 1 if d < res.s else 0
    if res.target == POWER:
        return 1 if res.s <= d <= res.bound else 0
    return 1 if res.s <= d < res.t else 0


def augmentation_check(res):
    """Degree-1 labels where ``eps(D(label)) != 0`` or the truncation drops a low term.

    ``D`` is applied without truncation; terms outside the window must have
    ``|a| >= hi`` (they lie in the ideal that was divided out).
    """
    bad = []
    r = res.koszul.r
    one = res.domain.one
    for lab in labels_in_window(res.n, res.lo, res.hi, k=1):
        full = apply_D(Element.basis(lab, one), r)
        dropped = [t for t in full.terms if not res.lo <= sum(t.a) < res.hi]
        if any(sum(t.a) < res.hi for t in dropped):
            bad.append({"label": lab.format(), "problem": "term below the window"})
        if res.mode == CONCRETE and augmentation(full, r) != 0:
            bad.append({"label": lab.format(), "problem": "eps(D) != 0"})
    return bad


def verify_exactness(res, multidegree_bound):
    """Blockwise exactness report.

    For the generic ring ``QQ[y_1..y_n]`` with ``r_i = y_i`` every piece is
    graded by ``y``-multidegree; for each multidegree ``m`` with
    ``|m| <= multidegree_bound`` the report checks ``H_k = 0`` for ``k >= 1``
    and ``dim H_0 = `` the Hilbert function of the target.  For ``n = 1`` over
    the integers the check runs through Smith normal forms instead.
    Returns a dict with ``failures`` (empty on success) and ``edge``
    (multidegrees beyond the truncation, where a truncated ``I^s`` is not
    asserted to match).
    """
    if res.mode != CONCRETE:
        raise ValueError("exactness is verified in concrete mode only")
    domain = res.domain
    if isinstance(domain, IntegerRing):
        return _verify_integral(res)
    if not isinstance(domain, PolynomialRing):
        raise ValueError(f"no exactness check over {domain}")
    y = domain.gens()
    if tuple(res.koszul.r) != tuple(y):
        raise ValueError("blockwise verification needs r_i = y_i")
    expanded = expand_multigraded(res.complex, lambda lab: lab.weight, multidegree_bound)
    hom = homology_ranks(expanded)
    failures, edge = [], []
    for m in monomials_up_to(res.n, multidegree_bound):
        for k in range(1, res.n + 1):
            h = hom.block_ranks.get(k, {}).get(m, 0)
            if h:
                failures.append({"multidegree": list(m), "degree": k, "rank": h, "expected": 0})
        h0 = hom.block_ranks.get(0, {}).get(m, 0)
        want = hilbert_target(res, m)
        if h0 != want:
            failures.append({"multidegree": list(m), "degree": 0, "rank": h0, "expected": want})
        if res.target == POWER and sum(m) > res.bound:
            edge.append(list(m))
    failures.sort(key=lambda f: (sum(f["multidegree"]), [-x for x in f["multidegree"]], f["degree"]))
    return {
        "failures": failures,
        "edge": edge,
        "multidegree_bound": multidegree_bound,
        "blocks": comb(res.n + multidegree_bound, res.n),
    }


def _verify_integral(res):
    if res.n != 1:
        raise ValueError("integer verification is implemented for n = 1")
    r = res.koszul.r[0]
    C = res.complex
    failures = []
    snf1 = smith_normal_form(C.diff(1))
    if C.rank(1) != snf1.rank:
        failures.append({"degree": 1, "problem": "d_1 not injective"})
    torsion = [d for d in snf1.divisors if d != 1]
    free_rank = C.rank(0) - snf1.rank
    order = prod(torsion) if torsion else 1
    expected_order = abs(r) ** (res.hi - res.lo)
    if free_rank != 0 or order != expected_order or len(torsion) > 1:
        failures.append(
            {
                "degree": 0,
                "problem": "H_0 is not cyclic of the expected order",
                "torsion": torsion,
                "expected_order": expected_order,
            }
        )
    images = [res.augmentation(lab) for lab in C.basis(0)]
    g = 0
    for v in images:
        g = gcd(g, v)
    if g != abs(r) ** res.lo:
        failures.append({"degree": 0, "problem": "augmentation image", "generator": g})
    return {
        "failures": failures,
        "edge": [],
        "H0": {"cyclic_order": order, "image_generator": g},
    }


def covering_maps(n, s, bound=None, mode=CONCRETE, r=None, domain=None):
    """Inclusion ``Q^s -> K/(s+1)`` and projection ``F^s -> Q^s`` as chain maps.

    Both act as the identity on shared labels; the projection kills every
    label with ``|a| > s``.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    bound = s + 1 if bound is None else bound
    Q = resolution_of_subquotient(n, s, s + 1, mode, r, domain)
    Ks = resolution_of_quotient(n, s + 1, mode, r, domain)
    F = resolution_of_power(n, s, bound, mode, r, domain)
    one = Q.domain.one

    def identity(lab):
        return {lab: one}

    def project(lab):
        return {lab: one} if sum(lab.a) == s else {}

    inclusion = ChainMap.from_labels(Q.complex, Ks.complex, identity)
    projection = ChainMap.from_labels(F.complex, Q.complex, project)
    return inclusion, projection, (Q, Ks, F)


def covering_report(n, s, bound=None, mode=CONCRETE, r=None):
    """Chain-map and augmentation compatibility of :func:`covering_maps`."""
    inc, proj, (Q, Ks, F) = covering_maps(n, s, bound, mode, r)
    report = inc.verify() + proj.verify()
    for lab in Q.complex.basis(0):
        if Ks.augmentation(lab) != Q.augmentation(lab):
            report.append({"identity": "augmentation of inclusion", "label": lab.format()})
    for lab in F.complex.basis(0):
        if sum(lab.a) == s and F.augmentation(lab) != Q.augmentation(lab):
            report.append({"identity": "augmentation of projection", "label": lab.format()})
    return report


def _coef(c):
    if isinstance(c, Polynomial):
        return c.format()
    return str(c)


def to_json(res, verify=None):
    """Versioned JSON-ready description of a resolution."""
    C = res.complex
    degrees = []
    for k in range(res.n + 1):
        basis = C.basis(k)
        diff = []
        if k >= 1:
            src, tgt = basis, C.basis(k - 1)
            for (i, j), v in sorted(C.diff(k).entries.items(), key=lambda e: (e[0][1], e[0][0])):
                diff.append([tgt[i].format(), src[j].format(), _coef(v)])
        degrees.append({"k": k, "rank": len(basis), "basis": [b.format() for b in basis], "differential": diff})
    out = {
        "schema": SCHEMA,
        "n": res.n,
        "s": res.s,
        "t": res.t,
        "mode": res.mode,
        "bound": res.bound,
        "target": res.target_name(),
        "window": [res.lo, res.hi],
        "ranks": res.ranks(),
        "degrees": degrees,
        "augmentation": [[b.format(), _coef(res.augmentation(b))] for b in C.basis(0)],
    }
    if verify is not None:
        out["verification"] = verify
    return out


__all__ = [
    "AugmentedResolution",
    "POWER",
    "QUOTIENT",
    "SUBQUOTIENT",
    "augmentation_check",
    "covering_maps",
    "covering_report",
    "hilbert_target",
    "resolution_of_power",
    "resolution_of_quotient",
    "resolution_of_subquotient",
    "to_json",
    "verify_exactness",
]
