"""Koszul complexes and the extended Koszul double complex.

A basis label is a :class:`KoszulIndex` ``(J, a)`` standing for
``e_J (x) x^a`` with ``J`` a strictly increasing tuple of indices in
``1..n`` and ``a`` an exponent vector.  Its bidegree is
``(p, q) = (-|a|, |J| + |a|)`` and its total degree is ``|J|``.

Sign conventions (fixed once, used everywhere):

* horizontal: ``d^h(e_J x^a) = sum_j (-1)^(j+l) e_{J - i_j} x^(a + d_{i_j})``
* stored vertical: ``d^v(e_J x^a) = sum_j (-1)^(j+l+1) r_{i_j} e_{J - i_j} x^a``
* total: ``D = d^h + d^v``, so ``D(e_i) = x_i - r_i`` and the evaluation
  ``x_i -> r_i`` kills every boundary.

Here ``l = |J|`` and ``j`` runs over positions in ``J``.  The stored
vertical differential equals ``(-1)^l`` times the multiplicative one
``delta`` (the derivation with ``delta(e_i) = r_i``), which is what the
double complex looks like in its commuting, multiplicative form.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import NamedTuple

from .complexes import (
    ANTICOMMUTING,
    COMMUTING,
    FreeComplex,
    FreeDoubleComplex,
    TruncationError,
    condense,
    tensor_complexes,
    tensor_double,
    toggle_square_convention,
)
from .exact.domains import QQ, ZZ, ModP, PrimeField
from .exact.polynomial import Polynomial, PolynomialRing, monomial_key, monomials_of_degree
from .exact.sparse import SparseMatrix

FORMAL = "formal"
CONCRETE = "concrete"
STORED = "stored"
MULTIPLICATIVE = "multiplicative"


def _sign(e):
    return -1 if e & 1 else 1


class KoszulIndex(NamedTuple):
    J: tuple
    a: tuple

    @classmethod
    def of(cls, J, a):
        """Validated constructor; ``J`` may be given in any order but without repeats."""
        a = tuple(int(e) for e in a)
        if any(e < 0 for e in a):
            raise ValueError(f"negative exponent in {a}")
        Js = tuple(sorted(int(i) for i in J))
        if len(set(Js)) != len(Js):
            raise ValueError(f"repeated exterior index in {J}")
        if Js and (Js[0] < 1 or Js[-1] > len(a)):
            raise ValueError(f"exterior index out of range 1..{len(a)} in {J}")
        return cls(Js, a)

    @property
    def n(self):
        return len(self.a)

    @property
    def column(self):
        return sum(self.a)

    @property
    def total_degree(self):
        return len(self.J)

    @property
    def bidegree(self):
        s = sum(self.a)
        return (-s, len(self.J) + s)

    @property
    def weight(self):
        """``1_J + a``: the multidegree preserved by every differential."""
        w = list(self.a)
        for i in self.J:
            w[i - 1] += 1
        return tuple(w)

    def format(self):
        e = f"*e[{','.join(map(str, self.J))}]" if self.J else ""
        return f"{e}*x[{','.join(map(str, self.a))}]".lstrip("*")


def term_key(label):
    """Printing order: x-monomial in descending degree-then-lex, then ``J``."""
    return (monomial_key(label.a), len(label.J), label.J)


def basis_key(label):
    """Order used for basis lists: ``J`` by size then lex, then x-monomial."""
    return (len(label.J), label.J, monomial_key(label.a))


def subsets(n, k):
    return [tuple(c) for c in combinations(range(1, n + 1), k)]


def labels_in_window(n, lo, hi, k=None):
    """All labels with ``lo <= |a| < hi`` (and ``|J| = k`` when given), in basis order."""
    ks = range(n + 1) if k is None else [k]
    out = []
    for kk in ks:
        for J in subsets(n, kk):
            for s in range(max(lo, 0), hi):
                for a in monomials_of_degree(n, s):
                    out.append(KoszulIndex(J, a))
    out.sort(key=basis_key)
    return out


def _add_delta(a, i):
    b = list(a)
    b[i - 1] += 1
    return tuple(b)


@lru_cache(maxsize=None)
def dh_label(label):
    """``d^h`` of one label as a tuple of ``(sign, label)``."""
    J, a = label
    l = len(J)
    out = []
    for j, i in enumerate(J, 1):
        out.append((_sign(j + l), KoszulIndex(J[: j - 1] + J[j:], _add_delta(a, i))))
    return tuple(out)


@lru_cache(maxsize=None)
def contraction_label(label):
    """Right contractions: ``(sign, i, label)`` with ``sign = (-1)^(j+l)``."""
    J, a = label
    l = len(J)
    return tuple((_sign(j + l), i, KoszulIndex(J[: j - 1] + J[j:], a)) for j, i in enumerate(J, 1))


def shuffle_sign(J, L):
    """Sign of the permutation sorting the concatenation ``J + L`` (disjoint)."""
    inv = 0
    for j in J:
        for m in L:
            if j > m:
                inv += 1
    return _sign(inv)


@lru_cache(maxsize=None)
def multiply_labels(u, v):
    """Twisted product of two labels: ``(sign, label)`` or None when it vanishes."""
    J, a = u
    L, b = v
    if set(J) & set(L):
        return None
    sign = _sign(sum(a) * len(L)) * shuffle_sign(J, L)
    return sign, KoszulIndex(tuple(sorted(J + L)), tuple(x + y for x, y in zip(a, b)))


@lru_cache(maxsize=None)
def multiply_labels_central(u, v):
    """Product with the x-variables central: only the exterior parts are reordered."""
    J, a = u
    L, b = v
    if set(J) & set(L):
        return None
    return shuffle_sign(J, L), KoszulIndex(tuple(sorted(J + L)), tuple(x + y for x, y in zip(a, b)))


def normalize_factor_form(blocks):
    """Rewrite ``prod_u e_u^{j_u} x_u^{a_u}`` (factor order) in the basis ``e_J x^a``.

    ``blocks`` is a list of pairs ``(j_u, a_u)`` with ``j_u`` in ``{0, 1}``.
    Returns ``(sign, KoszulIndex)`` with sign ``(-1)^{sum_u j_u (a_1 + ... + a_{u-1})}``:
    every exterior generator moves left past the powers of ``x`` in front of it.
    """
    crossings = 0
    seen = 0
    J, a = [], []
    for u, (j, e) in enumerate(blocks, 1):
        if j not in (0, 1) or e < 0:
            raise ValueError(f"bad block {(j, e)}")
        if j:
            crossings += seen
            J.append(u)
        seen += e
        a.append(e)
    return _sign(crossings), KoszulIndex(tuple(J), tuple(a))


class Element:
    """Finite linear combination of :class:`KoszulIndex` labels.

    ``*`` between elements is the twisted product; ``*`` with a scalar
    scales.  Terms print in :func:`term_key` order.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        clean = {}
        for lab, c in (terms or {}).items():
            if len(lab.a) != n:
                raise ValueError(f"label {lab} does not have {n} variables")
            if c != 0:
                clean[lab] = c
        self.terms = clean

    @classmethod
    def basis(cls, label, c=1):
        return cls(len(label.a), {label: c})

    @classmethod
    def unit(cls, n):
        return cls(n, {KoszulIndex((), (0,) * n): 1})

    @classmethod
    def e(cls, n, *J):
        """``e_{J_1} ^ e_{J_2} ^ ...`` in the given order (zero on repeats)."""
        if len(set(J)) != len(J):
            return cls(n)
        inv = sum(1 for x in range(len(J)) for y in range(x + 1, len(J)) if J[x] > J[y])
        return cls(n, {KoszulIndex.of(J, (0,) * n): _sign(inv)})

    @classmethod
    def x(cls, a):
        return cls(len(a), {KoszulIndex((), tuple(a)): 1})

    def _combine(self, other, s):
        terms = dict(self.terms)
        for lab, c in other.terms.items():
            nv = terms.get(lab, 0) + s * c
            if nv != 0:
                terms[lab] = nv
            else:
                terms.pop(lab, None)
        return Element(self.n, terms)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return Element(self.n, {lab: -c for lab, c in self.terms.items()})

    def scale(self, c):
        return Element(self.n, {lab: c * v for lab, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply_twisted(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.n == other.n and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: term_key(t[0]))

    def bidegrees(self):
        return sorted({lab.bidegree for lab in self.terms})

    def kinds(self):
        """Set of ``(|J|, |a|)`` pairs in the support."""
        return sorted({(len(lab.J), sum(lab.a)) for lab in self.terms})

    def map_coefficients(self, fn):
        return Element(self.n, {lab: fn(c) for lab, c in self.terms.items()})

    def format(self):
        if not self.terms:
            return "0"
        parts = [f"{_format_coefficient(c)}*{lab.format()}" for lab, c in self.sorted_terms()]
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    __str__ = format

    def __repr__(self):
        return f"Element({self.format()})"


def _format_coefficient(c):
    if isinstance(c, Polynomial):
        return f"({c.format()})"
    if isinstance(c, ModP):
        return str(c.value)
    if isinstance(c, Fraction) and c.denominator == 1:
        return str(c.numerator)
    return str(c)


def _accumulate(terms, lab, c):
    nv = terms.get(lab, 0) + c
    if nv != 0:
        terms[lab] = nv
    else:
        terms.pop(lab, None)


def apply_dh(xi, bound=None):
    """Horizontal differential; raises :class:`TruncationError` past ``bound``."""
    out = {}
    for lab, c in xi.terms.items():
        for s, t in dh_label(lab):
            if bound is not None and sum(t.a) > bound:
                raise TruncationError(f"d^h({lab.format()}) leaves the truncation |a| <= {bound}")
            _accumulate(out, t, s * c)
    return Element(xi.n, out)


def apply_dv(xi, r):
    """Stored vertical differential ``sum_j (-1)^(j+l+1) r_{i_j} e_{J - i_j} x^a``."""
    if r is None:
        raise ValueError("the vertical differential needs r-values (formal mode has none)")
    r = tuple(r)
    if len(r) != xi.n:
        raise ValueError(f"expected {xi.n} r-values, got {len(r)}")
    out = {}
    for lab, c in xi.terms.items():
        for s, i, t in contraction_label(lab):
            _accumulate(out, t, -s * r[i - 1] * c)
    return Element(xi.n, out)


def delta_mult(xi, r):
    """Multiplicative vertical differential: the derivation with ``e_i -> r_i``, ``x_i -> 0``."""
    r = tuple(r)
    if len(r) != xi.n:
        raise ValueError(f"expected {xi.n} r-values, got {len(r)}")
    out = {}
    for lab, c in xi.terms.items():
        for j, i in enumerate(lab.J, 1):
            t = KoszulIndex(lab.J[: j - 1] + lab.J[j:], lab.a)
            _accumulate(out, t, _sign(j - 1) * r[i - 1] * c)
    return Element(xi.n, out)


def apply_D(xi, r, bound=None):
    """Total differential ``d^h + d^v`` (untruncated unless ``bound`` is given)."""
    return apply_dh(xi, bound) + apply_dv(xi, r)


def multiply_twisted(xi, eta):
    if xi.n != eta.n:
        raise ValueError("elements in different numbers of variables")
    out = {}
    for u, c in xi.terms.items():
        for v, d in eta.terms.items():
            m = multiply_labels(u, v)
            if m is not None:
                _accumulate(out, m[1], m[0] * c * d)
    return Element(xi.n, out)


def multiply_central(xi, eta):
    if xi.n != eta.n:
        raise ValueError("elements in different numbers of variables")
    out = {}
    for u, c in xi.terms.items():
        for v, d in eta.terms.items():
            m = multiply_labels_central(u, v)
            if m is not None:
                _accumulate(out, m[1], m[0] * c * d)
    return Element(xi.n, out)


def augmentation(xi, r):
    """Evaluate the total-degree-0 part: ``x^a -> r^a``."""
    total = 0
    for lab, c in xi.terms.items():
        if lab.J:
            continue
        term = c
        for v, e in zip(r, lab.a):
            if e:
                term = term * v**e
        total = total + term
    return total


# ---------------------------------------------------------------------------
# assembling double complexes


def infer_domain(values):
    values = list(values)
    if any(isinstance(v, Polynomial) for v in values):
        nv = next(v.nvars for v in values if isinstance(v, Polynomial))
        return PolynomialRing(QQ, nv)
    if any(isinstance(v, ModP) for v in values):
        return PrimeField(next(v.p for v in values if isinstance(v, ModP)))
    if any(isinstance(v, Fraction) for v in values):
        return QQ
    return ZZ


def generic_values(n):
    """``(y_1, ..., y_n)`` in ``QQ[y_1..y_n]``: the generic regular sequence."""
    ring = PolynomialRing(QQ, n)
    return ring, ring.gens()


def _assemble(labels, dh_rule, dv_rule, domain, convention, product, grading):
    """Build a double complex on ``labels`` from per-label rules.

    ``dh_rule(label)`` and ``dv_rule(label)`` yield ``(coefficient, label)``
    pairs; targets outside ``labels`` are dropped (truncation by an ideal).
    """
    bases = {}
    for lab in labels:
        bases.setdefault(lab.bidegree, []).append(lab)
    for v in bases.values():
        v.sort(key=basis_key)
    index = {}
    for v in bases.values():
        for i, lab in enumerate(v):
            index[lab] = i

    def build(rule, step):
        out = {}
        for pq, labs in bases.items():
            tgt = (pq[0] + step[0], pq[1] + step[1])
            if tgt not in bases:
                continue
            entries = {}
            for j, lab in enumerate(labs):
                for c, t in rule(lab):
                    i = index.get(t)
                    if i is None:
                        continue
                    entries[(i, j)] = entries.get((i, j), 0) + c
            out[pq] = SparseMatrix(len(bases[tgt]), len(labs), entries, domain)
        return out

    dh = build(dh_rule, (-1, 0))
    dv = build(dv_rule, (0, -1)) if dv_rule is not None else {}
    return FreeDoubleComplex(domain, bases, dh, dv, convention, product, False, grading)


def _twisted_product(u, v):
    m = multiply_labels(u, v)
    return {} if m is None else {m[1]: m[0]}


def build_elementary(r, bound, form=STORED, domain=None):
    """The block ``K(r)`` for a single element, truncated at ``x``-degree ``bound``.

    Generators ``1 x^k`` at ``(-k, k)`` and ``e x^k`` at ``(-k, k + 1)``, with
    ``d^h(e x^k) = x^(k+1)`` and ``d^v(e x^k) = r x^k``.  ``form="stored"``
    returns the anticommuting form used throughout, where the vertical
    map carries an extra minus sign so that ``D(e x^k) = x^(k+1) - r x^k``.
    """
    if bound < 0:
        raise ValueError("bound must be non-negative")
    domain = domain or infer_domain([r])
    r = domain.convert(r)
    bases, dh, dv = {}, {}, {}
    for k in range(bound + 1):
        bases[(-k, k)] = [KoszulIndex((), (k,))]
        bases[(-k, k + 1)] = [KoszulIndex((1,), (k,))]
    vsign = 1 if form == MULTIPLICATIVE else -1
    for k in range(bound + 1):
        if k + 1 <= bound:
            dh[(-k, k + 1)] = SparseMatrix(1, 1, {(0, 0): domain.one}, domain)
        dv[(-k, k + 1)] = SparseMatrix(1, 1, {(0, 0): vsign * r}, domain)
    conv = COMMUTING if form == MULTIPLICATIVE else ANTICOMMUTING
    return FreeDoubleComplex(domain, bases, dh, dv, conv, _twisted_product)


class ExtendedKoszul:
    """The extended Koszul double complex of ``r_1..r_n``, truncated at ``|a| <= bound``.

    ``mode="formal"`` sets every ``r_i`` to zero: the vertical differential
    vanishes and the complex is ``E (x) K`` with ``E = R/I``.  ``mode="concrete"``
    needs explicit values.  The truncation is the quotient by ``F^{bound+1}``,
    which is again a double complex.
    """

    def __init__(self, n, mode=FORMAL, r=None, bound=None, domain=None):
        if n < 1:
            raise ValueError("n must be at least 1")
        if bound is None:
            raise ValueError("a truncation bound on |a| is mandatory")
        if bound < 0:
            raise ValueError("bound must be non-negative")
        if mode == FORMAL:
            if r is not None:
                raise ValueError("formal mode takes no r-values")
            domain = domain or ZZ
            r = (domain.zero,) * n
        elif mode == CONCRETE:
            if r is None:
                raise ValueError("concrete mode needs r-values")
            r = tuple(r)
            if len(r) != n:
                raise ValueError(f"expected {n} r-values, got {len(r)}")
            domain = domain or infer_domain(r)
            r = tuple(domain.convert(v) for v in r)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        self.n = n
        self.mode = mode
        self.r = r
        self.bound = bound
        self.domain = domain
        self._cache = {}

    # -- label level -------------------------------------------------------

    def dh(self, xi):
        return apply_dh(xi, self.bound)

    def dv(self, xi):
        if self.mode == FORMAL:
            raise ValueError("the vertical differential is identically zero in formal mode")
        return apply_dv(xi, self.r)

    def D(self, xi):
        out = apply_dh(xi, None)
        out = Element(self.n, {lab: c for lab, c in out.terms.items() if sum(lab.a) <= self.bound})
        if self.mode == CONCRETE:
            out = out + apply_dv(xi, self.r)
        return out

    def grading(self):
        return _weight if self.mode == FORMAL else None

    # -- matrices ----------------------------------------------------------

    def window(self, lo, hi, form=STORED):
        """Double complex on the labels with ``lo <= |a| < hi``."""
        if not 0 <= lo <= hi <= self.bound + 1:
            raise ValueError(f"window [{lo}, {hi}) outside 0..{self.bound + 1}")
        key = (lo, hi, form)
        if key in self._cache:
            return self._cache[key]
        r, domain = self.r, self.domain
        labels = labels_in_window(self.n, lo, hi)

        def dh_rule(lab):
            return [(domain.convert(s), t) for s, t in dh_label(lab)]

        dv_rule = None
        if self.mode == CONCRETE:
            if form == MULTIPLICATIVE:

                def dv_rule(lab):
                    return [
                        (_sign(j - 1) * r[i - 1], KoszulIndex(lab.J[: j - 1] + lab.J[j:], lab.a))
                        for j, i in enumerate(lab.J, 1)
                    ]

            else:

                def dv_rule(lab):
                    return [(-s * r[i - 1], t) for s, i, t in contraction_label(lab)]

        conv = COMMUTING if form == MULTIPLICATIVE else ANTICOMMUTING
        D = _assemble(labels, dh_rule, dv_rule, domain, conv, _twisted_product, self.grading())
        self._cache[key] = D
        return D

    @property
    def double(self):
        return self.window(0, self.bound + 1)

    def slice(self, kind, s=None, t=None):
        """``F^s``, ``K/s``, ``Q^s`` or ``F^s/F^t`` as a double complex."""
        lo, hi = slice_window(kind, s, t, self.bound)
        return self.window(lo, hi)

    def condensed(self, kind="F", s=0, t=None):
        return condense(self.slice(kind, s, t))

    def column(self, s, form=COMMUTING):
        """Column ``p = -s`` with its vertical differential, graded by ``q``.

        ``form="commuting"`` uses the vertical maps of the commuting form,
        ``(-1)^p`` times the stored ones.
        """
        D = self.window(s, s + 1)
        if form == COMMUTING:
            D = toggle_square_convention(D)
        return D.column(-s)

    def row(self, q):
        """Row ``q`` (labels with ``|J| + |a| = q``); exact below the bound only."""
        return self.double.row(q)

    def __repr__(self):
        return f"ExtendedKoszul(n={self.n}, mode={self.mode}, bound={self.bound}, domain={self.domain})"


def _weight(label):
    return label.weight


def slice_window(kind, s, t, bound):
    """Translate a slice name into a window ``[lo, hi)`` of x-degrees."""
    top = bound + 1
    if kind in ("F", "F^s"):
        lo, hi = s, top
        if s is None or not 0 <= s <= bound:
            raise ValueError(f"F^s needs 0 <= s <= {bound}")
    elif kind in ("K/s", "K/"):
        lo, hi = 0, s
        if s is None or not 0 <= s <= top:
            raise ValueError(f"K/s needs 0 <= s <= {top}")
    elif kind in ("Q", "Q^s"):
        lo, hi = s, (s + 1 if s is not None else None)
        if s is None or not 0 <= s <= bound:
            raise ValueError(f"Q^s needs 0 <= s <= {bound}")
    elif kind in ("F/F", "F^s/F^t"):
        if s is None or t is None or not 0 <= s < t <= top:
            raise ValueError(f"F^s/F^t needs 0 <= s < t <= {top}")
        lo, hi = s, t
    else:
        raise ValueError(f"unknown slice {kind!r}")
    return lo, hi


def build_extended(n, mode=FORMAL, r=None, bound=None, domain=None):
    return ExtendedKoszul(n, mode, r, bound, domain)


def build_koszul(n, r, domain=None):
    """Classical Koszul complex ``Lambda(e_1..e_n)`` with ``d(e_i) = r_i``.

    Labels are ``KoszulIndex(J, 0)``; ``d(e_J) = sum_j (-1)^(j-1) r_{i_j} e_{J - i_j}``.
    """
    r = tuple(r)
    if len(r) != n:
        raise ValueError(f"expected {n} values")
    domain = domain or infer_domain(r)
    r = tuple(domain.convert(v) for v in r)
    zero = (0,) * n
    bases = {k: [KoszulIndex(J, zero) for J in subsets(n, k)] for k in range(n + 1)}
    diffs = {}
    for k in range(1, n + 1):
        idx = {lab: i for i, lab in enumerate(bases[k - 1])}
        entries = {}
        for jj, lab in enumerate(bases[k]):
            for j, i in enumerate(lab.J, 1):
                t = KoszulIndex(lab.J[: j - 1] + lab.J[j:], zero)
                entries[(idx[t], jj)] = _sign(j - 1) * r[i - 1]
        diffs[k] = SparseMatrix(len(bases[k - 1]), len(bases[k]), entries, domain)
    return FreeComplex(domain, bases, diffs)


def monomial_complex(n, s, domain=ZZ, degree=None):
    """Free module on the monomials of degree ``s``, concentrated in one degree."""
    return FreeComplex(domain, {s if degree is None else degree: monomials_of_degree(n, s)})


def koszul_tensor_monomials(n, r, s, domain=None):
    """``K (x) (monomials of degree s)`` with labels ``(J, a)``, in degrees ``|J| + s``."""
    K = build_koszul(n, r, domain)
    T = tensor_complexes(K, monomial_complex(n, s, K.domain))
    return relabel(T, lambda pair: (1, KoszulIndex(pair[0].J, pair[1])))


def relabel(C, rule):
    """Change basis of a complex by ``label -> (sign, new_label)``.

    The new basis element is ``sign * old``; the differentials are conjugated
    accordingly (signs are units, so they are their own inverses).
    """
    if isinstance(C, FreeComplex):
        new = {k: [rule(lab) for lab in C.basis(k)] for k in C.degrees()}
        bases = {k: [t for _, t in v] for k, v in new.items()}
        diffs = {}
        for k, M in C.diffs.items():
            src = [s for s, _ in new[k]]
            tgt = [s for s, _ in new[k - 1]]
            diffs[k] = SparseMatrix(
                M.nrows, M.ncols, {(i, j): v * src[j] * tgt[i] for (i, j), v in M.entries.items()}, M.domain
            )
        return FreeComplex(C.domain, bases, diffs)
    new = {pq: [rule(lab) for lab in C.basis(pq)] for pq in C.bidegrees()}
    bases = {pq: [t for _, t in v] for pq, v in new.items()}
    old_sign = {}
    for pq in C.bidegrees():
        for lab, (s, _) in zip(C.basis(pq), new[pq]):
            old_sign[lab] = s

    def conj(maps, step):
        out = {}
        for (p, q), M in maps.items():
            src = [s for s, _ in new[(p, q)]]
            tgt = [s for s, _ in new[(p + step[0], q + step[1])]]
            out[(p, q)] = SparseMatrix(
                M.nrows, M.ncols, {(i, j): v * src[j] * tgt[i] for (i, j), v in M.entries.items()}, M.domain
            )
        return out

    back = {}
    for pq in C.bidegrees():
        for lab, (s, t) in zip(C.basis(pq), new[pq]):
            back[t] = (s, lab)
    product = None
    if C.product is not None:

        def product(u, v):
            su, lu = back[u]
            sv, lv = back[v]
            out = {}
            for w, c in C.product(lu, lv).items():
                if w in old_sign:
                    s, nw = rule(w)
                    out[nw] = out.get(nw, 0) + su * sv * s * c
            return {k: v for k, v in out.items() if v != 0}

    return FreeDoubleComplex(
        C.domain, bases, conj(C.dh, (-1, 0)), conj(C.dv, (0, -1)), C.convention, product, C.unbounded
    )


def flatten_tensor_label(label, n):
    """Blocks ``[(j_1, a_1), ..., (j_n, a_n)]`` of a nested tensor label of elementary labels."""
    blocks = []

    def walk(x, depth):
        if depth == 1:
            blocks.append((len(x.J), x.a[0]))
        else:
            walk(x[0], depth - 1)
            walk(x[1], 1)

    walk(label, n)
    return blocks


def tensor_route(n, r, bound, domain=None):
    """``K(r_1) (x) ... (x) K(r_n)`` from elementary multiplicative blocks.

    The result is re-expressed in the normalized basis ``e_J x^a`` (through
    :func:`normalize_factor_form`) and restricted to ``|a| <= bound``.  It is
    built without the closed formulas and serves as their oracle.
    """
    r = tuple(r)
    domain = domain or infer_domain(r)
    T = build_elementary(r[0], bound, MULTIPLICATIVE, domain)
    for v in r[1:]:
        T = tensor_double(T, build_elementary(v, bound, MULTIPLICATIVE, domain))

    def rule(lab):
        return normalize_factor_form(flatten_tensor_label(lab, n))

    keep = {
        pq: [lab for lab in T.basis(pq) if sum(b for _, b in flatten_tensor_label(lab, n)) <= bound]
        for pq in T.bidegrees()
    }
    T = restrict(T, keep)
    return relabel(T, rule)


def restrict(D, keep):
    """Quotient-style restriction of a double complex to the labels in ``keep``."""
    bases = {pq: v for pq, v in keep.items() if v}
    pos = {pq: {lab: i for i, lab in enumerate(v)} for pq, v in bases.items()}

    def cut(maps, step):
        out = {}
        for pq, M in maps.items():
            tgt = (pq[0] + step[0], pq[1] + step[1])
            if pq not in bases or tgt not in bases:
                continue
            src_old, tgt_old = D.basis(pq), D.basis(tgt)
            entries = {}
            for (i, j), v in M.entries.items():
                a = pos[pq].get(src_old[j])
                b = pos[tgt].get(tgt_old[i])
                if a is not None and b is not None:
                    entries[(b, a)] = v
            out[pq] = SparseMatrix(len(bases[tgt]), len(bases[pq]), entries, D.domain)
        return out

    return FreeDoubleComplex(
        D.domain, bases, cut(D.dh, (-1, 0)), cut(D.dv, (0, -1)), D.convention, D.product, D.unbounded
    )


def rescale_exterior(C, exponent):
    """Rescale ``e_J x^a -> (-1)^{exponent(|J|)} e_J x^a`` in a complex with Koszul labels."""
    return relabel(C, lambda lab: (_sign(exponent(len(lab.J))), lab))


def column_rescaling(l, s, form=COMMUTING):
    """Exponent ``c`` with ``(-1)^c`` rescaling column ``s`` onto ``K (x) monomials``.

    Stored column: ``l(l+1)/2``.  Commuting column: ``l(l+1)/2 + s l``,
    which agrees with ``floor(l/2)`` in odd columns.
    """
    base = l * (l + 1) // 2
    return base + s * l if form == COMMUTING else base


def clean_model(label, r):
    """Koszul differential of ``(x_1 - r_1, ..., x_n - r_n)`` over ``R[x]`` on one label."""
    out = {}
    for j, i in enumerate(label.J, 1):
        t = KoszulIndex(label.J[: j - 1] + label.J[j:], label.a)
        sign = _sign(j - 1)
        _accumulate(out, KoszulIndex(t.J, _add_delta(t.a, i)), sign)
        _accumulate(out, t, -sign * r[i - 1])
    return Element(len(label.a), out)


def quotient_ranks(n, s):
    """Ranks ``C(n, k) * C(n+s-1, n)`` of ``(K/s)`` in total degree ``k``."""
    return [comb(n, k) * comb(n + s - 1, n) for k in range(n + 1)]


# ---------------------------------------------------------------------------
# exhaustive identity checks at label level


def all_labels(n, bound):
    return labels_in_window(n, 0, bound + 1)


def _combine_terms(acc, terms, c):
    for lab, v in terms:
        nv = acc.get(lab, 0) + c * v
        if nv:
            acc[lab] = nv
        else:
            acc.pop(lab, None)


def _mul_terms(u_terms, v_terms):
    out = []
    for lu, cu in u_terms:
        for lv, cv in v_terms:
            m = multiply_labels(lu, lv)
            if m is not None:
                out.append((m[1], m[0] * cu * cv))
    return out


def leibniz_dh_violations(n, bound):
    """Pairs ``(u, v)`` with ``|a_u| + |a_v| <= bound`` violating
    ``d^h(uv) = d^h(u) v + (-1)^p u d^h(v)``.

    Pairs whose product lies beyond the truncation vanish there together
    with every term of the identity, so only these pairs carry content.
    """
    labels = all_labels(n, bound)
    dh = {lab: [(t, s) for s, t in dh_label(lab)] for lab in labels}
    bad = []
    by_deg = {}
    for lab in labels:
        by_deg.setdefault(sum(lab.a), []).append(lab)
    for u in labels:
        su = sum(u.a)
        pu = _sign(su)
        du = dh[u]
        for t in range(bound - su + 1):
            for v in by_deg.get(t, ()):
                acc = {}
                m = multiply_labels(u, v)
                if m is not None:
                    _combine_terms(acc, [(x, s) for s, x in dh_label(m[1])], m[0])
                _combine_terms(acc, _mul_terms(du, [(v, 1)]), -1)
                _combine_terms(acc, _mul_terms([(u, 1)], dh[v]), -pu)
                if acc:
                    bad.append((u, v))
    return bad


def _delta_terms(lab):
    """``delta(lab)`` as ``[((i, label), sign)]``: coefficient ``sign * r_i``."""
    return [
        ((i, KoszulIndex(lab.J[: j - 1] + lab.J[j:], lab.a)), _sign(j - 1)) for j, i in enumerate(lab.J, 1)
    ]


def leibniz_delta_violations(n, bound):
    """Pairs violating ``delta(uv) = delta(u) v + (-1)^q u delta(v)`` for generic ``r``.

    ``delta`` is linear in ``r``, so coefficients are tracked per ``r_i``.
    """
    labels = all_labels(n, bound)
    by_deg = {}
    for lab in labels:
        by_deg.setdefault(sum(lab.a), []).append(lab)
    bad = []
    for u in labels:
        su = sum(u.a)
        qu = _sign(len(u.J) + su)
        du = _delta_terms(u)
        for t in range(bound - su + 1):
            for v in by_deg.get(t, ()):
                acc = {}
                m = multiply_labels(u, v)
                if m is not None:
                    for (i, x), s in _delta_terms(m[1]):
                        _accumulate(acc, (i, x), s * m[0])
                for (i, x), s in du:
                    mm = multiply_labels(x, v)
                    if mm is not None:
                        _accumulate(acc, (i, mm[1]), -s * mm[0])
                for (i, x), s in _delta_terms(v):
                    mm = multiply_labels(u, x)
                    if mm is not None:
                        _accumulate(acc, (i, mm[1]), -qu * s * mm[0])
                if acc:
                    bad.append((u, v))
    return bad


def augmentation_violations(n, bound, r):
    """Degree-one labels ``e_i x^a`` (``|a| <= bound``) with ``eps(D(e_i x^a)) != 0``."""
    bad = []
    for lab in labels_in_window(n, 0, bound + 1, k=1):
        xi = Element.basis(lab)
        if augmentation(apply_D(xi, r), r) != 0:
            bad.append(lab)
    return bad


__all__ = [
    "CONCRETE",
    "FORMAL",
    "MULTIPLICATIVE",
    "STORED",
    "Element",
    "ExtendedKoszul",
    "KoszulIndex",
    "apply_D",
    "apply_dh",
    "apply_dv",
    "augmentation",
    "augmentation_violations",
    "basis_key",
    "build_elementary",
    "build_extended",
    "build_koszul",
    "clean_model",
    "column_rescaling",
    "delta_mult",
    "generic_values",
    "koszul_tensor_monomials",
    "labels_in_window",
    "leibniz_delta_violations",
    "leibniz_dh_violations",
    "multiply_central",
    "multiply_twisted",
    "normalize_factor_form",
    "quotient_ranks",
    "relabel",
    "rescale_exterior",
    "slice_window",
    "subsets",
    "tensor_route",
    "term_key",
]
