"""Tor over the residue ring ``E = R/I`` with explicit bases.

Everything runs in formal mode: coefficients are integers, the ``r_i`` act
as zero and the only differential left is ``d = E (x) d^h``.  Write
``(k, s)`` for the span of the labels ``e_J x^a`` with ``|J| = k`` and
``|a| = s``; then ``d`` maps ``(k, s)`` to ``(k - 1, s + 1)``.  This map is
the connecting homomorphism of ``0 -> I^(s+1)/I^(s+2) -> I^s/I^(s+2) -> I^s/I^(s+1) -> 0``.

The map is block diagonal for the weight ``1_J + a``, so all ranks,
kernels and complements are computed per block over the rationals and
promoted to statements over every ``E`` once the Smith divisors of each
block are all 1.
"""

from collections import defaultdict
from functools import lru_cache
from math import comb
from typing import NamedTuple

from .complexes import condense, homology_ranks
from .exact.domains import QQ, ZZ
from .exact.linalg import Echelon, rank_and_kernel, smith_normal_form, solve
from .exact.polynomial import monomial_key
from .exact.sparse import SparseMatrix
from .koszul import (
    Element,
    ExtendedKoszul,
    apply_dh,
    dh_label,
    labels_in_window,
    multiply_twisted,
    restrict,
    term_key,
    tensor_route,
)

SCHEMA = "extkoszul.tor/1"


class Certificate(NamedTuple):
    ok: bool
    divisors: list


class TorRow(NamedTuple):
    k: int
    rank: int
    basis: list
    free_certified: bool
    exact_certified: bool = None
    reduced_rank: int = None


class TorTable(NamedTuple):
    n: int
    module: str
    s: int
    rows: list
    t: int = None

    def ranks(self):
        return [row.rank for row in self.rows]

    def to_json(self):
        out = {
            "schema": SCHEMA,
            "n": self.n,
            "module": self.module,
            "s": self.s,
            "mode": "formal",
            "bound": _x_range(self)[1],
        }
        if self.t is not None:
            out["t"] = self.t
        rows = []
        for row in self.rows:
            entry = {
                "k": row.k,
                "rank": row.rank,
                "basis": [b.format() for b in row.basis],
                "free_certified": row.free_certified,
            }
            if row.exact_certified is not None:
                entry["exact_certified"] = row.exact_certified
            if row.reduced_rank is not None:
                entry["reduced_rank"] = row.reduced_rank
            rows.append(entry)
        out["rows"] = rows
        out["ranks"] = self.ranks()
        return out


def _x_range(table):
    """Smallest and largest x-degree touched by the computation behind a table."""
    s, t = table.s, table.t
    if table.module == "graded":
        return (s, s)
    if table.module == "power":
        return (s, s + 1)
    if table.module == "quotient":
        return (0, max(s - 1, 0))
    return (s, t - 1)


def _sign(e):
    return -1 if e & 1 else 1


def labels(n, k, s):
    """Basis of ``(k, s)`` in basis order."""
    if k < 0 or k > n or s < 0:
        return []
    return labels_in_window(n, s, s + 1, k=k)


class Block(NamedTuple):
    weight: tuple
    sources: list
    targets: list
    matrix: SparseMatrix


def partial_blocks(n, k, s):
    """The map ``(k, s) -> (k - 1, s + 1)`` split into weight blocks (integer matrices)."""
    src = defaultdict(list)
    tgt = defaultdict(list)
    for lab in labels(n, k, s):
        src[lab.weight].append(lab)
    for lab in labels(n, k - 1, s + 1):
        tgt[lab.weight].append(lab)
    blocks = []
    for w in sorted(set(src) | set(tgt), key=monomial_key):
        S, T = src.get(w, []), tgt.get(w, [])
        tidx = {lab: i for i, lab in enumerate(T)}
        entries = {}
        for j, lab in enumerate(S):
            for c, t in dh_label(lab):
                entries[(tidx[t], j)] = c
        blocks.append(Block(w, S, T, SparseMatrix(len(T), len(S), entries, ZZ)))
    return blocks


def freeness_certificate(matrices):
    """Certificate that every given integer matrix has all Smith divisors equal to 1."""
    divisors = []
    ok = True
    for M in matrices:
        d = smith_normal_form(M).divisors
        divisors.append(d)
        if any(x != 1 for x in d):
            ok = False
    return Certificate(ok, divisors)


def _element(n, lab_list, vector):
    return Element(n, {lab: _integral(c) for lab, c in zip(lab_list, vector) if c != 0})


def _integral(c):
    if hasattr(c, "denominator") and c.denominator == 1:
        return int(c.numerator)
    return c


def _kind(xi):
    kinds = xi.kinds()
    if len(kinds) > 1:
        raise ValueError(f"element is not homogeneous: it has parts in {kinds}")
    return kinds[0] if kinds else None


def delta(xi):
    """Connecting homomorphism ``(k, s) -> (k - 1, s + 1)``, closed formula.

    ``e_J x^a -> sum_j (-1)^(j+l) e_{J - i_j} x^(a + d_{i_j})``; the unit goes
    to zero and ``e_i`` to ``x_i``.
    """
    _kind(xi)
    return apply_dh(xi)


def delta_snake(xi, s=None):
    """Connecting homomorphism through the snake lemma.

    ``xi`` is read as a cycle of ``E (x) Q^s``.  It is lifted identically to
    ``E (x) F^s/F^(s+2)``, built as a tensor product of elementary blocks
    (never from the closed formula), differentiated there, and pulled back
    to ``E (x) Q^(s+1)``.
    """
    kind = _kind(xi)
    if kind is None:
        return Element(xi.n)
    k, s0 = kind
    if s is None:
        s = s0
    if s0 != s:
        raise ValueError(f"element lives in column {s0}, not {s}")
    n = xi.n
    W, Q = _snake_complexes(n, s)
    if Q.apply(k, {lab: c for lab, c in xi.terms.items()}):
        raise ValueError("input is not a cycle of E (x) Q^s")
    image = W.apply(k, dict(xi.terms))
    stray = [lab for lab in image if sum(lab.a) != s + 1]
    if stray:
        raise ValueError("differential does not land in the submodule E (x) Q^(s+1)")
    return Element(n, image)


@lru_cache(maxsize=None)
def _snake_complexes(n, s):
    """``E (x) F^s/F^(s+2)`` and ``E (x) Q^s`` condensed, from the tensor route."""
    T = tensor_route(n, (0,) * n, s + 1, ZZ)
    window = {pq: [lab for lab in T.basis(pq) if sum(lab.a) >= s] for pq in T.bidegrees()}
    W = condense(restrict(T, window))
    Q = condense(restrict(T, {pq: [lab for lab in v if sum(lab.a) == s] for pq, v in window.items()}))
    return W, Q


def tor_graded(n, s):
    """``Tor(E, I^s/I^(s+1)) = Lambda_E (x) J^s/J^(s+1)``: every label is a class."""
    if s < 0:
        raise ValueError("s must be non-negative")
    K = ExtendedKoszul(n, bound=s)
    hom = homology_ranks(condense(K.window(s, s + 1)), field=QQ)
    rows = []
    for k in range(n + 1):
        basis = [Element.basis(lab) for lab in labels(n, k, s)]
        rows.append(TorRow(k, hom.ranks.get(k, 0), basis, True))
        if rows[-1].rank != len(basis):
            raise AssertionError("graded Tor rank disagrees with its basis")
    return TorTable(n, "graded", s, rows)


def _kernel_block(block):
    if block.matrix.ncols == 0:
        return []
    if block.matrix.nrows == 0:
        return [tuple(1 if i == j else 0 for i in range(block.matrix.ncols)) for j in range(block.matrix.ncols)]
    _, kernel = rank_and_kernel(block.matrix.change_domain(QQ))
    return kernel


def _lattice_certified(vectors):
    """True iff the integer vectors span a saturated sublattice (a Z-basis of their Q-span)."""
    if not vectors:
        return True
    if any(getattr(c, "denominator", 1) != 1 for v in vectors for c in v):
        return False
    M = SparseMatrix.from_dense([[int(c) for c in v] for v in vectors], ZZ)
    return all(d == 1 for d in smith_normal_form(M).divisors)


def tor_power_row(n, s, k):
    """``Tor_k(E, I^s)`` as ``ker(d: (k, s) -> (k - 1, s + 1))``."""
    if s < 0:
        raise ValueError("s must be non-negative")
    blocks = partial_blocks(n, k, s)
    prev = {b.weight: b for b in partial_blocks(n, k + 1, s - 1)} if s >= 1 else {}
    basis = []
    free = freeness_certificate([b.matrix for b in blocks]).ok
    exact = True if s >= 1 else None
    for b in blocks:
        kernel = _kernel_block(b)
        free = free and _lattice_certified(kernel)
        basis.extend(_element(n, b.sources, v) for v in kernel)
        if s >= 1:
            pb = prev.get(b.weight)
            image_rank = smith_normal_form(pb.matrix).rank if pb is not None else 0
            if image_rank != len(kernel):
                exact = False
            if pb is not None and not (b.matrix @ pb.matrix).is_zero():
                exact = False
    if s >= 1:
        prev_cert = freeness_certificate([b.matrix for b in prev.values()])
        free = free and prev_cert.ok
    return TorRow(k, len(basis), basis, free, exact)


def tor_power(n, s, max_k=None):
    top = n if max_k is None else min(max_k, n)
    return TorTable(n, "power", s, [tor_power_row(n, s, k) for k in range(top + 1)])


def _complement(block_vectors, candidates, ambient):
    """Greedy completion: keep candidate labels independent of the span, in canonical order."""
    pos = {lab: i for i, lab in enumerate(ambient)}
    ech = Echelon(QQ)
    for v in block_vectors:
        ech.add(v)
    chosen = []
    for lab in sorted(candidates, key=term_key):
        if ech.add({pos[lab]: 1}):
            chosen.append(lab)
    return chosen


def tor_quotient_row(n, s, k):
    """``Tor_k(E, R/I^s) = E [k = 0] (+) coker(d: (k + 1, s - 2) -> (k, s - 1))``.

    For ``s = 1`` the reduced part is ``Lambda^k`` for ``k >= 1``.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    unit = [Element.unit(n)] if k == 0 else []
    if s == 1:
        reduced = [Element.basis(lab) for lab in labels(n, k, 0)] if k >= 1 else []
        return TorRow(k, len(unit) + len(reduced), unit + reduced, True, None, len(reduced))
    blocks = partial_blocks(n, k + 1, s - 2)
    by_weight = {b.weight: b for b in blocks}
    targets = defaultdict(list)
    for lab in labels(n, k, s - 1):
        targets[lab.weight].append(lab)
    reduced = []
    for w in sorted(targets, key=monomial_key):
        T = targets[w]
        b = by_weight.get(w)
        cols = []
        if b is not None:
            tpos = {lab: i for i, lab in enumerate(T)}
            for col in b.matrix.columns():
                cols.append({tpos[b.targets[i]]: v for i, v in col.items()})
        reduced.extend(Element.basis(lab) for lab in _complement(cols, T, T))
    reduced.sort(key=lambda e: term_key(next(iter(e.terms))))
    free = freeness_certificate([b.matrix for b in blocks]).ok
    return TorRow(k, len(unit) + len(reduced), unit + reduced, free, None, len(reduced))


def tor_quotient(n, s, max_k=None):
    top = n if max_k is None else min(max_k, n)
    return TorTable(n, "quotient", s, [tor_quotient_row(n, s, k) for k in range(top + 1)])


def _homology_basis(C, k):
    """Homology basis of a formal complex in degree ``k``, per grading block."""
    src = defaultdict(list)
    for lab in C.basis(k):
        src[C.grading(lab)].append(lab)
    out = []
    free = True
    for w in sorted(src, key=monomial_key):
        S = src[w]
        spos = {lab: i for i, lab in enumerate(S)}
        # cycles
        T = [lab for lab in C.basis(k - 1) if C.grading(lab) == w]
        tpos = {lab: i for i, lab in enumerate(T)}
        entries = {}
        for j, lab in enumerate(S):
            for t, v in C.apply(k, {lab: 1}).items():
                entries[(tpos[t], j)] = v
        M = SparseMatrix(len(T), len(S), entries, ZZ)
        if T:
            free = free and freeness_certificate([M]).ok
            cycles = _kernel_block(Block(w, S, T, M))
        else:
            cycles = [tuple(1 if i == j else 0 for i in range(len(S))) for j in range(len(S))]
        # boundaries
        U = [lab for lab in C.basis(k + 1) if C.grading(lab) == w]
        ech = Echelon(QQ)
        bents = {}
        for j, lab in enumerate(U):
            img = C.apply(k + 1, {lab: 1})
            ech.add({spos[t]: v for t, v in img.items()})
            for t, v in img.items():
                bents[(spos[t], j)] = v
        if U:
            free = free and freeness_certificate([SparseMatrix(len(S), len(U), bents, ZZ)]).ok
        for v in cycles:
            if ech.add({i: c for i, c in enumerate(v) if c != 0}):
                out.append(_element(C.basis(k)[0].n if C.basis(k) else 0, S, v))
    return out, free


def tor_subquotient(n, s, t, max_k=None):
    """``Tor(E, I^s/I^t)`` as the homology of ``E (x) (F^s/F^t)``."""
    if not 0 <= s < t:
        raise ValueError("need 0 <= s < t")
    K = ExtendedKoszul(n, bound=t - 1)
    C = condense(K.window(s, t))
    top = n if max_k is None else min(max_k, n)
    rows = []
    for k in range(top + 1):
        basis, free = _homology_basis(C, k)
        rows.append(TorRow(k, len(basis), basis, free))
    return TorTable(n, "subquotient", s, rows, t)


def ext_ranks(table):
    """Ranks of ``Ext^k_R(A, R/I)``; by duality they equal the certified Tor ranks."""
    for row in table.rows:
        if not row.free_certified:
            raise ValueError(f"row k={row.k} has no freeness certificate")
    return [row.rank for row in table.rows]


def _solve_boundary(n, target, column):
    """Find ``w`` in ``(k + 1, column - 1)`` with ``d w = target``; integer or None."""
    kind = _kind(target)
    if kind is None:
        return Element(n)
    k, s = kind
    blocks = {b.weight: b for b in partial_blocks(n, k + 1, s - 1)}
    by_w = defaultdict(dict)
    for lab, c in target.terms.items():
        by_w[lab.weight][lab] = c
    out = {}
    for w, part in by_w.items():
        b = blocks.get(w)
        if b is None:
            return None
        tpos = {lab: i for i, lab in enumerate(b.targets)}
        rhs = [0] * len(b.targets)
        for lab, c in part.items():
            rhs[tpos[lab]] = c
        x = solve(b.matrix, rhs)
        if x is None:
            return None
        for lab, c in zip(b.sources, x):
            if c != 0:
                out[lab] = _integral(c)
    return Element(n, out)


def product_triviality_check(n, s, kind="power"):
    """Witness that products of Tor classes vanish.

    ``kind="power"``: every product ``u v`` of basis classes of ``Tor(E, I^s)``
    lies in column ``2s`` and is shown to equal ``d w`` for an explicit
    integral ``w`` in column ``2s - 1``, a boundary inside ``E (x) F^s``.
    ``kind="quotient"`` (``s >= 2``): products of reduced classes of
    ``Tor(E, R/I^s)`` sit in column ``2(s - 1) >= s`` and vanish in ``K/s``.
    """
    pairs = []
    ok = True
    if kind == "power":
        if s < 1:
            raise ValueError("s must be at least 1")
        classes = [b for k in range(n + 1) for b in tor_power_row(n, s, k).basis]
        for u in classes:
            for v in classes:
                uv = multiply_twisted(u, v)
                w = _solve_boundary(n, uv, 2 * s)
                good = w is not None and apply_dh(w) == uv and all(isinstance(c, int) for c in w.terms.values())
                ok = ok and good
                pairs.append(
                    {"u": u.format(), "v": v.format(), "product": uv.format(), "witness": None if w is None else w.format(), "ok": good}
                )
    elif kind == "quotient":
        if s < 2:
            raise ValueError("the quotient statement needs s >= 2")
        classes = [b for k in range(1, n + 1) for b in tor_quotient_row(n, s, k).basis]
        for u in classes:
            for v in classes:
                uv = multiply_twisted(u, v)
                kept = {lab: c for lab, c in uv.terms.items() if sum(lab.a) < s}
                good = not kept and all(sum(lab.a) >= 2 * (s - 1) for lab in uv.terms)
                ok = ok and good
                pairs.append({"u": u.format(), "v": v.format(), "product": uv.format(), "ok": good})
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return {"n": n, "s": s, "kind": kind, "pairs": pairs, "ok": ok}


def expected_graded_rank(n, s, k):
    return comb(n, k) * comb(n + s - 1, n - 1)


__all__ = [
    "Certificate",
    "TorRow",
    "TorTable",
    "delta",
    "delta_snake",
    "ext_ranks",
    "freeness_certificate",
    "partial_blocks",
    "product_triviality_check",
    "tor_graded",
    "tor_power",
    "tor_power_row",
    "tor_quotient",
    "tor_quotient_row",
    "tor_subquotient",
]
