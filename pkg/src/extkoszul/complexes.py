"""Finite free chain complexes and double complexes.

Basis labels are opaque hashable values.  A differential in degree ``k``
is a :class:`SparseMatrix` whose columns are indexed by the degree-``k``
basis and whose rows are indexed by the degree ``k - 1`` basis.  Double
complexes keep one basis per bidegree ``(p, q)``; the horizontal
differential lowers ``p`` and the vertical one lowers ``q``.
"""

from collections import defaultdict
from typing import NamedTuple

from .exact.domains import QQ, ZZ, IntegerRing
from .exact.linalg import rank as matrix_rank, smith_normal_form
from .exact.sparse import SparseMatrix

COMMUTING = "commuting"
ANTICOMMUTING = "anticommuting"


class TruncationError(ValueError):
    """An operation would need basis elements beyond the truncation bound."""


def _sign(e):
    return -1 if e & 1 else 1


def _column_dicts(M, row_labels, col_labels):
    """``{col_label: {row_label: value}}`` for the nonzero columns of ``M``."""
    out = {}
    for (i, j), v in M.entries.items():
        out.setdefault(col_labels[j], {})[row_labels[i]] = v
    return out


class FreeComplex:
    """Chain complex of finite free modules with labelled bases.

    ``grading`` is an optional callable sending a label to a block key; when
    given, every differential is expected to preserve it and homology is
    computed block by block.
    """

    def __init__(self, domain, bases, diffs=None, grading=None):
        self.domain = domain
        self.bases = {k: list(v) for k, v in bases.items() if v}
        self.grading = grading
        self._index = {k: {lab: i for i, lab in enumerate(v)} for k, v in self.bases.items()}
        for k, idx in self._index.items():
            if len(idx) != len(self.bases[k]):
                raise ValueError(f"repeated basis label in degree {k}")
        self.diffs = {}
        for k, M in (diffs or {}).items():
            if M.is_zero():
                continue
            if M.shape != (self.rank(k - 1), self.rank(k)):
                raise ValueError(
                    f"differential in degree {k} has shape {M.shape}, "
                    f"expected {(self.rank(k - 1), self.rank(k))}"
                )
            self.diffs[k] = M

    def degrees(self):
        return sorted(self.bases)

    def basis(self, k):
        return self.bases.get(k, [])

    def rank(self, k):
        return len(self.bases.get(k, ()))

    def ranks(self):
        return {k: self.rank(k) for k in self.degrees()}

    def index(self, k, label):
        return self._index[k][label]

    def diff(self, k):
        M = self.diffs.get(k)
        if M is None:
            return SparseMatrix.zero(self.rank(k - 1), self.rank(k), self.domain)
        return M

    def apply(self, k, vector):
        """Apply ``d_k`` to ``{label: coefficient}``; returns a dict on degree ``k - 1``."""
        M = self.diffs.get(k)
        out = {}
        if M is None:
            return out
        cols = M.columns()
        idx = self._index[k]
        targets = self.basis(k - 1)
        for lab, c in vector.items():
            for i, v in cols[idx[lab]].items():
                t = targets[i]
                nv = out.get(t, 0) + c * v
                if nv != 0:
                    out[t] = nv
                else:
                    out.pop(t, None)
        return out

    def map_entries(self, fn, domain):
        return FreeComplex(
            domain,
            self.bases,
            {k: M.map_entries(fn, domain) for k, M in self.diffs.items()},
            self.grading,
        )

    def change_domain(self, domain):
        return self.map_entries(domain.convert, domain)

    def as_dict(self):
        """Basis-order independent description, used for structural equality."""
        out = {}
        for k in self.degrees():
            cols = _column_dicts(self.diff(k), self.basis(k - 1), self.basis(k))
            out[k] = {lab: cols.get(lab, {}) for lab in self.basis(k)}
        return out

    def same_as(self, other):
        return self.as_dict() == other.as_dict()

    def __repr__(self):
        return f"FreeComplex({self.domain}, ranks={self.ranks()})"


class FreeDoubleComplex:
    """Bigraded family of free modules with horizontal and vertical differentials.

    ``dh[(p, q)]`` maps bidegree ``(p, q)`` to ``(p - 1, q)`` and ``dv[(p, q)]``
    maps ``(p, q)`` to ``(p, q - 1)``.  ``product(l1, l2)`` returns a dict
    ``{label: coefficient}``; labels missing from the complex are read as
    zero, which is the right thing for truncations by an ideal.
    """

    def __init__(
        self,
        domain,
        bases,
        dh=None,
        dv=None,
        convention=COMMUTING,
        product=None,
        unbounded=False,
        grading=None,
    ):
        if convention not in (COMMUTING, ANTICOMMUTING):
            raise ValueError(f"unknown convention {convention!r}")
        self.domain = domain
        self.bases = {pq: list(v) for pq, v in bases.items() if v}
        self.convention = convention
        self.product = product
        self.unbounded = unbounded
        self.grading = grading
        self._where = {}
        self._index = {}
        for pq, labels in self.bases.items():
            self._index[pq] = {lab: i for i, lab in enumerate(labels)}
            for lab in labels:
                if lab in self._where:
                    raise ValueError(f"label {lab!r} appears twice")
                self._where[lab] = pq
        self.dh = self._check_maps(dh or {}, (-1, 0), "horizontal")
        self.dv = self._check_maps(dv or {}, (0, -1), "vertical")
        self._colcache = {}

    def _check_maps(self, maps, step, name):
        out = {}
        for (p, q), M in maps.items():
            if M.is_zero():
                continue
            tgt = (p + step[0], q + step[1])
            shape = (self.size(tgt), self.size((p, q)))
            if M.shape != shape:
                raise ValueError(f"{name} differential at {(p, q)} has shape {M.shape}, expected {shape}")
            out[(p, q)] = M
        return out

    def bidegrees(self):
        return sorted(self.bases)

    def basis(self, pq):
        return self.bases.get(pq, [])

    def size(self, pq):
        return len(self.bases.get(pq, ()))

    def bidegree_of(self, label):
        return self._where[label]

    def __contains__(self, label):
        return label in self._where

    def labels(self):
        return iter(self._where)

    def hmap(self, pq):
        p, q = pq
        M = self.dh.get(pq)
        return M if M is not None else SparseMatrix.zero(self.size((p - 1, q)), self.size(pq), self.domain)

    def vmap(self, pq):
        p, q = pq
        M = self.dv.get(pq)
        return M if M is not None else SparseMatrix.zero(self.size((p, q - 1)), self.size(pq), self.domain)

    def total_degrees(self):
        return sorted({p + q for p, q in self.bases})

    def column(self, p):
        """Column ``p`` with its vertical differential, as a complex graded by ``q``."""
        bases = {q: self.basis((pp, q)) for (pp, q) in self.bases if pp == p}
        diffs = {q: self.vmap((p, q)) for q in bases if (p, q - 1) in self.bases}
        return FreeComplex(self.domain, bases, diffs, self.grading)

    def row(self, q):
        """Row ``q`` with its horizontal differential, as a complex graded by ``p``."""
        bases = {p: self.basis((p, qq)) for (p, qq) in self.bases if qq == q}
        diffs = {p: self.hmap((p, q)) for p in bases if (p - 1, q) in self.bases}
        return FreeComplex(self.domain, bases, diffs, self.grading)

    def apply_h(self, vector):
        return self._apply("h", self.dh, (-1, 0), vector)

    def apply_v(self, vector):
        return self._apply("v", self.dv, (0, -1), vector)

    def _apply(self, which, maps, step, vector):
        out = {}
        cache = self._colcache
        for lab, c in vector.items():
            if lab not in self._where:
                continue
            pq = self._where[lab]
            key = (which, pq)
            cols = cache.get(key)
            if cols is None:
                M = maps.get(pq)
                tgt = (pq[0] + step[0], pq[1] + step[1])
                cols = _column_dicts(M, self.basis(tgt), self.basis(pq)) if M is not None else {}
                cache[key] = cols
            for t, v in cols.get(lab, {}).items():
                nv = out.get(t, 0) + c * v
                if nv != 0:
                    out[t] = nv
                else:
                    out.pop(t, None)
        return out

    def multiply(self, u, v):
        """Bilinear extension of the product to ``{label: coefficient}`` dicts."""
        if self.product is None:
            raise ValueError("this double complex carries no product")
        out = {}
        for l1, c1 in u.items():
            for l2, c2 in v.items():
                for lab, c in self.product(l1, l2).items():
                    if lab not in self._where:
                        continue
                    nv = out.get(lab, 0) + c1 * c2 * c
                    if nv != 0:
                        out[lab] = nv
                    else:
                        out.pop(lab, None)
        return out

    def as_dict(self):
        out = {}
        for pq in self.bidegrees():
            p, q = pq
            hc = _column_dicts(self.hmap(pq), self.basis((p - 1, q)), self.basis(pq))
            vc = _column_dicts(self.vmap(pq), self.basis((p, q - 1)), self.basis(pq))
            out[pq] = {lab: (hc.get(lab, {}), vc.get(lab, {})) for lab in self.basis(pq)}
        return out

    def same_as(self, other):
        return self.convention == other.convention and self.as_dict() == other.as_dict()

    def __repr__(self):
        sizes = {pq: self.size(pq) for pq in self.bidegrees()}
        return f"FreeDoubleComplex({self.domain}, {self.convention}, {sizes})"


class ChainMap:
    """Degreewise matrices ``f_k: source_k -> target_k``."""

    def __init__(self, source, target, maps):
        self.source = source
        self.target = target
        self.maps = {}
        for k, M in maps.items():
            if M.shape != (target.rank(k), source.rank(k)):
                raise ValueError(f"component {k} has shape {M.shape}")
            self.maps[k] = M

    def component(self, k):
        M = self.maps.get(k)
        if M is None:
            return SparseMatrix.zero(self.target.rank(k), self.source.rank(k), self.source.domain)
        return M

    @classmethod
    def from_labels(cls, source, target, rule):
        """Build a map from ``rule(label) -> {target_label: coefficient}``."""
        maps = {}
        for k in source.degrees():
            entries = {}
            tidx = target._index.get(k, {})
            for j, lab in enumerate(source.basis(k)):
                for t, c in rule(lab).items():
                    if t not in tidx:
                        raise ValueError(f"{t!r} is not a degree-{k} label of the target")
                    entries[(tidx[t], j)] = c
            maps[k] = SparseMatrix(target.rank(k), source.rank(k), entries, source.domain)
        return cls(source, target, maps)

    def verify(self):
        """Violations of ``d f = f d``, one per offending source label."""
        report = []
        degrees = sorted(set(self.source.degrees()) | set(self.target.degrees()))
        for k in degrees:
            lhs = self.target.diff(k) @ self.component(k)
            rhs = self.component(k - 1) @ self.source.diff(k)
            bad = sorted({j for (i, j) in (lhs - rhs).entries})
            for j in bad:
                report.append({"identity": "d f = f d", "degree": k, "label": self.source.basis(k)[j]})
        return report


def _product_violations(D, pairs, name, dfun, sign_index):
    """Check ``d(xy) = d(x) y + (-1)^e x d(y)`` with ``e`` the chosen bidegree component."""
    report = []
    for l1, l2 in pairs:
        lhs = dfun(D.multiply({l1: 1}, {l2: 1}))
        e = D.bidegree_of(l1)[sign_index]
        rhs = D.multiply(dfun({l1: 1}), {l2: 1})
        for lab, c in D.multiply({l1: 1}, dfun({l2: 1})).items():
            nv = rhs.get(lab, 0) + _sign(e) * c
            if nv != 0:
                rhs[lab] = nv
            else:
                rhs.pop(lab, None)
        if lhs != rhs:
            report.append({"identity": name, "bidegree": D.bidegree_of(l1), "label": (l1, l2)})
    return report


def verify_complex(C, check_product=True, pairs=None):
    """List every violated identity; an empty list means all invariants hold.

    For a :class:`FreeComplex` this checks ``d d = 0`` and, with a grading,
    that the differentials are block diagonal.  For a
    :class:`FreeDoubleComplex` it checks both squares of the differentials,
    commutation or anticommutation of the squares according to the stored
    convention, and, when a product is present, the derivation laws: sign
    ``(-1)^p`` for the horizontal differential and, in the commuting form,
    ``(-1)^q`` for the vertical one.
    """
    report = []
    if isinstance(C, FreeComplex):
        for k in C.degrees():
            prod = C.diff(k - 1) @ C.diff(k)
            for j in sorted({j for (i, j) in prod.entries}):
                report.append({"identity": "d d = 0", "degree": k, "label": C.basis(k)[j]})
            if C.grading is not None:
                for (i, j) in sorted(C.diff(k).entries):
                    src, tgt = C.basis(k)[j], C.basis(k - 1)[i]
                    if C.grading(src) != C.grading(tgt):
                        report.append({"identity": "grading", "degree": k, "label": src})
        return report

    if not isinstance(C, FreeDoubleComplex):
        raise TypeError(f"cannot verify {type(C).__name__}")
    for pq in C.bidegrees():
        p, q = pq
        hh = C.hmap((p - 1, q)) @ C.hmap(pq)
        vv = C.vmap((p, q - 1)) @ C.vmap(pq)
        hv = C.hmap((p, q - 1)) @ C.vmap(pq)
        vh = C.vmap((p - 1, q)) @ C.hmap(pq)
        square = hv - vh if C.convention == COMMUTING else hv + vh
        for name, M in (("dh dh = 0", hh), ("dv dv = 0", vv), (f"{C.convention} squares", square)):
            for j in sorted({j for (i, j) in M.entries}):
                report.append({"identity": name, "bidegree": pq, "label": C.basis(pq)[j]})
    if check_product and C.product is not None:
        if pairs is None:
            labels = list(C.labels())
            pairs = [(a, b) for a in labels for b in labels]
        pairs = list(pairs)
        report += _product_violations(C, pairs, "dh derivation", C.apply_h, 0)
        if C.convention == COMMUTING:
            report += _product_violations(C, pairs, "dv derivation", C.apply_v, 1)
    return report


def toggle_square_convention(D):
    """Multiply every vertical differential by ``(-1)^p`` and flip the convention flag."""
    dv = {(p, q): (M if p % 2 == 0 else -M) for (p, q), M in D.dv.items()}
    flag = ANTICOMMUTING if D.convention == COMMUTING else COMMUTING
    return FreeDoubleComplex(
        D.domain, D.bases, D.dh, dv, flag, D.product, D.unbounded, D.grading
    )


def condense(D):
    """Total complex with differential ``d^h + (d^v)'``.

    ``(d^v)'`` is the stored vertical differential for the anticommuting
    form and ``(-1)^p d^v`` for the commuting form.  The degree-``k`` basis
    lists the bidegrees on the diagonal ``p + q = k`` in decreasing ``p``.
    """
    if D.unbounded:
        raise TruncationError("cannot condense an unbounded double complex; truncate it first")
    if D.convention == COMMUTING:
        D = toggle_square_convention(D)
    by_total = defaultdict(list)
    for p, q in D.bidegrees():
        by_total[p + q].append((p, q))
    bases, offsets = {}, {}
    for k, pqs in by_total.items():
        pqs.sort(key=lambda pq: -pq[0])
        labels = []
        for pq in pqs:
            offsets[pq] = len(labels)
            labels.extend(D.basis(pq))
        bases[k] = labels
    diffs = {}
    for k in bases:
        entries = {}
        for pq in by_total[k]:
            p, q = pq
            col0 = offsets[pq]
            for M, tgt in ((D.dh.get(pq), (p - 1, q)), (D.dv.get(pq), (p, q - 1))):
                if M is None:
                    continue
                row0 = offsets[tgt]
                for (i, j), v in M.entries.items():
                    key = (row0 + i, col0 + j)
                    entries[key] = entries.get(key, 0) + v
        if entries:
            diffs[k] = SparseMatrix(len(bases.get(k - 1, ())), len(bases[k]), entries, D.domain)
    return FreeComplex(D.domain, bases, diffs, D.grading)


def suspend(C, s):
    """``(Sigma^s C)_k = C_{k-s}`` with differentials multiplied by ``(-1)^s``."""
    bases = {k + s: v for k, v in C.bases.items()}
    diffs = {k + s: (M if s % 2 == 0 else -M) for k, M in C.diffs.items()}
    return FreeComplex(C.domain, bases, diffs, C.grading)


def _pair_grading(g1, g2):
    if g1 is None or g2 is None:
        return None

    def grading(label):
        return (g1(label[0]), g2(label[1]))

    return grading


def tensor_complexes(C, D):
    """Tensor product with differential ``d (x) 1 + (-1)^p 1 (x) d'``; labels are pairs."""
    if C.domain != D.domain:
        raise ValueError("tensor factors must share a coefficient domain")
    bases, where = defaultdict(list), {}
    for p in C.degrees():
        for q in D.degrees():
            for c in C.basis(p):
                for d in D.basis(q):
                    where[(c, d)] = (p + q, len(bases[p + q]))
                    bases[p + q].append((c, d))
    entries = defaultdict(dict)
    for p in C.degrees():
        ccols = _column_dicts(C.diff(p), C.basis(p - 1), C.basis(p))
        for q in D.degrees():
            dcols = _column_dicts(D.diff(q), D.basis(q - 1), D.basis(q))
            sign = _sign(p)
            for c in C.basis(p):
                for d in D.basis(q):
                    k, j = where[(c, d)]
                    for c2, v in ccols.get(c, {}).items():
                        i = where[(c2, d)][1]
                        entries[k][(i, j)] = entries[k].get((i, j), 0) + v
                    for d2, v in dcols.get(d, {}).items():
                        i = where[(c, d2)][1]
                        entries[k][(i, j)] = entries[k].get((i, j), 0) + sign * v
    diffs = {
        k: SparseMatrix(len(bases.get(k - 1, ())), len(bases[k]), ent, C.domain)
        for k, ent in entries.items()
    }
    return FreeComplex(C.domain, dict(bases), diffs, _pair_grading(C.grading, D.grading))


def tensor_double(C, D):
    """Tensor product of commuting double complexes.

    Labels are pairs ``(c, d)``.  The differentials are
    ``d^h(c d) = d^h(c) d + (-1)^{p_c} c d^h(d)`` and the same with ``q`` for
    ``d^v``; the product is
    ``(c d)(c' d') = (-1)^{p_d p_c' + q_d q_c'} (c c')(d d')``.
    """
    if C.convention != COMMUTING or D.convention != COMMUTING:
        raise ValueError("tensor_double needs two commuting double complexes")
    if C.domain != D.domain:
        raise ValueError("tensor factors must share a coefficient domain")
    bases, where = defaultdict(list), {}
    for pc, qc in C.bidegrees():
        for pd, qd in D.bidegrees():
            pq = (pc + pd, qc + qd)
            for c in C.basis((pc, qc)):
                for d in D.basis((pd, qd)):
                    where[(c, d)] = (pq, len(bases[pq]))
                    bases[pq].append((c, d))

    def build(cmaps, dmaps, step, sign_index):
        entries = defaultdict(dict)
        ccache, dcache = {}, {}
        for cpq in C.bidegrees():
            tgt = (cpq[0] + step[0], cpq[1] + step[1])
            M = cmaps.get(cpq)
            ccache[cpq] = _column_dicts(M, C.basis(tgt), C.basis(cpq)) if M is not None else {}
        for dpq in D.bidegrees():
            tgt = (dpq[0] + step[0], dpq[1] + step[1])
            M = dmaps.get(dpq)
            dcache[dpq] = _column_dicts(M, D.basis(tgt), D.basis(dpq)) if M is not None else {}
        for (c, d), (pq, j) in where.items():
            cpq, dpq = C.bidegree_of(c), D.bidegree_of(d)
            tgt = (pq[0] + step[0], pq[1] + step[1])
            for c2, v in ccache[cpq].get(c, {}).items():
                i = where[(c2, d)][1]
                entries[pq][(i, j)] = entries[pq].get((i, j), 0) + v
            sign = _sign(cpq[sign_index])
            for d2, v in dcache[dpq].get(d, {}).items():
                i = where[(c, d2)][1]
                entries[pq][(i, j)] = entries[pq].get((i, j), 0) + sign * v
        out = {}
        for pq, ent in entries.items():
            tgt = (pq[0] + step[0], pq[1] + step[1])
            out[pq] = SparseMatrix(len(bases.get(tgt, ())), len(bases[pq]), ent, C.domain)
        return out

    dh = build(C.dh, D.dh, (-1, 0), 0)
    dv = build(C.dv, D.dv, (0, -1), 1)

    product = None
    if C.product is not None and D.product is not None:

        def product(l1, l2):
            (c, d), (c2, d2) = l1, l2
            pd, qd = D.bidegree_of(d)
            pc2, qc2 = C.bidegree_of(c2)
            sign = _sign(pd * pc2 + qd * qc2)
            out = {}
            cc = C.product(c, c2)
            if not cc:
                return out
            dd = D.product(d, d2)
            for x, u in cc.items():
                for y, w in dd.items():
                    out[(x, y)] = out.get((x, y), 0) + sign * u * w
            return {k: v for k, v in out.items() if v != 0}

    return FreeDoubleComplex(
        C.domain,
        dict(bases),
        dh,
        dv,
        COMMUTING,
        product,
        C.unbounded or D.unbounded,
        _pair_grading(C.grading, D.grading),
    )


def transpose(D):
    """``(TD)_{p,q} = D_{q,p}`` with the two differentials exchanged."""
    bases = {(q, p): v for (p, q), v in D.bases.items()}
    dh = {(q, p): M for (p, q), M in D.dv.items()}
    dv = {(q, p): M for (p, q), M in D.dh.items()}
    return FreeDoubleComplex(
        D.domain, bases, dh, dv, D.convention, D.product, D.unbounded, D.grading
    )


class HomologyReport(NamedTuple):
    ranks: dict
    block_ranks: dict
    torsion: dict


def _blocks(labels, grading):
    out = defaultdict(list)
    for i, lab in enumerate(labels):
        out[grading(lab) if grading is not None else None].append(i)
    return out


def _block_entries(M, row_block, col_block):
    """Split the entries of a block-diagonal matrix by block key."""
    out = defaultdict(dict)
    for (i, j), v in M.entries.items():
        b = col_block[j]
        if row_block[i] != b:
            raise ValueError("differential does not preserve the grading")
        out[b][(i, j)] = v
    return out


def homology_ranks(C, mode="field", field=None):
    """Ranks of ``H_k(C)``, per degree and per grading block.

    ``mode="field"`` computes over ``field`` (default: the coefficient domain,
    which must then be a field).  ``mode="integral"`` needs integer entries,
    computes free ranks and reports the Smith divisors different from 1 of
    every incoming differential as torsion witnesses.
    """
    if mode == "field":
        if field is None:
            if not C.domain.is_field:
                raise TypeError(f"field mode needs field coefficients, not {C.domain}")
            field = C.domain
        elif field != C.domain:
            C = C.change_domain(field)
        domain = field
    elif mode == "integral":
        if not isinstance(C.domain, IntegerRing):
            raise TypeError(f"integral mode needs integer coefficients, not {C.domain}")
        domain = ZZ
    else:
        raise ValueError(f"unknown mode {mode!r}")

    block_of = {}
    blocks_at = {}
    for k in C.degrees():
        bl = _blocks(C.basis(k), C.grading)
        blocks_at[k] = bl
        key = {}
        for b, idx in bl.items():
            for i in idx:
                key[i] = b
        block_of[k] = key

    drank = {}
    torsion = {}
    for k in C.degrees():
        if k - 1 not in C.bases or k not in C.diffs:
            continue
        M = C.diffs[k]
        per = {}
        tors = []
        for b, ent in _block_entries(M, block_of[k - 1], block_of[k]).items():
            rows = sorted({i for i, _ in ent})
            cols = sorted({j for _, j in ent})
            rpos = {r: t for t, r in enumerate(rows)}
            cpos = {c: t for t, c in enumerate(cols)}
            sub = SparseMatrix(
                len(rows), len(cols), {(rpos[i], cpos[j]): v for (i, j), v in ent.items()}, domain
            )
            if mode == "integral":
                snf = smith_normal_form(sub)
                per[b] = snf.rank
                tors.extend(d for d in snf.divisors if d != 1)
            else:
                per[b] = matrix_rank(sub)
        drank[k] = per
        if tors:
            torsion[k - 1] = sorted(tors)

    ranks, block_ranks = {}, {}
    for k in C.degrees():
        per = {}
        for b, idx in blocks_at[k].items():
            per[b] = len(idx) - drank.get(k, {}).get(b, 0) - drank.get(k + 1, {}).get(b, 0)
        block_ranks[k] = {b: r for b, r in per.items() if r}
        ranks[k] = sum(per.values())
    return HomologyReport(ranks, block_ranks, torsion)


def expand_multigraded(C, weight, bound, target_domain=QQ):
    """Expand a complex over a polynomial ring into its graded pieces over the base field.

    ``weight(label)`` is the multidegree of a basis label.  Every entry
    ``c * y^m`` of a differential must satisfy
    ``weight(source) = weight(target) + m``.  The result has basis
    ``(label, m)`` with ``m`` ranging over exponent vectors such that
    ``|weight(label) + m| <= bound`` and is graded by total multidegree.
    """
    from .exact.polynomial import monomials_up_to

    nvars = C.domain.nvars
    bases = {}
    for k in C.degrees():
        labels = []
        for lab in C.basis(k):
            w = weight(lab)
            room = bound - sum(w)
            if room < 0:
                continue
            for m in monomials_up_to(nvars, room):
                labels.append((lab, m))
        bases[k] = labels

    def grading(pair):
        lab, m = pair
        return tuple(x + y for x, y in zip(weight(lab), m))

    diffs = {}
    for k in C.degrees():
        if k not in C.diffs or k - 1 not in bases:
            continue
        tidx = {lab: i for i, lab in enumerate(bases[k - 1])}
        src = C.basis(k)
        tgt = C.basis(k - 1)
        cols = _column_dicts(C.diffs[k], tgt, src)
        entries = {}
        for j, (lab, m) in enumerate(bases[k]):
            for t, f in cols.get(lab, {}).items():
                for e, c in f.terms.items():
                    m2 = tuple(x + y for x, y in zip(m, e))
                    i = tidx.get((t, m2))
                    if i is None:
                        raise ValueError("differential is not homogeneous for the given weights")
                    entries[(i, j)] = entries.get((i, j), 0) + target_domain.convert(c)
        diffs[k] = SparseMatrix(len(bases[k - 1]), len(bases[k]), entries, target_domain)
    return FreeComplex(target_domain, bases, diffs, grading)


__all__ = [
    "ANTICOMMUTING",
    "COMMUTING",
    "ChainMap",
    "FreeComplex",
    "FreeDoubleComplex",
    "HomologyReport",
    "TruncationError",
    "condense",
    "expand_multigraded",
    "homology_ranks",
    "suspend",
    "tensor_complexes",
    "tensor_double",
    "toggle_square_convention",
    "transpose",
    "verify_complex",
]
