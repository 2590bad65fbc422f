"""Exact linear algebra: Smith normal form over the integers, rank and kernel over fields."""

from fractions import Fraction
from math import gcd, lcm
from typing import NamedTuple

from .. import _core
from .domains import QQ, ZZ, PrimeField, RationalField, IntegerRing
from .sparse import SparseMatrix


class SNF(NamedTuple):
    divisors: list
    rank: int


def chain_divisors(diagonal):
    """Turn nonzero diagonal entries into the invariant factor chain d1 | d2 | ...."""
    d = sorted(abs(v) for v in diagonal)
    r = len(d)
    for i in range(r):
        for j in range(i + 1, r):
            g = gcd(d[i], d[j])
            if g != d[i]:
                d[i], d[j] = g, d[i] * d[j] // g
    return d


def _integer_rows(M):
    """Dense integer rows with the same rank and the same row space up to scaling."""
    if isinstance(M.domain, IntegerRing):
        rows = [[0] * M.ncols for _ in range(M.nrows)]
        for (i, j), v in M.entries.items():
            rows[i][j] = v
        return rows
    if isinstance(M.domain, RationalField):
        rows = [[0] * M.ncols for _ in range(M.nrows)]
        dens = [1] * M.nrows
        for (i, j), v in M.entries.items():
            dens[i] = lcm(dens[i], Fraction(v).denominator)
        for (i, j), v in M.entries.items():
            v = Fraction(v) * dens[i]
            rows[i][j] = v.numerator
        return rows
    raise TypeError(f"no integer form for matrices over {M.domain}")


def smith_normal_form(M):
    """Invariant factors of an integer matrix.

    Returns ``SNF(divisors, rank)`` with ``divisors`` positive and each
    dividing the next.
    """
    if not isinstance(M.domain, IntegerRing):
        raise TypeError("Smith normal form needs an integer matrix")
    if M.nrows == 0 or M.ncols == 0 or not M.entries:
        return SNF([], 0)
    diag = _core.diagonalize_int(_integer_rows(M), M.ncols)
    divisors = chain_divisors(diag)
    return SNF(divisors, len(divisors))


def rank(M):
    if M.nrows == 0 or M.ncols == 0 or not M.entries:
        return 0
    if isinstance(M.domain, PrimeField):
        p = M.domain.p
        rows = [[0] * M.ncols for _ in range(M.nrows)]
        for (i, j), v in M.entries.items():
            rows[i][j] = v.value
        return _core.rank_mod_p(rows, M.ncols, p)
    return len(_core.diagonalize_int(_integer_rows(M), M.ncols))


def _rref_field(M):
    """Reduced row echelon form over a field: ``(pivots, rows)`` with dict rows."""
    domain = M.domain
    if isinstance(domain, PrimeField):
        dense = [[0] * M.ncols for _ in range(M.nrows)]
        for (i, j), v in M.entries.items():
            dense[i][j] = v.value
        pivots, rows = _core.rref_mod_p(dense, M.ncols, domain.p)
        return pivots, [{j: domain.convert(v) for j, v in enumerate(r) if v} for r in rows]
    if not isinstance(domain, RationalField):
        raise TypeError(f"{domain} is not a field")
    ech = Echelon(domain)
    for r in M.rows():
        if r:
            ech.add(r)
    pivots = sorted(ech.rows)
    return pivots, [ech.rows[p] for p in pivots]


def rank_and_kernel(M):
    """Rank and a kernel basis of a matrix over a field.

    The kernel basis is returned in reduced row echelon form, as tuples of
    length ``M.ncols``.
    """
    domain = M.domain
    if not domain.is_field:
        raise TypeError(f"rank_and_kernel needs a field, got {domain}")
    pivots, rows = _rref_field(M)
    pivset = set(pivots)
    zero, one = domain.zero, domain.one
    kernel = []
    for f in range(M.ncols):
        if f in pivset:
            continue
        v = [zero] * M.ncols
        v[f] = one
        for p, row in zip(pivots, rows):
            c = row.get(f)
            if c:
                v[p] = -c
        kernel.append(v)
    if kernel:
        K = SparseMatrix.from_dense(kernel, domain, M.ncols)
        _, krows = _rref_field(K)
        kernel = [tuple(r.get(j, zero) for j in range(M.ncols)) for r in krows]
    return len(pivots), kernel


class Echelon:
    """Incrementally maintained reduced row echelon basis over a field.

    Vectors are dicts ``{index: value}``.  When ``track`` is set, every
    stored row remembers how it was combined from the inputs, which is
    what :meth:`express` uses to solve linear systems.
    """

    def __init__(self, domain=QQ, track=False):
        if not domain.is_field:
            raise TypeError(f"{domain} is not a field")
        self.domain = domain
        self.rows = {}
        self.tags = {} if track else None
        self.count = 0

    def _conv(self, vec):
        conv = self.domain.convert
        return {j: conv(v) for j, v in vec.items() if v != 0}

    def reduce(self, vec, tag=None):
        vec = dict(vec)
        for p in [p for p in vec if p in self.rows]:
            c = vec.get(p)
            if not c:
                continue
            for j, v in self.rows[p].items():
                nv = vec.get(j, 0) - c * v
                if nv != 0:
                    vec[j] = nv
                else:
                    vec.pop(j, None)
            if tag is not None:
                for j, v in self.tags[p].items():
                    nv = tag.get(j, 0) - c * v
                    if nv != 0:
                        tag[j] = nv
                    else:
                        tag.pop(j, None)
        return vec

    def add(self, vec, label=None):
        """Insert ``vec``; return True iff it was independent of the stored rows."""
        tag = None
        if self.tags is not None:
            tag = {self.count if label is None else label: self.domain.one}
        self.count += 1
        vec = self.reduce(self._conv(vec), tag)
        if not vec:
            return False
        p = min(vec)
        inv = self.domain.one / vec[p]
        vec = {j: v * inv for j, v in vec.items()}
        if tag is not None:
            tag = {j: v * inv for j, v in tag.items()}
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                for j, v in vec.items():
                    nv = row.get(j, 0) - c * v
                    if nv != 0:
                        row[j] = nv
                    else:
                        row.pop(j, None)
                if tag is not None:
                    qt = self.tags[q]
                    for j, v in tag.items():
                        nv = qt.get(j, 0) - c * v
                        if nv != 0:
                            qt[j] = nv
                        else:
                            qt.pop(j, None)
        self.rows[p] = vec
        if tag is not None:
            self.tags[p] = tag
        return True

    def contains(self, vec):
        return not self.reduce(self._conv(vec))

    def express(self, vec):
        """Coefficients writing ``vec`` as a combination of the inserted vectors, or None."""
        if self.tags is None:
            raise ValueError("express() needs track=True")
        acc = {}
        rest = self.reduce(self._conv(vec), acc)
        if rest:
            return None
        # reduce() subtracted c * tag_p; the combination is minus that
        return {j: -v for j, v in acc.items()}

    @property
    def rank(self):
        return len(self.rows)


def solve(M, b):
    """A solution ``x`` of ``M x = b`` over the rationals, or None if there is none."""
    domain = M.domain if M.domain.is_field else QQ
    ech = Echelon(domain, track=True)
    for j, col in enumerate(M.columns()):
        ech.add(col, label=j)
    target = {i: v for i, v in enumerate(b) if v != 0}
    coeffs = ech.express(target)
    if coeffs is None:
        return None
    x = [domain.zero] * M.ncols
    for j, v in coeffs.items():
        x[j] = v
    return x


def is_unimodular_certificate(M):
    """True iff every invariant factor of the integer matrix ``M`` equals 1."""
    return all(d == 1 for d in smith_normal_form(M).divisors)


__all__ = [
    "SNF",
    "Echelon",
    "chain_divisors",
    "is_unimodular_certificate",
    "rank",
    "rank_and_kernel",
    "smith_normal_form",
    "solve",
    "ZZ",
    "QQ",
]
