"""Sparse multivariate polynomials with exact coefficients."""

from .domains import Domain


def monomial_key(a):
    """Sort key putting exponent vectors in descending degree-then-lex order."""
    return (-sum(a), tuple(-e for e in a))


def monomials_of_degree(n, d):
    """All exponent vectors of length ``n`` and total degree ``d``, in canonical order."""
    if n == 0:
        return [()] if d == 0 else []
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            out.append(prefix + (left,))
            return
        for first in range(left, -1, -1):
            rec(prefix + (first,), left - first, slots - 1)

    rec((), d, n)
    return out


def monomials_up_to(n, d):
    out = []
    for k in range(d + 1):
        out.extend(monomials_of_degree(n, k))
    return out


def add_exponents(a, b):
    return tuple(x + y for x, y in zip(a, b))


class Polynomial:
    """Finite map from exponent vectors to nonzero coefficients.

    Coefficients may be any values supporting ``+``, ``*`` and ``== 0``
    (ints, Fractions, :class:`ModP`).  Instances are treated as immutable.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for a, c in terms.items():
                if len(a) != nvars:
                    raise ValueError(f"exponent {a} has wrong length for {nvars} variables")
                if any(e < 0 for e in a):
                    raise ValueError(f"negative exponent in {a}")
                if c != 0:
                    clean[tuple(a)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, a, c=1):
        return cls(len(a), {tuple(a): c})

    @classmethod
    def variable(cls, nvars, i, c=1):
        a = [0] * nvars
        a[i] = 1
        return cls(nvars, {tuple(a): c})

    def _lift(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials in different numbers of variables")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms.get(a, 0) + c
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(self.nvars, {a: c * other for a, c in self.terms.items()})
        other = self._lift(other)
        terms = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                ab = add_exponents(a, b)
                terms[ab] = terms.get(ab, 0) + c * d
        return Polynomial(self.nvars, terms)

    def __rmul__(self, other):
        return Polynomial(self.nvars, {a: other * c for a, c in self.terms.items()})

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if other == 0:
            return not self.terms
        return self.terms == Polynomial.constant(self.nvars, other).terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def degree(self):
        if not self.terms:
            return -1
        return max(sum(a) for a in self.terms)

    def is_homogeneous(self):
        return len({sum(a) for a in self.terms}) <= 1

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: monomial_key(t[0]))

    def evaluate(self, values):
        """Substitute ``values[i]`` for the i-th variable.

        This is a ring homomorphism, so the values may live in any
        commutative ring whose elements support ``+`` and ``*``.
        """
        values = tuple(values)
        if len(values) != self.nvars:
            raise ValueError(f"expected {self.nvars} values, got {len(values)}")
        total = 0
        for a, c in self.terms.items():
            term = c
            for v, e in zip(values, a):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def format(self, var="y"):
        if not self.terms:
            return "0"
        parts = []
        for a, c in self.sorted_terms():
            mono = "*".join(
                f"{var}{i + 1}" if e == 1 else f"{var}{i + 1}^{e}"
                for i, e in enumerate(a)
                if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    def __repr__(self):
        return f"Polynomial({self.format()})"

    __str__ = format


class PolynomialRing(Domain):
    """Polynomial ring over a base domain, with variables named ``var1..varN``."""

    is_field = False

    def __init__(self, base, nvars, var="y"):
        self.base = base
        self.nvars = nvars
        self.var = var
        self.name = f"{base.name}[{','.join(f'{var}{i + 1}' for i in range(nvars))}]"
        self.zero = Polynomial(nvars)
        self.one = Polynomial.constant(nvars, base.one)

    def convert(self, value):
        if isinstance(value, Polynomial):
            if value.nvars != self.nvars:
                raise ValueError("wrong number of variables")
            return Polynomial(
                self.nvars, {a: self.base.convert(c) for a, c in value.terms.items()}
            )
        return Polynomial.constant(self.nvars, self.base.convert(value))

    def gens(self):
        return tuple(Polynomial.variable(self.nvars, i, self.base.one) for i in range(self.nvars))

    def __eq__(self, other):
        return isinstance(other, PolynomialRing) and self.name == other.name

    def __hash__(self):
        return hash(self.name)


def evaluate_polynomial(f, values):
    return f.evaluate(values)

