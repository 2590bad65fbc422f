from .domains import ZZ


class SparseMatrix:
    """Matrix stored as a map ``(row, col) -> nonzero entry``.

    Absent entries are zero.  Instances are never mutated after construction.
    """

    __slots__ = ("nrows", "ncols", "entries", "domain")

    def __init__(self, nrows, ncols, entries=None, domain=ZZ):
        self.nrows = nrows
        self.ncols = ncols
        self.domain = domain
        clean = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < nrows and 0 <= j < ncols):
                    raise IndexError(f"entry ({i}, {j}) outside a {nrows}x{ncols} matrix")
                if v != 0:
                    clean[(i, j)] = v
        self.entries = clean

    @classmethod
    def zero(cls, nrows, ncols, domain=ZZ):
        return cls(nrows, ncols, None, domain)

    @classmethod
    def identity(cls, n, domain=ZZ):
        return cls(n, n, {(i, i): domain.one for i in range(n)}, domain)

    @classmethod
    def from_dense(cls, rows, domain=ZZ, ncols=None):
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        entries = {}
        for i, r in enumerate(rows):
            if len(r) != ncols:
                raise ValueError("ragged rows")
            for j, v in enumerate(r):
                if v != 0:
                    entries[(i, j)] = domain.convert(v)
        return cls(len(rows), ncols, entries, domain)

    @classmethod
    def diagonal(cls, values, domain=ZZ):
        n = len(values)
        return cls(n, n, {(i, i): domain.convert(v) for i, v in enumerate(values)}, domain)

    def to_dense(self):
        zero = self.domain.zero
        out = [[zero] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def rows(self):
        """Row-wise dict representation ``[{col: value}, ...]``."""
        out = [dict() for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def columns(self):
        out = [dict() for _ in range(self.ncols)]
        for (i, j), v in self.entries.items():
            out[j][i] = v
        return out

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        return self.entries.get(ij, self.domain.zero)

    def is_zero(self):
        return not self.entries

    def transpose(self):
        return SparseMatrix(
            self.ncols, self.nrows, {(j, i): v for (i, j), v in self.entries.items()}, self.domain
        )

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        right_rows = other.rows()
        acc = {}
        for (i, k), v in self.entries.items():
            for j, w in right_rows[k].items():
                acc[(i, j)] = acc.get((i, j), 0) + v * w
        return SparseMatrix(self.nrows, other.ncols, acc, self.domain)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        acc = dict(self.entries)
        for ij, v in other.entries.items():
            acc[ij] = acc.get(ij, 0) + v
        return SparseMatrix(self.nrows, self.ncols, acc, self.domain)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return SparseMatrix(
            self.nrows, self.ncols, {ij: c * v for ij, v in self.entries.items()}, self.domain
        )

    def map_entries(self, fn, domain=None):
        return SparseMatrix(
            self.nrows,
            self.ncols,
            {ij: fn(v) for ij, v in self.entries.items()},
            domain or self.domain,
        )

    def change_domain(self, domain):
        return self.map_entries(domain.convert, domain)

    def submatrix(self, rows, cols):
        rpos = {r: i for i, r in enumerate(rows)}
        cpos = {c: j for j, c in enumerate(cols)}
        entries = {
            (rpos[i], cpos[j]): v
            for (i, j), v in self.entries.items()
            if i in rpos and j in cpos
        }
        return SparseMatrix(len(rows), len(cols), entries, self.domain)

    def apply(self, vector):
        """Multiply by a column vector given as a sequence."""
        if len(vector) != self.ncols:
            raise ValueError("vector length does not match column count")
        out = [self.domain.zero] * self.nrows
        for (i, j), v in self.entries.items():
            if vector[j] != 0:
                out[i] = out[i] + v * vector[j]
        return out

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={len(self.entries)}, {self.domain})"
