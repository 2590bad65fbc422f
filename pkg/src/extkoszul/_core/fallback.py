"""Pure-Python elimination kernels.

Same API as the compiled ``_kernels`` module.  Matrices arrive as dense
lists of integer rows; the routines below convert them to sparse rows
because every matrix in this package is mostly zeros with unit entries.
"""

BACKEND = "python"


def _sparse_rows(rows):
    return [{j: v for j, v in enumerate(r) if v} for r in rows]


def _unit_pivot_sweep(srows, ncols, modulus=None):
    """Eliminate with unit pivots while any are available.

    Returns the number of pivots used and the surviving rows (with the
    pivot rows and pivot columns removed).  Over the integers a unit pivot
    means an entry of absolute value 1; modulo a prime every nonzero entry
    is a unit, so the sweep finishes the job.
    """
    col_rows = {}
    for i, r in enumerate(srows):
        for j in r:
            col_rows.setdefault(j, set()).add(i)
    alive = set(i for i, r in enumerate(srows) if r)
    pivots = 0
    while True:
        best = None
        for i in sorted(alive):
            r = srows[i]
            for j, v in r.items():
                if modulus is None and v not in (1, -1):
                    continue
                cost = len(col_rows[j])
                if best is None or cost < best[0]:
                    best = (cost, i, j)
                    if cost == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        prow = srows[pi]
        pv = prow[pj]
        if modulus is not None:
            inv = pow(pv, -1, modulus)
        for i in list(col_rows[pj]):
            if i == pi:
                continue
            r = srows[i]
            f = r[pj] * (inv if modulus is not None else pv)
            for j, v in prow.items():
                nv = r.get(j, 0) - f * v
                if modulus is not None:
                    nv %= modulus
                if nv:
                    if j not in r:
                        col_rows.setdefault(j, set()).add(i)
                    r[j] = nv
                elif j in r:
                    del r[j]
                    col_rows[j].discard(i)
            if not r:
                alive.discard(i)
        for j in prow:
            col_rows[j].discard(pi)
        srows[pi] = {}
        alive.discard(pi)
        # the pivot column is now empty; drop it from every surviving row
        pivots += 1
    rest = [srows[i] for i in sorted(alive) if srows[i]]
    return pivots, rest


def _dense_diagonalize(rows, ncols):
    """Generic integer diagonalisation with smallest-absolute-value pivots."""
    A = [list(r) for r in rows]
    m = len(A)
    n = ncols
    diag = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            Ai = A[i]
            for j in range(t, n):
                v = Ai[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, pi, pj = best
        A[t], A[pi] = A[pi], A[t]
        if pj != t:
            for row in A:
                row[t], row[pj] = row[pj], row[t]
        while True:
            p = A[t][t]
            for i in range(t + 1, m):
                v = A[i][t]
                if v:
                    q = v // p
                    Ai, At = A[i], A[t]
                    for j in range(t, n):
                        if At[j]:
                            Ai[j] -= q * At[j]
            for j in range(t + 1, n):
                v = A[t][j]
                if v:
                    q = v // p
                    for i in range(t, m):
                        if A[i][t]:
                            A[i][j] -= q * A[i][t]
            best = None
            for i in range(t + 1, m):
                v = A[i][t]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, t)
            for j in range(t + 1, n):
                v = A[t][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), t, j)
            if best is None:
                break
            _, bi, bj = best
            if bi != t:
                A[t], A[bi] = A[bi], A[t]
            else:
                for row in A:
                    row[t], row[bj] = row[bj], row[t]
        diag.append(A[t][t])
        t += 1
    return diag


def diagonalize_int(rows, ncols):
    """Nonzero diagonal entries of an integer matrix equivalent to ``rows``.

    The entries are not yet arranged into a divisibility chain.
    """
    srows = _sparse_rows(rows)
    units, rest = _unit_pivot_sweep(srows, ncols)
    diag = [1] * units
    if rest:
        cols = sorted({j for r in rest for j in r})
        cpos = {j: k for k, j in enumerate(cols)}
        dense = []
        for r in rest:
            row = [0] * len(cols)
            for j, v in r.items():
                row[cpos[j]] = v
            dense.append(row)
        diag.extend(_dense_diagonalize(dense, len(cols)))
    return diag


def rank_mod_p(rows, ncols, p):
    srows = [{j: v % p for j, v in enumerate(r) if v % p} for r in rows]
    pivots, rest = _unit_pivot_sweep(srows, ncols, modulus=p)
    return pivots


def rref_mod_p(rows, ncols, p):
    """Reduced row echelon form modulo ``p``.

    Returns ``(pivot_columns, reduced_rows)`` where ``reduced_rows`` are the
    nonzero rows as dense lists, ordered by pivot column.
    """
    A = [[v % p for v in r] for r in rows]
    m = len(A)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        piv = None
        for i in range(r, m):
            if A[i][c]:
                piv = i
                break
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        Ar = A[r] = [(v * inv) % p for v in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                Ai = A[i]
                for j in range(c, ncols):
                    if Ar[j]:
                        Ai[j] = (Ai[j] - f * Ar[j]) % p
        pivots.append(c)
        r += 1
    return pivots, A[:r]
