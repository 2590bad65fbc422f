# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination kernels (int64).

Same API as ``extkoszul._core.fallback``.  Integer routines raise
``OverflowError`` when an intermediate value leaves the int64 range; the
caller then retries with the arbitrary-precision fallback.
"""

from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t

cdef extern from *:
    """
    static int ek_mul_overflow(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static int ek_sub_overflow(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int ek_mul_overflow(long long a, long long b, long long *r) nogil
    int ek_sub_overflow(long long a, long long b, long long *r) nogil

BACKEND = "compiled"


cdef int64_t* _load(rows, Py_ssize_t m, Py_ssize_t n) except NULL:
    cdef int64_t* A = <int64_t*> malloc(max(m * n, 1) * sizeof(int64_t))
    if A == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j
    try:
        for i in range(m):
            r = rows[i]
            if len(r) != n:
                raise ValueError("ragged rows")
            for j in range(n):
                A[i * n + j] = r[j]
    except BaseException:
        free(A)
        raise
    return A


cdef inline int64_t _abs(int64_t v) nogil:
    return -v if v < 0 else v


cdef inline int64_t _floordiv(int64_t a, int64_t b) nogil:
    cdef int64_t q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef int _diag(int64_t* A, Py_ssize_t m, Py_ssize_t n, list out) except -1:
    cdef Py_ssize_t t = 0, i, j, bi, bj, k
    cdef int64_t best, v, p, q, tmp
    cdef long long res
    while t < m and t < n:
        best = 0
        bi = -1
        bj = -1
        for i in range(t, m):
            for j in range(t, n):
                v = _abs(A[i * n + j])
                if v != 0 and (best == 0 or v < best):
                    best = v
                    bi = i
                    bj = j
                    if best == 1:
                        break
            if best == 1:
                break
        if bi < 0:
            break
        if bi != t:
            for k in range(n):
                tmp = A[t * n + k]
                A[t * n + k] = A[bi * n + k]
                A[bi * n + k] = tmp
        if bj != t:
            for k in range(m):
                tmp = A[k * n + t]
                A[k * n + t] = A[k * n + bj]
                A[k * n + bj] = tmp
        while True:
            p = A[t * n + t]
            for i in range(t + 1, m):
                v = A[i * n + t]
                if v != 0:
                    q = _floordiv(v, p)
                    for j in range(t, n):
                        if A[t * n + j] != 0:
                            if ek_mul_overflow(q, A[t * n + j], &res):
                                raise OverflowError("int64 overflow")
                            if ek_sub_overflow(A[i * n + j], res, &res):
                                raise OverflowError("int64 overflow")
                            A[i * n + j] = res
            for j in range(t + 1, n):
                v = A[t * n + j]
                if v != 0:
                    q = _floordiv(v, p)
                    for i in range(t, m):
                        if A[i * n + t] != 0:
                            if ek_mul_overflow(q, A[i * n + t], &res):
                                raise OverflowError("int64 overflow")
                            if ek_sub_overflow(A[i * n + j], res, &res):
                                raise OverflowError("int64 overflow")
                            A[i * n + j] = res
            best = 0
            bi = -1
            bj = -1
            for i in range(t + 1, m):
                v = _abs(A[i * n + t])
                if v != 0 and (best == 0 or v < best):
                    best = v
                    bi = i
                    bj = t
            for j in range(t + 1, n):
                v = _abs(A[t * n + j])
                if v != 0 and (best == 0 or v < best):
                    best = v
                    bi = t
                    bj = j
            if bi < 0:
                break
            if bi != t:
                for k in range(n):
                    tmp = A[t * n + k]
                    A[t * n + k] = A[bi * n + k]
                    A[bi * n + k] = tmp
            else:
                for k in range(m):
                    tmp = A[k * n + t]
                    A[k * n + t] = A[k * n + bj]
                    A[k * n + bj] = tmp
        out.append(A[t * n + t])
        t += 1
    return 0


def diagonalize_int(rows, Py_ssize_t ncols):
    cdef Py_ssize_t m = len(rows)
    if m == 0 or ncols == 0:
        return []
    cdef int64_t* A = _load(rows, m, ncols)
    cdef list out = []
    try:
        _diag(A, m, ncols, out)
    finally:
        free(A)
    return out


cdef Py_ssize_t _rref_p(int64_t* A, Py_ssize_t m, Py_ssize_t n, int64_t p, list pivots):
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef int64_t inv, f, a, b, x0, x1, tmp
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if A[i * n + c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(n):
                tmp = A[r * n + j]
                A[r * n + j] = A[piv * n + j]
                A[piv * n + j] = tmp
        # modular inverse by extended Euclid
        a = A[r * n + c]
        b = p
        x0 = 1
        x1 = 0
        while b != 0:
            f = a / b
            tmp = a - f * b
            a = b
            b = tmp
            tmp = x0 - f * x1
            x0 = x1
            x1 = tmp
        inv = x0 % p
        if inv < 0:
            inv += p
        for j in range(c, n):
            A[r * n + j] = (A[r * n + j] * inv) % p
        for i in range(m):
            if i != r:
                f = A[i * n + c]
                if f != 0:
                    for j in range(c, n):
                        if A[r * n + j] != 0:
                            A[i * n + j] = (A[i * n + j] - f * A[r * n + j]) % p
                            if A[i * n + j] < 0:
                                A[i * n + j] += p
        pivots.append(c)
        r += 1
    return r


cdef int64_t* _load_mod(rows, Py_ssize_t m, Py_ssize_t n, int64_t p) except NULL:
    cdef int64_t* A = <int64_t*> malloc(max(m * n, 1) * sizeof(int64_t))
    if A == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j
    try:
        for i in range(m):
            r = rows[i]
            if len(r) != n:
                raise ValueError("ragged rows")
            for j in range(n):
                A[i * n + j] = r[j] % p
    except BaseException:
        free(A)
        raise
    return A


def _check_modulus(p):
    if p <= 1 or p >= 2**31:
        raise ValueError("modulus must lie in (1, 2**31)")


def rank_mod_p(rows, Py_ssize_t ncols, p):
    _check_modulus(p)
    cdef Py_ssize_t m = len(rows)
    if m == 0 or ncols == 0:
        return 0
    cdef int64_t* A = _load_mod(rows, m, ncols, p)
    cdef list pivots = []
    cdef Py_ssize_t r
    try:
        r = _rref_p(A, m, ncols, p, pivots)
    finally:
        free(A)
    return r


def rref_mod_p(rows, Py_ssize_t ncols, p):
    _check_modulus(p)
    cdef Py_ssize_t m = len(rows)
    cdef list pivots = []
    if m == 0 or ncols == 0:
        return pivots, []
    cdef int64_t* A = _load_mod(rows, m, ncols, p)
    cdef Py_ssize_t r, i, j
    cdef list out = []
    try:
        r = _rref_p(A, m, ncols, p, pivots)
        for i in range(r):
            out.append([A[i * ncols + j] for j in range(ncols)])
    finally:
        free(A)
    return pivots, out
