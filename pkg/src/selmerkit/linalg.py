"""Exact linear algebra over Q and Z.

Three kernels are needed by the modular symbol machinery:

* the nullspace of a large sparse integer relation matrix (fraction-free
  Gaussian elimination with content stripping, pivoting on small
  coefficients),
* kernels of small dense rational matrices (eigenspace cuts),
* integer kernels via unimodular column reduction (lattice computations
  behind the symbol normalization).

Everything is deterministic; no floating point is involved.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

__all__ = [
    "gcd_list",
    "strip_content",
    "sparse_nullspace",
    "dense_kernel",
    "integer_kernel",
    "clear_denominators",
]


def gcd_list(values) -> int:
    g = 0
    for v in values:
        g = gcd(g, int(v))
        if g == 1:
            return 1
    return g


def strip_content(row: dict) -> dict:
    """Divide a sparse integer row by the gcd of its entries."""
    g = gcd_list(row.values())
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def sparse_nullspace(rows, ncols):
    """Nullspace basis of a sparse integer matrix.

    `rows` is an iterable of {column: coefficient} dicts.  Returns a list of
    dense Fraction vectors of length `ncols`; the basis is in reduced form
    (each vector is 1 on "its" free column and 0 on the other free columns),
    so coordinates with respect to the basis can be read off the free
    columns directly.
    """
    active: list[dict] = []
    seen = set()
    for r in rows:
        r = strip_content({c: v for c, v in r.items() if v})
        if not r:
            continue
        key = frozenset(r.items())
        if key in seen:
            continue
        seen.add(key)
        active.append(dict(r))

    col_rows: dict[int, set[int]] = {}
    for i, r in enumerate(active):
        for c in r:
            col_rows.setdefault(c, set()).add(i)

    pivot_of_row: dict[int, int] = {}  # row index -> pivot column
    pivot_rows: dict[int, int] = {}  # pivot column -> row index
    remaining = set(range(len(active)))

    def _unlink(i, cols):
        for c in cols:
            s = col_rows.get(c)
            if s is not None:
                s.discard(i)
                if not s:
                    del col_rows[c]

    while True:
        # choose the sparsest unprocessed nonzero row; break ties on size
        best = None
        for i in remaining:
            r = active[i]
            if not r:
                continue
            key = (len(r), max(abs(v) for v in r.values()))
            if best is None or key < best[0]:
                best = (key, i)
        if best is None:
            break
        i = best[1]
        remaining.discard(i)
        row = active[i]
        # pivot on the smallest coefficient in the row
        pc = min(row, key=lambda c: (abs(row[c]), c))
        pv = row[pc]
        pivot_of_row[i] = pc
        pivot_rows[pc] = i
        # Jordan step: clear pc from every other row
        for j in list(col_rows.get(pc, ())):
            if j == i:
                continue
            other = active[j]
            f = other[pc]
            new = {}
            for c, v in other.items():
                w = v * pv
                if c in row:
                    w -= row[c] * f
                if w:
                    new[c] = w
            for c, v in row.items():
                if c not in other:
                    w = -v * f
                    if w:
                        new[c] = w
            new = strip_content(new)
            _unlink(j, set(other) - set(new))
            for c in set(new) - set(other):
                col_rows.setdefault(c, set()).add(j)
            active[j] = new
            if not new:
                remaining.discard(j)

    free = [c for c in range(ncols) if c not in pivot_rows]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for pc, i in pivot_rows.items():
            row = active[i]
            if f in row:
                v[pc] = Fraction(-row[f], row[pc])
        basis.append(v)
    return basis, free


def dense_kernel(mat):
    """Kernel basis of a dense rational matrix (list of row lists)."""
    if not mat:
        return None  # caller supplies dimension-aware identity
    nrows, ncols = len(mat), len(mat[0])
    m = [[Fraction(x) for x in row] for row in mat]
    pivots = {}
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots[c] = r
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for c, i in pivots.items():
            v[c] = -m[i][f]
        basis.append(v)
    return basis


def integer_kernel(rows):
    """Z-basis of the integer kernel of an integer matrix.

    `rows` is a list of integer row lists (all the same length n).  Returns
    a list of integer vectors of length n spanning {x in Z^n : M x = 0}.
    Unimodular column operations only, so the result is a genuine basis of
    the kernel lattice, not merely of the rational kernel.
    """
    if not rows:
        raise ValueError("need at least one row (use identity for no constraints)")
    n = len(rows[0])
    m = len(rows)
    cols = [[rows[i][j] for i in range(m)] for j in range(n)]
    transform = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    active = list(range(n))
    for r in range(m):
        live = [j for j in active if cols[j][r] != 0]
        if not live:
            continue
        while len(live) > 1:
            live.sort(key=lambda j: abs(cols[j][r]))
            j0 = live[0]
            a = cols[j0][r]
            new_live = [j0]
            for j in live[1:]:
                q = cols[j][r] // a
                if q:
                    for i in range(r, m):
                        cols[j][i] -= q * cols[j0][i]
                    tj, t0 = transform[j], transform[j0]
                    for i in range(n):
                        tj[i] -= q * t0[i]
                if cols[j][r] != 0:
                    new_live.append(j)
            live = new_live
        active.remove(live[0])
    kernel = []
    for j in active:
        if all(x == 0 for x in cols[j]):
            kernel.append(list(transform[j]))
    return kernel


def clear_denominators(vec):
    """Scale a rational vector to a primitive integer vector.

    Returns (integer_vector, scale) with vec == integer_vector / scale up to
    the stripped content; concretely integer_vector = vec * scale / content
    with gcd(integer_vector) == 1.
    """
    from math import lcm

    den = 1
    for x in vec:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in vec]
    g = gcd_list(ints)
    if g > 1:
        ints = [x // g for x in ints]
    return ints, den
