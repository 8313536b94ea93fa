"""Weight-2 Manin symbols for Gamma_0(N) and normalized plus eigensymbols.

The space of modular symbols is presented by generators indexed by P^1(Z/N)
subject to the two-term and three-term Manin relations.  We work throughout
on the dual side: a "functional" is a rational vector orthogonal to every
relation, so the functional space computed here has dimension 2g + c - 1.

For a rational elliptic curve of conductor N, the plus eigensymbol is the
one-dimensional common eigenspace of the Hecke operators (eigenvalues from
point counts) fixed by the star involution.  It is normalized to take the
value group Z exactly on integral cycles fixed by the involution, so that
evaluations are the classical ratios [a/b]+ = Re int / (real period); the
overall sign is pinned once against a direct numeric integration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arith import factorint, kronecker_symbol, primerange
from .curves import EllipticCurve, trace_of_frobenius
from .errors import AmbiguityError, InputError, InternalInvariantError
from .linalg import clear_denominators, dense_kernel, gcd_list, sparse_nullspace

# ---------------------------------------------------------------------------
# index sets and dimension formulas


def psi_index(N: int) -> int:
    """[SL2(Z) : Gamma_0(N)] = N * prod_{p | N} (1 + 1/p)."""
    out = N
    for p in factorint(N):
        out = out // p * (p + 1)
    return out


def cusp_number(N: int) -> int:
    from sympy import totient

    total = 0
    for d in _divisors(N):
        total += int(totient(gcd(d, N // d)))
    return total


def genus_x0(N: int) -> int:
    mu = psi_index(N)
    if N % 4 == 0:
        eps2 = 0
    else:
        eps2 = 1
        for p in factorint(N):
            eps2 *= 1 + (0 if p == 2 else kronecker_symbol(-1, p))
    if N % 9 == 0:
        eps3 = 0
    else:
        eps3 = 1
        for p in factorint(N):
            eps3 *= 1 + kronecker_symbol(-3, p)
    g = Fraction(12 + mu, 12) - Fraction(eps2, 4) - Fraction(eps3, 3) - Fraction(cusp_number(N), 2)
    if g.denominator != 1:
        raise InternalInvariantError(f"genus formula not integral at N={N}")
    return int(g)


def _divisors(n: int):
    ds = [1]
    for p, e in factorint(n).items():
        ds = [d * p ** i for d in ds for i in range(e + 1)]
    return sorted(ds)


class P1List:
    """Canonical representatives of P^1(Z/N) with index lookup."""

    def __init__(self, N: int):
        if N < 1:
            raise InputError(f"level must be positive, got N={N}")
        self.N = N
        self._reps: list[tuple[int, int]] = []
        self._index: dict[tuple[int, int], int] = {}
        if N == 1:
            self._reps = [(0, 0)]
            self._index = {(0, 0): 0}
            return
        for g in _divisors(N):
            if g == N:
                continue  # the class c = 0 appears as g = N's partner (0, 1)
            for d in range(N):
                if gcd(gcd(g, d), N) != 1:
                    continue
                rep = self.normalize(g, d)
                if rep not in self._index:
                    self._index[rep] = len(self._reps)
                    self._reps.append(rep)
        rep0 = (0, 1)
        if rep0 not in self._index:
            self._index[rep0] = len(self._reps)
            self._reps.append(rep0)
        if len(self._reps) != psi_index(N):
            raise InternalInvariantError(
                f"P^1(Z/{N}) has {len(self._reps)} classes, expected {psi_index(N)}"
            )

    def __len__(self):
        return len(self._reps)

    def rep(self, i: int) -> tuple[int, int]:
        return self._reps[i]

    def normalize(self, c: int, d: int) -> tuple[int, int]:
        """Canonical representative of the class of (c : d)."""
        N = self.N
        if N == 1:
            return (0, 0)
        c %= N
        d %= N
        if gcd(gcd(c, d), N) != 1:
            raise InputError(f"({c}:{d}) is not a point of P^1(Z/{N})")
        if c == 0:
            return (0, 1)
        g0 = gcd(c, N)
        if g0 == 1:
            return (1, d * pow(c, -1, N) % N)
        # scale by a unit u with u*c = g0 (mod N)
        M = N // g0
        c1 = (c // g0) % M
        u = pow(c1, -1, M)
        k = 0
        while gcd(u + k * M, N) != 1:
            k += 1
            if k > N:
                raise InternalInvariantError(f"no unit lift for ({c}:{d}) mod {N}")
        u += k * M
        d1 = u * d % N
        # the stabilizer of g0 scales d1 by units t = 1 mod M; take the least orbit value
        best = d1
        for j in range(1, g0):
            t = 1 + j * M
            if gcd(t, N) == 1:
                cand = t * d1 % N
                if cand < best:
                    best = cand
        return (g0, best)

    def index(self, c: int, d: int) -> int:
        return self._index[self.normalize(c, d)]


# ---------------------------------------------------------------------------
# the Manin space at level N


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    return old_r, old_s, old_t


def _merel_matrices(q: int) -> list[tuple[int, int, int, int]]:
    """Integer matrices [[a,b],[c,d]], det q, a > b >= 0, d > c >= 0."""
    mats = []
    for a in range(1, q + 1):
        for b in range(a):
            if b == 0:
                if q % a:
                    continue
                d = q // a
                for c in range(d):
                    mats.append((a, 0, c, d))
            else:
                # c(a - b) < q keeps d > c
                c = 0
                while c * (a - b) < q:
                    num = q + b * c
                    if num % a == 0:
                        d = num // a
                        if d > c:
                            mats.append((a, b, c, d))
                    c += 1
    return mats


class ManinSpace:
    """Relation data, functionals and operators at a fixed level N."""

    def __init__(self, N: int):
        self.N = N
        self.p1 = P1List(N)
        n = len(self.p1)
        self.n = n
        idx = self.p1.index
        # index permutations of the generating actions
        self.sigma = [idx(d, -c) for (c, d) in self.p1._reps]
        self.tau = [idx(d, -c - d) for (c, d) in self.p1._reps]
        self.iota = [idx(-c, d) for (c, d) in self.p1._reps]

        rows = []
        seen = set()
        for i in range(n):
            j = self.sigma[i]
            key = (min(i, j), max(i, j), "s")
            if key in seen:
                continue
            seen.add(key)
            rows.append({i: 2} if i == j else {i: 1, j: 1})
        for i in range(n):
            orbit = (i, self.tau[i], self.tau[self.tau[i]])
            key = (min(orbit), "t")
            if key in seen:
                continue
            seen.add(key)
            if orbit[1] == i:
                rows.append({i: 3})
            else:
                row: dict[int, int] = {}
                for t in orbit:
                    row[t] = row.get(t, 0) + 1
                rows.append(row)

        self.functionals, self.free_cols = sparse_nullspace(rows, n)
        self.m = len(self.functionals)

        self.genus = genus_x0(N)
        self.ncusps = cusp_number(N)
        expected = 2 * self.genus + self.ncusps - 1
        if self.m != expected:
            raise InternalInvariantError(
                f"functional space at N={N} has dimension {self.m}, expected {expected}"
            )

        self._build_boundary()
        self._hecke_cache: dict[int, list[list[Fraction]]] = {}
        self._iota_restricted: list[list[Fraction]] | None = None

    # -- boundary map ------------------------------------------------------

    def _lift_to_sl2(self, c: int, d: int) -> tuple[int, int, int, int]:
        """[[a, b], [c', d']] in SL2(Z) whose bottom row is (c, d) mod N."""
        N = self.N
        cc = c % N
        dd = d % N
        if cc == 0:
            cc = N
        k = 0
        while gcd(cc, dd) != 1:
            dd += N
            k += 1
            if k > N + 2:
                raise InternalInvariantError(f"no coprime lift of ({c}:{d}) mod {N}")
        g, x, y = _xgcd(dd, cc)
        if g != 1:
            raise InternalInvariantError("lift failed")
        # x*dd + y*cc = 1, so det [[x, -y], [cc, dd]] = 1
        return (x, -y, cc, dd)

    def _cusp_class(self, u: int, v: int) -> int:
        """Index of the cusp u/v (lowest terms) among Gamma_0(N) classes."""
        if v < 0:
            u, v = -u, -v
        if v == 0:
            u = 1
        for k, (u2, v2) in enumerate(self._cusp_reps):
            if self._cusps_equivalent(u, v, u2, v2):
                return k
        self._cusp_reps.append((u, v))
        return len(self._cusp_reps) - 1

    def _cusps_equivalent(self, u1, v1, u2, v2) -> bool:
        N = self.N
        g = gcd(v1 * v2, N)
        s1 = self._inv_mod(u1, v1)
        s2 = self._inv_mod(u2, v2)
        return (s1 * v2 - s2 * v1) % g == 0

    @staticmethod
    def _inv_mod(u, v):
        # inverse of u mod v; v = 0 means the exact inverse (u = +-1)
        if v == 0:
            return u
        if v == 1:
            return 0
        return pow(u % v, -1, v)

    def _build_boundary(self):
        self._cusp_reps: list[tuple[int, int]] = []
        n = self.n
        ends = []
        for i in range(n):
            c, d = self.p1.rep(i)
            a, b, cc, dd = self._lift_to_sl2(c, d)
            if a * dd - b * cc != 1:
                raise InternalInvariantError("lift is not unimodular")
            # generator i is the path {b/dd -> a/cc}
            k_from = self._cusp_class(*self._reduce_cusp(b, dd))
            k_to = self._cusp_class(*self._reduce_cusp(a, cc))
            ends.append((k_from, k_to))
        if len(self._cusp_reps) != self.ncusps:
            raise InternalInvariantError(
                f"found {len(self._cusp_reps)} cusp classes at N={self.N}, "
                f"expected {self.ncusps}"
            )
        rows = [[0] * n for _ in self._cusp_reps]
        for i, (k_from, k_to) in enumerate(ends):
            rows[k_to][i] += 1
            rows[k_from][i] -= 1
        self.boundary_rows = rows

    @staticmethod
    def _reduce_cusp(u: int, v: int) -> tuple[int, int]:
        if v == 0:
            return (1, 0)
        g = gcd(u, v)
        u, v = u // g, v // g
        if v < 0:
            u, v = -u, -v
        return (u, v)

    # -- operators on functionals -------------------------------------------

    def _apply_pointwise(self, images: list[list[tuple[int, int]]], f):
        """(Af)_i = sum over (j, mult) in images[i] of mult * f_j."""
        return [
            sum((f[j] * mult for j, mult in images[i]), start=Fraction(0))
            for i in range(self.n)
        ]

    def _coords(self, f) -> list[Fraction]:
        return [f[j] for j in self.free_cols]

    def _operator_restriction(self, images) -> list[list[Fraction]]:
        """Columns of the operator in the functional basis, with a spot check."""
        cols = []
        transformed = []
        for fb in self.functionals:
            w = self._apply_pointwise(images, fb)
            transformed.append(w)
            cols.append(self._coords(w))
        # stability spot check on the sum of basis functionals
        total = [sum(col, start=Fraction(0)) for col in zip(*transformed)]
        recon = [Fraction(0)] * self.n
        coords = self._coords(total)
        for ck, fb in zip(coords, self.functionals):
            if ck:
                for t in range(self.n):
                    recon[t] += ck * fb[t]
        if recon != total:
            raise InternalInvariantError("operator does not preserve the functional space")
        return cols

    def hecke_matrix(self, q: int) -> list[list[Fraction]]:
        """T_q acting on functionals, as columns in the functional basis."""
        if q in self._hecke_cache:
            return self._hecke_cache[q]
        idx = self.p1.index
        images: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for i in range(self.n):
            c, d = self.p1.rep(i)
            counts: dict[int, int] = {}
            for a, b, cc, dd in _merel_matrices(q):
                c1 = c * a + d * cc
                d1 = c * b + d * dd
                if gcd(gcd(c1, d1), self.N) != 1:
                    continue
                j = idx(c1, d1)
                counts[j] = counts.get(j, 0) + 1
            images[i] = list(counts.items())
        cols = self._operator_restriction(images)
        self._hecke_cache[q] = cols
        return cols

    def iota_matrix(self) -> list[list[Fraction]]:
        """The star involution on functionals, in the functional basis."""
        if self._iota_restricted is None:
            images = [[(self.iota[i], 1)] for i in range(self.n)]
            self._iota_restricted = self._operator_restriction(images)
        return self._iota_restricted

    # -- integral cycles -------------------------------------------------------

    def real_cycle_basis(self, f_minus: tuple[int, ...]) -> list[list[int]]:
        """Integral cycles killed by the minus eigensymbol of a given form.

        Their images under the period integral of that form fill out the full
        intersection of the period lattice with the real line, so the plus
        pairing takes its value group on exactly this lattice.
        """
        from .linalg import integer_kernel

        rows: list[list[int]] = [list(r) for r in self.boundary_rows]
        rows.append(list(f_minus))
        return integer_kernel(rows)

    # -- paths ---------------------------------------------------------------

    def path_vector(self, a: int, b: int) -> dict[int, int]:
        """{oo -> a/b} as a multiset of Manin generators (sparse vector).

        Uses the continued fraction of a/b; each partial path is a single
        generator by unimodularity of consecutive convergents.
        """
        out: dict[int, int] = {}
        for j in self._path_indices(a, b):
            out[j] = out.get(j, 0) + 1
        return out

    def _path_indices(self, a: int, b: int):
        """Generator indices along {oo -> a/b}, repeats included."""
        if b == 0:
            return
        if b < 0:
            a, b = -a, -b
        g = gcd(a, b)
        if g > 1:
            a, b = a // g, b // g
        idx = self.p1.index
        # convergent denominators, seeded so the first term is q_0 = 1, q_{-1} = 0
        q_prev, q_cur = 1, 0
        sign = -1  # (-1)^{k-1} at k = 0
        num, den = a, b
        while True:
            a_k = num // den
            num, den = den, num - a_k * den
            q_prev, q_cur = q_cur, a_k * q_cur + q_prev
            yield idx(sign * q_cur, q_prev)
            sign = -sign
            if den == 0:
                break

    def pair_path(self, f: tuple[int, ...], a: int, b: int) -> int:
        """<f, {oo -> a/b}> for an integer functional f, no allocation."""
        total = 0
        for j in self._path_indices(a, b):
            total += f[j]
        return total


_SPACE_CACHE: dict[int, ManinSpace] = {}


def build_manin_space(N: int) -> ManinSpace:
    if N not in _SPACE_CACHE:
        _SPACE_CACHE[N] = ManinSpace(N)
    return _SPACE_CACHE[N]


# ---------------------------------------------------------------------------
# eigensymbols


@dataclass
class EigenSymbol:
    """Plus modular symbol of a curve, normalized on integral plus cycles.

    eval_plus(a, b) returns [a/b]+ as an exact rational; raw_value gives the
    integer pairing against the primitive integer functional, with
    [a/b]+ = sign * raw / denominator.
    """

    curve: EllipticCurve
    space: ManinSpace
    fvec: tuple[int, ...]
    denominator: int
    sign: int

    def raw_value(self, a: int, b: int) -> int:
        return self.space.pair_path(self.fvec, a, b)

    def eval_plus(self, a: int, b: int) -> Fraction:
        return Fraction(self.sign * self.raw_value(a, b), self.denominator)

    def to_json_dict(self) -> dict:
        return {
            "format": 1,
            "ainvs": list(self.curve.ainvs),
            "conductor": self.curve.conductor,
            "label": self.curve.label,
            "fvec": list(self.fvec),
            "denominator": self.denominator,
            "sign": self.sign,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "EigenSymbol":
        if data.get("format") != 1:
            raise InputError("unknown eigensymbol cache format")
        E = EllipticCurve(*data["ainvs"], conductor=data["conductor"], label=data.get("label", ""))
        space = build_manin_space(E.conductor)
        if len(data["fvec"]) != space.n:
            raise InputError("cached eigensymbol does not match the level")
        return cls(
            curve=E,
            space=space,
            fvec=tuple(int(x) for x in data["fvec"]),
            denominator=int(data["denominator"]),
            sign=int(data["sign"]),
        )

    def save(self, path: str):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)

    @classmethod
    def load(cls, path: str) -> "EigenSymbol":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def _mat_vec(cols: list[list[Fraction]], v: list[Fraction]) -> list[Fraction]:
    m = len(cols[0])
    out = [Fraction(0)] * m
    for vj, col in zip(v, cols):
        if vj:
            for i in range(m):
                out[i] += vj * col[i]
    return out


def _shrink_to_eigenspace(V, cols, eigenvalue):
    """Intersect span(V) with ker(M - eigenvalue), in coordinate space."""
    if not V:
        return []
    images = []
    for v in V:
        w = _mat_vec(cols, v)
        images.append([wi - eigenvalue * vi for wi, vi in zip(w, v)])
    m = len(images[0])
    mat = [[images[j][i] for j in range(len(V))] for i in range(m)]
    combos = dense_kernel(mat)
    newV = []
    for x in combos:
        vec = [Fraction(0)] * m
        for xj, v in zip(x, V):
            if xj:
                for i in range(m):
                    vec[i] += xj * v[i]
        newV.append(vec)
    return newV


def _isolate_functional(E: EllipticCurve, space: ManinSpace, iota_sign: int) -> tuple[int, ...]:
    """Primitive integer functional spanning the (T_q, iota)-eigenspace."""
    N = E.conductor
    m = space.m
    V = [[Fraction(int(i == k)) for i in range(m)] for k in range(m)]
    V = _shrink_to_eigenspace(V, space.iota_matrix(), Fraction(iota_sign))
    sturm = psi_index(N) // 6 + 2
    for q in primerange(2, 6 * sturm):
        if N % q == 0:
            continue
        if len(V) <= 1:
            break
        aq = trace_of_frobenius(E, q)
        V = _shrink_to_eigenspace(V, space.hecke_matrix(q), Fraction(aq))
        if q > sturm:
            break
    if len(V) == 0:
        raise InternalInvariantError(
            f"eigensystem of {E.label or E.ainvs} not found in the functional space"
        )
    if len(V) > 1:
        raise AmbiguityError(
            f"eigenspace of {E.label or E.ainvs} (star sign {iota_sign:+d}) "
            f"has dimension {len(V)}"
        )
    coords = V[0]
    f_rat = [Fraction(0)] * space.n
    for ck, fb in zip(coords, space.functionals):
        if ck:
            for t in range(space.n):
                f_rat[t] += ck * fb[t]
    f_int, _ = clear_denominators(f_rat)
    return tuple(f_int)


def isolate_eigensymbol(E: EllipticCurve, space: ManinSpace | None = None) -> EigenSymbol:
    """The normalized plus eigensymbol of E, sign pinned numerically.

    Normalization: the value group of the symbol on integral cycles killed by
    the minus eigensymbol is exactly Z.  Those cycles integrate onto the full
    real sublattice of the period lattice (the star-fixed cycles alone can
    land in an index-2 sublattice), so evaluations agree with
    Re(period integral) / omega_plus on the nose.
    """
    from .analytic import numeric_plus

    N = E.conductor
    if space is None:
        space = build_manin_space(N)
    if space.N != N:
        raise InputError("space level does not match the curve conductor")
    if space.m == 0:
        raise InputError(f"no cusp forms at level {N}")

    f_int = _isolate_functional(E, space, +1)
    f_minus = _isolate_functional(E, space, -1)

    pairings = []
    for w in space.real_cycle_basis(f_minus):
        pairings.append(sum(fi * wi for fi, wi in zip(f_int, w)))
    d = gcd_list(pairings)
    if d == 0:
        raise InternalInvariantError("eigensymbol vanishes on all real cycles")

    sym = EigenSymbol(curve=E, space=space, fvec=tuple(f_int), denominator=d, sign=1)

    # pin the sign against one numeric integration at a nonzero value
    probe = None
    for b in range(1, 40):
        for a in range(b):
            if gcd(a, b) == 1 and sym.raw_value(a, b) != 0:
                probe = (a, b)
                break
        if probe:
            break
    if probe is None:
        raise InternalInvariantError("eigensymbol pairs to zero against all short paths")
    approx = numeric_plus(E, probe[0], probe[1])
    alg = sym.eval_plus(probe[0], probe[1])
    if abs(approx) < 1e-4:
        raise InternalInvariantError("numeric probe too small to pin the sign")
    if abs(float(alg) - approx) > abs(float(alg) + approx):
        sym.sign = -1
    check = float(sym.eval_plus(probe[0], probe[1]))
    if abs(check - approx) > 1e-4 * max(1.0, abs(approx)):
        raise InternalInvariantError(
            f"normalized symbol disagrees with direct integration: {check} vs {approx}"
        )
    return sym
