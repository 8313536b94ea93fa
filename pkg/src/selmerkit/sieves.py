"""Kolyvagin-type prime families and the squarefree index sets they span.

Three families feed the divisibility statistics, each pinned by congruences
on the Frobenius trace a_q and carrying a local ideal I_q = p^{t_q} Z_p:

  cyc: q = 1 and a_q = q + 1 (mod p^k);            I_q = (q - 1, a_q - q - 1)
  ac:  q inert in K, a_q = q + 1 = 0 (mod p^k);    I_q = (q + 1, a_q)
  adm: q inert in K, q != +-1 (mod p),
       a_q = eps * (q + 1) (mod p^k), eps = +-1;   I_q = (a_q - eps * (q + 1))

For squarefree n built from one family, I_n is the sum of the I_q over
q | n, so t_n = min over q | n of t_q.  The empty product n = 1 has
I_1 = (0) and its exponent is an infinity sentinel (t_n = None); every
consumer must branch on it.

Valuations are computed with a hard cap (default 12): a reported value
equal to the cap means "at least the cap", which keeps all arithmetic in
bounded exact integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, TextIO

from .arith import is_fundamental_discriminant, kronecker_symbol, padic_valuation, primerange
from .curves import EllipticCurve, trace_of_frobenius
from .errors import AmbiguityError, InputError

FAMILIES = ("cyc", "ac", "adm")

DEFAULT_VALUATION_CAP = 12


@dataclass(frozen=True)
class KolyvaginPrime:
    """A sieved prime with its capped valuation data.

    v1 is v_p(q - 1) for cyc and v_p(q + 1) for ac; both vanish by
    definition for adm and v1 is stored as 0 there.  v2 is the valuation of
    the trace congruence defect: v_p(a_q - q - 1) for cyc, v_p(a_q) for ac,
    v_p(a_q - epsilon * (q + 1)) for adm.
    """

    q: int
    family: str
    v1: int
    v2: int
    epsilon: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown prime family {self.family!r}")
        if (self.epsilon is None) == (self.family == "adm"):
            raise InputError("epsilon is set exactly for the adm family")
        if self.epsilon not in (None, 1, -1):
            raise InputError(f"epsilon must be +-1, got {self.epsilon}")
        if self.v1 < 0 or self.v2 < 0:
            raise InputError("valuations must be non-negative")

    @property
    def exponent(self) -> int:
        """t_q with I_q = p^{t_q} Z_p."""
        if self.family == "adm":
            return self.v2
        return min(self.v1, self.v2)

    def to_json_dict(self) -> dict:
        return {
            "q": self.q,
            "family": self.family,
            "v1": self.v1,
            "v2": self.v2,
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "KolyvaginPrime":
        return cls(
            q=int(data["q"]),
            family=data["family"],
            v1=int(data["v1"]),
            v2=int(data["v2"]),
            epsilon=None if data.get("epsilon") is None else int(data["epsilon"]),
        )


@dataclass(frozen=True)
class SquarefreeIndex:
    """A squarefree product n of sieved primes with t_n = v_p(I_n).

    t_n is None exactly for n = 1 (the zero ideal).  parity_class is set
    for adm indices only: "def" when nu(n * N^-) is odd, "ind" when even.
    """

    n: int
    factors: tuple[KolyvaginPrime, ...]
    t_n: int | None
    parity_class: str | None = None

    def __post_init__(self):
        if len({f.family for f in self.factors}) > 1:
            raise InputError("index mixes prime families")
        prod = 1
        for f in self.factors:
            prod *= f.q
        if prod != self.n:
            raise InputError(f"factors do not multiply to n={self.n}")
        if (self.t_n is None) != (self.n == 1):
            raise InputError("t_n is the infinity sentinel exactly at n = 1")

    @property
    def nu(self) -> int:
        return len(self.factors)

    @property
    def family(self) -> str | None:
        return self.factors[0].family if self.factors else None


def _require_prime_setup(p: int, k: int, bound: int):
    from .arith import isprime

    if not isprime(p):
        raise InputError(f"p = {p} is not prime")
    if k < 1:
        raise InputError(f"congruence level k must be >= 1, got {k}")
    if bound < 2:
        raise InputError(f"sieve bound must be >= 2, got {bound}")


def _require_imaginary_field(D_K: int):
    if D_K >= 0 or not is_fundamental_discriminant(D_K):
        raise InputError(f"D_K = {D_K} is not an imaginary quadratic discriminant")


def sieve(
    family: str,
    E: EllipticCurve,
    p: int,
    k: int,
    bound: int,
    D_K: int | None = None,
    valuation_cap: int = DEFAULT_VALUATION_CAP,
) -> list[KolyvaginPrime]:
    """All family primes q <= bound for (E, p) at congruence level k.

    cyc needs no field; ac and adm require the imaginary quadratic
    discriminant D_K (q must be inert).  Results are ordered by q
    ascending, so chunked runs merge deterministically.
    """
    if family not in FAMILIES:
        raise InputError(f"unknown prime family {family!r}")
    _require_prime_setup(p, k, bound)
    if family in ("ac", "adm"):
        if D_K is None:
            raise InputError(f"the {family} family needs the field discriminant D_K")
        _require_imaginary_field(D_K)
    if valuation_cap < k:
        raise InputError("valuation cap below the congruence level loses information")

    N = E.conductor
    pk = p ** k
    out: list[KolyvaginPrime] = []
    for q in primerange(2, bound + 1):
        if N % q == 0 or q == p:
            continue
        if family == "cyc":
            if (q - 1) % pk:
                continue
            aq = trace_of_frobenius(E, q)
            if (aq - q - 1) % pk:
                continue
            out.append(
                KolyvaginPrime(
                    q=q,
                    family="cyc",
                    v1=padic_valuation(q - 1, p, cap=valuation_cap),
                    v2=padic_valuation(aq - q - 1, p, cap=valuation_cap),
                )
            )
        elif family == "ac":
            if (q + 1) % pk or kronecker_symbol(D_K, q) != -1:
                continue
            aq = trace_of_frobenius(E, q)
            if aq % pk:
                continue
            out.append(
                KolyvaginPrime(
                    q=q,
                    family="ac",
                    v1=padic_valuation(q + 1, p, cap=valuation_cap),
                    v2=padic_valuation(aq, p, cap=valuation_cap),
                )
            )
        else:
            if q % p in (1, p - 1):
                continue
            if kronecker_symbol(D_K, q) != -1:
                continue
            aq = trace_of_frobenius(E, q)
            signs = [e for e in (1, -1) if (aq - e * (q + 1)) % pk == 0]
            if not signs:
                continue
            if len(signs) == 2:
                # impossible while q != -1 mod p (would force p | 2(q+1))
                raise AmbiguityError(f"both signs admissible at q={q}, p={p}, k={k}")
            eps = signs[0]
            out.append(
                KolyvaginPrime(
                    q=q,
                    family="adm",
                    v1=0,
                    v2=padic_valuation(aq - eps * (q + 1), p, cap=valuation_cap),
                    epsilon=eps,
                )
            )
    return out


def build_indices(
    primes: list[KolyvaginPrime],
    max_nu: int,
    max_n: int,
    nu_N_minus: int | None = None,
) -> list[SquarefreeIndex]:
    """All squarefree products n <= max_n with nu(n) <= max_nu, n ascending.

    Includes n = 1 (empty product, infinite exponent sentinel).  For adm
    primes, nu_N_minus must be given and each index is classified def/ind
    by the parity of nu(n * N^-).
    """
    families = {f.family for f in primes}
    if len(families) > 1:
        raise InputError("cannot mix prime families in one index set")
    family = families.pop() if families else None
    if family == "adm" and nu_N_minus is None:
        raise InputError("adm indices need nu(N^-) for the def/ind split")
    if len({f.q for f in primes}) != len(primes):
        raise InputError("duplicate primes in sieve output")

    def classify(nu: int) -> str | None:
        if family != "adm":
            return None
        return "def" if (nu + nu_N_minus) % 2 == 1 else "ind"

    ordered = sorted(primes, key=lambda f: f.q)
    results: list[SquarefreeIndex] = [
        SquarefreeIndex(n=1, factors=(), t_n=None, parity_class=classify(0))
    ]

    def extend(start: int, n: int, chosen: tuple[KolyvaginPrime, ...], t: int):
        for i in range(start, len(ordered)):
            f = ordered[i]
            n2 = n * f.q
            if n2 > max_n:
                break  # ordered ascending: later primes only grow n
            t2 = min(t, f.exponent)
            results.append(
                SquarefreeIndex(
                    n=n2,
                    factors=chosen + (f,),
                    t_n=t2,
                    parity_class=classify(len(chosen) + 1),
                )
            )
            if len(chosen) + 1 < max_nu:
                extend(i + 1, n2, chosen + (f,), t2)

    if max_nu >= 1:
        no_cap = max((f.exponent for f in ordered), default=0) + 1
        extend(0, 1, (), t=no_cap)
    results.sort(key=lambda ix: ix.n)
    return results


def dump_primes_jsonl(primes: Iterable[KolyvaginPrime], fh: TextIO):
    for f in primes:
        fh.write(json.dumps(f.to_json_dict(), sort_keys=True) + "\n")


def load_primes_jsonl(fh: TextIO) -> list[KolyvaginPrime]:
    out = []
    for line in fh:
        line = line.strip()
        if line:
            out.append(KolyvaginPrime.from_json_dict(json.loads(line)))
    return out
