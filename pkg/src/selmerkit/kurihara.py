"""Kurihara numbers and their divisibility statistics on finite regions.

For a squarefree product n of cyclotomic Kolyvagin primes, the number

    delta_n = sum over a in (Z/n)^* of [a/n]+ * prod_{ell | n} log_{eta_ell}(a)

lives in Z_p / I_n = Z/p^{t_n} and is well defined up to a unit (the
primitive-root choices).  Only unit-invariant data (valuations, vanishing)
is ever reported as a statistic.

A finite search region can certify "ord <= nu(n)" by exhibiting a nonzero
delta_n, and can report stratum minima of valuations, but the true
partial^(i) is an infimum over infinitely many n: every stratum value
carries explicit bound semantics, and quotient-zero (saturated) entries
are flagged so they never certify divisibility beyond t_n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .arith import isprime, padic_valuation, smallest_primitive_root
from .errors import HypothesisError, InputError
from .modsym import EigenSymbol
from .sieves import SquarefreeIndex

DISCRETE_LOG_TABLE_LIMIT = 10 ** 6


def discrete_log_table(ell: int, eta: int) -> list[int]:
    """table[a] = log_eta(a) in [0, ell-1) for 1 <= a < ell; table[0] = -1.

    Built by one walk of the full cycle eta, eta^2, ..., which doubles as
    the primitivity check: a proper subgroup walk revisits 1 early.
    """
    if not isprime(ell):
        raise InputError(f"ell = {ell} is not prime")
    if ell >= DISCRETE_LOG_TABLE_LIMIT:
        raise InputError(f"log table at ell = {ell} exceeds the size limit")
    eta %= ell
    if eta == 0:
        raise InputError("eta must be a unit")
    table = [-1] * ell
    x = 1
    for e in range(ell - 1):
        if table[x] != -1:
            raise InputError(f"eta = {eta} is not a primitive root mod {ell}")
        table[x] = e
        x = x * eta % ell
    if x != 1:
        raise InputError(f"eta = {eta} is not a primitive root mod {ell}")
    return table


@dataclass(frozen=True)
class KuriharaNumber:
    """delta_n as a canonical residue mod p^modulus_exponent.

    modulus_exponent is t_n for n > 1 and the working valuation cap for
    n = 1 (where the ambient ring is all of Z_p).  valuation equals the
    modulus exponent exactly when the residue is zero in the quotient;
    such saturated values certify nothing beyond t_n.
    """

    index: SquarefreeIndex
    p: int
    modulus_exponent: int
    residue: int
    valuation: int
    eta_choices: tuple[tuple[int, int], ...]

    @property
    def n(self) -> int:
        return self.index.n

    @property
    def nu(self) -> int:
        return self.index.nu

    @property
    def saturated(self) -> bool:
        return self.valuation >= self.modulus_exponent

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "nu": self.nu,
            "t_n": self.modulus_exponent if self.n > 1 else None,
            "residue": self.residue,
            "valuation": self.valuation,
            "saturated": self.saturated,
            "eta": {str(ell): eta for ell, eta in self.eta_choices},
        }


def _p_unit_inverse(d: int, p: int, modulus: int, what: str) -> int:
    if d % p == 0:
        raise HypothesisError(
            f"{what} is divisible by p = {p}; "
            "the p-integrality hypothesis on modular symbols fails"
        )
    return pow(d, -1, modulus)


def kurihara_number(
    sym: EigenSymbol,
    index: SquarefreeIndex,
    p: int,
    etas: dict[int, int] | None = None,
    valuation_cap: int = 12,
) -> KuriharaNumber:
    """delta_n for one squarefree index from the cyc family (or n = 1).

    etas overrides the primitive-root choice per prime factor; the default
    is the smallest primitive root, making residues reproducible.  Only
    valuation and saturation are unit-independent.
    """
    if index.family not in (None, "cyc"):
        raise InputError(f"Kurihara numbers need cyc indices, got {index.family}")

    if index.n == 1:
        # the ambient ring is Z_p itself; work to the valuation cap
        val = sym.eval_plus(0, 1)
        modulus = p ** valuation_cap
        inv = _p_unit_inverse(val.denominator, p, modulus, "the symbol denominator")
        residue = val.numerator * inv % modulus
        v = padic_valuation(val, p)
        v = valuation_cap if v is None else min(v, valuation_cap)
        return KuriharaNumber(
            index=index,
            p=p,
            modulus_exponent=valuation_cap,
            residue=residue,
            valuation=v,
            eta_choices=(),
        )

    t = index.t_n
    if t == 0:
        raise InputError(
            f"I_n at n = {index.n} is the unit ideal (t_n = 0); "
            "sieve at a larger congruence level k"
        )
    modulus = p ** t
    n = index.n

    chosen: list[tuple[int, int]] = []
    tables: list[tuple[int, list[int]]] = []
    for f in index.factors:
        eta = (etas or {}).get(f.q) or smallest_primitive_root(f.q)
        chosen.append((f.q, eta))
        tab = discrete_log_table(f.q, eta)
        tables.append((f.q, [x % modulus for x in tab]))

    dinv = _p_unit_inverse(sym.denominator, p, modulus, "the symbol denominator")
    sgn = sym.sign
    total = 0
    for a in range(1, n):
        if gcd(a, n) != 1:
            continue
        raw = sym.raw_value(a, n)
        if raw == 0:
            continue
        w = 1
        for ell, tab in tables:
            w = w * tab[a % ell] % modulus
        total = (total + sgn * raw * dinv * w) % modulus

    return KuriharaNumber(
        index=index,
        p=p,
        modulus_exponent=t,
        residue=total,
        valuation=padic_valuation(total, p, cap=t),
        eta_choices=tuple(chosen),
    )


def kurihara_collection(
    sym: EigenSymbol,
    indices: list[SquarefreeIndex],
    p: int,
    etas: dict[int, int] | None = None,
    valuation_cap: int = 12,
) -> list[KuriharaNumber]:
    return [kurihara_number(sym, ix, p, etas=etas, valuation_cap=valuation_cap) for ix in indices]


# ---------------------------------------------------------------------------
# region statistics


@dataclass(frozen=True)
class RegionSpec:
    """Declared shape of the finite search region the statistics cover."""

    p: int
    k: int
    prime_bound: int
    max_nu: int
    max_n: int
    label: str = ""

    def describe(self) -> str:
        head = f"{self.label}: " if self.label else ""
        return (
            f"{head}nu(n) <= {self.max_nu}, primes <= {self.prime_bound}, "
            f"n <= {self.max_n}, p = {self.p}, k = {self.k}"
        )


@dataclass(frozen=True)
class StratumStat:
    """Minimum valuation over one nu(n) = i stratum of the region."""

    value: int
    bound_kind: str  # "exact_on_region" | "upper_bound_semantics"
    from_saturated: bool  # min attained only at quotient-zero entries

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "bound_kind": self.bound_kind,
            "from_saturated": self.from_saturated,
        }


@dataclass
class DeltaStats:
    ord_bound: int | str  # "inconclusive" when nothing nonzero was found
    ord_is_certified_on_region: bool
    partial: dict[int, StratumStat]
    partial_infty: int
    search_region: str
    notes: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "ord_bound": self.ord_bound,
            "ord_is_certified_on_region": self.ord_is_certified_on_region,
            "partial": {str(i): s.to_json_dict() for i, s in sorted(self.partial.items())},
            "partial_infty": self.partial_infty,
            "search_region": self.search_region,
            "notes": list(self.notes),
        }


def delta_stats(collection: list[KuriharaNumber], region: RegionSpec) -> DeltaStats:
    """ord / partial^(i) / partial^(infty) over a finite region, honestly tagged.

    A nonzero delta_n certifies ord <= nu(n); ord equality is "certified on
    region" only when every smaller stratum was examined and vanished
    identically there.  Stratum minima are upper bounds for the true
    partial^(i) (the infimum runs over infinitely many n), except at i = 0
    where the stratum is complete.
    """
    if not collection:
        raise InputError("empty Kurihara collection")
    notes: list[str] = []
    strata: dict[int, list[KuriharaNumber]] = {}
    for kn in collection:
        strata.setdefault(kn.nu, []).append(kn)

    for i in range(region.max_nu + 1):
        if i not in strata:
            notes.append(f"stratum nu = {i} is empty on the region; omitted")

    partial: dict[int, StratumStat] = {}
    for i in sorted(strata):
        vals = [kn.valuation for kn in strata[i]]
        v = min(vals)
        attained = [kn for kn in strata[i] if kn.valuation == v]
        from_saturated = all(kn.saturated for kn in attained)
        kind = "exact_on_region" if i == 0 else "upper_bound_semantics"
        partial[i] = StratumStat(value=v, bound_kind=kind, from_saturated=from_saturated)

    ord_bound: int | str = "inconclusive"
    for i in sorted(strata):
        if any(not kn.saturated for kn in strata[i]):
            ord_bound = i
            break

    if isinstance(ord_bound, int):
        certified = all(
            i in strata and all(kn.saturated for kn in strata[i]) for i in range(ord_bound)
        )
    else:
        certified = False

    # within a parity class the true partial is non-increasing; a finite
    # region can break this, so surface it rather than smoothing it over
    for i in sorted(partial):
        if i + 2 in partial and partial[i].value < partial[i + 2].value:
            notes.append(
                f"partial^({i}) = {partial[i].value} < partial^({i + 2}) = "
                f"{partial[i + 2].value}: parity chain not yet stabilized on this region"
            )

    return DeltaStats(
        ord_bound=ord_bound,
        ord_is_certified_on_region=certified,
        partial=partial,
        partial_infty=min(s.value for s in partial.values()),
        search_region=region.describe(),
        notes=notes,
    )
