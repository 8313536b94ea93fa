"""Kurihara numbers: discrete logs, residues, and region statistics.

The frozen residues below come from this pipeline and are pinned by
independent structure: delta_1 must be the p-adic image of the exact
rational [0/1]+ (itself dual-verified against numeric integration), the
valuations must be invariant under primitive-root changes, and the
rank-0/rank-1 pictures at (11a1, p=7) and (37a1, p=5) must match the
curves' ingested ranks through the structure theorem.
"""

from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selmerkit.errors import HypothesisError, InputError
from selmerkit.kurihara import (
    DeltaStats,
    KuriharaNumber,
    RegionSpec,
    delta_stats,
    discrete_log_table,
    kurihara_collection,
    kurihara_number,
)
from selmerkit.sieves import KolyvaginPrime, SquarefreeIndex, build_indices, sieve


def region(p, k=1, prime_bound=500, max_nu=2, max_n=10 ** 6, label=""):
    return RegionSpec(p=p, k=k, prime_bound=prime_bound, max_nu=max_nu, max_n=max_n, label=label)


# -- discrete logarithm tables ------------------------------------------------


def test_log_table_tiny():
    t = discrete_log_table(3, 2)
    assert t[1] == 0 and t[2] == 1


def test_log_table_defining_property():
    for ell, eta in [(29, 2), (101, 2), (113, 3)]:
        t = discrete_log_table(ell, eta)
        for a in range(1, ell):
            assert pow(eta, t[a], ell) == a
        assert sorted(t[1:]) == list(range(ell - 1))


def test_log_table_brute_force_spot_check():
    t = discrete_log_table(29, 2)
    e = 0
    x = 1
    while x != 5:
        x = x * 2 % 29
        e += 1
    assert t[5] == e


def test_log_table_rejects_non_primitive():
    with pytest.raises(InputError):
        discrete_log_table(29, 4)  # 4 = 2^2 generates the even-log subgroup
    with pytest.raises(InputError):
        discrete_log_table(29, 0)
    with pytest.raises(InputError):
        discrete_log_table(30, 7)  # not prime
    with pytest.raises(InputError):
        discrete_log_table(7, 2)  # order 3 < 6


@settings(max_examples=25, deadline=None)
@given(a=st.integers(1, 112), b=st.integers(1, 112))
def test_log_table_is_a_homomorphism(a, b):
    t = discrete_log_table(113, 3)
    assert (t[a] + t[b]) % 112 == t[a * b % 113]


# -- Kurihara numbers ---------------------------------------------------------


def test_delta_1_is_the_p_adic_symbol_value(eigensymbol):
    sym = eigensymbol("11a1")  # [0/1]+ = 1/5
    one = SquarefreeIndex(n=1, factors=(), t_n=None)
    kn = kurihara_number(sym, one, 7)
    assert kn.valuation == 0 and not kn.saturated
    assert kn.modulus_exponent == 12
    assert kn.residue * 5 % 7 ** 12 == 1
    assert kn.eta_choices == ()


def test_delta_1_vanishes_for_rank_one(eigensymbol):
    sym = eigensymbol("37a1")  # [0/1]+ = 0
    one = SquarefreeIndex(n=1, factors=(), t_n=None)
    kn = kurihara_number(sym, one, 5)
    assert kn.residue == 0
    assert kn.saturated and kn.valuation == 12


def test_p_dividing_symbol_denominator_is_refused(eigensymbol):
    # [0/1]+ of 11a1 is 1/5: not 5-integral, the p = 5 hypotheses fail
    sym = eigensymbol("11a1")
    one = SquarefreeIndex(n=1, factors=(), t_n=None)
    with pytest.raises(HypothesisError):
        kurihara_number(sym, one, 5)


def test_frozen_values_11a1_p7(eigensymbol, curve):
    sym = eigensymbol("11a1")
    primes = sieve("cyc", curve("11a1"), 7, 1, 500)
    idxs = build_indices(primes, max_nu=2, max_n=10 ** 6)
    got = {ix.n: kurihara_number(sym, ix, 7) for ix in idxs}
    assert set(got) == {1, 113, 379, 113 * 379}
    assert got[1].valuation == 0
    # the nu >= 1 strata vanish identically here (rank 0, trivial p-part)
    for n in (113, 379, 113 * 379):
        assert got[n].residue == 0 and got[n].saturated
        assert got[n].modulus_exponent == 1


def test_frozen_values_37a1_p5(eigensymbol, curve):
    sym = eigensymbol("37a1")
    primes = sieve("cyc", curve("37a1"), 5, 1, 500)
    idxs = build_indices(primes, max_nu=1, max_n=10 ** 6)
    got = {ix.n: kurihara_number(sym, ix, 5) for ix in idxs}
    frozen = {61: 1, 211: 0, 281: 1, 491: 2}
    for q, r in frozen.items():
        assert got[q].residue == r, (q, got[q])
    assert got[211].saturated
    assert got[61].valuation == 0


def test_frozen_value_at_depth_two_modulus(eigensymbol, curve):
    # q = 2251 sits in the k = 2 family: t_q = 2 and the residue is mod 25
    sym = eigensymbol("37a1")
    primes = [f for f in sieve("cyc", curve("37a1"), 5, 1, 2500) if f.q == 2251]
    (ix,) = [ix for ix in build_indices(primes, 1, 10 ** 6) if ix.n == 2251]
    assert ix.t_n == 2
    kn = kurihara_number(sym, ix, 5)
    assert kn.modulus_exponent == 2
    assert kn.residue == 22 and kn.valuation == 0


def test_unit_independence_of_valuations(eigensymbol, curve):
    from selmerkit.arith import primitive_roots

    sym = eigensymbol("37a1")
    primes = sieve("cyc", curve("37a1"), 5, 1, 700)
    idxs = [ix for ix in build_indices(primes, max_nu=2, max_n=10 ** 5) if ix.n > 1]
    assert len(idxs) >= 5
    for ix in idxs:
        runs = []
        for which in range(3):
            etas = {f.q: primitive_roots(f.q, 3)[which] for f in ix.factors}
            runs.append(kurihara_number(sym, ix, 5, etas=etas))
        assert len({kn.valuation for kn in runs}) == 1
        assert len({kn.saturated for kn in runs}) == 1


def test_factor_order_symmetry(eigensymbol, curve):
    sym = eigensymbol("37a1")
    primes = [f for f in sieve("cyc", curve("37a1"), 5, 1, 500) if f.q in (61, 211)]
    ix = build_indices(primes, 2, 10 ** 6)[-1]
    assert ix.n == 61 * 211
    flipped = SquarefreeIndex(
        n=ix.n, factors=tuple(reversed(ix.factors)), t_n=ix.t_n, parity_class=None
    )
    a = kurihara_number(sym, ix, 5)
    b = kurihara_number(sym, flipped, 5)
    assert a.residue == b.residue and a.valuation == b.valuation


def test_crt_log_product(curve):
    # direct discrete logs of a mod each factor agree with table lookups
    primes = [f for f in sieve("cyc", curve("37a1"), 5, 1, 500) if f.q in (61, 211)]
    tables = {f.q: discrete_log_table(f.q, 2) for f in primes}
    for q in tables:
        assert pow(2, tables[q][5], q) == 5

    n = 61 * 211
    for a in (2, 1000, 12345, n - 1):
        if gcd(a, n) != 1:
            continue
        direct = 1
        for q, t in tables.items():
            e = 0
            x = 1
            while x != a % q:
                x = x * 2 % q
                e += 1
            assert e == t[a % q]
            direct *= e
        via_tables = tables[61][a % 61] * tables[211][a % 211]
        assert direct == via_tables


def test_rejects_wrong_family_and_unit_ideal(eigensymbol):
    sym = eigensymbol("11a1")
    f = KolyvaginPrime(q=13, family="adm", v1=0, v2=1, epsilon=1)
    ix = SquarefreeIndex(n=13, factors=(f,), t_n=1, parity_class="ind")
    with pytest.raises(InputError):
        kurihara_number(sym, ix, 5)
    g = KolyvaginPrime(q=29, family="cyc", v1=1, v2=0)
    ix0 = SquarefreeIndex(n=29, factors=(g,), t_n=0)
    with pytest.raises(InputError):
        kurihara_number(sym, ix0, 7)


# -- statistics ---------------------------------------------------------------


def test_stats_rank_zero_picture(eigensymbol, curve):
    sym = eigensymbol("11a1")
    primes = sieve("cyc", curve("11a1"), 7, 1, 500)
    idxs = build_indices(primes, max_nu=2, max_n=10 ** 6)
    st_ = delta_stats(kurihara_collection(sym, idxs, 7), region(7, label="11a1"))
    assert st_.ord_bound == 0
    assert st_.ord_is_certified_on_region
    assert st_.partial[0].value == 0
    assert st_.partial[0].bound_kind == "exact_on_region"
    assert not st_.partial[0].from_saturated
    assert st_.partial_infty == 0
    # the nu = 2 stratum saturates at t = 1, so the region honestly reports
    # an unstabilized parity chain instead of pretending partial^(2) = 0
    assert st_.partial[2].from_saturated
    assert len(st_.notes) == 1 and "parity chain" in st_.notes[0]


def test_stats_rank_one_picture(eigensymbol, curve):
    sym = eigensymbol("37a1")
    primes = sieve("cyc", curve("37a1"), 5, 1, 500)
    idxs = build_indices(primes, max_nu=1, max_n=10 ** 6)
    st_ = delta_stats(
        kurihara_collection(sym, idxs, 5), region(5, max_nu=1, label="37a1")
    )
    assert st_.ord_bound == 1
    assert st_.ord_is_certified_on_region  # delta_1 vanished identically
    assert st_.partial[0].from_saturated  # ... but only up to the cap
    assert st_.partial[1].value == 0
    assert st_.partial[1].bound_kind == "upper_bound_semantics"
    assert st_.partial_infty == 0


def _fake(nu, valuation, t=3, p=5):
    qs = [13, 17, 19][:nu]
    fs = tuple(KolyvaginPrime(q=q, family="cyc", v1=t, v2=t) for q in qs)
    n = 1
    for q in qs:
        n *= q
    ix = SquarefreeIndex(n=n, factors=fs, t_n=(t if nu else None))
    return KuriharaNumber(
        index=ix,
        p=p,
        modulus_exponent=t,
        residue=0 if valuation >= t else p ** valuation,
        valuation=valuation,
        eta_choices=tuple((q, 2) for q in qs),
    )


def test_stats_inconclusive_when_everything_vanishes():
    st_ = delta_stats([_fake(0, 3), _fake(1, 3)], region(5, max_nu=1))
    assert st_.ord_bound == "inconclusive"
    assert not st_.ord_is_certified_on_region
    assert st_.partial[0].from_saturated and st_.partial[1].from_saturated


def test_stats_empty_stratum_is_noted():
    st_ = delta_stats([_fake(0, 1), _fake(2, 0)], region(5, max_nu=2))
    assert any("nu = 1" in note for note in st_.notes)
    assert 1 not in st_.partial
    # with nu = 1 unexamined, ord equality below nu = 2 cannot be certified
    assert st_.ord_bound == 0  # the nu = 0 entry itself is nonzero
    assert st_.ord_is_certified_on_region  # nothing below nu = 0 to examine


def test_stats_ord_not_certified_over_unexamined_stratum():
    st_ = delta_stats([_fake(0, 3), _fake(2, 0)], region(5, max_nu=2))
    assert st_.ord_bound == 2
    assert not st_.ord_is_certified_on_region  # nu = 1 never examined


def test_stats_parity_chain_violations_are_reported():
    st_ = delta_stats([_fake(0, 1), _fake(2, 2)], region(5, max_nu=2))
    assert any("parity chain" in note for note in st_.notes)


def test_stats_reject_empty():
    with pytest.raises(InputError):
        delta_stats([], region(5))


def test_kurihara_number_json_shape(eigensymbol, curve):
    sym = eigensymbol("37a1")
    primes = sieve("cyc", curve("37a1"), 5, 1, 500)
    idxs = build_indices(primes, max_nu=1, max_n=10 ** 6)
    kn = kurihara_collection(sym, idxs, 5)[1]
    d = kn.to_json_dict()
    assert d["n"] == kn.n and d["valuation"] == kn.valuation
    assert isinstance(d["eta"], dict)
    one = kurihara_number(sym, SquarefreeIndex(n=1, factors=(), t_n=None), 5)
    assert one.to_json_dict()["t_n"] is None
