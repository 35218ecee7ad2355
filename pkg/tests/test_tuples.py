import itertools

import pytest

from ktuple import tuples
from ktuple.errors import ContractError, PartialResultError
from ktuple.primes import simple_sieve
from ktuple.tuples import KTuple


def brute_admissible(offs):
    k = len(offs)
    for p in range(2, k + 1):
        if all(any((n + a) % p == 0 for a in offs) for n in range(p)):
            return False
    return True


def brute_narrowest(k, max_w=60):
    # independent oracle: every subset containing 0 and w
    for w in range(k - 1, max_w + 1):
        for mid in itertools.combinations(range(1, w), k - 2):
            offs = (0,) + mid + (w,)
            if brute_admissible(offs):
                return w, offs
    return None


def test_parse_and_properties():
    t = KTuple.parse("0, 2, 6")
    assert t.k == 3 and t.width == 6
    assert t.shifted(5).offsets == (5, 7, 11)
    assert t.shifted(5).normalized() == t
    assert t.omega(3) == 2 and t.residues(2) == {0}


def test_bad_offsets():
    with pytest.raises(ContractError):
        KTuple((0, 0, 2))
    with pytest.raises(ContractError):
        KTuple(())


def test_examples():
    assert tuples.is_admissible(KTuple((0, 2, 6, 8, 12)))[0]
    ok, prof = tuples.is_admissible(KTuple((0, 2, 4)))
    assert not ok and prof.obstructions == [3]
    t50 = KTuple(tuple(tuples.TUPLE_50))
    assert t50.k == 50 and t50.width == 246 and tuples.is_admissible(t50)[0]


def test_admissibility_matches_brute():
    for offs in itertools.combinations(range(0, 20), 4):
        assert tuples.is_admissible(KTuple(offs))[0] == brute_admissible(offs)


@pytest.mark.parametrize("k", range(2, 8))
def test_narrowest_against_brute(k):
    w, offs = brute_narrowest(k)
    t = tuples.narrowest_search(k, 100)
    assert t.width == w
    assert t.offsets == offs  # lexicographically first at that width


def test_narrowest_known_widths():
    widths = [tuples.narrowest_search(k, 100).width for k in range(2, 13)]
    assert widths == [2, 6, 8, 12, 16, 20, 26, 30, 32, 36, 42]


def test_budget_too_small():
    assert tuples.narrowest_search(5, 10) is None


def test_witness_caps_search():
    w = KTuple((0, 2, 6, 8, 12))
    assert tuples.narrowest_search(5, 100, witness=w).width == 12
    with pytest.raises(ContractError):
        tuples.narrowest_search(5, 100, witness=KTuple((0, 2, 4, 6, 8)))


def test_time_limit_returns_partial():
    w = KTuple(tuple(tuples.TUPLE_50))
    with pytest.raises(PartialResultError) as info:
        tuples.narrowest_search(50, 246, witness=w, time_limit=0.5)
    assert info.value.best.width == 246


def test_delta_set():
    assert tuples.delta_set(KTuple((0, 2, 6))) == [2, 4, 6]


def test_first_primes_construction_admissible(table):
    for k in (5, 20, 100):
        t = tuples.first_primes_construction(k, table)
        assert t.k == k and tuples.is_admissible(t)[0]


def test_interval_construction(table):
    c = tuples.primes_in_interval_construction(200, table)
    assert c.tuple.k == 200 and tuples.is_admissible(c.tuple)[0]


def test_corollary_candidates():
    assert tuples.corollary_candidates(5, 40) == [n for n in range(1, 41) if all(n % p for p in simple_sieve(5))]
    assert tuples.corollary_candidates(5, 31) == [1, 7, 11, 13, 17, 19, 23, 29, 31]
