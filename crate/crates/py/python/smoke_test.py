"""Smoke test for the mcfin extension module.

Build and run from the workspace root:

    cargo build -p mcfin-py --release
    cp target/release/libmcfin_py.so crates/py/python/mcfin.so
    python3 crates/py/python/smoke_test.py

Set MCFIN_PY_PATH to load the module from another directory.
"""

import math
import os
import sys

sys.path.insert(0, os.environ.get("MCFIN_PY_PATH", os.path.dirname(os.path.abspath(__file__))))

import mcfin  # noqa: E402

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "..", "core", "fixtures", "oeis")


def stirling2(n, k):
    # inclusion-exclusion, independent of the library
    return sum((-1) ** j * math.comb(k, j) * (k - j) ** n for j in range(k + 1)) // math.factorial(k)


def main():
    bell = mcfin.SequenceSpec("bell")
    assert bell.value(10) == 115975
    assert bell.values(5) == [1, 1, 2, 5, 15, 52]
    assert bell.residues(2, 8) == [1, 1, 0, 1, 1, 0, 1, 1, 0]
    assert str(mcfin.SequenceSpec.from_flags("--family bell --r 2")) == "bell r=2"

    for n in range(12):
        for k in range(n + 1):
            assert mcfin.SequenceSpec("stirling", k=k).value(n) == stirling2(n, k)

    period = bell.period_mod(2)
    assert (period["q"], period["p"], period["sound"]) == (0, 3, True)
    rec = bell.recurrence_mod(2)
    assert rec["order"] == 2 and rec["coeffs"] == [1, 1]

    report = bell.report([2, 3], n_max=400)
    assert [e["modulus"] for e in report] == [2, 3]
    assert report[0]["cfinite"] is None

    s3 = mcfin.SequenceSpec("stirling", k=3).values(60)
    w = mcfin.find_integer_recurrence(s3, 8)
    assert w["order"] == 3 and w["coeffs"] == ["6", "-11", "6"]
    assert mcfin.find_integer_recurrence(bell.values(60), 8) is None
    assert mcfin.growth_refutation(bell.values(60))["escape"]

    sizes = mcfin.SizeSet("mod 3 in {0} from 3 except {1}")
    assert 1 in sizes and 2 not in sizes and 6 in sizes
    assert sizes == mcfin.SizeSet("mod 3 in {0} from 3 except {1}")

    assert mcfin.count_partitions(4, non_crossing=True) == 14
    assert mcfin.count_partitions(5, non_overlapping=True) == 43
    assert mcfin.count_partitions(3, r=2, internal_order="head") == 3
    assert mcfin.count_relations(3, "transitive") == 171
    assert mcfin.count_e_r_structures(2, 1) == 5

    assert [mcfin.phi(3, r) for r in range(8)] == ["000", "100", "010", "111", "001", "101", "011", "110"]
    assert mcfin.beta_bits(3, start=3) == "111"
    assert mcfin.verify_phi_bijection(10)["bijective"]
    cert = mcfin.refute_period(5, 7)
    assert cert["bit_at_start"] != cert["bit_at_shift"]

    fib = mcfin.PRSSystem.fibonacci()
    q, p = fib.cycle(10)
    assert (q, p) == (0, 60) and fib.verify_cycle(10, q, p)
    try:
        mcfin.PRSSystem.a086714().cycle(4)
    except mcfin.McfinError as e:
        assert "shares a factor" in str(e)
    else:
        raise AssertionError("expected a coprimality error")

    assert mcfin.parse_bfile("# A000110\n0 1\n1 1\n2 2\n") == [(0, 1), (1, 1), (2, 2)]
    assert mcfin.crosscheck_fixture(FIXTURES, "A000110")["pass"]

    try:
        mcfin.SequenceSpec("nope")
    except mcfin.McfinError:
        pass
    else:
        raise AssertionError("expected an invalid-spec error")

    print("smoke test passed")


if __name__ == "__main__":
    main()
