"""Regenerate the vendored OEIS-style b-files.

The build machine had no route to oeis.org, so the b-files are produced from
closed forms and sympy primitives that share no code with the Rust crate.
Each file has a JSON sidecar with the index offset, the window that the
crosscheck suite compares, and the generator used by the CLI/tests.

    python3 gen_fixtures.py
"""

import itertools
import json
import os
from math import comb, factorial

from sympy import bell, catalan
from sympy.functions.combinatorial.numbers import stirling

HERE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "oeis")


def r_stirling(n, k, r):
    # Broder's explicit sum: S_r(n,k) = 1/k! * sum_j (-1)^(k-j) C(k,j) (j+r)^n
    total = sum((-1) ** (k - j) * comb(k, j) * (j + r) ** n for j in range(k + 1))
    assert total % factorial(k) == 0
    return total // factorial(k)


def r_lah(n, k, r):
    # Nyul-Racz: L_r(n,k) = C(n,k) (n+2r-1)! / (k+2r-1)!
    if k > n:
        return 0
    return comb(n, k) * factorial(n + 2 * r - 1) // factorial(k + 2 * r - 1)


def bessel_bruteforce(n):
    """Count non-overlapping set partitions of [n] by brute force."""
    count = 0

    def rgs(prefix, m):
        if len(prefix) == n:
            yield prefix
            return
        for b in range(m + 1):
            yield from rgs(prefix + [b], max(m, b + 1))

    if n == 0:
        return 1
    for labels in rgs([], 0):
        blocks = {}
        for i, b in enumerate(labels):
            blocks.setdefault(b, []).append(i)
        spans = [(min(v), max(v)) for v in blocks.values()]
        ok = True
        for (a0, a1), (b0, b1) in itertools.permutations(spans, 2):
            if a0 < b0 < a1 < b1:
                ok = False
                break
        count += ok
    return count


def a086714(n):
    a = 4
    for _ in range(n):
        a = a * (a - 1) // 2
    return a


def write(anum, entries, sidecar):
    digits = anum[1:]
    with open(os.path.join(HERE, f"b{digits}.txt"), "w") as fh:
        fh.write(f"# {anum}: {sidecar['title']}\n")
        fh.write("# generated offline by gen_fixtures.py\n")
        for idx, val in entries:
            fh.write(f"{idx} {val}\n")
    sidecar = dict(sidecar, a_number=anum)
    with open(os.path.join(HERE, f"b{digits}.json"), "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def seq(anum, title, values, gen, count, offset=0, layout="sequence", expect=None):
    if expect is not None:
        assert [int(v) for v in values[: len(expect)]] == expect, anum
    entries = [(i + offset, int(v)) for i, v in enumerate(values)]
    write(anum, entries, {
        "title": title,
        "offset": offset,
        "count": count,
        "layout": layout,
        "generator": gen,
    })


def main():
    os.makedirs(HERE, exist_ok=True)
    N = 60
    seq("A000110", "Bell numbers", [bell(n) for n in range(N)],
        "--family bell", 50, expect=[1, 1, 2, 5, 15, 52, 203])
    seq("A000587", "Uppuluri-Carpenter numbers (complementary Bell)",
        [sum((-1) ** k * stirling(n, k) for k in range(n + 1)) for n in range(N)],
        "--family bell-signed", 50, expect=[1, -1, 0, 1, 1, -2, -9, -9, 50, 267, 413])
    seq("A000670", "Fubini numbers (ordered Bell)",
        [sum(factorial(k) * stirling(n, k) for k in range(n + 1)) for n in range(N)],
        "--family fubini", 50, expect=[1, 1, 3, 13, 75, 541, 4683])
    seq("A001861", "bicolored set partitions",
        [sum(2 ** k * stirling(n, k) for k in range(n + 1)) for n in range(N)],
        "--family bell-bicolored", 50, expect=[1, 2, 6, 22, 94, 454])
    seq("A005493", "2-Bell numbers",
        [sum(r_stirling(n, k, 2) for k in range(n + 1)) for n in range(N)],
        "--family bell --r 2", 50, expect=[1, 3, 10, 37, 151, 674])
    seq("A005494", "3-Bell numbers",
        [sum(r_stirling(n, k, 3) for k in range(n + 1)) for n in range(N)],
        "--family bell --r 3", 50, expect=[1, 4, 17, 77, 372])
    seq("A232472", "2-Fubini numbers",
        [sum(factorial(k + 2) * r_stirling(n, k, 2) for k in range(n + 1)) for n in range(N)],
        "--family fubini --r 2", 50, expect=[2, 10, 62, 466])
    seq("A086714", "a(0)=4, a(n+1)=binomial(a(n),2)", [a086714(n) for n in range(13)],
        "--family a086714", 13, expect=[4, 6, 15, 105, 5460])
    seq("A006789", "Bessel numbers (non-overlapping partitions)",
        [bessel_bruteforce(n) for n in range(12)],
        "oracle:non-overlapping", 12, expect=[1, 1, 2, 5, 14, 43, 143, 509, 1922, 7651])
    seq("A000108", "Catalan numbers", [catalan(n) for n in range(N)],
        "--family catalan", 50, expect=[1, 1, 2, 5, 14, 42, 132])

    # Triangles, read by rows; row n lists k = 0..n of the r-shifted family.
    rows = 30
    flat = [r_stirling(n, k, 2) for n in range(rows) for k in range(n + 1)]
    assert flat[:6] == [1, 2, 1, 4, 5, 1]
    write("A143494", [(i + 2, v) for i, v in enumerate(flat)], {
        "title": "2-Stirling numbers of the second kind, triangle by rows",
        "offset": 2, "count": len(flat), "layout": "triangle",
        "generator": "--family stirling --r 2",
    })
    flat = [r_lah(n, k, 2) for n in range(rows) for k in range(n + 1)]
    assert flat[:10] == [1, 4, 1, 20, 10, 1, 120, 90, 18, 1]
    write("A143497", [(i + 2, v) for i, v in enumerate(flat)], {
        "title": "2-Lah numbers, triangle by rows",
        "offset": 2, "count": len(flat), "layout": "triangle",
        "generator": "--family lah --r 2",
    })


if __name__ == "__main__":
    main()
