"""Smoke test for the Python extension.

Build and install it first, e.g.

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/shift_equiv-*.whl

then run `python python/smoke_test.py`.
"""

import shift_equiv as se


def mul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def power(a, m):
    n = len(a)
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(m):
        out = mul(out, a)
    return out


def check_witness(t1, t2, w):
    r, s, m = w.r, w.s, w.lag
    assert mul(r, t1) == mul(t2, r)
    assert mul(s, t2) == mul(t1, s)
    assert mul(s, r) == power(t1, m)
    assert mul(r, s) == power(t2, m)


def main():
    # Different Bowen–Franks groups.
    d = se.decide([[1, 0], [0, -1]], [[0, 1], [1, 0]])
    assert d.verdict == "NotEquivalent" and d.route == "split", d
    assert d.invariant is not None and not d

    # Conjugate matrices, decided through the quadratic order.
    t1, t2 = [[0, -6], [1, 0]], [[0, -3], [2, 0]]
    d = se.decide(t1, t2)
    assert d and d.route == "quadratic", d
    check_witness(t1, t2, d.witness)
    assert se.verify_witness(t1, t2, d.witness)

    # Nilpotent parts do not matter.
    d = se.decide([[2, 0], [5, 0]], [[2]])
    assert d.verdict == "Equivalent"

    # Entries beyond 64 bits round-trip.
    big = 2**100 + 7
    t = [[big, 1], [0, 1]]
    assert se.charpoly(t) == [big, -(big + 1), 1]
    assert se.decide(t, t).verdict == "Equivalent"

    w = se.search_witness([[2, 1], [1, 1]], [[1, 1], [1, 2]])
    assert w is not None
    check_witness([[2, 1], [1, 1]], [[1, 1], [1, 2]], w)

    assert se.bowen_franks([[1, 0], [0, -1]]) == (1, [2])
    assert se.class_number(-20) == 2
    assert se.class_number(12) == 2 and se.class_number(12, wide=True) == 1
    x, y = se.represent(1, 1, -1, -1)
    assert x * x + x * y - y * y == -1
    assert se.represent(1, 0, 1, 3) is None
    assert se.fundamental_unit(5) == (1, 1, -1)
    iso, sec = se.class_count("t^2 + 15")
    assert iso >= sec >= 1

    rows = se.scan_cjj(-3, 3)
    assert [r[0] for r in rows] == list(range(-3, 4))

    assert se.finite_classes(3, 2, 1, 1) == [0, 1, 3]
    d = se.decide_mod([[1, 0], [5, 1]], [[1, 0], [10, 1]], 5, 2)
    assert d and d.route == "finite" and d.witness.modulus == 25

    try:
        se.decide([[1, 2]], [[1]])
    except ValueError:
        pass
    else:
        raise AssertionError("non-square input accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
