from fractions import Fraction

import pytest

from semiflex.liealg import build_affine_sl2, build_test_algebra


@pytest.fixture(scope="session")
def sl2():
    alg = build_affine_sl2()
    alg.ensure_window(-14, 14)
    return alg


@pytest.fixture(scope="session")
def loop_a():
    alg = build_test_algebra("loop-nilpotent-a")
    alg.ensure_window(-14, 14)
    return alg


@pytest.fixture(scope="session")
def abelian():
    alg = build_test_algebra("abelian")
    alg.ensure_window(-10, 10)
    return alg


@pytest.fixture(scope="session")
def lam01():
    return {"1⊗h": Fraction(0), "K": Fraction(1), "d": Fraction(0)}


def kostant_count(roots, ell, target):
    """Brute-force count of ways to write ``target`` as a nonnegative integer
    combination of ``roots`` (each of positive principal degree ``ell``).
    Independent oracle for Verma / Wakimoto weight multiplicities."""
    roots = sorted(roots)

    def rec(idx, remaining):
        if all(x == 0 for x in remaining):
            return 1
        budget = ell(remaining)
        if budget <= 0 or idx >= len(roots):
            return 0
        root = roots[idx]
        total = 0
        for k in range(budget // ell(root) + 1):
            total += rec(idx + 1, tuple(a - k * b for a, b in zip(remaining, root)))
        return total

    return rec(0, tuple(target))
