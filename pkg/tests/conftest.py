from __future__ import annotations

import math

import pytest


def brute_order(r: int, d: int) -> int:
    """Smallest t >= 1 with r**t == 1 mod d, by repeated multiplication."""
    x, t = r % d, 1
    while x != 1 % d:
        x = x * r % d
        t += 1
    return t


def unit_list(d: int) -> list[int]:
    return [x for x in range(1, d) if math.gcd(x, d) == 1] if d > 1 else [0]


@pytest.fixture
def small_prime_powers():
    return [(p, n) for p in (3, 5, 7) for n in range(1, 5) if p**n <= 400]


def brute_cycle_types(N: int, exps) -> list[dict[int, int]]:
    """Every multiset of cycle lengths whose root sets (all l-th roots of unity,
    as exponents of zeta_N) exactly tile the multiset ``exps``.

    Exhaustive depth-first search with nondecreasing lengths; independent of
    any Mobius bookkeeping.
    """
    from collections import Counter

    target = Counter(e % N for e in exps)
    lengths = [ell for ell in range(1, N + 1) if N % ell == 0]
    found: list[dict[int, int]] = []

    def roots(ell: int) -> Counter:
        return Counter((N // ell) * i for i in range(ell))

    def go(rest: Counter, start: int, chosen: list[int]) -> None:
        if not rest:
            found.append(dict(Counter(chosen)))
            return
        for idx in range(start, len(lengths)):
            need = roots(lengths[idx])
            if all(rest[e] >= c for e, c in need.items()):
                go(rest - need, idx, chosen + [lengths[idx]])

    go(target, 0, [])
    return found
