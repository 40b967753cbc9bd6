"""Modular arithmetic on Z_d, unit orders, and orbits of multiplication maps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import NotAUnitError

INF = math.inf
"""Valuation of zero. Compares greater than every finite valuation."""

# Kernels run on int64; products of two residues must stay below 2**63.
MAX_MODULUS = 2**31


@dataclass(frozen=True)
class Residue:
    value: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")
        if self.modulus >= MAX_MODULUS:
            raise OverflowError(f"modulus {self.modulus} exceeds {MAX_MODULUS}")
        object.__setattr__(self, "value", self.value % self.modulus)

    def __int__(self) -> int:
        return self.value

    def __mul__(self, other: Residue | int) -> Residue:
        o = other.value if isinstance(other, Residue) else other
        return Residue(self.value * o, self.modulus)

    __rmul__ = __mul__

    def __add__(self, other: Residue | int) -> Residue:
        o = other.value if isinstance(other, Residue) else other
        return Residue(self.value + o, self.modulus)

    def __pow__(self, e: int) -> Residue:
        return Residue(pow(self.value, e, self.modulus), self.modulus)

    def is_unit(self) -> bool:
        return math.gcd(self.value, self.modulus) == 1

    def inverse(self) -> Residue:
        if not self.is_unit():
            raise NotAUnitError(f"{self.value} mod {self.modulus}: not a unit")
        return Residue(pow(self.value, -1, self.modulus), self.modulus)


def as_residue(r: Residue | int, d: int | None = None) -> Residue:
    if isinstance(r, Residue):
        if d is not None and r.modulus != d:
            raise ValueError(f"residue modulo {r.modulus}, expected modulo {d}")
        return r
    if d is None:
        raise ValueError("modulus required for a bare integer")
    return Residue(r, d)


@dataclass(frozen=True)
class UnitOrderDecomp:
    """``ord(r) = s * p**a`` with ``r == u + v * p**(n - a) (mod p**n)`` and ``ord(u) = s``."""

    r: Residue
    p: int
    n: int
    s: int
    a: int
    u: Residue
    v: int


@dataclass(frozen=True)
class Orbit:
    rep: int
    members: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.members)

    @property
    def last(self) -> int:
        return self.members[-1]


@dataclass(frozen=True)
class OrbitPartition:
    d: int
    r: Residue
    orbits: tuple[Orbit, ...]

    def __len__(self) -> int:
        return len(self.orbits)

    def __iter__(self):
        return iter(self.orbits)

    @property
    def reps(self) -> tuple[int, ...]:
        return tuple(o.rep for o in self.orbits)

    def orbit_index(self) -> tuple[int, ...]:
        """Orbit index of every element of Z_d."""
        idx = [0] * self.d
        for i, o in enumerate(self.orbits):
            for j in o.members:
                idx[j] = i
        return tuple(idx)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@lru_cache(maxsize=None)
def factorize(m: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization by trial division; fine for desk-scale moduli."""
    if m < 1:
        raise ValueError(f"cannot factor {m}")
    out = []
    f = 2
    while f * f <= m:
        e = 0
        while m % f == 0:
            m //= f
            e += 1
        if e:
            out.append((f, e))
        f += 1 if f == 2 else 2
    if m > 1:
        out.append((m, 1))
    return tuple(out)


@lru_cache(maxsize=None)
def divisors(m: int) -> tuple[int, ...]:
    divs = [1]
    for q, e in factorize(m):
        divs = [x * q**i for x in divs for i in range(e + 1)]
    return tuple(sorted(divs))


def euler_phi(m: int) -> int:
    out = m
    for q, _ in factorize(m):
        out = out // q * (q - 1)
    return out


def mobius(m: int) -> int:
    fac = factorize(m)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def mult_order(r: Residue) -> int:
    """Multiplicative order of a unit."""
    d = r.modulus
    if math.gcd(r.value, d) != 1:
        raise NotAUnitError(f"{r.value} mod {d}: not a unit")
    if d == 1:
        return 1
    # ord(r) divides |Z_d^*|; strip prime factors while r^t stays 1
    t = euler_phi(d)
    for q, _ in factorize(t):
        while t % q == 0 and pow(r.value, t // q, d) == 1:
            t //= q
    return t


def p_adic_valuation(k: int, p: int) -> int | float:
    if k == 0:
        return INF
    k = abs(k)
    e = 0
    while k % p == 0:
        k //= p
        e += 1
    return e


def mu_orbits(d: int, r: Residue | int) -> OrbitPartition:
    r = as_residue(r, d)
    if math.gcd(r.value, d) != 1:
        raise NotAUnitError(f"{r.value} mod {d}: not a unit")
    seen = [False] * d
    orbits = []
    for j in range(d):
        if seen[j]:
            continue
        members = []
        x = j
        while not seen[x]:
            seen[x] = True
            members.append(x)
            x = x * r.value % d
        orbits.append(Orbit(rep=j, members=tuple(members)))
    return OrbitPartition(d=d, r=r, orbits=tuple(orbits))


def decompose_unit(r: Residue, p: int) -> UnitOrderDecomp:
    """Split the order of a unit mod p**n into its prime-to-p and p parts.

    u is r raised to ``p**(n-1) * w`` with ``w * p**(n-1) == 1 (mod p-1)``, so
    u has order s and u == r (mod p).  v is the integer ``(r - u) / p**(n-a)``
    using the least nonnegative representatives; v = 0 when a = 0.
    """
    if p % 2 == 0 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    d = r.modulus
    n = 0
    m = d
    while m % p == 0:
        m //= p
        n += 1
    if m != 1 or n == 0:
        raise ValueError(f"modulus {d} is not a power of {p}")
    if r.value % p == 0:
        raise NotAUnitError(f"{r.value} mod {d}: not a unit")

    order = mult_order(r)
    a = p_adic_valuation(order, p)
    s = order // p**a
    if (p - 1) % s:
        raise AssertionError(f"order {order} of {r.value} mod {d} has bad prime-to-p part")

    w = pow(p ** (n - 1), -1, p - 1) if p > 2 else 1
    u = r ** (p ** (n - 1) * w)
    step = p ** (n - a)
    diff = r.value - u.value
    if diff % step:
        raise AssertionError(f"{r.value} and {u.value} disagree mod {step}")
    v = diff // step if a > 0 else 0
    return UnitOrderDecomp(r=r, p=p, n=n, s=s, a=a, u=u, v=v)


def geometric_sum(r: Residue, j: int) -> Residue:
    """``1 + r + ... + r**(j-1)`` reduced mod the modulus of r."""
    d = r.modulus
    total = 0
    term = 1
    for _ in range(j):
        total = (total + term) % d
        term = term * r.value % d
    return Residue(total, d)


def units(d: int) -> list[int]:
    return [x for x in range(d) if math.gcd(x, d) == 1]
