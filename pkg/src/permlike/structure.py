"""The group <A, C> with C a maximal cycle and ``A^-1 C A = C^r``.

Elements are kept abstractly as pairs (l, k) meaning ``A^l C^k``; the relation
``C^k A^l = A^l C^(k r^l)`` makes the product rule

    (A^l1 C^k1)(A^l2 C^k2) = A^(l1+l2) C^(k1 r^l2 + k2).

l is reduced modulo the index q = |G/<C>|, the least q > 0 with A^q in <C>,
using the stored value c with ``A^q = C^c``.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from functools import cached_property

from . import monomial as mono
from .errors import SplitHypothesisError
from .monomial import MonoMatrix
from .numtheory import (
    OrbitPartition,
    Residue,
    UnitOrderDecomp,
    as_residue,
    decompose_unit,
    is_prime,
    mu_orbits,
    mult_order,
)


@dataclass(frozen=True, order=True)
class Element:
    ell: int
    k: int

    def __str__(self) -> str:
        return f"A^{self.ell} C^{self.k}"


def default_modulus(p: int, n: int, r: Residue | int) -> int:
    """``s * p**n`` with s the prime-to-p part of ord(r)."""
    d = p**n
    t = mult_order(as_residue(r, d))
    while t % p == 0:
        t //= p
    return t * d


def _as_power_of_C(X: MonoMatrix, d: int) -> int | None:
    """c with X == C^c (C in its eigenbasis with modulus X.M), else None."""
    if not X.is_diagonal() or X.M % d or X.phase[0] != 0:
        return None
    if d == 1:
        return 0
    step = X.M // d
    if X.phase[1] % step:
        return None
    c = X.phase[1] // step
    if all(X.phase[j] == j * c * step % X.M for j in range(d)):
        return c
    return None


@dataclass(frozen=True)
class GroupSpec:
    p: int
    n: int
    r: Residue
    M: int
    A: MonoMatrix
    shift: int = 0
    """The originally supplied generator equals ``A @ C^shift``."""
    explore: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        d = self.p**self.n
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.p == 2 and not self.explore:
            raise ValueError("p = 2 is outside the theorem; pass explore=True")
        if self.M % d:
            raise ValueError(f"p**n = {d} must divide M = {self.M}")
        object.__setattr__(self, "r", as_residue(self.r, d))
        if self.A.d != d:
            raise ValueError(f"A has dimension {self.A.d}, expected {d}")
        if self.A.M != self.M:
            object.__setattr__(self, "A", self.A.with_modulus(math.lcm(self.A.M, self.M)))
            object.__setattr__(self, "M", self.A.M)
        if not self.r.is_unit():
            raise ValueError(f"r = {self.r.value} is not a unit mod {d}")
        lhs = mono.multiply(mono.inverse(self.A), self.C, self.A)
        if lhs != mono.power(self.C, self.r.value):
            raise ValueError("A does not satisfy A^-1 C A = C^r")

    # construction ------------------------------------------------------

    @classmethod
    def from_phases(
        cls,
        p: int,
        n: int,
        r: Residue | int,
        phases: Mapping[int, int] | None = None,
        M: int | None = None,
        explore: bool = False,
    ) -> GroupSpec:
        d = p**n
        r = as_residue(r, d)
        M = M or default_modulus(p, n, r)
        if phases is None:
            phases = {rep: 0 for rep in mu_orbits(d, r).reps}
        A = mono.normalizer_A(p, n, r, phases, M)
        return cls(p, n, r, M, A, explore=explore)

    @classmethod
    def from_dict(cls, data: Mapping) -> GroupSpec:
        p, n = int(data["p"]), int(data["n"])
        d = p**n
        r = Residue(int(data["r"]), d)
        M = int(data["M"]) if data.get("M") is not None else default_modulus(p, n, r)
        explore = bool(data.get("explore", False))
        if "A" in data:
            A = MonoMatrix.from_dict(data["A"]).with_modulus(M)
            return cls(p, n, r, M, A, shift=int(data.get("shift", 0)), explore=explore)
        raw = data.get("phases")
        if raw is None:
            phases = None
        elif isinstance(raw, Mapping):
            phases = {int(k): int(v) for k, v in raw.items()}
        else:
            phases = {int(e["orbit_rep"]): int(e["exp"]) for e in raw}
        return cls.from_phases(p, n, r, phases, M, explore=explore)

    @classmethod
    def from_json(cls, text: str) -> GroupSpec:
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        out: dict = {"p": self.p, "n": self.n, "r": self.r.value, "M": self.M}
        phases = self.normal_form_phases()
        if phases is not None:
            out["phases"] = [{"orbit_rep": rep, "exp": e} for rep, e in sorted(phases.items())]
        else:
            out["A"] = self.A.to_dict()
        if self.shift:
            out["shift"] = self.shift
        return out

    def normal_form_phases(self) -> dict[int, int] | None:
        """Orbit phases when A is in normal form, else None."""
        nonzero = {j for j, e in enumerate(self.A.phase) if e}
        lasts = {o.last for o in self.partition}
        if not nonzero <= lasts:
            return None
        return {o.rep: self.A.phase[o.last] for o in self.partition}

    # derived data ------------------------------------------------------

    @property
    def d(self) -> int:
        return self.p**self.n

    @cached_property
    def C(self) -> MonoMatrix:
        return mono.cycle_C(self.p, self.n, self.M)

    @cached_property
    def partition(self) -> OrbitPartition:
        return mu_orbits(self.d, self.r)

    @cached_property
    def decomp(self) -> UnitOrderDecomp | None:
        if self.p == 2:
            return None
        return decompose_unit(self.r, self.p)

    @cached_property
    def ord_r(self) -> int:
        return mult_order(self.r)

    @cached_property
    def ordA(self) -> int:
        return mono.order(self.A)

    @cached_property
    def _index_data(self) -> tuple[int, int]:
        base = mono.power(self.A, self.ord_r)
        X = base
        q = self.ord_r
        while True:
            c = _as_power_of_C(X, self.d)
            if c is not None:
                return q, c
            X = mono.multiply(X, base)
            q += self.ord_r
            if q > self.ordA:
                raise AssertionError("A has no power in <C>")

    @property
    def index(self) -> int:
        """|G/<C>|."""
        return self._index_data[0]

    @property
    def a_power(self) -> int:
        """c with ``A^index == C^c``."""
        return self._index_data[1]

    @property
    def order(self) -> int:
        return self.d * self.index

    @cached_property
    def _A_powers(self) -> list[MonoMatrix]:
        out = [mono.identity(self.d, self.M)]
        for _ in range(1, self.index):
            out.append(mono.multiply(self.A, out[-1]))
        return out

    @cached_property
    def _C_powers(self) -> list[MonoMatrix]:
        return [mono.power(self.C, k) for k in range(self.d)]

    # element arithmetic ------------------------------------------------

    def element(self, ell: int, k: int) -> Element:
        q, c = self._index_data
        wraps, ell = divmod(ell, q)
        return Element(ell, (k + c * wraps) % self.d)

    def identity(self) -> Element:
        return Element(0, 0)

    def compose(self, x: Element, y: Element) -> Element:
        k = x.k * pow(self.r.value, y.ell, self.d) + y.k
        return self.element(x.ell + y.ell, k)

    def inverse(self, x: Element) -> Element:
        q, c = self._index_data
        ell = -x.ell % q
        wraps = (x.ell + ell) // q
        k = -(c * wraps + x.k * pow(self.r.value, ell, self.d))
        return self.element(ell, k)

    def power(self, x: Element, e: int) -> Element:
        if e < 0:
            return self.power(self.inverse(x), -e)
        out = self.identity()
        base = x
        while e:
            if e & 1:
                out = self.compose(out, base)
            base = self.compose(base, base)
            e >>= 1
        return out

    def realize(self, x: Element) -> MonoMatrix:
        x = self.element(x.ell, x.k)
        return mono.multiply(self._A_powers[x.ell], self._C_powers[x.k])

    def enumerate_elements(self) -> list[Element]:
        return [Element(ell, k) for ell in range(self.index) for k in range(self.d)]

    def with_generator(self, A: MonoMatrix, shift: int) -> GroupSpec:
        return replace(self, A=A, shift=shift)


def adjust_generator_p_case(G: GroupSpec) -> GroupSpec:
    """Replace A by ``A' = A C^-t`` with ``A'^(p^a) = I``, assuming |G/<C>| = p^a.

    t is found by scanning ``<C^(p^a)>`` for ``A^(p^a)``.  ``a = 0`` is accepted
    and then demands A itself lies in <C>.
    """
    dec = G.decomp
    if dec is None or dec.s != 1:
        raise ValueError("adjust_generator_p_case requires ord(r) to be a power of p")
    pa = G.p**dec.a
    X = mono.power(G.A, pa)
    for t in range(G.p ** (G.n - dec.a)):
        if X == mono.power(G.C, pa * t):
            break
    else:
        raise SplitHypothesisError(f"A^{pa} is not in <C^{pa}>")
    A_adj = mono.multiply(G.A, mono.power(G.C, -t))
    if not mono.power(A_adj, pa).is_identity():
        raise SplitHypothesisError(f"(A C^-{t})^{pa} != I")
    return G.with_generator(A_adj, (G.shift + t) % G.d)


@dataclass(frozen=True)
class SplitVerdict:
    holds: bool
    expected_order: int
    actual_order: int


def check_split_nonp_case(G: GroupSpec) -> SplitVerdict:
    """``A^(s p^a) = I`` when s > 1."""
    dec = G.decomp
    if dec is None or dec.s == 1:
        raise ValueError("check_split_nonp_case requires s > 1")
    e = dec.s * G.p**dec.a
    return SplitVerdict(mono.power(G.A, e).is_identity(), e, G.ordA)


@dataclass(frozen=True)
class Centralizer:
    elements: tuple[Element, ...]
    d: int
    group_order: int

    @property
    def equals_cyclic(self) -> bool:
        """True when the centralizer is exactly <C>."""
        return len(self.elements) == self.d and all(x.ell == 0 for x in self.elements)

    def __len__(self) -> int:
        return len(self.elements)


def centralizer_of_C(G: GroupSpec) -> Centralizer:
    out = []
    for x in G.enumerate_elements():
        X = G.realize(x)
        if mono.multiply(X, G.C) == mono.multiply(G.C, X):
            out.append(x)
    return Centralizer(tuple(out), G.d, G.order)
