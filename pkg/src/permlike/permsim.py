"""Deciding similarity to a permutation matrix from a factored characteristic polynomial.

A finite-order matrix is diagonalizable, so it is similar to a permutation
matrix exactly when its char poly is ``prod_l (x**l - 1)**c_l``.  Writing
``a_k`` for the multiplicity of each primitive k-th root of unity gives
``a_k = sum_{k | l} c_l``, which is inverted with the Mobius function.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass, field

from .errors import NonRationalSpectrumError, NotPermutationSpectrumError
from .monomial import CycleFactors, MonoMatrix, char_factors, eigen_exponents
from .numtheory import divisors, euler_phi, mobius

PhiMultiplicity = dict[int, int]
CycleType = dict[int, int]


def root_multiplicities(N: int, exps) -> PhiMultiplicity:
    """Cyclotomic multiplicities of a multiset of roots ``zeta_N**e``.

    Raises NonRationalSpectrumError (smallest offending k) when the primitive
    k-th roots do not all occur equally often.
    """
    counts = Counter(e % N for e in exps)
    by_order: dict[int, list[int]] = {}
    for e, c in counts.items():
        k = N // math.gcd(e, N)
        by_order.setdefault(k, []).append(c)
    out = {}
    for k in sorted(by_order):
        cs = by_order[k]
        # every primitive k-th root must be present, each the same number of times
        if len(cs) != euler_phi(k) or len(set(cs)) != 1:
            raise NonRationalSpectrumError(k)
        out[k] = cs[0]
    return out


def eigen_multiplicities(f: CycleFactors) -> PhiMultiplicity:
    N, exps = eigen_exponents(f)
    return root_multiplicities(N, exps)


def cycle_type_from_multiplicities(m: Mapping[int, int], d: int) -> CycleType:
    m = {k: a for k, a in m.items() if a}
    if not m:
        if d:
            raise ValueError(f"empty spectrum for dimension {d}")
        return {}
    L = math.lcm(*m)
    counts = {}
    for length in divisors(L):
        c = 0
        for mult in divisors(L // length):
            c += mobius(mult) * m.get(length * mult, 0)
        if c < 0:
            raise NotPermutationSpectrumError(length, c)
        if c:
            counts[length] = c
    degree = sum(length * c for length, c in counts.items())
    if degree != d:
        raise ValueError(f"degree mismatch: cycle type has degree {degree}, expected {d}")
    return counts


def cycle_type_of_permutation(perm) -> CycleType:
    seen = [False] * len(perm)
    out: Counter = Counter()
    for j in range(len(perm)):
        if seen[j]:
            continue
        length = 0
        x = j
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            length += 1
        out[length] += 1
    return dict(out)


def expand_cycle_type(ct: Mapping[int, int]) -> PhiMultiplicity:
    """Inverse direction: ``a_k = sum_{k | l} c_l``."""
    out: Counter = Counter()
    for length, c in ct.items():
        for k in divisors(length):
            out[k] += c
    return {k: a for k, a in out.items() if a}


@dataclass
class ElementVerdict:
    permutation_like: bool
    cycle_type: CycleType | None = None
    reason: str | None = None
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out: dict = {"permutation_like": self.permutation_like}
        if self.cycle_type is not None:
            out["cycle_type"] = {str(k): v for k, v in sorted(self.cycle_type.items())}
        if self.reason:
            out["reason"] = self.reason
            out["witness"] = self.witness
        return out


def is_permutation_like_element(X: MonoMatrix | CycleFactors) -> ElementVerdict:
    """Cycle type of the permutation X is similar to, or a structured failure.

    Monomial matrices over roots of unity have finite order and are therefore
    diagonalizable; that half of the criterion is not recomputed.
    """
    f = X if isinstance(X, CycleFactors) else char_factors(X)
    try:
        m = eigen_multiplicities(f)
    except NonRationalSpectrumError as e:
        return ElementVerdict(False, reason="char poly not rational", witness={"k": e.k})
    try:
        ct = cycle_type_from_multiplicities(m, f.d)
    except NotPermutationSpectrumError as e:
        return ElementVerdict(
            False, reason="not a permutation spectrum", witness={"length": e.length, "count": e.count}
        )
    return ElementVerdict(True, cycle_type=ct)


@dataclass
class GroupReport:
    permutation_like: bool
    order: int
    cycle_types: dict[str, CycleType]
    failure: tuple[str, ElementVerdict] | None = None
    assumptions: str = "diagonalizable: automatic (finite order)"

    def to_dict(self) -> dict:
        out: dict = {
            "verdict": "permutation-like" if self.permutation_like else "not permutation-like",
            "order": self.order,
            "assumptions": self.assumptions,
            "cycle_types": {
                name: {str(k): v for k, v in sorted(ct.items())} for name, ct in self.cycle_types.items()
            },
        }
        if self.failure is not None:
            name, verdict = self.failure
            out["witness"] = {"element": name, **verdict.to_dict()}
        return out


def is_permutation_like_group(G) -> GroupReport:
    """Check every element of a GroupSpec; stop at the first failure."""
    cycle_types = {}
    elements = G.enumerate_elements()
    for x in elements:
        verdict = is_permutation_like_element(G.realize(x))
        if not verdict.permutation_like:
            return GroupReport(False, len(elements), cycle_types, failure=(str(x), verdict))
        cycle_types[str(x)] = verdict.cycle_type
    return GroupReport(True, len(elements), cycle_types)


def corollary_holds(m: Mapping[int, int]) -> bool:
    """``a_k >= a_j`` whenever ``k | j`` in the support."""
    return all(m.get(k, 0) >= a for j, a in m.items() for k in divisors(j))

