"""Monomial matrices whose nonzero entries are roots of unity.

Convention used everywhere: basis vector ``b_j`` is sent to
``zeta_M**phase[j] * b_{sigma[j]}``.  In matrix terms column j carries its single
nonzero entry in row ``sigma[j]``.  Products compose as linear maps, so
``multiply(X, Y)`` applies Y first.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .errors import NotInvariantError
from .numtheory import Residue, as_residue, mu_orbits


@dataclass(frozen=True, order=True)
class RootExp:
    """The root of unity ``zeta_M**exp``."""

    exp: int
    M: int

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ValueError(f"phase modulus must be positive, got {self.M}")
        object.__setattr__(self, "exp", self.exp % self.M)

    def lift(self, M: int) -> RootExp:
        if M % self.M:
            raise ValueError(f"cannot embed mu_{self.M} into mu_{M}")
        return RootExp(self.exp * (M // self.M), M)

    def order(self) -> int:
        return self.M // math.gcd(self.exp, self.M)

    def is_one(self) -> bool:
        return self.exp == 0

    def __str__(self) -> str:
        if self.exp == 0:
            return "1"
        g = math.gcd(self.exp, self.M)
        e, m = self.exp // g, self.M // g
        return f"z{m}" if e == 1 else f"z{m}^{e}"


@dataclass(frozen=True)
class CycleFactors:
    """Characteristic polynomial ``prod (x**length - omega)`` in factored form."""

    d: int
    factors: tuple[tuple[int, RootExp], ...]

    def __post_init__(self) -> None:
        if sum(length for length, _ in self.factors) != self.d:
            raise ValueError("factor degrees do not add up to the dimension")
        object.__setattr__(self, "factors", tuple(sorted(self.factors)))

    def __str__(self) -> str:
        parts = []
        for length, w in self.factors:
            x = "x" if length == 1 else f"x^{length}"
            parts.append(f"({x} - {w})")
        return "".join(parts)


@dataclass(frozen=True)
class MonoMatrix:
    d: int
    M: int
    sigma: tuple[int, ...]
    phase: tuple[int, ...]

    def __post_init__(self) -> None:
        sigma = tuple(int(s) for s in self.sigma)
        phase = tuple(int(e) % self.M for e in self.phase)
        if len(sigma) != self.d or len(phase) != self.d:
            raise ValueError("sigma and phase must have length d")
        if sorted(sigma) != list(range(self.d)):
            raise ValueError("sigma is not a permutation of range(d)")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "phase", phase)

    def to_dict(self) -> dict:
        return {"d": self.d, "M": self.M, "sigma": list(self.sigma), "phase": list(self.phase)}

    @classmethod
    def from_dict(cls, data: Mapping) -> MonoMatrix:
        return cls(int(data["d"]), int(data["M"]), tuple(data["sigma"]), tuple(data["phase"]))

    def with_modulus(self, M: int) -> MonoMatrix:
        if M == self.M:
            return self
        if M % self.M:
            raise ValueError(f"cannot lift phases from modulus {self.M} to {M}")
        f = M // self.M
        return MonoMatrix(self.d, M, self.sigma, tuple(e * f for e in self.phase))

    def is_diagonal(self) -> bool:
        return all(s == j for j, s in enumerate(self.sigma))

    def is_permutation_matrix(self) -> bool:
        return not any(self.phase)

    def is_identity(self) -> bool:
        return self.is_diagonal() and self.is_permutation_matrix()

    def __matmul__(self, other: MonoMatrix) -> MonoMatrix:
        return multiply(self, other)


def identity(d: int, M: int | None = None) -> MonoMatrix:
    return MonoMatrix(d, M or max(d, 1), tuple(range(d)), (0,) * d)


def permutation_matrix(perm: Sequence[int], M: int | None = None) -> MonoMatrix:
    d = len(perm)
    return MonoMatrix(d, M or max(d, 1), tuple(perm), (0,) * d)


def diagonal(exps: Sequence[int], M: int) -> MonoMatrix:
    d = len(exps)
    return MonoMatrix(d, M, tuple(range(d)), tuple(exps))


def cycle_C(p: int, n: int, M: int | None = None) -> MonoMatrix:
    """The maximal cycle in its own eigenbasis: ``C e_j = lambda**j e_j``."""
    d = p**n
    M = M or d
    if M % d:
        raise ValueError(f"p**n = {d} must divide phase modulus {M}")
    step = M // d
    return diagonal([j * step for j in range(d)], M)


def _phase_exp(value: RootExp | int, M: int) -> int:
    if isinstance(value, RootExp):
        return value.lift(M).exp
    return int(value) % M


def normalizer_A(
    p: int,
    n: int,
    r: Residue | int,
    phases: Mapping[int, RootExp | int],
    M: int | None = None,
) -> MonoMatrix:
    """Normal-form matrix with ``A^-1 C A = C^r``.

    sigma is multiplication by r.  Each mu_r-orbit carries its phase on the edge
    leaving its last member (the wrap-around edge), all other phases are zero.
    Integer phases are exponents mod M.
    """
    d = p**n
    M = M or d
    r = as_residue(r, d)
    part = mu_orbits(d, r)
    keys = set(phases)
    reps = set(part.reps)
    if keys != reps:
        missing = sorted(reps - keys)
        extra = sorted(keys - reps)
        raise ValueError(f"phases must be keyed by orbit reps; missing {missing}, extra {extra}")
    sigma = tuple(j * r.value % d for j in range(d))
    phase = [0] * d
    for o in part:
        phase[o.last] = _phase_exp(phases[o.rep], M)
    return MonoMatrix(d, M, sigma, tuple(phase))


def multiply(X: MonoMatrix, Y: MonoMatrix, *more: MonoMatrix) -> MonoMatrix:
    if more:
        out = multiply(X, Y)
        for Z in more:
            out = multiply(out, Z)
        return out
    if X.d != Y.d:
        raise ValueError(f"dimension mismatch: {X.d} vs {Y.d}")
    M = math.lcm(X.M, Y.M)
    X, Y = X.with_modulus(M), Y.with_modulus(M)
    sigma = tuple(X.sigma[s] for s in Y.sigma)
    phase = tuple(Y.phase[j] + X.phase[Y.sigma[j]] for j in range(X.d))
    return MonoMatrix(X.d, M, sigma, phase)


def inverse(X: MonoMatrix) -> MonoMatrix:
    sigma = [0] * X.d
    phase = [0] * X.d
    for j, s in enumerate(X.sigma):
        sigma[s] = j
        phase[s] = -X.phase[j]
    return MonoMatrix(X.d, X.M, tuple(sigma), tuple(phase))


def cycles(X: MonoMatrix) -> list[list[int]]:
    """Cycles of sigma, each starting from its smallest index."""
    seen = [False] * X.d
    out = []
    for j in range(X.d):
        if seen[j]:
            continue
        cyc = []
        x = j
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = X.sigma[x]
        out.append(cyc)
    return out


def power(X: MonoMatrix, k: int) -> MonoMatrix:
    if k < 0:
        return power(inverse(X), -k)
    sigma = [0] * X.d
    phase = [0] * X.d
    for cyc in cycles(X):
        L = len(cyc)
        # prefix[i] = phase accumulated walking from cyc[0] to cyc[i]
        prefix = [0] * (2 * L + 1)
        for i in range(2 * L):
            prefix[i + 1] = prefix[i] + X.phase[cyc[i % L]]
        total = prefix[L]
        q, rem = divmod(k, L)
        for i, j in enumerate(cyc):
            sigma[j] = cyc[(i + rem) % L]
            phase[j] = q * total + prefix[i + rem] - prefix[i]
    return MonoMatrix(X.d, X.M, tuple(sigma), tuple(phase))


def char_factors(X: MonoMatrix) -> CycleFactors:
    """One factor ``x**L - omega`` per sigma-cycle; omega is the phase product around it."""
    factors = []
    for cyc in cycles(X):
        w = sum(X.phase[j] for j in cyc)
        factors.append((len(cyc), RootExp(w, X.M)))
    return CycleFactors(X.d, tuple(factors))


def order(X: MonoMatrix) -> int:
    out = 1
    for length, w in char_factors(X).factors:
        out = math.lcm(out, length * w.order())
    return out


def restrict(X: MonoMatrix, S: Iterable[int]) -> MonoMatrix:
    """Restriction to the span of ``{b_j : j in S}``, reindexed by sorted S."""
    S = sorted(set(S))
    pos = {j: i for i, j in enumerate(S)}
    try:
        sigma = tuple(pos[X.sigma[j]] for j in S)
    except KeyError:
        raise NotInvariantError("subspace not invariant") from None
    phase = tuple(X.phase[j] for j in S)
    return MonoMatrix(len(S), X.M, sigma, phase)


def trace_exps(X: MonoMatrix) -> tuple[int, ...]:
    """The trace as a formal sum: exponents (mod M) of the diagonal entries."""
    return tuple(sorted(X.phase[j] for j in range(X.d) if X.sigma[j] == j))


def fixed_points(X: MonoMatrix) -> int:
    return sum(1 for j, s in enumerate(X.sigma) if s == j)


def conjugate(X: MonoMatrix, P: MonoMatrix) -> MonoMatrix:
    """``P^-1 X P``."""
    return multiply(inverse(P), X, P)


def eigen_exponents(f: CycleFactors) -> tuple[int, list[int]]:
    """All roots of ``prod (x**L - omega)`` as exponents of one common root of unity.

    Returns ``(N, exps)`` where the roots are ``zeta_N**e`` for e in exps.
    """
    if not f.factors:
        return 1, []
    N = 1
    for length, w in f.factors:
        N = math.lcm(N, w.M * length)
    exps = []
    for length, w in f.factors:
        # roots of x**L = zeta_M**w are zeta_{M L}**(w + M i), i < L
        scale = N // (w.M * length)
        exps.extend((w.exp + w.M * i) * scale % N for i in range(length))
    return N, sorted(exps)
