"""Dense exact verification over the cyclotomic field Q(zeta_M).

This module deliberately shares nothing with the monomial bookkeeping except
the input format: matrices are realized densely, characteristic polynomials
are recomputed with the Faddeev-LeVerrier recursion, and certificates are
checked entry by entry.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .kernels import det_mod_prime
from .monomial import CycleFactors, MonoMatrix
from .numtheory import divisors, factorize, is_prime

MAX_CONDUCTOR = 2000

Number = int | Fraction


def _norm(c: Number) -> Number:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(num: Sequence[Number], den: Sequence[Number]) -> tuple[list, list]:
    num = list(num)
    den = _trim(list(den))
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    lead = den[-1]
    q = [0] * max(len(num) - len(den) + 1, 0)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        if c == 0:
            continue
        c = _norm(Fraction(c) / lead) if lead != 1 else c
        q[i] = c
        for j, dj in enumerate(den):
            num[i + j] -= c * dj
    return q, _trim([_norm(x) for x in num[: len(den) - 1]])


def _poly_mul(a: Sequence[Number], b: Sequence[Number]) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(M: int) -> tuple[int, ...]:
    """Coefficients of Phi_M, constant term first: x^M - 1 divided by Phi_k for k | M, k < M."""
    if M < 1:
        raise ValueError(f"conductor must be positive, got {M}")
    num: list[Number] = [-1] + [0] * (M - 1) + [1]
    for k in divisors(M):
        if k < M:
            num, rem = _poly_divmod(num, cyclotomic_polynomial(k))
            if any(rem):
                raise AssertionError(f"Phi_{k} does not divide x^{M} - 1")
    return tuple(int(c) for c in _trim(num))


@lru_cache(maxsize=None)
def _phi_degree(M: int) -> int:
    return len(cyclotomic_polynomial(M)) - 1


def _reduce(p: list, M: int) -> tuple:
    phi = cyclotomic_polynomial(M)
    n = len(phi) - 1
    p = list(p)
    for i in range(len(p) - 1, n - 1, -1):
        c = p[i]
        if c:
            base = i - n
            for j in range(n):
                if phi[j]:
                    p[base + j] -= c * phi[j]
    p = p[:n] + [0] * (n - len(p))
    return tuple(_norm(c) for c in p)


@dataclass(frozen=True)
class CycloNum:
    """Element of Q(zeta_M) as a polynomial in zeta_M of degree < deg Phi_M."""

    M: int
    coeffs: tuple

    @classmethod
    def of(cls, M: int, poly: Iterable[Number]) -> CycloNum:
        if M > MAX_CONDUCTOR:
            raise ValueError(f"conductor {M} exceeds cap {MAX_CONDUCTOR}")
        return cls(M, _reduce(list(poly), M))

    @classmethod
    def rational(cls, M: int, c: Number) -> CycloNum:
        n = _phi_degree(M)
        return cls(M, (_norm(Fraction(c)),) + (0,) * (n - 1))

    @classmethod
    def zero(cls, M: int) -> CycloNum:
        return cls(M, (0,) * _phi_degree(M))

    @classmethod
    def one(cls, M: int) -> CycloNum:
        return cls.rational(M, 1)

    @classmethod
    def root(cls, M: int, e: int) -> CycloNum:
        return _root(M, e % M)

    def __add__(self, other: CycloNum) -> CycloNum:
        a, b = _common(self, other)
        return CycloNum(a.M, tuple(_norm(x + y) for x, y in zip(a.coeffs, b.coeffs)))

    def __sub__(self, other: CycloNum) -> CycloNum:
        a, b = _common(self, other)
        return CycloNum(a.M, tuple(_norm(x - y) for x, y in zip(a.coeffs, b.coeffs)))

    def __neg__(self) -> CycloNum:
        return CycloNum(self.M, tuple(-x for x in self.coeffs))

    def __mul__(self, other: CycloNum | Number) -> CycloNum:
        if not isinstance(other, CycloNum):
            return CycloNum(self.M, tuple(_norm(x * other) for x in self.coeffs))
        a, b = _common(self, other)
        if a.is_zero() or b.is_zero():
            return CycloNum.zero(a.M)
        return CycloNum(a.M, _reduce(_poly_mul(a.coeffs, b.coeffs), a.M))

    __rmul__ = __mul__

    def __truediv__(self, other: CycloNum | Number) -> CycloNum:
        if not isinstance(other, CycloNum):
            return CycloNum(self.M, tuple(_norm(Fraction(x) / other) for x in self.coeffs))
        return self * other.inverse()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.coeffs[0]) if self.coeffs else Fraction(0)

    def inverse(self) -> CycloNum:
        """Extended Euclid against Phi_M, which is irreducible over Q."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta)")
        # invariant: r_i == s_i * self (mod Phi)
        r0, r1 = list(cyclotomic_polynomial(self.M)), _trim(list(self.coeffs))
        s0: list = [0]
        s1: list = [1]
        while len(r1) > 1:
            q, rem = _poly_divmod(r0, r1)
            qs = _poly_mul(q, s1)
            s_next = [
                _norm((s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0))
                for i in range(max(len(s0), len(qs)))
            ]
            r0, r1 = r1, rem
            s0, s1 = s1, _trim(s_next)
        c = r1[0]
        return CycloNum.of(self.M, [_norm(Fraction(x) / c) for x in s1])

    def lift(self, M: int) -> CycloNum:
        if M == self.M:
            return self
        if M % self.M:
            raise ValueError(f"Q(zeta_{self.M}) does not embed in Q(zeta_{M})")
        f = M // self.M
        poly = [0] * (f * max(len(self.coeffs) - 1, 0) + 1)
        for i, c in enumerate(self.coeffs):
            poly[i * f] = c
        return CycloNum.of(M, poly)

    def eval_mod(self, g: int, q: int) -> int:
        """Image under zeta_M -> g in F_q (g of exact order M)."""
        out = 0
        gp = 1
        for c in self.coeffs:
            if c:
                if isinstance(c, Fraction):
                    out += c.numerator * pow(c.denominator, -1, q) * gp
                else:
                    out += c * gp
            gp = gp * g % q
        return out % q

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*z^{i}")
        return " + ".join(terms) if terms else "0"


@lru_cache(maxsize=None)
def _root(M: int, e: int) -> CycloNum:
    return CycloNum.of(M, [0] * e + [1])


def _common(a: CycloNum, b: CycloNum) -> tuple[CycloNum, CycloNum]:
    if a.M == b.M:
        return a, b
    M = math.lcm(a.M, b.M)
    return a.lift(M), b.lift(M)


# --------------------------------------------------------------------------
# polynomials with CycloNum coefficients (constant term first)


def poly_mul(a: Sequence[CycloNum], b: Sequence[CycloNum]) -> list[CycloNum]:
    M = (a[0] if a else b[0]).M
    out = [CycloNum.zero(M) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return out


def expand_cycle_factors(f: CycleFactors, M: int | None = None) -> list[CycloNum]:
    """``prod (x**L - omega)`` expanded into coefficients in Q(zeta_M)."""
    if M is None:
        M = 1
        for _, w in f.factors:
            M = math.lcm(M, w.M)
    poly = [CycloNum.one(M)]
    for length, w in f.factors:
        w = w.lift(M)
        factor = [-CycloNum.root(M, w.exp)] + [CycloNum.zero(M)] * (length - 1) + [CycloNum.one(M)]
        poly = poly_mul(poly, factor)
    return poly


def integer_poly(f: CycleFactors) -> list[Fraction] | None:
    """Rational coefficients of the expanded polynomial, or None if not rational."""
    coeffs = expand_cycle_factors(f)
    if not all(c.is_rational() for c in coeffs):
        return None
    return [c.to_rational() for c in coeffs]


def cyclotomic_power_product(parts: Iterable[tuple[int, int]]) -> list[int]:
    """``prod Phi_m**e`` over (m, e) as integer coefficients."""
    out: list = [1]
    for m, e in parts:
        for _ in range(e):
            out = _poly_mul(out, cyclotomic_polynomial(m))
    return [int(c) for c in out]


def serialize_poly(coeffs: Sequence[CycloNum | Number]) -> list:
    """Rational coefficients as ``"num/den"`` strings; field elements as lists of them."""

    def frac(c: Number) -> str:
        c = Fraction(c)
        return f"{c.numerator}/{c.denominator}"

    out = []
    for c in coeffs:
        if isinstance(c, CycloNum):
            out.append([frac(x) for x in c.coeffs] if not c.is_rational() else frac(c.coeffs[0]))
        else:
            out.append(frac(c))
    return out


# --------------------------------------------------------------------------
# dense matrices


@dataclass(frozen=True)
class DenseMatrix:
    d: int
    M: int
    rows: tuple[tuple[CycloNum, ...], ...]

    @classmethod
    def identity(cls, d: int, M: int) -> DenseMatrix:
        one, zero = CycloNum.one(M), CycloNum.zero(M)
        return cls(d, M, tuple(tuple(one if i == j else zero for j in range(d)) for i in range(d)))

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[CycloNum]], M: int) -> DenseMatrix:
        d = len(cols)
        return cls(d, M, tuple(tuple(cols[j][i] for j in range(d)) for i in range(d)))

    def column(self, j: int) -> list[CycloNum]:
        return [row[j] for row in self.rows]

    def __matmul__(self, other: DenseMatrix) -> DenseMatrix:
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        M = math.lcm(self.M, other.M)
        zero = CycloNum.zero(M)
        rows = []
        for row in self.rows:
            acc = [zero] * other.d
            for m, x in enumerate(row):
                if x.is_zero():
                    continue
                for j, y in enumerate(other.rows[m]):
                    if not y.is_zero():
                        acc[j] = acc[j] + x * y
            rows.append(tuple(acc))
        return DenseMatrix(self.d, M, tuple(rows))

    def matvec(self, v: Sequence[CycloNum]) -> list[CycloNum]:
        zero = CycloNum.zero(self.M)
        out = []
        for row in self.rows:
            acc = zero
            for x, y in zip(row, v):
                if not x.is_zero() and not y.is_zero():
                    acc = acc + x * y
            out.append(acc)
        return out

    def add_scalar(self, c: CycloNum) -> DenseMatrix:
        rows = tuple(
            tuple(x + c if i == j else x for j, x in enumerate(row)) for i, row in enumerate(self.rows)
        )
        return DenseMatrix(self.d, self.M, rows)

    def trace(self) -> CycloNum:
        acc = CycloNum.zero(self.M)
        for i in range(self.d):
            acc = acc + self.rows[i][i]
        return acc

    def first_mismatch(self, other: DenseMatrix) -> tuple[int, int] | None:
        for i in range(self.d):
            for j in range(self.d):
                a, b = _common(self.rows[i][j], other.rows[i][j])
                if a != b:
                    return i, j
        return None

    def determinant(self) -> CycloNum:
        """Gaussian elimination over Q(zeta_M)."""
        a = [list(row) for row in self.rows]
        n = self.d
        det = CycloNum.one(self.M)
        for col in range(n):
            piv = next((i for i in range(col, n) if not a[i][col].is_zero()), None)
            if piv is None:
                return CycloNum.zero(self.M)
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                det = -det
            det = det * a[col][col]
            inv = a[col][col].inverse()
            for i in range(col + 1, n):
                if a[i][col].is_zero():
                    continue
                f = a[i][col] * inv
                a[i] = [x - f * y if j >= col else x for j, (x, y) in enumerate(zip(a[i], a[col]))]
        return det


def realize(X: MonoMatrix) -> DenseMatrix:
    zero = CycloNum.zero(X.M)
    rows = [[zero] * X.d for _ in range(X.d)]
    for j, (s, e) in enumerate(zip(X.sigma, X.phase)):
        rows[s][j] = CycloNum.root(X.M, e)
    return DenseMatrix(X.d, X.M, tuple(tuple(r) for r in rows))


def char_poly_dense(D: DenseMatrix) -> list[CycloNum]:
    """``det(x I - D)`` by Faddeev-LeVerrier, constant term first."""
    n = D.d
    coeffs = [CycloNum.zero(D.M)] * (n + 1)
    coeffs[n] = CycloNum.one(D.M)
    Mk = DenseMatrix(n, D.M, tuple(tuple(CycloNum.zero(D.M) for _ in range(n)) for _ in range(n)))
    for k in range(1, n + 1):
        Mk = (D @ Mk).add_scalar(coeffs[n - k + 1])
        coeffs[n - k] = -((D @ Mk).trace() / k)
    return coeffs


def trace_of_exps(exps: Iterable[int], M: int) -> CycloNum:
    acc = CycloNum.zero(M)
    for e in exps:
        acc = acc + CycloNum.root(M, e)
    return acc


# --------------------------------------------------------------------------
# nonvanishing of determinants


@lru_cache(maxsize=None)
def _split_primes(M: int, count: int = 4, start: int = 1 << 30) -> tuple[tuple[int, int], ...]:
    """Primes q = 1 (mod M) below 2**31 with an element g of exact order M."""
    out = []
    q = start - start % M + 1
    while len(out) < count:
        q += M
        if not is_prime(q):
            continue
        for h in range(2, q):
            g = pow(h, (q - 1) // M, q)
            if all(pow(g, M // ell, q) != 1 for ell, _ in factorize(M)):
                out.append((q, g))
                break
    return tuple(out)


def determinant_nonzero(D: DenseMatrix) -> tuple[bool, str]:
    """Decide ``det D != 0``.

    Reduction modulo a prime ideal over q = 1 (mod M) is a ring map, so a
    nonzero image proves a nonzero determinant.  If every tried prime gives
    zero the exact elimination over Q(zeta_M) decides.
    """
    for q, g in _split_primes(D.M):
        mat = np.array([[x.eval_mod(g, q) for x in row] for row in D.rows], dtype=np.int64)
        if det_mod_prime(mat, q) != 0:
            return True, f"nonzero modulo prime {q}"
    return not D.determinant().is_zero(), "exact elimination"


# --------------------------------------------------------------------------
# certificates


@dataclass
class VerificationResult:
    ok: bool
    witness: dict | None = None
    det_method: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        out: dict = {"ok": self.ok, "det_method": self.det_method}
        if self.witness:
            out["witness"] = self.witness
        return out


def permutation_dense(perm: Sequence[int], M: int) -> DenseMatrix:
    """Matrix sending column k to column perm[k]."""
    d = len(perm)
    zero, one = CycloNum.zero(M), CycloNum.one(M)
    rows = [[zero] * d for _ in range(d)]
    for k, t in enumerate(perm):
        rows[t][k] = one
    return DenseMatrix(d, M, tuple(tuple(r) for r in rows))


def verify_certificate(cert) -> VerificationResult:
    """Check ``g P = P Pi(g)`` for every generator, and ``det P != 0``.

    ``cert`` must provide ``M``, ``f_exps`` (the start vector f as exponents of
    zeta_M), ``C`` (MonoMatrix) and ``generators()`` yielding
    ``(name, MonoMatrix, image permutation)``.  P has columns ``C^k f``, built
    here by repeated dense products.
    """
    M = cert.M
    Cd = realize(cert.C)
    col = [CycloNum.root(M, e) for e in cert.f_exps]
    cols = []
    for _ in range(cert.C.d):
        cols.append(col)
        col = Cd.matvec(col)
    P = DenseMatrix.from_columns(cols, M)

    for name, g, image in cert.generators():
        if sorted(image) != list(range(cert.C.d)):
            return VerificationResult(False, {"generator": name, "reason": "image is not a permutation"})
        lhs = realize(g) @ P
        rhs = P @ permutation_dense(image, M)
        bad = lhs.first_mismatch(rhs)
        if bad is not None:
            return VerificationResult(False, {"generator": name, "row": bad[0], "column": bad[1]})

    nonzero, method = determinant_nonzero(P)
    if not nonzero:
        return VerificationResult(False, {"reason": "det P = 0"}, method)
    return VerificationResult(True, None, method)
