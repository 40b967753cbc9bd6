"""Constructive conjugation of a permutation-like <A, C> to a permutation group.

Pipeline for a group G = <A, C> with ``A^-1 C A = C^r`` and ord(r) = s p^a:

* s = 1 (case 1): replace A by ``A' = A C^-t`` with ``A'^(p^a) = I``, then
  check the p-group statements on the split ``V = V^p + V^*`` recursively.
* a = 0, s > 1 (case 2): ``A^s = I`` and the phase on the fixed line is 1.
* a > 0, s > 1 (case 3): write ``A = A^(st) A^(p^a m)`` with
  ``st + p^a m = 1`` and check both factors permute the basis E.

Once the generator permutes E, f = sum of E is a cyclic vector for C and
``{C^k f}`` is a basis in which C acts as ``k -> k+1`` and the generator as
``k -> k r^-1``.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import Any

from . import cyclooracle
from . import monomial as mono
from .errors import CertificationError, PermLikeError, SplitHypothesisError
from .monomial import MonoMatrix, RootExp
from .numtheory import OrbitPartition, Residue, p_adic_valuation, units
from .permsim import (
    GroupReport,
    eigen_multiplicities,
    is_permutation_like_element,
    is_permutation_like_group,
)
from .structure import (
    GroupSpec,
    adjust_generator_p_case,
    centralizer_of_C,
    check_split_nonp_case,
)


class NotPermutationLikeError(PermLikeError):
    def __init__(self, report: GroupReport):
        name, verdict = report.failure
        super().__init__(f"group is not permutation-like: {name} fails ({verdict.reason})")
        self.report = report


# --------------------------------------------------------------------------
# the basis E


@dataclass(frozen=True)
class BasisE:
    """Basis ``E_k = {e_rep, A e_rep, ..., A^(d_k - 1) e_rep}`` for each mu_r-orbit.

    ``prefix[j]`` is the exponent with ``A^i e_rep = zeta_M^prefix[j] e_j`` for
    ``j = r^i rep``; E vectors are listed orbit by orbit.
    """

    partition: OrbitPartition
    M: int
    order: tuple[int, ...]
    prefix: tuple[int, ...]
    omegas: tuple[RootExp, ...]

    @property
    def ordering(self) -> tuple[tuple[int, int], ...]:
        return tuple((k, i) for k, o in enumerate(self.partition) for i in range(o.length))

    @property
    def position(self) -> dict[int, int]:
        return {j: pos for pos, j in enumerate(self.order)}

    def is_permutation(self) -> bool:
        return all(w.is_one() for w in self.omegas)


def build_basis_E(G: GroupSpec, A: MonoMatrix | None = None) -> BasisE:
    A = A or G.A
    part = G.partition
    prefix = [0] * G.d
    omegas = []
    ordA = mono.order(A)
    for o in part:
        acc = 0
        for j in o.members:
            prefix[j] = acc % A.M
            acc += A.phase[j]
        w = RootExp(acc, A.M)
        if ((ordA // o.length) * w.exp) % A.M:
            raise PermLikeError(f"omega for orbit of {o.rep} is not an (ord(A)/{o.length})-th root of unity")
        omegas.append(w)
    order = tuple(j for o in part for j in o.members)
    return BasisE(part, A.M, order, tuple(prefix), tuple(omegas))


def in_basis_E(X: MonoMatrix, basis: BasisE) -> MonoMatrix:
    """X written in the basis E (positions as in ``basis.order``)."""
    X = X.with_modulus(basis.M) if X.M != basis.M else X
    pos = basis.position
    d = X.d
    sigma = [0] * d
    phase = [0] * d
    for j in range(d):
        s = X.sigma[j]
        sigma[pos[j]] = pos[s]
        phase[pos[j]] = basis.prefix[j] + X.phase[j] - basis.prefix[s]
    return MonoMatrix(d, X.M, tuple(sigma), tuple(phase))


# --------------------------------------------------------------------------
# closed forms on V^*


@dataclass(frozen=True)
class ClosedForm:
    """A product ``prod Phi_m**e``, listed as (m, e)."""

    branch: int
    parts: tuple[tuple[int, int], ...]
    text: str

    def multiplicities(self) -> dict[int, int]:
        return {m: e for m, e in self.parts if e}


def charpoly_Vstar_closed_form(p: int, n: int, a: int, k: int) -> ClosedForm:
    """Char poly of ``A C^k`` on the span of the unit eigenlines when ``A^(p^a) = I``."""
    if not 0 <= a < n:
        raise ValueError(f"need 0 <= a < n, got a={a}, n={n}")
    nu = p_adic_valuation(k % p**n, p)
    if nu < n - a:
        m, e = p ** (n - nu), p**nu
        text = f"Phi_{m}(x)" + (f"^{e}" if e > 1 else "")
        return ClosedForm(1, ((m, e),), text)
    h = p ** (n - a - 1) * (p - 1)
    parts = tuple((p**i, h) for i in range(a + 1))
    x = "x" if a == 0 else f"x^{p**a}"
    return ClosedForm(2, parts, f"({x}-1)^{h}")


# --------------------------------------------------------------------------
# checks on the split V = V^p + V^*


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, **({"detail": self.detail} if self.detail else {})}


@dataclass
class Section3Report:
    p: int
    n: int
    a: int
    checks: list[Check]
    sub: Section3Report | None = None
    observed_j: tuple[int, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and (self.sub is None or self.sub.passed)

    def failed(self) -> list[str]:
        out = [c.name for c in self.checks if not c.passed]
        if self.sub is not None:
            out += [f"n={self.sub.n}:{name}" for name in self.sub.failed()]
        return out

    def to_dict(self) -> dict:
        out: dict = {
            "p": self.p,
            "n": self.n,
            "a": self.a,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }
        if self.observed_j:
            out["observed_j"] = list(self.observed_j)
        if self.sub is not None:
            out["restriction"] = self.sub.to_dict()
        return out


def restrict_to_Vp(G: GroupSpec) -> GroupSpec | None:
    """The instance ``<A|V^p, C|V^p>`` of dimension p^(n-1), or None when n = 1."""
    if G.n == 1:
        return None
    S = range(0, G.d, G.p)
    A_p = mono.restrict(G.A, S)
    dp = G.d // G.p
    return GroupSpec(G.p, G.n - 1, Residue(G.r.value % dp, dp), G.M, A_p, explore=G.explore)


def verify_section3(G: GroupSpec) -> Section3Report:
    """Statements about G when ord(r) = p^a and ``A^(p^a) = I``.

    Every statement is evaluated and reported; nothing is assumed.  Elements
    with ``l = 0 (mod p^a)`` lie in <C> and are not covered by the closed forms.
    """
    dec = G.decomp
    p, n, d = G.p, G.n, G.d
    a = dec.a if dec is not None else 0
    pa = p**a
    checks: list[Check] = []

    s_ok = dec is not None and dec.s == 1
    A_pa = mono.power(G.A, pa)
    checks.append(Check("hypothesis", s_ok and A_pa.is_identity(),
                        {"s": dec.s if dec else None, "a": a, "A^(p^a)=I": A_pa.is_identity()}))

    unit_idx = units(d)
    Vp_idx = list(range(0, d, p))
    bad_closed: dict | None = None
    bad_vp: dict | None = None
    observed_j: set[int] = set()
    A_pow = mono.identity(d, G.M)
    for ell in range(1, pa):
        A_pow = mono.multiply(G.A, A_pow)
        a_ell = a - p_adic_valuation(ell, p)
        for k in range(d):
            X = mono.multiply(A_pow, mono.power(G.C, k))
            form = charpoly_Vstar_closed_form(p, n, a_ell, k)
            if bad_closed is None:
                try:
                    got = eigen_multiplicities(mono.char_factors(mono.restrict(X, unit_idx)))
                except PermLikeError:
                    got = None
                if got != form.multiplicities():
                    bad_closed = {"l": ell, "k": k, "expected": form.text,
                                  "got": str(mono.char_factors(mono.restrict(X, unit_idx)))}
            if n == 1:
                continue
            verdict = is_permutation_like_element(mono.restrict(X, Vp_idx))
            nu = p_adic_valuation(k, p)
            if nu < n - a_ell:
                want = {p ** (n - nu - 1): p**nu}
                if verdict.cycle_type != want and bad_vp is None:
                    bad_vp = {"l": ell, "k": k, "expected_cycle_type": want,
                              "got": verdict.to_dict()}
            elif a_ell == 1 and verdict.permutation_like:
                ct = verdict.cycle_type
                j = ct.get(p, 0)
                if set(ct) <= {1, p} and ct.get(1, 0) == d // p - p * j:
                    observed_j.add(j)
                elif bad_vp is None:
                    bad_vp = {"l": ell, "k": k, "expected": "(x-1)^(p^(n-1)-pj)(x^p-1)^j",
                              "got": verdict.to_dict()}
    checks.append(Check("closed_form_Vstar", bad_closed is None, bad_closed or {}))

    basis = build_basis_E(G)
    bad_orbits = [o.rep for o, w in zip(basis.partition, basis.omegas) if not w.is_one()]
    sub = None
    if n > 1:
        checks.append(Check("charpoly_Vp", bad_vp is None, bad_vp or {}))
        Gp = restrict_to_Vp(G)
        rep = is_permutation_like_group(Gp)
        checks.append(Check("restriction_permutation_like", rep.permutation_like,
                            {"dimension": Gp.d, **({"witness": rep.to_dict()["witness"]}
                                                   if not rep.permutation_like else {})}))
        if a == 1:
            checks.append(Check("A_on_Vp_identity", Gp.A.is_identity(),
                                {"A|V^p": Gp.A.to_dict()} if not Gp.A.is_identity() else {}))
        if a >= 1:
            red = mono.power(Gp.A, p ** (a - 1))
            checks.append(Check("restricted_order", red.is_identity(), {"exponent": p ** (a - 1)}))
            if red.is_identity():
                sub = verify_section3(Gp)
        else:
            sub = verify_section3(Gp)
    checks.append(Check("A_permutes_E", not bad_orbits, {"orbits": bad_orbits} if bad_orbits else {}))
    return Section3Report(p, n, a, checks, sub, tuple(sorted(observed_j)))


# --------------------------------------------------------------------------
# certificates


@dataclass
class Certificate:
    group: GroupSpec
    case: int
    basis: BasisE
    generator: MonoMatrix
    """The generator that permutes E; the supplied A equals ``generator @ C^shift``."""
    shift: int
    images: dict[str, tuple[int, ...]]
    verification: dict[str, bool] = field(default_factory=dict)
    oracle: cyclooracle.VerificationResult | None = None
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def M(self) -> int:
        return self.group.M

    @property
    def C(self) -> MonoMatrix:
        return self.group.C

    @property
    def f_exps(self) -> tuple[int, ...]:
        return self.basis.prefix

    @property
    def verified(self) -> bool:
        return bool(self.verification) and all(self.verification.values())

    @property
    def oracle_checked(self) -> bool:
        return self.oracle is not None and self.oracle.ok

    def generators(self) -> Iterator[tuple[str, MonoMatrix, tuple[int, ...]]]:
        yield "C", self.group.C, self.images["C"]
        yield "A", self.group.A, self.images["A"]
        if "A_adj" in self.images:
            yield "A_adj", self.generator, self.images["A_adj"]

    def to_dict(self) -> dict:
        out = {
            "group": self.group.to_dict(),
            "case": self.case,
            "basis_order": list(self.basis.order),
            "f_exps": list(self.basis.prefix),
            "shift": self.shift,
            "perm_images": {name: list(img) for name, img in self.images.items()},
            "verified": self.verified,
            "oracle_checked": self.oracle_checked,
        }
        if self.oracle is not None:
            out["oracle"] = self.oracle.to_dict()
        if self.details:
            out["details"] = self.details
        return out

    @classmethod
    def from_dict(cls, data: dict) -> Certificate:
        """Rebuild a certificate for replay; nothing is re-derived or re-verified."""
        G = GroupSpec.from_dict(data["group"])
        shift = int(data.get("shift", 0))
        gen = mono.multiply(G.A, mono.power(G.C, -shift))
        basis = build_basis_E(G, gen)
        order = tuple(int(j) for j in data.get("basis_order", basis.order))
        f_exps = tuple(int(e) for e in data.get("f_exps", basis.prefix))
        basis = BasisE(basis.partition, basis.M, order, f_exps, basis.omegas)
        images = {name: tuple(int(x) for x in img) for name, img in data["perm_images"].items()}
        return cls(G, int(data["case"]), basis, gen, shift, images)


def _exp_column(basis: BasisE, k: int, d: int) -> list[int]:
    step = basis.M // d
    return [(basis.prefix[j] + j * k * step) % basis.M for j in range(d)]


def check_images_exact(cert: Certificate) -> dict[str, bool]:
    """``g C^k f = C^image(k) f`` for all k, compared as exponent vectors."""
    d = cert.group.d
    cols = [_exp_column(cert.basis, k, d) for k in range(d)]
    out = {}
    for name, g, image in cert.generators():
        g = g.with_modulus(cert.M)
        ok = sorted(image) == list(range(d))
        for k in range(d if ok else 0):
            moved = [0] * d
            for j in range(d):
                moved[g.sigma[j]] = (g.phase[j] + cols[k][j]) % cert.M
            if moved != cols[image[k]]:
                ok = False
                break
        out[name] = ok
    return out


def _fail(case, message, G: GroupSpec, **witness) -> CertificationError:
    return CertificationError(case, message, {"group": G.to_dict(), **witness})


def certify_group(G: GroupSpec, oracle: bool = True, report: GroupReport | None = None) -> Certificate:
    """Run the three-case pipeline and return a verified certificate.

    Raises NotPermutationLikeError when some element is not similar to a
    permutation matrix, and CertificationError when any statement the theorem
    predicts fails (which would be a counterexample).
    """
    report = report or is_permutation_like_group(G)
    if not report.permutation_like:
        raise NotPermutationLikeError(report)

    details: dict[str, Any] = {}
    cent = centralizer_of_C(G)
    if not cent.equals_cyclic:
        raise _fail("pre", "<C> is not self-centralized", G, centralizer_size=len(cent))
    if G.index != G.ord_r:
        raise _fail("pre", "|G/<C>| != ord(r)", G, index=G.index, ord_r=G.ord_r)
    dec = G.decomp
    if dec is None:
        raise _fail("pre", "no unit decomposition (p = 2)", G)
    pa = G.p**dec.a
    r_inv = G.r.inverse().value
    d = G.d

    if dec.s == 1:
        case = 1
        try:
            Gadj = adjust_generator_p_case(G)
        except SplitHypothesisError as e:
            raise _fail(case, str(e), G) from None
        sec3 = verify_section3(Gadj)
        details["section3"] = sec3.to_dict()
        if not sec3.passed:
            raise _fail(case, "p-group checks failed", G, failed=sec3.failed())
        gen, shift = Gadj.A, Gadj.shift
        basis = build_basis_E(G, gen)
    elif dec.a == 0:
        case = 2
        split = check_split_nonp_case(G)
        details["split"] = {"holds": split.holds, "expected_order": split.expected_order,
                            "order_A": split.actual_order}
        if not split.holds:
            raise _fail(case, f"A^{split.expected_order} != I", G, order_A=split.actual_order)
        basis = build_basis_E(G)
        lengths = sorted(o.length for o in basis.partition)
        if lengths != [1] + [dec.s] * ((d - 1) // dec.s):
            raise _fail(case, "orbit lengths are not 1, s, ..., s", G, lengths=lengths)
        omega0 = basis.omegas[0]
        details["omega0"] = omega0.exp
        if not omega0.is_one():
            raise _fail(case, "phase on the fixed eigenline is not 1", G, omega0=omega0.exp)
        gen, shift = G.A, 0
    else:
        case = 3
        split = check_split_nonp_case(G)
        details["split"] = {"holds": split.holds, "expected_order": split.expected_order,
                            "order_A": split.actual_order}
        if not split.holds:
            raise _fail(case, f"A^{split.expected_order} != I", G, order_A=split.actual_order)
        t = pow(dec.s, -1, pa)
        m = (1 - dec.s * t) // pa
        details["split_exponents"] = {"st": dec.s * t, "pam": pa * m, "t": t, "m": m}
        A1 = mono.power(G.A, dec.s * t)
        A2 = mono.power(G.A, pa * m)
        if mono.multiply(A1, A2) != G.A:
            raise _fail(case, "A != A^(st) A^(p^a m)", G)
        basis = build_basis_E(G)
        sub = GroupSpec(G.p, G.n, G.r ** (dec.s * t), G.M, A1)
        sec3 = verify_section3(sub)
        details["section3"] = sec3.to_dict()
        if not sec3.passed:
            raise _fail(case, "p-group checks failed for A^(st)", G, failed=sec3.failed())
        for label, X in (("A^(st)", A1), ("A^(p^a m)", A2)):
            if not in_basis_E(X, basis).is_permutation_matrix():
                raise _fail(case, f"{label} does not permute E", G)
        gen, shift = G.A, 0

    if not in_basis_E(gen, basis).is_permutation_matrix():
        raise _fail(case, "generator does not permute E", G,
                    omegas=[w.exp for w in basis.omegas])

    images = {
        "C": tuple((k + 1) % d for k in range(d)),
        "A": tuple((k + shift) * r_inv % d for k in range(d)),
    }
    if shift:
        images["A_adj"] = tuple(k * r_inv % d for k in range(d))
    cert = Certificate(G, case, basis, gen, shift, images, details=details)
    cert.verification = check_images_exact(cert)
    if not cert.verified:
        raise _fail(case, "exponent-level image check failed", G, verification=cert.verification)
    if oracle:
        cert.oracle = cyclooracle.verify_certificate(cert)
        if not cert.oracle.ok:
            raise _fail(case, "dense verification failed", G, oracle=cert.oracle.to_dict())
    return cert


def structure_checks(G: GroupSpec, report: GroupReport | None = None) -> dict[str, bool]:
    """Structure statements that hold in every permutation-like group.

    Keys: self_centralized, split_p (A'^(p^a) = I), split_nonp (A^(s p^a) = I),
    traces (trace = number of fixed points of the permutation, for every element).
    Inapplicable statements are omitted.
    """
    out: dict[str, bool] = {}
    out["self_centralized"] = centralizer_of_C(G).equals_cyclic
    dec = G.decomp
    if dec is not None and dec.s == 1:
        try:
            Gadj = adjust_generator_p_case(G)
            out["split_p"] = mono.power(Gadj.A, G.p**dec.a).is_identity()
        except SplitHypothesisError:
            out["split_p"] = False
    elif dec is not None:
        out["split_nonp"] = check_split_nonp_case(G).holds
    report = report or is_permutation_like_group(G)
    ok = True
    for x in G.enumerate_elements():
        X = G.realize(x)
        tr = cyclooracle.trace_of_exps(mono.trace_exps(X), X.M)
        ct = report.cycle_types.get(str(x))
        if ct is None or not tr.is_rational() or tr.to_rational() != ct.get(1, 0):
            ok = False
            break
    out["traces"] = ok
    return out


__all__ = [
    "BasisE",
    "Certificate",
    "Check",
    "ClosedForm",
    "NotPermutationLikeError",
    "Section3Report",
    "build_basis_E",
    "certify_group",
    "charpoly_Vstar_closed_form",
    "check_images_exact",
    "in_basis_E",
    "restrict_to_Vp",
    "structure_checks",
    "verify_section3",
]
