"""Command-line harness.

Exit codes: 0 success, 2 malformed input, 3 group not permutation-like,
4 verification failure or theorem violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import monomial as mono
from .certify import (
    Certificate,
    NotPermutationLikeError,
    certify_group,
    charpoly_Vstar_closed_form,
    check_images_exact,
    verify_section3,
)
from .cyclooracle import trace_of_exps, verify_certificate
from .errors import CertificationError, PermLikeError
from .numtheory import Residue, mult_order, p_adic_valuation, units
from .permsim import eigen_multiplicities, is_permutation_like_group
from .structure import Element, GroupSpec
from .sweep import SweepConfig, run_sweep

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_NOT_PL = 3
EXIT_FAILED = 4


class MalformedInput(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def load_group(path: str, explore: bool = False) -> GroupSpec:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        data = json.loads(text)
        if explore:
            data["explore"] = True
        return GroupSpec.from_dict(data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise MalformedInput(f"cannot read group from {path}: {e}") from None


# --------------------------------------------------------------------------
# analyze


def analyze(G: GroupSpec) -> dict:
    """Everything ``analyze`` prints, as a JSON-ready dict."""
    out: dict = {"group": G.to_dict()}
    out["orbits"] = [{"rep": o.rep, "members": list(o.members)} for o in G.partition]
    dec = G.decomp
    if dec is not None:
        out["decomposition"] = {"ord_r": G.ord_r, "s": dec.s, "a": dec.a, "u": dec.u.value,
                                "v": dec.v}
    out["index"] = G.index
    out["order"] = G.order
    report = is_permutation_like_group(G)
    out["permutation_like"] = report.to_dict()
    if not report.permutation_like:
        name = report.failure[0]
        ell, k = (int(t.split("^")[1]) for t in name.split())
        X = G.realize(Element(ell, k))
        tr = trace_of_exps(mono.trace_exps(X), X.M)
        integral = tr.is_rational() and tr.to_rational().denominator == 1 and tr.to_rational() >= 0
        out["trace_witness"] = {"element": name, "trace": str(tr), "nonnegative_integer": integral}
        return out
    if dec is not None and dec.s == 1 and mono.power(G.A, G.p**dec.a).is_identity():
        out["section3"] = verify_section3(G).to_dict()
    try:
        cert = certify_group(G, oracle=True, report=report)
        out["certificate"] = cert.to_dict()
    except CertificationError as e:
        key = "exploration_note" if G.p == 2 else "certification_failure"
        out[key] = {"case": e.case, "message": str(e), "witness": e.witness}
    return out


def analyze_text(info: dict) -> str:
    lines = []
    g = info["group"]
    lines.append(f"group: p={g['p']} n={g['n']} r={g['r']} M={g['M']}")
    lines.append("orbits: " + " ".join("{" + ",".join(map(str, o["members"])) + "}"
                                       for o in info["orbits"]))
    if "decomposition" in info:
        dd = info["decomposition"]
        lines.append(f"ord(r)={dd['ord_r']}: s={dd['s']} a={dd['a']} u={dd['u']} v={dd['v']}")
    lines.append(f"|G/<C>|={info['index']} |G|={info['order']}")
    pl = info["permutation_like"]
    if pl["verdict"] != "permutation-like":
        w = pl["witness"]
        lines.append(f"not permutation-like: {w['element']} ({w['reason']}, {w['witness']})")
        tw = info["trace_witness"]
        note = "" if tw["nonnegative_integer"] else " (not a nonnegative integer)"
        lines.append(f"trace of {tw['element']}: {tw['trace']}{note}")
        return "\n".join(lines) + "\n"
    for name, ct in pl["cycle_types"].items():
        lines.append(f"  {name}: cycle type " + " ".join(f"{ln}^{c}" for ln, c in ct.items()))
    if "section3" in info:
        sec = info["section3"]
        status = ", ".join(f"{c['name']}={'pass' if c['passed'] else 'FAIL'}" for c in sec["checks"])
        lines.append(f"section checks: {status}")
    if "certificate" in info:
        cert = info["certificate"]
        state = "certified" if cert["verified"] and cert["oracle_checked"] else "NOT certified"
        lines.append(f"permutation-like: yes; case {cert['case']}; {state}")
        for name, img in cert["perm_images"].items():
            lines.append(f"  Pi({name}) = {img}")
    elif "exploration_note" in info:
        lines.append(f"permutation-like: yes; not certified ({info['exploration_note']['message']})")
    else:
        f = info["certification_failure"]
        lines.append(f"permutation-like: yes; case {f['case']}; certification FAILED: {f['message']}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    G = load_group(args.file, args.explore)
    info = analyze(G)
    sys.stdout.write(analyze_text(info))
    if args.json:
        _write(args.json, _dump(info))
    if "trace_witness" in info:
        return EXIT_NOT_PL
    if "certification_failure" in info:
        return EXIT_FAILED
    return EXIT_OK


# --------------------------------------------------------------------------
# enumerate


def cmd_enumerate(args) -> int:
    try:
        cfg = SweepConfig(
            p_values=tuple(args.p),
            n_values=tuple(args.n),
            modulus=args.modulus,
            r_values=None if args.r is None else tuple(args.r),
            explore=args.explore,
            oracle=not args.no_oracle,
            element_cap=args.element_cap,
            exhaustive_cap=args.exhaustive_cap,
            samples=args.samples,
            seed=args.seed,
            timing=args.timing,
        )
    except ValueError as e:
        raise MalformedInput(str(e)) from None
    report = run_sweep(cfg)
    if args.out:
        Path(f"{args.out}.json").write_text(report.to_json())
        Path(f"{args.out}.csv").write_text(report.records_csv())
    sys.stdout.write(report.summary_text())
    for v in report.violations:
        sys.stderr.write(f"THEOREM VIOLATION: {json.dumps(v)}\n")
    return EXIT_OK if report.ok else EXIT_FAILED


# --------------------------------------------------------------------------
# certify


def cmd_certify(args) -> int:
    if args.verify_only:
        try:
            data = json.loads(Path(args.file).read_text())
            cert = Certificate.from_dict(data)
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise MalformedInput(f"cannot read certificate from {args.file}: {e}") from None
        exact = check_images_exact(cert)
        result = verify_certificate(cert)
        out = {"exact": exact, "oracle": result.to_dict(), "ok": all(exact.values()) and result.ok}
        _write(args.out, _dump(out))
        if not out["ok"]:
            sys.stderr.write(f"verification failed: {json.dumps(result.to_dict())}\n")
            return EXIT_FAILED
        return EXIT_OK

    G = load_group(args.file, args.explore)
    try:
        cert = certify_group(G, oracle=args.oracle)
    except NotPermutationLikeError as e:
        sys.stderr.write(f"{e}\n")
        _write(args.out, _dump({"permutation_like": e.report.to_dict()}))
        return EXIT_NOT_PL
    except CertificationError as e:
        sys.stderr.write(f"POTENTIAL COUNTEREXAMPLE (case {e.case}): {e}\n")
        _write(args.out, _dump({"potential_counterexample": {"case": e.case, "message": str(e),
                                                              "witness": e.witness}}))
        return EXIT_FAILED
    _write(args.out, _dump(cert.to_dict()))
    return EXIT_OK


# --------------------------------------------------------------------------
# charpoly


def _phi_text(mult: dict[int, int]) -> str:
    parts = []
    for m in sorted(mult, reverse=True):
        e = mult[m]
        parts.append(f"Phi_{m}(x)" + (f"^{e}" if e > 1 else ""))
    return " ".join(parts)


def charpoly_rows(p: int, n: int, a: int, r: int | None = None, ks=None) -> list[dict]:
    """Computed vs closed-form char polys of ``A^l C^k`` on the unit eigenlines."""
    d = p**n
    if not 0 <= a < n:
        raise ValueError(f"need 0 <= a < n, got a={a}, n={n}")
    r = 1 + p ** (n - a) if r is None else r
    if mult_order(Residue(r % d, d)) != p**a:
        raise ValueError(f"ord(r) must be {p**a} for a={a}")
    G = GroupSpec.from_phases(p, n, r)
    if not mono.power(G.A, p**a).is_identity():
        raise ValueError("A^(p^a) != I for the chosen r")
    unit_idx = units(d)
    ks = range(d) if ks is None else ks
    rows = []
    for ell in range(1, p**a + 1):
        A_ell = mono.power(G.A, ell)
        for k in ks:
            X = mono.multiply(A_ell, mono.power(G.C, k))
            got = _phi_text(eigen_multiplicities(mono.char_factors(mono.restrict(X, unit_idx))))
            if ell % p**a == 0:
                rows.append({"l": ell, "k": k, "computed": got,
                             "closed_form": "hypothesis not applicable", "closed_form_raw": "",
                             "equal": ""})
                continue
            form = charpoly_Vstar_closed_form(p, n, a - int(p_adic_valuation(ell, p)), k)
            want = _phi_text(form.multiplicities())
            rows.append({"l": ell, "k": k, "computed": got, "closed_form": want,
                         "closed_form_raw": form.text, "equal": got == want})
    return rows


def cmd_charpoly(args) -> int:
    try:
        rows = charpoly_rows(args.p, args.n, args.a, args.r, args.k)
    except ValueError as e:
        raise MalformedInput(str(e)) from None
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["l", "k", "computed", "closed_form", "closed_form_raw",
                                        "equal"], lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({**row, "equal": {True: "true", False: "false"}.get(row["equal"], "")})
    _write(args.out, buf.getvalue())
    return EXIT_OK if all(r["equal"] is not False for r in rows) else EXIT_FAILED


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="permlike", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analyze one group given as JSON")
    a.add_argument("file")
    a.add_argument("--json", metavar="PATH", help="also write the JSON report here ('-' for stdout)")
    a.add_argument("--explore", action="store_true", help="allow p = 2")
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("enumerate", help="sweep all r and phase assignments")
    e.add_argument("--p", type=int, nargs="*", default=[3])
    e.add_argument("--n", type=int, nargs="*", default=[1])
    e.add_argument("--r", type=int, nargs="*", default=None)
    e.add_argument("--modulus", type=int, default=None)
    e.add_argument("--out", metavar="PREFIX", help="write PREFIX.json and PREFIX.csv")
    e.add_argument("--no-oracle", action="store_true")
    e.add_argument("--explore", action="store_true", help="allow p = 2")
    e.add_argument("--element-cap", type=int, default=10_000)
    e.add_argument("--exhaustive-cap", type=int, default=2_000_000)
    e.add_argument("--samples", type=int, default=10_000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--timing", action="store_true", help="record wall time (reports stop being byte-identical)")
    e.set_defaults(func=cmd_enumerate)

    c = sub.add_parser("certify", help="emit a conjugation certificate")
    c.add_argument("file")
    c.add_argument("--oracle", action="store_true", help="run the dense exact verification")
    c.add_argument("--verify-only", action="store_true", help="FILE is a certificate to re-check")
    c.add_argument("--out", default=None)
    c.add_argument("--explore", action="store_true")
    c.set_defaults(func=cmd_certify)

    h = sub.add_parser("charpoly", help="closed-form char polys on the unit eigenlines")
    h.add_argument("--p", type=int, required=True)
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--a", type=int, required=True)
    h.add_argument("--r", type=int, default=None)
    h.add_argument("--k", type=int, nargs="*", default=None)
    h.add_argument("--out", default=None)
    h.set_defaults(func=cmd_charpoly)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MalformedInput as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_MALFORMED
    except PermLikeError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_MALFORMED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
