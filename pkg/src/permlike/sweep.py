"""Enumeration of groups <A, C> over all r and per-orbit phase assignments.

For each (p, n, r) the phase assignments are tuples with one exponent of
``zeta_M`` per mu_r-orbit (normal form: the phase sits on the orbit's last
member).  The compiled kernel classifies every tuple; the tuples it accepts
are rebuilt as GroupSpec objects, re-judged in Python, certified and checked
against the structure statements.  Anything that disagrees lands in
``violations``.

When ``M**(number of orbits)`` exceeds ``exhaustive_cap`` the sweep draws
``samples`` random tuples (seeded) and adds every translate ``A_0 C^t``
explicitly; such runs are marked ``"sampled"``.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .certify import NotPermutationLikeError, certify_group, structure_checks
from .errors import CertificationError, PermLikeError
from .numtheory import is_prime, mu_orbits, mult_order, units
from .permsim import is_permutation_like_group
from .structure import GroupSpec, default_modulus

HYPOTHESES = (
    "p is an odd prime; C is a maximal cycle of order p^n; A^-1 C A = C^r; "
    "G = <A, C> with <C> normal"
)
RECORD_FIELDS = ("p", "n", "r", "M", "phases", "source", "permutation_like", "certified", "case",
                 "witness_element", "witness_reason")


def thread_count() -> int:
    raw = os.environ.get("PERMLIKE_THREADS", "").strip()
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


@dataclass
class SweepConfig:
    p_values: tuple[int, ...]
    n_values: tuple[int, ...]
    modulus: int | None = None
    r_values: tuple[int, ...] | None = None
    explore: bool = False
    oracle: bool = True
    element_cap: int = 10_000
    exhaustive_cap: int = 2_000_000
    samples: int = 10_000
    seed: int = 0
    crosscheck_rejected: int = 20
    timing: bool = False

    def __post_init__(self) -> None:
        for p in self.p_values:
            if not is_prime(p):
                raise ValueError(f"p = {p} is not prime")
            if p == 2 and not self.explore:
                raise ValueError("p = 2 needs the exploration flag")
        if self.modulus is not None:
            for p in self.p_values:
                for n in self.n_values:
                    if self.modulus % p**n:
                        raise ValueError(f"modulus {self.modulus} is not a multiple of {p}^{n}")

    def to_dict(self) -> dict:
        return {
            "p": list(self.p_values),
            "n": list(self.n_values),
            "modulus": self.modulus,
            "r": None if self.r_values is None else list(self.r_values),
            "explore": self.explore,
            "oracle": self.oracle,
            "element_cap": self.element_cap,
            "exhaustive_cap": self.exhaustive_cap,
            "samples": self.samples,
            "seed": self.seed,
        }


@dataclass
class ResidueSummary:
    p: int
    n: int
    r: int
    M: int
    orbits: int
    total: int
    mode: str
    examined: int = 0
    permutation_like: int = 0
    rejected: int = 0
    skipped: int = 0
    certified: int = 0
    translates: int = 0
    pl_equals_translates: bool | None = None
    crosschecked: int = 0
    observed_j: list[int] = field(default_factory=list)
    seconds: float | None = None

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "seconds"}
        if self.seconds is not None:
            out["seconds"] = round(self.seconds, 3)
        return out


@dataclass
class SweepReport:
    config: SweepConfig
    summaries: list[ResidueSummary] = field(default_factory=list)
    records: list[dict] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)
    checks: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def totals(self) -> dict[str, int]:
        keys = ("examined", "permutation_like", "rejected", "skipped", "certified")
        return {k: sum(getattr(s, k) for s in self.summaries) for k in keys}

    def to_dict(self) -> dict:
        return {
            "hypotheses": HYPOTHESES,
            "config": self.config.to_dict(),
            "totals": self.totals(),
            "violations": self.violations,
            "checks": dict(sorted(self.checks.items())),
            "summaries": [s.to_dict() for s in self.summaries],
            "records": self.records,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def records_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for rec in self.records:
            row = []
            for key in RECORD_FIELDS:
                v = rec.get(key)
                if key == "phases":
                    v = " ".join(str(x) for x in v)
                elif isinstance(v, bool):
                    v = "true" if v else "false"
                elif v is None:
                    v = ""
                row.append(v)
            w.writerow(row)
        return buf.getvalue()

    def summary_text(self) -> str:
        t = self.totals()
        lines = [f"hypotheses: {HYPOTHESES}"]
        for s in self.summaries:
            lines.append(
                f"p={s.p} n={s.n} r={s.r} M={s.M} {s.mode}: examined {s.examined}, "
                f"permutation-like {s.permutation_like}, certified {s.certified}, "
                f"skipped {s.skipped}"
            )
        lines.append(
            f"total: examined {t['examined']}, permutation-like {t['permutation_like']}, "
            f"certified {t['certified']}, violations {len(self.violations)}"
        )
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Layout:
    d: int
    M: int
    r: int
    ordr: int
    lasts: np.ndarray
    orbit_of: np.ndarray
    orbit_len_of: np.ndarray
    reps: tuple[int, ...]
    sums: tuple[int, ...]


def _layout(p: int, n: int, r: int, M: int) -> _Layout:
    d = p**n
    part = mu_orbits(d, r)
    lens = [o.length for o in part]
    idx = part.orbit_index()
    return _Layout(
        d=d,
        M=M,
        r=r,
        ordr=mult_order(part.r),
        lasts=np.array([o.last for o in part], dtype=np.int64),
        orbit_of=np.array(idx, dtype=np.int64),
        orbit_len_of=np.array([lens[i] for i in idx], dtype=np.int64),
        reps=part.reps,
        sums=tuple(sum(o.members) % d for o in part),
    )


def translate_tuples(lay: _Layout) -> np.ndarray:
    """Normal-form phases of ``A_0 C^t`` for t in Z_d, deduplicated and sorted."""
    step = lay.M // lay.d
    rows = {tuple(t * s * step % lay.M for s in lay.sums) for t in range(lay.d)}
    return np.array(sorted(rows), dtype=np.int64).reshape(len(rows), len(lay.sums))


def _decode(index: int, M: int, width: int) -> tuple[int, ...]:
    out = [0] * width
    for o in range(width - 1, -1, -1):
        index, out[o] = divmod(index, M)
    return tuple(out)


def _classify_exhaustive(lay: _Layout, total: int, cap_index: int, threads: int) -> np.ndarray:
    chunk = 1 << 16
    starts = list(range(0, total, chunk))

    def run(start: int) -> np.ndarray:
        return kernels.sweep_radix(lay.d, lay.M, lay.r, lay.ordr, lay.lasts, lay.orbit_of,
                                   lay.orbit_len_of, start, min(chunk, total - start), cap_index)

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return np.concatenate(parts) if parts else np.zeros((0, 4), dtype=np.int64)


def _classify_tuples(lay: _Layout, tuples: np.ndarray, cap_index: int, threads: int) -> np.ndarray:
    chunk = 4096
    starts = list(range(0, len(tuples), chunk))

    def run(start: int) -> np.ndarray:
        return kernels.sweep_tuples(lay.d, lay.M, lay.r, lay.ordr, lay.lasts, lay.orbit_of,
                                    lay.orbit_len_of, tuples[start:start + chunk], cap_index)

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return np.concatenate(parts) if parts else np.zeros((0, 4), dtype=np.int64)


def _phases(lay: _Layout, tup) -> dict[int, int]:
    return {rep: int(e) for rep, e in zip(lay.reps, tup)}


def _record(p, n, lay, tup, source, **extra) -> dict:
    rec = {"p": p, "n": n, "r": lay.r, "M": lay.M, "phases": [int(x) for x in tup],
           "source": source}
    rec.update(extra)
    return rec


def _examine_accepted(p, n, lay, tup, source, cfg, report, summary) -> None:
    """Re-judge, certify and structure-check one configuration the kernel accepted."""
    base = dict(p=p, n=n, r=lay.r, M=lay.M, phases=[int(x) for x in tup])
    G = GroupSpec.from_phases(p, n, lay.r, _phases(lay, tup), lay.M, explore=cfg.explore)
    rep = is_permutation_like_group(G)
    if not rep.permutation_like:
        report.violations.append({**base, "kind": "kernel_disagrees", "detail": rep.to_dict()["witness"]})
        report.records.append(_record(p, n, lay, tup, source, permutation_like=False,
                                      certified=False, case=None))
        return
    rec = _record(p, n, lay, tup, source, permutation_like=True, certified=False, case=None)
    try:
        cert = certify_group(G, oracle=cfg.oracle, report=rep)
    except (CertificationError, NotPermutationLikeError, PermLikeError) as e:
        kind = "potential_counterexample" if p != 2 else "exploration_failure"
        report.violations.append({**base, "kind": kind, "detail": str(e),
                                  "witness": getattr(e, "witness", None)})
        report.records.append(rec)
        return
    rec["certified"] = cert.verified and (cert.oracle_checked or not cfg.oracle)
    rec["case"] = cert.case
    rec["oracle_checked"] = cert.oracle_checked
    if rec["certified"]:
        summary.certified += 1
    else:
        report.violations.append({**base, "kind": "certificate_unverified"})

    checks = structure_checks(G, rep)
    sec3 = cert.details.get("section3")
    if sec3 is not None:
        checks["section3"] = bool(sec3["passed"])
        for j in _collect_j(sec3):
            if j not in summary.observed_j:
                summary.observed_j.append(j)
                summary.observed_j.sort()
    rec["structure"] = checks
    for name, ok in checks.items():
        report.checks[f"{name}_checked"] = report.checks.get(f"{name}_checked", 0) + 1
        if not ok:
            report.checks[f"{name}_failed"] = report.checks.get(f"{name}_failed", 0) + 1
            report.violations.append({**base, "kind": f"structure_{name}"})
    report.records.append(rec)


def _collect_j(sec3: dict) -> list[int]:
    out = list(sec3.get("observed_j", []))
    if "restriction" in sec3:
        out += _collect_j(sec3["restriction"])
    return out


def _crosscheck_rejected(p, n, lay, tup, row, cfg, report, summary) -> None:
    """The Python element loop must reject with the kernel's witness."""
    G = GroupSpec.from_phases(p, n, lay.r, _phases(lay, tup), lay.M, explore=cfg.explore)
    rep = is_permutation_like_group(G)
    want = f"A^{int(row[2])} C^{int(row[3])}"
    summary.crosschecked += 1
    witness = rep.to_dict().get("witness", {})
    report.records.append(_record(p, n, lay, tup, "crosscheck", permutation_like=False,
                                  certified=False, case=None, witness_element=want,
                                  witness_reason=witness.get("reason")))
    if rep.permutation_like or rep.failure[0] != want:
        report.violations.append({"p": p, "n": n, "r": lay.r, "M": lay.M,
                                  "phases": [int(x) for x in tup], "kind": "kernel_disagrees",
                                  "kernel_witness": want,
                                  "python": rep.to_dict().get("witness")})


def sweep_residue(p: int, n: int, r: int, cfg: SweepConfig, report: SweepReport) -> ResidueSummary:
    d = p**n
    M = cfg.modulus or default_modulus(p, n, r)
    lay = _layout(p, n, r, M)
    norb = len(lay.reps)
    total = M**norb
    mode = "exhaustive" if total <= cfg.exhaustive_cap else "sampled"
    summary = ResidueSummary(p, n, r, M, norb, total, mode)
    t0 = time.perf_counter()
    cap_index = max(cfg.element_cap // d, 0)
    threads = thread_count()
    trans = translate_tuples(lay)
    summary.translates = len(trans)
    trans_set = {tuple(int(x) for x in row) for row in trans}

    if mode == "exhaustive":
        status = _classify_exhaustive(lay, total, cap_index, threads)
        tuples = None
        sources = None
    else:
        rng = np.random.default_rng([cfg.seed, p, n, r])
        drawn = rng.integers(0, M, size=(cfg.samples, norb), dtype=np.int64)
        tuples = np.concatenate([drawn, trans])
        sources = ["sample"] * len(drawn) + ["translate"] * len(trans)
        status = _classify_tuples(lay, tuples, cap_index, threads)

    summary.examined = len(status)
    st = status[:, 0]
    summary.permutation_like = int(np.sum(st == kernels.PERMUTATION_LIKE))
    summary.rejected = int(np.sum(st == kernels.REJECTED))
    summary.skipped = int(np.sum(st == kernels.SKIPPED))

    def tup_of(i: int) -> tuple[int, ...]:
        if tuples is None:
            return _decode(i, M, norb)
        return tuple(int(x) for x in tuples[i])

    def source_of(i: int, tup) -> str:
        if sources is not None:
            return sources[i]
        return "translate" if tup in trans_set else "exhaustive"

    accepted = [int(i) for i in np.flatnonzero(st == kernels.PERMUTATION_LIKE)]
    seen: set[tuple[int, ...]] = set()
    pl_set: set[tuple[int, ...]] = set()
    for i in accepted:
        tup = tup_of(i)
        pl_set.add(tup)
        if tup in seen:  # a random draw can repeat a translate
            continue
        seen.add(tup)
        _examine_accepted(p, n, lay, tup, source_of(i, tup), cfg, report, summary)
    summary.pl_equals_translates = pl_set == trans_set

    rejected = np.flatnonzero(st == kernels.REJECTED)[: cfg.crosscheck_rejected]
    for i in rejected:
        _crosscheck_rejected(p, n, lay, tup_of(int(i)), status[i], cfg, report, summary)
    for i in np.flatnonzero(st == kernels.SKIPPED)[:1]:
        report.records.append(_record(p, n, lay, tup_of(int(i)), "skipped",
                                      permutation_like=None, certified=False, case=None,
                                      witness_reason="element cap exceeded"))
    if cfg.timing:
        summary.seconds = time.perf_counter() - t0
    return summary


def run_sweep(cfg: SweepConfig) -> SweepReport:
    report = SweepReport(cfg)
    for p in cfg.p_values:
        for n in cfg.n_values:
            d = p**n
            rs = units(d) if cfg.r_values is None else [r % d for r in cfg.r_values if r % p]
            for r in rs:
                report.summaries.append(sweep_residue(p, n, r, cfg, report))
    return report
