"""Integer kernels for the enumeration sweep and modular determinants.

Two implementations of the per-configuration group check live here:

* ``_check_config_loop``: scalar loops with early exit, compiled by numba when
  available (see ``_accel``).
* ``check_config_numpy``: vectorized over the C-exponent k with numpy; this is
  the path used when numba is disabled.

Both decide whether every element ``A^l C^k`` of the group has a permutation
spectrum, using the same lookup tables built by ``SpectralTables``.  All
arithmetic is on int64 with moduli far below 2**31.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._accel import USE_NUMBA, jit
from .numtheory import divisors, mobius

OK = 0
NOT_RATIONAL = 1
NEGATIVE_COUNT = 2

PERMUTATION_LIKE = 0
REJECTED = 1
SKIPPED = 2


@dataclass(frozen=True)
class SpectralTables:
    """Lookup tables for roots of unity ``zeta_N**x``, x in Z_N."""

    N: int
    div: np.ndarray  # sorted divisors of N
    cls_start: np.ndarray  # CSR: exponents of order div[t] are cls_members[cls_start[t]:cls_start[t+1]]
    cls_members: np.ndarray
    mob_start: np.ndarray  # CSR over t: (u, mu(div[u]/div[t])) for div[t] | div[u], mu != 0
    mob_idx: np.ndarray
    mob_val: np.ndarray
    mob_dense: np.ndarray  # mob_dense[u, t] = mu(div[u]/div[t]) or 0


@lru_cache(maxsize=64)
def spectral_tables(N: int) -> SpectralTables:
    div = np.array(divisors(N), dtype=np.int64)
    where = {int(k): t for t, k in enumerate(div)}
    buckets: list[list[int]] = [[] for _ in div]
    for x in range(N):
        buckets[where[N // math.gcd(x, N)]].append(x)
    cls_start = np.zeros(len(div) + 1, dtype=np.int64)
    for t, b in enumerate(buckets):
        cls_start[t + 1] = cls_start[t] + len(b)
    cls_members = np.array([x for b in buckets for x in b], dtype=np.int64)

    mob_start = [0]
    mob_idx: list[int] = []
    mob_val: list[int] = []
    dense = np.zeros((len(div), len(div)), dtype=np.int64)
    for t, ell in enumerate(div):
        for u, m in enumerate(div):
            if m % ell == 0:
                mu = mobius(int(m // ell))
                if mu:
                    mob_idx.append(u)
                    mob_val.append(mu)
                    dense[u, t] = mu
        mob_start.append(len(mob_idx))
    return SpectralTables(
        N=N,
        div=div,
        cls_start=cls_start,
        cls_members=cls_members,
        mob_start=np.array(mob_start, dtype=np.int64),
        mob_idx=np.array(mob_idx, dtype=np.int64),
        mob_val=np.array(mob_val, dtype=np.int64),
        mob_dense=dense,
    )


# --------------------------------------------------------------------------
# scalar kernels


@jit
def spectrum_status(lengths, omegas, ncyc, M, N, mult, cls_start, cls_members,
                    mob_start, mob_idx, mob_val, a_buf, ct_out):
    """Classify ``prod_c (x**lengths[c] - zeta_M**omegas[c])``.

    ``mult`` (length N) must be zero on entry and is zero again on return.
    On OK, ct_out[t] holds the number of cycles of length div[t].
    """
    for c in range(ncyc):
        L = lengths[c]
        scale = N // (M * L)
        w = omegas[c]
        for i in range(L):
            mult[((w + M * i) * scale) % N] += 1

    status = 0
    ndiv = cls_start.shape[0] - 1
    for t in range(ndiv):
        first = cls_members[cls_start[t]]
        v = mult[first]
        for idx in range(cls_start[t], cls_start[t + 1]):
            x = cls_members[idx]
            if mult[x] != v:
                status = 1
            mult[x] = 0
        a_buf[t] = v
    if status != 0:
        return 1

    for t in range(ndiv):
        c = 0
        for idx in range(mob_start[t], mob_start[t + 1]):
            c += mob_val[idx] * a_buf[mob_idx[idx]]
        if c < 0:
            return 2
        ct_out[t] = c
    return 0


@jit
def monomial_cycles(sigma, phase, M, lengths, omegas, seen):
    """Cycle lengths and phase products of a monomial matrix; returns the cycle count."""
    d = sigma.shape[0]
    for j in range(d):
        seen[j] = False
    ncyc = 0
    for j in range(d):
        if seen[j]:
            continue
        L = 0
        w = 0
        x = j
        while not seen[x]:
            seen[x] = True
            w += phase[x]
            L += 1
            x = sigma[x]
        lengths[ncyc] = L
        omegas[ncyc] = w % M
        ncyc += 1
    return ncyc


@jit
def group_index(d, M, ordr, orbit_len_of, omega_of, cap_index):
    """Least q > 0 with A^q in <C>, given per-index orbit lengths and orbit phases.

    ``A^ordr`` is diagonal with entry ``(ordr / len) * omega`` at each index.
    Returns (q, c) with ``A^q = C^c``, or (-1, 0) when q would exceed cap_index.
    """
    step = M // d
    m = 1
    while ordr * m <= cap_index:
        ok = True
        c = 0
        for j in range(d):
            e = (m * (ordr // orbit_len_of[j]) * omega_of[j]) % M
            if j == 0:
                if e != 0:
                    ok = False
                    break
            elif j == 1:
                if e % step != 0:
                    ok = False
                    break
                c = e // step
            elif e != (j * c * step) % M:
                ok = False
                break
        if ok:
            return ordr * m, c
        m += 1
    return -1, 0


@jit
def _check_config_loop(d, M, r, ordr, lasts, orbit_of, orbit_len_of, tup, cap_index,
                       N, cls_start, cls_members, mob_start, mob_idx, mob_val, work):
    """Status and witness (status, q, l, k) for one phase assignment."""
    phaseA = work[0]
    phase_l = work[1]
    omega_of = work[2]
    seen = work[3]
    cyc_len = work[4]
    cyc_om = work[5]
    cyc_sum = work[6]
    om_k = work[7]
    mult = work[8]
    a_buf = work[9]
    ct = work[10]
    step = M // d

    for j in range(d):
        phaseA[j] = 0
    for o in range(lasts.shape[0]):
        phaseA[lasts[o]] = tup[o] % M
    for j in range(d):
        omega_of[j] = tup[orbit_of[j]] % M

    q, c = group_index(d, M, ordr, orbit_len_of, omega_of, cap_index)
    # past the cap a failing A^l C^k with small l still refutes the group
    limit = q if q > 0 else cap_index + 1

    for j in range(d):
        phase_l[j] = 0
    rl = 1  # r^(l-1) before the update
    for ell in range(1, limit):
        # A^l = A * A^(l-1): phase gains phaseA at sigma_{l-1}(j)
        for j in range(d):
            phase_l[j] = (phase_l[j] + phaseA[(rl * j) % d]) % M
        rl = (rl * r) % d
        for j in range(d):
            seen[j] = 0
        ncyc = 0
        for j in range(d):
            if seen[j] != 0:
                continue
            L = 0
            w = 0
            s = 0
            x = j
            while seen[x] == 0:
                seen[x] = 1
                w += phase_l[x]
                s += x
                L += 1
                x = (rl * x) % d
            cyc_len[ncyc] = L
            cyc_om[ncyc] = w % M
            cyc_sum[ncyc] = s % d
            ncyc += 1
        for k in range(d):
            for cc in range(ncyc):
                om_k[cc] = (cyc_om[cc] + k * cyc_sum[cc] * step) % M
            st = spectrum_status(cyc_len, om_k, ncyc, M, N, mult, cls_start, cls_members,
                                 mob_start, mob_idx, mob_val, a_buf, ct)
            if st != 0:
                return 1, q, ell, k
    if q < 0:
        return 2, -1, -1, -1
    return 0, q, -1, -1


@jit
def _sweep_loop(d, M, r, ordr, lasts, orbit_of, orbit_len_of, tuples, cap_index,
                N, cls_start, cls_members, mob_start, mob_idx, mob_val, out):
    nconf = tuples.shape[0]
    width = max(d, N)
    work = np.zeros((11, width), dtype=np.int64)
    for i in range(nconf):
        st, q, ell, k = _check_config_loop(d, M, r, ordr, lasts, orbit_of, orbit_len_of,
                                           tuples[i], cap_index, N, cls_start, cls_members,
                                           mob_start, mob_idx, mob_val, work)
        out[i, 0] = st
        out[i, 1] = q
        out[i, 2] = ell
        out[i, 3] = k


@jit
def _sweep_radix_loop(d, M, r, ordr, lasts, orbit_of, orbit_len_of, start, count, cap_index,
                      N, cls_start, cls_members, mob_start, mob_idx, mob_val, out):
    """Same as _sweep_loop over configurations start..start+count-1 in base-M order.

    Configuration number i has orbit o's exponent equal to digit o of i
    (most significant digit first).
    """
    norb = lasts.shape[0]
    width = max(d, N)
    work = np.zeros((11, width), dtype=np.int64)
    tup = np.zeros(norb, dtype=np.int64)
    for i in range(count):
        x = start + i
        for o in range(norb - 1, -1, -1):
            tup[o] = x % M
            x //= M
        st, q, ell, k = _check_config_loop(d, M, r, ordr, lasts, orbit_of, orbit_len_of, tup,
                                           cap_index, N, cls_start, cls_members, mob_start,
                                           mob_idx, mob_val, work)
        out[i, 0] = st
        out[i, 1] = q
        out[i, 2] = ell
        out[i, 3] = k


# --------------------------------------------------------------------------
# numpy path


def check_config_numpy(d, M, r, ordr, lasts, orbit_of, orbit_len_of, tup, cap_index, tables):
    """Vectorized counterpart of ``_check_config_loop``: all k at once per power l."""
    N = tables.N
    step = M // d
    phaseA = np.zeros(d, dtype=np.int64)
    phaseA[lasts] = np.asarray(tup, dtype=np.int64) % M
    omega_of = np.asarray(tup, dtype=np.int64)[orbit_of] % M
    js = np.arange(d, dtype=np.int64)

    diag = (ordr // orbit_len_of) * omega_of % M
    q = c = -1
    m = 1
    while ordr * m <= cap_index:
        e = m * diag % M
        if e[0] == 0 and (d == 1 or e[1] % step == 0):
            cand = e[1] // step if d > 1 else 0
            if np.array_equal(e, js * cand * step % M):
                q, c = ordr * m, cand
                break
        m += 1
    limit = q if q > 0 else cap_index + 1

    ks = np.arange(d, dtype=np.int64)
    phase_l = np.zeros(d, dtype=np.int64)
    rl = 1
    for ell in range(1, limit):
        phase_l = (phase_l + phaseA[(rl * js) % d]) % M
        rl = rl * r % d
        sigma = rl * js % d
        # cycle decomposition of j -> rl*j
        cyc_id = np.full(d, -1, dtype=np.int64)
        reps = []
        for j in range(d):
            if cyc_id[j] < 0:
                x = j
                while cyc_id[x] < 0:
                    cyc_id[x] = len(reps)
                    x = sigma[x]
                reps.append(j)
        ncyc = len(reps)
        cyc_len = np.bincount(cyc_id, minlength=ncyc)
        cyc_om = np.bincount(cyc_id, weights=phase_l, minlength=ncyc).astype(np.int64) % M
        cyc_sum = np.bincount(cyc_id, weights=js, minlength=ncyc).astype(np.int64) % d
        om = (cyc_om[None, :] + ks[:, None] * cyc_sum[None, :] * step) % M  # (k, cycle)

        # roots: for cycle c, (om + M i) * N/(M L), i < L
        owner = np.repeat(np.arange(ncyc), cyc_len)
        offs = np.concatenate([np.arange(L) for L in cyc_len])
        scale = N // (M * cyc_len[owner])
        roots = ((om[:, owner] + M * offs[None, :]) * scale[None, :]) % N  # (k, d)
        mult = np.zeros((d, N), dtype=np.int64)
        np.add.at(mult, (np.repeat(ks, d), roots.ravel()), 1)

        firsts = tables.cls_members[tables.cls_start[:-1]]
        sizes = np.diff(tables.cls_start)
        ref = np.repeat(mult[:, firsts], sizes, axis=1)
        rational = np.all(mult[:, tables.cls_members] == ref, axis=1)
        a = mult[:, firsts]
        counts = a @ tables.mob_dense
        negative = np.any(counts < 0, axis=1)
        bad = np.flatnonzero(~rational | negative)
        if bad.size:
            return 1, q, ell, int(bad[0])
    if q < 0:
        return 2, -1, -1, -1
    return 0, q, -1, -1


# --------------------------------------------------------------------------
# public entry points


def _tables_args(tables: SpectralTables):
    return (tables.N, tables.cls_start, tables.cls_members, tables.mob_start, tables.mob_idx,
            tables.mob_val)


def sweep_tuples(d, M, r, ordr, lasts, orbit_of, orbit_len_of, tuples, cap_index,
                 use_numba: bool | None = None) -> np.ndarray:
    """(status, q, l, k) per row of ``tuples`` (one exponent per orbit)."""
    use_numba = USE_NUMBA if use_numba is None else use_numba
    tables = spectral_tables(M * ordr)
    tuples = np.ascontiguousarray(tuples, dtype=np.int64)
    out = np.zeros((tuples.shape[0], 4), dtype=np.int64)
    if use_numba:
        _sweep_loop(d, M, r, ordr, lasts, orbit_of, orbit_len_of, tuples, cap_index,
                    *_tables_args(tables), out)
    else:
        for i, tup in enumerate(tuples):
            out[i] = check_config_numpy(d, M, r, ordr, lasts, orbit_of, orbit_len_of, tup,
                                        cap_index, tables)
    return out


def sweep_radix(d, M, r, ordr, lasts, orbit_of, orbit_len_of, start, count, cap_index,
                use_numba: bool | None = None) -> np.ndarray:
    use_numba = USE_NUMBA if use_numba is None else use_numba
    tables = spectral_tables(M * ordr)
    out = np.zeros((count, 4), dtype=np.int64)
    if use_numba:
        _sweep_radix_loop(d, M, r, ordr, lasts, orbit_of, orbit_len_of, start, count, cap_index,
                          *_tables_args(tables), out)
        return out
    norb = len(lasts)
    for i in range(count):
        x = start + i
        tup = np.zeros(norb, dtype=np.int64)
        for o in range(norb - 1, -1, -1):
            x, tup[o] = divmod(x, M)
        out[i] = check_config_numpy(d, M, r, ordr, lasts, orbit_of, orbit_len_of, tup,
                                    cap_index, tables)
    return out


def monomial_spectrum(sigma, phase, M) -> tuple[int, dict[int, int]]:
    """Status and cycle type of one monomial matrix through the scalar kernels."""
    sigma = np.asarray(sigma, dtype=np.int64)
    phase = np.asarray(phase, dtype=np.int64)
    d = sigma.shape[0]
    lengths = np.zeros(d, dtype=np.int64)
    omegas = np.zeros(d, dtype=np.int64)
    seen = np.zeros(d, dtype=np.bool_)
    ncyc = monomial_cycles(sigma, phase, M, lengths, omegas, seen)
    L = 1
    for x in lengths[:ncyc]:
        L = math.lcm(L, int(x))
    tables = spectral_tables(M * L)
    mult = np.zeros(tables.N, dtype=np.int64)
    a_buf = np.zeros(len(tables.div), dtype=np.int64)
    ct = np.zeros(len(tables.div), dtype=np.int64)
    st = spectrum_status(lengths, omegas, ncyc, M, tables.N, mult, tables.cls_start,
                         tables.cls_members, tables.mob_start, tables.mob_idx, tables.mob_val,
                         a_buf, ct)
    if st != OK:
        return st, {}
    return OK, {int(tables.div[t]): int(ct[t]) for t in range(len(ct)) if ct[t]}


# --------------------------------------------------------------------------
# determinants over F_q


@jit
def det_mod_prime(mat, q):
    """Determinant of an integer matrix modulo the prime q (Gaussian elimination)."""
    n = mat.shape[0]
    a = mat.copy() % q
    det = 1
    for col in range(n):
        piv = -1
        for row in range(col, n):
            if a[row, col] != 0:
                piv = row
                break
        if piv < 0:
            return 0
        if piv != col:
            for j in range(n):
                tmp = a[col, j]
                a[col, j] = a[piv, j]
                a[piv, j] = tmp
            det = (q - det) % q
        det = det * a[col, col] % q
        # inverse by Fermat
        inv = 1
        base = a[col, col]
        e = q - 2
        while e > 0:
            if e & 1:
                inv = inv * base % q
            base = base * base % q
            e >>= 1
        for row in range(col + 1, n):
            f = a[row, col] * inv % q
            if f != 0:
                for j in range(col, n):
                    a[row, j] = (a[row, j] - f * a[col, j]) % q
    return det
