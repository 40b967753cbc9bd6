from __future__ import annotations

import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from permlike import kernels
from permlike import monomial as mono
from permlike.permsim import is_permutation_like_element, is_permutation_like_group
from permlike.structure import GroupSpec, default_modulus
from permlike.sweep import _layout


def exact_det(mat) -> Fraction:
    a = [[Fraction(int(x)) for x in row] for row in mat]
    n, det = len(a), Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def test_spectral_tables_small():
    t = kernels.spectral_tables(6)
    assert list(t.div) == [1, 2, 3, 6]
    classes = [sorted(t.cls_members[t.cls_start[i]:t.cls_start[i + 1]]) for i in range(4)]
    assert classes == [[0], [3], [2, 4], [1, 5]]
    assert t.mob_dense[3, 0] == 1 and t.mob_dense[1, 0] == -1


@pytest.mark.parametrize("seed", range(5))
def test_monomial_spectrum_matches_permsim(seed):
    rng = np.random.default_rng(seed)
    for _ in range(200):
        d = int(rng.integers(1, 10))
        M = int(rng.choice([1, 2, 3, 4, 6, 9, 12]))
        sigma = rng.permutation(d)
        # bias toward permutation-like inputs: mostly zero phases
        phase = np.where(rng.random(d) < 0.7, 0, rng.integers(0, M, d))
        st, ct = kernels.monomial_spectrum(sigma, phase, M)
        v = is_permutation_like_element(mono.MonoMatrix(d, M, tuple(sigma), tuple(phase)))
        assert (st == kernels.OK) == v.permutation_like
        if v.permutation_like:
            assert ct == v.cycle_type


CASES = [(3, 1, 2), (3, 2, 4), (3, 2, 2), (3, 2, 8), (5, 1, 2), (5, 1, 4), (3, 3, 2), (3, 3, 10)]


@pytest.mark.parametrize("p, n, r", CASES)
def test_numba_and_numpy_paths_agree(p, n, r):
    M = default_modulus(p, n, r)
    lay = _layout(p, n, r, M)
    rng = np.random.default_rng(p * 1000 + n * 100 + r)
    tuples = rng.integers(0, M, size=(150, len(lay.reps)), dtype=np.int64)
    cap = 10_000 // lay.d
    args = (lay.d, M, r, lay.ordr, lay.lasts, lay.orbit_of, lay.orbit_len_of)
    fast = kernels.sweep_tuples(*args, tuples, cap, use_numba=True)
    slow = kernels.sweep_tuples(*args, tuples, cap, use_numba=False)
    assert np.array_equal(fast, slow)


@pytest.mark.parametrize("p, n, r", [(3, 1, 2), (3, 2, 4), (3, 2, 2), (5, 1, 2)])
def test_kernel_matches_python_group_check(p, n, r):
    M = default_modulus(p, n, r)
    lay = _layout(p, n, r, M)
    rng = np.random.default_rng(7)
    tuples = rng.integers(0, M, size=(60, len(lay.reps)), dtype=np.int64)
    # include the trivial assignment so at least one row is accepted
    tuples[0] = 0
    out = kernels.sweep_tuples(lay.d, M, r, lay.ordr, lay.lasts, lay.orbit_of, lay.orbit_len_of,
                               tuples, 10**6)
    for tup, (st, q, ell, k) in zip(tuples, out):
        G = GroupSpec.from_phases(p, n, r, dict(zip(lay.reps, map(int, tup))), M)
        rep = is_permutation_like_group(G)
        assert q == G.index
        if st == kernels.PERMUTATION_LIKE:
            assert rep.permutation_like
        else:
            assert st == kernels.REJECTED and not rep.permutation_like
            assert rep.failure[0] == f"A^{ell} C^{k}"


def test_radix_and_tuple_entry_points_agree():
    lay = _layout(3, 2, 4, 9)
    start, count = 1000, 500
    idx = np.arange(start, start + count)
    tuples = np.stack([(idx // 9 ** (4 - o)) % 9 for o in range(5)], axis=1)
    a = kernels.sweep_radix(lay.d, 9, 4, lay.ordr, lay.lasts, lay.orbit_of, lay.orbit_len_of,
                            start, count, 1000)
    b = kernels.sweep_tuples(lay.d, 9, 4, lay.ordr, lay.lasts, lay.orbit_of, lay.orbit_len_of,
                             tuples, 1000)
    assert np.array_equal(a, b)


def test_cap_rejects_early_failures_and_skips_the_rest():
    lay = _layout(3, 2, 4, 9)
    bad = np.array([[0, 3, 0, 0, 0]], dtype=np.int64)  # fails already at A^1
    good = np.zeros((1, 5), dtype=np.int64)
    args = (lay.d, 9, 4, lay.ordr, lay.lasts, lay.orbit_of, lay.orbit_len_of)
    for use in (True, False):
        assert kernels.sweep_tuples(*args, bad, 2, use_numba=use)[0, 0] == kernels.REJECTED
        assert kernels.sweep_tuples(*args, good, 2, use_numba=use)[0, 0] == kernels.SKIPPED
        assert kernels.sweep_tuples(*args, good, 3, use_numba=use)[0, 0] == kernels.PERMUTATION_LIKE


def test_det_mod_prime_matches_exact():
    rng = np.random.default_rng(3)
    q = 1_000_003
    for n in range(1, 7):
        for _ in range(10):
            mat = rng.integers(-5, 6, size=(n, n)).astype(np.int64)
            assert kernels.det_mod_prime(mat, q) == int(exact_det(mat)) % q
    assert kernels.det_mod_prime(np.array([[1, 2], [2, 4]], dtype=np.int64), q) == 0


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, PERMLIKE_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "import permlike; print(permlike.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
