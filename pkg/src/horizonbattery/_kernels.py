"""Hot numeric kernels: numba-jitted with a pure-numpy fallback.

Set HORIZONBATTERY_NO_NUMBA=1 to force the numpy path (or if numba is not
installed the fallback is selected automatically).  Both implementations are
exported so the benchmark and the equivalence tests can compare them.
"""

import os

import numpy as np

_DISABLE = os.environ.get("HORIZONBATTERY_NO_NUMBA", "").strip() not in ("", "0", "false")

try:
    if _DISABLE:
        raise ImportError("numba disabled by HORIZONBATTERY_NO_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def quadratic_form_series_numpy(M, eigs, times, chunk=256):
    """E(t) = sum_jk M_jk cos((eigs_j - eigs_k) t), evaluated on a time grid.

    M must be real symmetric; the result is then exactly real.  Chunked over
    times to keep the cos/sin work arrays at chunk x L.
    """
    M = np.ascontiguousarray(M, dtype=np.float64)
    eigs = np.ascontiguousarray(eigs, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    out = np.empty(times.shape[0])
    for s in range(0, times.shape[0], chunk):
        tt = times[s : s + chunk]
        phase = np.outer(tt, eigs)
        c = np.cos(phase)
        si = np.sin(phase)
        out[s : s + chunk] = np.einsum("ti,ti->t", c @ M, c) + np.einsum(
            "ti,ti->t", si @ M, si
        )
    return out


_RESEED = 64  # steps between exact phase recomputations on uniform grids


@njit(cache=True)
def _quadratic_form_series_jit(M, eigs, times, dt, uniform, out):
    # phases are built row-by-row (rotation recurrence on uniform grids,
    # reseeded exactly every _RESEED steps); the contraction runs as chunked
    # matrix-matrix products so BLAS does the heavy lifting
    L = eigs.shape[0]
    T = times.shape[0]
    chunk = 128
    cs = np.empty((chunk, L))
    sn = np.empty((chunk, L))
    cd = np.empty(L)
    sd = np.empty(L)
    if uniform:
        for j in range(L):
            cd[j] = np.cos(eigs[j] * dt)
            sd[j] = np.sin(eigs[j] * dt)
    for start in range(0, T, chunk):
        n = min(chunk, T - start)
        for r in range(n):
            ti = start + r
            if not uniform or ti % _RESEED == 0:
                t = times[ti]
                for j in range(L):
                    cs[r, j] = np.cos(eigs[j] * t)
                    sn[r, j] = np.sin(eigs[j] * t)
            else:
                p = r - 1 if r > 0 else 0
                if r == 0:
                    t = times[ti - 1]
                    for j in range(L):
                        cs[r, j] = np.cos(eigs[j] * t)
                        sn[r, j] = np.sin(eigs[j] * t)
                    p = r
                for j in range(L):
                    cn = cs[p, j] * cd[j] - sn[p, j] * sd[j]
                    sn[r, j] = sn[p, j] * cd[j] + cs[p, j] * sd[j]
                    cs[r, j] = cn
        mc = cs[:n] @ M
        ms = sn[:n] @ M
        for r in range(n):
            acc = 0.0
            for j in range(L):
                acc += cs[r, j] * mc[r, j] + sn[r, j] * ms[r, j]
            out[start + r] = acc


def quadratic_form_series_numba(M, eigs, times):
    M = np.ascontiguousarray(M, dtype=np.float64)
    eigs = np.ascontiguousarray(eigs, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    out = np.empty(times.shape[0])
    steps = np.diff(times)
    dt = float(steps[0]) if steps.size else 0.0
    uniform = bool(steps.size and np.max(np.abs(steps - dt)) < 1e-12 * max(abs(dt), 1e-30))
    _quadratic_form_series_jit(M, eigs, times, dt, uniform, out)
    return out


def mode_overlap_series_numpy(w, eigs, times):
    """|sum_k w_k exp(-i eigs_k t)|^2 on a time grid, for real weights w."""
    w = np.asarray(w, dtype=np.float64)
    eigs = np.asarray(eigs, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    phase = np.outer(times, eigs)
    re = np.cos(phase) @ w
    im = np.sin(phase) @ w
    return re * re + im * im


@njit(cache=True)
def _mode_overlap_series_jit(w, eigs, times, dt, uniform, out):
    L = eigs.shape[0]
    c = np.empty(L)
    s = np.empty(L)
    cd = np.empty(L)
    sd = np.empty(L)
    if uniform:
        for j in range(L):
            cd[j] = np.cos(eigs[j] * dt)
            sd[j] = np.sin(eigs[j] * dt)
    for ti in range(times.shape[0]):
        if not uniform or ti % _RESEED == 0:
            t = times[ti]
            for j in range(L):
                c[j] = np.cos(eigs[j] * t)
                s[j] = np.sin(eigs[j] * t)
        else:
            for j in range(L):
                cn = c[j] * cd[j] - s[j] * sd[j]
                s[j] = s[j] * cd[j] + c[j] * sd[j]
                c[j] = cn
        re = 0.0
        im = 0.0
        for k in range(L):
            re += w[k] * c[k]
            im += w[k] * s[k]
        out[ti] = re * re + im * im


def mode_overlap_series_numba(w, eigs, times):
    w = np.ascontiguousarray(w, dtype=np.float64)
    eigs = np.ascontiguousarray(eigs, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    out = np.empty(times.shape[0])
    steps = np.diff(times)
    dt = float(steps[0]) if steps.size else 0.0
    uniform = bool(steps.size and np.max(np.abs(steps - dt)) < 1e-12 * max(abs(dt), 1e-30))
    _mode_overlap_series_jit(w, eigs, times, dt, uniform, out)
    return out


if HAS_NUMBA:
    quadratic_form_series = quadratic_form_series_numba
    mode_overlap_series = mode_overlap_series_numba
else:
    quadratic_form_series = quadratic_form_series_numpy
    mode_overlap_series = mode_overlap_series_numpy


def backend_name():
    return "numba" if HAS_NUMBA else "numpy"
