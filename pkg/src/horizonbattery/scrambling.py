"""Chaos diagnostics: propagator-element OTOCs, growth-rate fits, commutators.

The free-fermion OTOC of local fermionic probes reduces to the squared
propagator element D(t) = |<i| exp(-i h t) |j>|^2, because the equal-time
anticommutator {c_i(t), c_j^dagger} is the scalar G(t)[i, j].  Growth rates
are extracted from a least-squares line on log D over a window that ends
before the first saturation peak; with the convention C(t) ~ exp(2 lambda t)
the reported rate is half the fitted slope.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import mode_overlap_series

DEFAULT_D_LO = 1e-6
DEFAULT_D_HI = 1e-2
MIN_FIT_SAMPLES = 10

# Scan defaults: window thresholds relative to the first significant peak of
# each series, the peak being required to top PEAK_FLOOR and to dominate the
# next PEAK_LOOKAHEAD time units.  Calibrated so the fitted rate tracks the
# horizon rate x_h/2 across the scan range (see README).
REL_WINDOW = (0.05, 0.5)
PEAK_FLOOR = 1e-4
PEAK_LOOKAHEAD = 2.0


class FitWindowError(RuntimeError):
    """No valid growth window between the thresholds before saturation."""


@dataclass
class OtocSeries:
    i: int
    j: int
    times: np.ndarray
    D: np.ndarray


@dataclass
class LyapunovFit:
    lambda_fit: float
    stderr: float
    window: tuple
    n_samples: int


@dataclass
class CommutatorLadder:
    norm0: float
    entries: list = field(default_factory=list)  # (k, norm_k)

    def norms(self):
        return np.array([n for _, n in self.entries])


def otoc_series(spectrum, i, j, times):
    """D(t) = |exp(-i h t)[i, j]|^2 from the eigendecomposition."""
    L = spectrum.L
    if not (0 <= i < L and 0 <= j < L):
        raise ValueError(f"sites must lie in [0, {L}), got i={i}, j={j}")
    times = np.asarray(times, dtype=np.float64)
    w = spectrum.modes[i, :] * spectrum.modes[j, :]
    return OtocSeries(i, j, times, mode_overlap_series(w, spectrum.eps, times))


def _first_saturation(D, d_hi):
    """Index of the first local maximum at or above d_hi (else last index)."""
    for m in range(1, D.size - 1):
        if D[m] >= d_hi and D[m] >= D[m + 1]:
            return m
    return D.size - 1


def first_significant_peak(D, times, floor=PEAK_FLOOR, lookahead=PEAK_LOOKAHEAD):
    """First index whose value tops `floor` and every sample `lookahead` ahead."""
    if times.size > 1:
        steps = max(1, int(round(lookahead / (times[1] - times[0]))))
    else:
        steps = 1
    for m in range(1, D.size - 1):
        if D[m] < floor:
            continue
        if D[m] >= D[m - 1] and D[m] >= D[m : min(D.size, m + steps + 1)].max():
            return m
    return None


def _ols_line(t, y):
    n = t.size
    A = np.vstack([np.ones(n), t]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    denom = np.sum((t - t.mean()) ** 2)
    se = np.sqrt(resid @ resid / max(n - 2, 1) / denom) if denom > 0 else np.inf
    return float(coef[1]), float(se)


def fit_lyapunov(series, d_lo=DEFAULT_D_LO, d_hi=DEFAULT_D_HI, end=None):
    """Least-squares growth rate over the rise of D from d_lo to d_hi.

    The window runs from the first upward crossing of d_lo to the first
    crossing of d_hi, clipped before the first saturation peak (or before
    `end` when the caller has already located the peak), and must contain at
    least MIN_FIT_SAMPLES points.  The standard error is the larger of the
    regression error and the half-spread of refits over windows
    shrunk/expanded by 20% on each side.
    """
    D, times = series.D, series.times
    if d_lo <= 0 or d_hi <= d_lo:
        raise ValueError("need 0 < d_lo < d_hi")
    sat = _first_saturation(D, d_hi) if end is None else int(end)
    seg = D[: sat + 1]
    above_lo = np.nonzero(seg >= d_lo)[0]
    above_hi = np.nonzero(seg >= d_hi)[0]
    if not above_lo.size or not above_hi.size:
        raise FitWindowError(
            f"D never rises from {d_lo:g} to {d_hi:g} before saturation"
        )
    i_lo, i_hi = int(above_lo[0]), int(above_hi[0])
    if i_hi - i_lo + 1 < MIN_FIT_SAMPLES:
        raise FitWindowError(
            f"growth window holds {i_hi - i_lo + 1} samples, need {MIN_FIT_SAMPLES}"
        )

    slope, se = _ols_line(times[i_lo : i_hi + 1], np.log(D[i_lo : i_hi + 1]))

    width = i_hi - i_lo
    variants = []
    for dl in (-0.2, 0.0, 0.2):
        for dr in (-0.2, 0.0, 0.2):
            a = max(0, i_lo + int(round(dl * width)))
            b = min(sat, i_hi + int(round(dr * width)))
            if b - a + 1 < MIN_FIT_SAMPLES:
                continue
            with np.errstate(divide="ignore"):
                y = np.log(np.maximum(D[a : b + 1], 1e-300))
            s2, _ = _ols_line(times[a : b + 1], y)
            variants.append(s2)
    spread = (max(variants) - min(variants)) / 2 if len(variants) > 1 else 0.0
    stderr = max(se, spread) / 2.0
    return LyapunovFit(slope / 2.0, stderr, (float(times[i_lo]), float(times[i_hi])),
                       i_hi - i_lo + 1)


@dataclass
class ScanCell:
    x_h: float
    fit: LyapunovFit = None
    flagged: bool = False
    reason: str = ""
    bound_ok: bool = True


@dataclass
class LyapunovScan:
    cells: list
    slope: float
    intercept: float

    def table(self):
        rows = []
        for c in self.cells:
            if c.fit is None:
                rows.append((c.x_h, float("nan"), float("nan"), float("nan"), float("nan")))
            else:
                rows.append((c.x_h, c.fit.lambda_fit, c.fit.stderr,
                             c.fit.window[0], c.fit.window[1]))
        return rows


def lyapunov_scan(x_h_list, chain, probe=None, times=None, thresholds=None):
    """Per-x_h growth-rate fits plus the global regression 2*lambda = a*x_h + b.

    The probe defaults to (horizon edge, horizon edge + 20).  Unless absolute
    thresholds are given, each cell's window thresholds are REL_WINDOW times
    the first significant peak of its own series; cells without a significant
    peak, without a valid window, or whose fit breaks the horizon bound
    lambda <= x_h/2 * (1 + 3 stderr) are flagged and left out of the
    regression.
    """
    from .lattice import MetricProfile, build_hamiltonian, build_hoppings, horizon_edge_site, spectral_data

    if not len(x_h_list):
        raise ValueError("x_h_list must be non-empty")
    if times is None:
        times = np.arange(0.0, 60.0 + 1e-9, 0.02)
    times = np.asarray(times, dtype=np.float64)

    cells = []
    for x_h in x_h_list:
        hop = build_hoppings(MetricProfile(x_h), chain)
        s = spectral_data(build_hamiltonian(hop, chain))
        if probe is None:
            i = horizon_edge_site(hop)
            j = min(i + 20, chain.L - 1)
        else:
            i, j = probe
        series = otoc_series(s, i, j, times)
        cell = ScanCell(x_h)
        try:
            end = None
            if thresholds is None:
                pk = first_significant_peak(series.D, times)
                if pk is None:
                    raise FitWindowError(
                        f"no significant peak above {PEAK_FLOOR:g} in the sampled window"
                    )
                d_lo, d_hi = series.D[pk] * REL_WINDOW[0], series.D[pk] * REL_WINDOW[1]
                end = pk
            else:
                d_lo, d_hi = thresholds
            cell.fit = fit_lyapunov(series, d_lo, d_hi, end=end)
            cell.bound_ok = cell.fit.lambda_fit <= (x_h / 2.0) * (1 + 3 * cell.fit.stderr)
            if not cell.bound_ok:
                cell.flagged = True
                cell.reason = "horizon bound violated"
        except FitWindowError as exc:
            cell.flagged = True
            cell.reason = str(exc)
        cells.append(cell)

    good = [c for c in cells if c.fit is not None and not c.flagged]
    if len(good) >= 2:
        xs = np.array([c.x_h for c in good])
        ys = np.array([2.0 * c.fit.lambda_fit for c in good])
        A = np.vstack([np.ones(xs.size), xs]).T
        coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
        slope, intercept = float(coef[1]), float(coef[0])
    else:
        slope, intercept = float("nan"), float("nan")
    return LyapunovScan(cells, slope, intercept)


def nested_commutator_norms(h, w, k_max):
    """Maximum singular values of the iterated commutators [h, [h, ... w]].

    Computed at the single-particle level; M_0 = w, M_k = h M_{k-1} - M_{k-1} h.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    hm = h.matrix if hasattr(h, "matrix") else np.asarray(h, dtype=np.float64)
    M = np.asarray(w, dtype=np.float64)
    if M.shape != hm.shape:
        raise ValueError("probe matrix must match the Hamiltonian dimensions")
    ladder = CommutatorLadder(norm0=float(np.linalg.norm(M, 2)))
    for k in range(1, k_max + 1):
        M = hm @ M - M @ hm
        ladder.entries.append((k, float(np.linalg.norm(M, 2))))
    return ladder


def site_density_probe(L, site):
    """Unit density matrix |site><site| used as the default ladder seed."""
    w = np.zeros((L, L))
    w[site, site] = 1.0
    return w
