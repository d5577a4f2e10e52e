"""Gaussian-state engine: correlation matrices, propagators, quench energies.

State convention: C[m, n] = <c_m^dagger c_n>.  Heisenberg evolution of the
mode operators gives c(t) = exp(-i h t) c(0), so a Schroedinger-picture state
evolves as C(t) = G(t)^dagger C(0) G(t) with G = exp(-i h t); for the real
symmetric h used here G is complex symmetric and the conjugation reads
exp(+i h t) C exp(-i h t).  Energies are <H> = sum_mn h[m,n] C[m,n].
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import mode_overlap_series, quadratic_form_series

ZERO_MODE_TOL = 1e-12


@dataclass(frozen=True)
class QuenchSchedule:
    """Step quench: evolve under h1 for t in (0, tau], under h0 afterwards."""

    tau: float = 10.0
    t_max: float = 10.0
    dt: float = 0.01

    def __post_init__(self):
        if not (0 < self.tau <= self.t_max):
            raise ValueError(f"need 0 < tau <= t_max, got tau={self.tau}, t_max={self.t_max}")
        if not (0 < self.dt <= self.tau):
            raise ValueError(f"need 0 < dt <= tau, got dt={self.dt}")

    def grid(self):
        n = int(round(self.t_max / self.dt))
        return np.arange(n + 1) * self.dt


@dataclass
class ChargeTrajectory:
    times: np.ndarray
    dE: np.ndarray
    dE_norm: np.ndarray
    bandwidth: float
    tau: float


def ground_state(spectrum):
    """Correlation matrix of the ground state: projector onto eps < 0 modes.

    Modes with |eps| below ZERO_MODE_TOL are left empty; their occupation
    does not change any stored-energy observable.
    """
    occ = spectrum.eps < -ZERO_MODE_TOL
    V = spectrum.modes[:, occ]
    return V @ V.T if occ.any() else np.zeros((spectrum.L, spectrum.L))


def evolve(C0, spectrum, t):
    """Conjugate C0 with the propagator of `spectrum` for time t.

    In the eigenbasis C(t) = exp(+i h t) C0 exp(-i h t) is a pure phase
    twist: A -> A * outer(ph, conj(ph)) with ph = exp(+i eps t).
    """
    V = spectrum.modes
    ph = np.exp(1j * spectrum.eps * t)
    A = V.T @ np.asarray(C0, dtype=complex) @ V
    return V @ (A * np.outer(ph, ph.conj())) @ V.T


def energy_of(C, h):
    """<H> = sum_mn h[m,n] C[m,n]; the imaginary residue must be round-off."""
    hm = h.matrix if hasattr(h, "matrix") else np.asarray(h)
    if hm.shape != np.shape(C):
        raise ValueError("dimension mismatch between C and h")
    total = np.sum(hm * C)
    if abs(np.imag(total)) >= 1e-8:
        raise ArithmeticError(
            f"energy has non-negligible imaginary part {np.imag(total):.3e}"
        )
    return float(np.real(total))


def _mode_frame(C0, h0, s1):
    """Weights M and frequencies for <H0>(t) under h1 evolution.

    With A = V1^T C0 V1 and B = V1^T h0 V1 (both real symmetric),
    <H0>(t) = sum_jk (A*B)_jk cos((eps_j - eps_k) t).
    """
    V1 = s1.modes
    A = V1.T @ C0 @ V1
    B = V1.T @ (h0.matrix if hasattr(h0, "matrix") else h0) @ V1
    return A * B


def energy_series(C0, h0, s1, times):
    """<H0>(t) for C0 evolving under the spectrum s1, on an arbitrary grid."""
    M = _mode_frame(np.real(C0), h0, s1)
    return quadratic_form_series(M, s1.eps, np.asarray(times, dtype=np.float64))


def delta_energy_series(h0, h1, schedule, s0=None, s1=None):
    """Stored energy dE(t) = <H0>(t) - E0 on the schedule grid.

    The state evolves under h1 up to tau; afterwards <H0> is exactly
    conserved, so the tail is the switch-off value <H0>(tau).  dE is measured
    against the t = 0 energy computed by the same kernel, making dE[0] = 0
    exact.  Normalization uses the bandwidth of the non-charging h0.
    """
    from .lattice import spectral_data

    s0 = s0 if s0 is not None else spectral_data(h0)
    s1 = s1 if s1 is not None else spectral_data(h1)
    C0 = ground_state(s0)
    M = _mode_frame(C0, h0, s1)

    times = schedule.grid()
    charging = times[times <= schedule.tau + 1e-12 * schedule.dt]
    e_charge = quadratic_form_series(M, s1.eps, charging)
    dE = np.empty(times.size)
    dE[: charging.size] = e_charge - e_charge[0]
    if charging.size < times.size:
        e_tau = quadratic_form_series(M, s1.eps, np.array([schedule.tau]))[0]
        dE[charging.size :] = e_tau - e_charge[0]

    Eb = s0.bandwidth
    if Eb <= 0:
        raise ArithmeticError("bandwidth of the reference Hamiltonian is zero")
    return ChargeTrajectory(times, dE, dE / Eb, Eb, schedule.tau)


def boundary_echo_time(spectrum, times, source=0, target=None, threshold=1e-3):
    """First time the propagator element |G(t)[target, source]| exceeds threshold.

    Tracks the column launched from `source` (default: first site) arriving at
    `target` (default: last site).  Returns inf if it never crosses within the
    sampled grid; used to flag trajectories long enough for finite-size echoes.
    """
    target = spectrum.L - 1 if target is None else target
    w = spectrum.modes[target, :] * spectrum.modes[source, :]
    D = mode_overlap_series(w, spectrum.eps, np.asarray(times, dtype=np.float64))
    hit = np.nonzero(D > threshold * threshold)[0]
    return float(times[hit[0]]) if hit.size else float("inf")


def gaussian_state_checks(C, trace_ref=None):
    """Purity, eigenvalue-range, and trace diagnostics for a correlation matrix."""
    C = np.asarray(C)
    herm_dev = float(np.max(np.abs(C - C.conj().T)))
    purity_dev = float(np.max(np.abs(C @ C - C)))
    evals = np.linalg.eigvalsh((C + C.conj().T) / 2.0)
    out = {
        "hermiticity": herm_dev,
        "purity": purity_dev,
        "eig_min": float(evals[0]),
        "eig_max": float(evals[-1]),
    }
    if trace_ref is not None:
        out["trace_drift"] = float(abs(np.trace(C).real - trace_ref))
    return out


def trajectory_invariant_report(s0, s1, schedule, n_checkpoints=6, n_tail=3):
    """Run the Gaussian-state invariant suite along one quench trajectory.

    Checks, at evenly spaced checkpoints during charging: purity
    ||C^2 - C||_max, eigenvalue range, and particle-number drift.  After the
    switch-off it evolves C(tau) under h0 and records the drift of the
    normalized stored energy, which exact conservation keeps at round-off.
    """
    h0 = s0.hamiltonian
    C0 = ground_state(s0)
    tr0 = float(np.trace(C0).real)
    Eb = s0.bandwidth
    e_ref = energy_of(C0, h0)

    worst = {"purity": 0.0, "eig_min": 0.0, "eig_max": 1.0, "trace_drift": 0.0,
             "tail_drift_norm": 0.0}
    checkpoints = np.linspace(0.0, schedule.tau, n_checkpoints)
    for t in checkpoints:
        Ct = evolve(C0, s1, t)
        chk = gaussian_state_checks(Ct, trace_ref=tr0)
        worst["purity"] = max(worst["purity"], chk["purity"])
        worst["eig_min"] = min(worst["eig_min"], chk["eig_min"])
        worst["eig_max"] = max(worst["eig_max"], chk["eig_max"])
        worst["trace_drift"] = max(worst["trace_drift"], chk["trace_drift"])

    C_tau = evolve(C0, s1, schedule.tau)
    e_tau = energy_of(C_tau, h0)
    tail = np.linspace(0.0, schedule.t_max - schedule.tau, n_tail + 1)[1:]
    for dt_post in tail:
        C_post = evolve(C_tau, s0, dt_post)
        drift = abs(energy_of(C_post, h0) - e_tau) / Eb
        worst["tail_drift_norm"] = max(worst["tail_drift_norm"], drift)

    worst["dE_tau_norm"] = (e_tau - e_ref) / Eb
    return worst
