"""Dense many-body reference for small chains.

Builds the spin-chain Hamiltonian explicitly from Pauli tensor products and
evolves dense state vectors, providing an independent check of the
free-fermion engine.  The spin normalization is fixed by requiring exact
spectral equivalence with the quadratic-fermion form (hopping -kappa, on-site
mu/2): per bond -(kappa/2)(XX + YY), per site (mu/4)(I - Z).  Site n occupies
slot n of the tensor product (site 0 leftmost); spin-up is the empty mode.
"""

from dataclasses import dataclass

import numpy as np

from .lattice import build_hamiltonian, spectral_data

MAX_SITES = 12

_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_SY = np.array([[0.0, -1.0j], [0.0 + 1.0j, 0.0]])
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
_ID = np.eye(2)
_SPLUS = np.array([[0.0, 1.0], [0.0, 0.0]])  # lowers occupation: annihilation


def _kron_chain(ops):
    out = ops[0]
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def _site_chain(L, op, n):
    return _kron_chain([op if k == n else _ID for k in range(L)])


def _check_size(L):
    if L > MAX_SITES:
        raise ValueError(f"dense oracle capped at {MAX_SITES} sites, got L={L}")


@dataclass
class ManyBodyHamiltonian:
    matrix: np.ndarray
    L: int


def build_many_body(hoppings, chain):
    """Dense 2^L spin Hamiltonian spectrally equivalent to the fermion chain."""
    _check_size(chain.L)
    L = chain.L
    if hoppings.kappa.size != L - 1:
        raise ValueError("hopping profile does not match chain size")
    dim = 2**L
    H = np.zeros((dim, dim))
    for b in range(L - 1):
        xx = _kron_chain(
            [_SX if k in (b, b + 1) else _ID for k in range(L)]
        )
        yy = np.real(
            _kron_chain([_SY if k in (b, b + 1) else _ID for k in range(L)])
        )
        H += -(hoppings.kappa[b] / 2.0) * (xx + yy)
    if chain.mu != 0.0:
        for n in range(L):
            H += (chain.mu / 4.0) * (np.eye(dim) - _site_chain(L, _SZ, n))
    return ManyBodyHamiltonian(H, L)


def subset_sums(eps):
    """All 2^L sums of subsets of the single-particle energies, sorted."""
    eps = np.asarray(eps, dtype=np.float64)
    L = eps.size
    bits = (np.arange(2**L)[:, None] >> np.arange(L)) & 1
    return np.sort(bits @ eps)


def fermion_operator(L, site):
    """Dense annihilation operator c_site with the Jordan-Wigner string."""
    _check_size(L)
    ops = [_SZ] * site + [_SPLUS] + [_ID] * (L - 1 - site)
    return _kron_chain(ops)


def exact_trajectory(h0_profile, h1_profile, chain, schedule):
    """Dense quench trajectory dE(t) = <psi(t)|H0|psi(t)> - E0.

    The state starts in the dense ground state of H0 and evolves under H1 for
    t <= tau, then under H0 (where <H0> is constant).  Returns (times, dE,
    degenerate) with `degenerate` flagging a degenerate dense ground state.
    """
    _check_size(chain.L)
    H0 = build_many_body(h0_profile, chain).matrix
    H1 = build_many_body(h1_profile, chain).matrix
    w0, U0 = np.linalg.eigh(H0)
    w1, U1 = np.linalg.eigh(H1)
    degenerate = bool(w0.size > 1 and (w0[1] - w0[0]) < 1e-10)
    psi0 = U0[:, 0]
    coeff = U1.T @ psi0

    times = schedule.grid()
    dE = np.empty(times.size)
    for i, t in enumerate(times):
        te = min(t, schedule.tau)
        psi = U1 @ (np.exp(-1j * w1 * te) * coeff)
        dE[i] = np.real(np.conj(psi) @ (H0 @ psi)) - w0[0]
    return times, dE, degenerate


def exact_anticommutator(h_profile, chain, i, j, t):
    """Scalar {c_i(t), c_j^dagger} from the dense representation.

    For a quadratic Hamiltonian the anticommutator is a multiple of the
    identity; raises if the off-identity part exceeds 1e-10.
    """
    if chain.L > 8:
        raise ValueError("exact_anticommutator capped at 8 sites")
    H = build_many_body(h_profile, chain).matrix
    w, U = np.linalg.eigh(H)
    ci = fermion_operator(chain.L, i)
    cj = fermion_operator(chain.L, j)
    phases = np.exp(-1j * w * t)
    evolve = (U * phases) @ U.conj().T
    ci_t = evolve.conj().T @ ci @ evolve
    anti = ci_t @ cj.conj().T + cj.conj().T @ ci_t
    scalar = np.trace(anti) / anti.shape[0]
    off = anti - scalar * np.eye(anti.shape[0])
    if np.max(np.abs(off)) > 1e-10:
        raise ArithmeticError(
            f"anticommutator is not a scalar (off-identity {np.max(np.abs(off)):.2e})"
        )
    return complex(scalar)


def spectrum_matches_subset_sums(hoppings, chain, tol=1e-8):
    """Max deviation between dense eigenvalues and free subset sums."""
    dense = np.linalg.eigvalsh(build_many_body(hoppings, chain).matrix)
    free = spectral_data(build_hamiltonian(hoppings, chain))
    dev = float(np.max(np.abs(np.sort(dense) - subset_sums(free.eps))))
    return dev, dev <= tol
