"""Discretized curved-spacetime chain: metric, hoppings, Hamiltonian, spectrum.

The metric family shipped here is f(x) = x^2 (1 - x_h/x), evaluated in the
polynomial form x^2 - x_h*x which extends continuously to x = 0 (the raw
1 - x_h/x form is singular there).  Bond b (1-based, joining sites b and b+1)
carries the hopping f(x_b)/(4 d) with x_b the bond coordinate.

Two coordinate frames are supported:

* ``fixed``   -- x_b = (b - 1/2) d, independent of x_h.  Bonds inside the
  horizon (x_b < x_h) come out negative; this is the literal reading of the
  hopping formula and the default.
* ``horizon`` -- x_b = x_h + (b - 1/2) d, i.e. the lattice is clamped to the
  horizon exterior.  Every hopping is positive and the chain start sits at
  the horizon, which is the frame that reproduces the figure-level trends
  (see README).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

FRAMES = ("fixed", "horizon")


@dataclass(frozen=True)
class MetricProfile:
    """AdS2 black-hole metric f(x) = x^2 - x_h * x with horizon radius x_h."""

    x_h: float = 0.0

    def __post_init__(self):
        if self.x_h < 0:
            raise ValueError(f"x_h must be >= 0, got {self.x_h}")

    def value(self, x):
        if np.any(np.asarray(x) < 0):
            raise ValueError("metric is defined for x >= 0")
        return x * x - self.x_h * x

    def hawking_temperature(self):
        return self.x_h / (4.0 * np.pi)

    def lyapunov_target(self):
        return self.x_h / 2.0


def metric_eval(metric, x):
    """Evaluate the metric function at a single coordinate x >= 0."""
    return metric.value(x)


@dataclass(frozen=True)
class ChainConfig:
    L: int = 250
    d: float = 1.0
    mu: float = 0.0
    boundary: str = "open"
    frame: str = "fixed"

    def __post_init__(self):
        if self.L < 2:
            raise ValueError(f"L must be >= 2, got {self.L}")
        if self.d <= 0:
            raise ValueError(f"d must be > 0, got {self.d}")
        if self.boundary != "open":
            raise ValueError(f"only open boundary is supported, got {self.boundary!r}")
        if self.frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}, got {self.frame!r}")

    @property
    def n_bonds(self):
        return self.L - 1

    def bond_coordinates(self, x_h=0.0):
        """Coordinates of the L-1 bonds in the configured frame."""
        delta = (np.arange(1, self.L) - 0.5) * self.d
        if self.frame == "horizon":
            return x_h + delta
        return delta


@dataclass(frozen=True)
class HoppingProfile:
    kappa: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "kappa", np.asarray(self.kappa, dtype=np.float64))
        if self.kappa.ndim != 1 or self.kappa.size < 1:
            raise ValueError("kappa must be a non-empty 1-d array")


def build_hoppings(metric, chain):
    """Hopping strengths kappa[b] = f(x_b) / (4 d) for the L-1 bonds."""
    x = chain.bond_coordinates(getattr(metric, "x_h", 0.0))
    return HoppingProfile(metric.value(x) / (4.0 * chain.d))


@dataclass(frozen=True)
class SingleParticleHamiltonian:
    """Real symmetric tridiagonal L x L matrix: diag mu/2, off-diag -kappa."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "diag", np.asarray(self.diag, dtype=np.float64))
        object.__setattr__(self, "offdiag", np.asarray(self.offdiag, dtype=np.float64))
        if self.offdiag.size != self.diag.size - 1:
            raise ValueError("off-diagonal length must be L - 1")

    @property
    def L(self):
        return self.diag.size

    @property
    def matrix(self):
        h = np.zeros((self.L, self.L))
        idx = np.arange(self.L)
        h[idx, idx] = self.diag
        b = np.arange(self.L - 1)
        h[b, b + 1] = self.offdiag
        h[b + 1, b] = self.offdiag
        return h

    def scaled(self, factor):
        return SingleParticleHamiltonian(self.diag * factor, self.offdiag * factor)


def build_hamiltonian(hoppings, chain):
    if hoppings.kappa.size != chain.L - 1:
        raise ValueError(
            f"hopping profile has {hoppings.kappa.size} bonds, chain needs {chain.L - 1}"
        )
    diag = np.full(chain.L, chain.mu / 2.0)
    return SingleParticleHamiltonian(diag, -hoppings.kappa)


@dataclass
class Spectrum:
    """Eigendecomposition of a SingleParticleHamiltonian plus derived scales.

    Eigenvalues ascending; each eigenvector's sign is fixed so its
    largest-magnitude component is positive (first index on ties).
    """

    eps: np.ndarray
    modes: np.ndarray
    hamiltonian: SingleParticleHamiltonian = field(repr=False, default=None)

    @property
    def L(self):
        return self.eps.size

    @property
    def ground_energy(self):
        """Many-body ground energy: sum of the negative eigenvalues."""
        return float(self.eps[self.eps < 0].sum())

    @property
    def top_energy(self):
        """Many-body maximum energy: sum of the positive eigenvalues."""
        return float(self.eps[self.eps > 0].sum())

    @property
    def bandwidth(self):
        return self.top_energy - self.ground_energy

    @property
    def mb_norm(self):
        """Many-body operator norm max(E_top, -E_ground)."""
        return max(self.top_energy, -self.ground_energy)

    def propagator(self, t):
        """Unitary exp(-i h t) built from the eigendecomposition."""
        phases = np.exp(-1j * self.eps * t)
        return (self.modes * phases) @ self.modes.T


def _fix_mode_signs(modes):
    idx = np.argmax(np.abs(modes), axis=0)
    signs = np.sign(modes[idx, np.arange(modes.shape[1])])
    signs[signs == 0] = 1.0
    return modes * signs


def spectral_data(h):
    eps, modes = eigh_tridiagonal(h.diag, h.offdiag)
    return Spectrum(eps, _fix_mode_signs(modes), h)


def chain_spectrum(x_h, chain):
    """Convenience: metric -> hoppings -> Hamiltonian -> spectrum."""
    h = build_hamiltonian(build_hoppings(MetricProfile(x_h), chain), chain)
    return spectral_data(h)


def horizon_edge_site(hoppings):
    """Left site (0-based) of the first bond with positive hopping.

    In the horizon frame every bond is positive so this is site 0; in the
    fixed frame it is the first site outside the horizon.  Falls back to 0
    when no bond is positive.
    """
    pos = np.nonzero(hoppings.kappa > 0)[0]
    return int(pos[0]) if pos.size else 0
