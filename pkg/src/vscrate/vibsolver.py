"""Double-well vibrational eigenproblem on a sinc-DVR grid and its diabatization.

The reaction coordinate R lives on a uniform grid; the Colbert-Miller kinetic
matrix plus the sampled quartic potential give a dense symmetric Hamiltonian
whose lowest four eigenstates are rotated into left/right localized pairs.
"""

import csv
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .units import HARTREE_TO_WAVENUMBER, au_to_wavenumber, wavenumber_to_au


class GridResolutionWarning(UserWarning):
    pass


class BarrierProximityWarning(UserWarning):
    pass


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class DoubleWellSpec:
    """Symmetric quartic double well; defaults follow the reference model."""

    mass: float = 1.0                    # a.u.
    barrier_frequency: float = 1000.0    # cm^-1
    barrier_height: float = 2250.0       # cm^-1
    grid_min: float = -100.0             # bohr
    grid_max: float = 100.0              # bohr
    grid_points: int = 1001

    def __post_init__(self):
        for name in ("mass", "barrier_frequency", "barrier_height"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.grid_min < self.grid_max:
            raise ValueError("grid_min must be below grid_max")
        if int(self.grid_points) != self.grid_points or self.grid_points < 3 or self.grid_points % 2 == 0:
            raise ValueError(f"grid_points must be an odd integer >= 3, got {self.grid_points}")
        if not np.isclose(self.grid_min, -self.grid_max):
            raise ValueError("grid must be symmetric about R = 0")

    @property
    def grid(self):
        return np.linspace(self.grid_min, self.grid_max, int(self.grid_points))

    @property
    def spacing(self):
        return (self.grid_max - self.grid_min) / (self.grid_points - 1)

    @property
    def well_position(self):
        """|R| of the two minima, bohr."""
        wb = wavenumber_to_au(self.barrier_frequency)
        eb = wavenumber_to_au(self.barrier_height)
        return np.sqrt(4.0 * eb / (self.mass * wb**2))


@dataclass(frozen=True)
class VibrationalSpectrum:
    """Lowest eigenpairs.  `states[i]` is psi_i sampled on `grid`, normalized so
    that spacing * sum(psi_i * psi_j) = delta_ij."""

    energies: np.ndarray     # hartree, ascending
    states: np.ndarray       # shape (n_states, n_grid)
    grid: np.ndarray

    @property
    def spacing(self):
        return self.grid[1] - self.grid[0]

    @property
    def energies_cm1(self):
        return au_to_wavenumber(self.energies)

    def inner(self, a, b, op=None):
        """<a|op|b> with op a function sampled on the grid (None = identity)."""
        w = 1.0 if op is None else op
        return float(self.spacing * np.sum(a * w * b))


@dataclass(frozen=True)
class DiabaticBasis:
    """Matter-side scalars consumed by the rate theory.

    Only `omega0` is needed by most rate formulas, so the grid states are
    optional and a basis can be built directly from numbers.
    """

    omega0: float                  # cm^-1
    v0_lr: float = 0.0             # cm^-1
    v_lr: float = 0.0              # cm^-1
    mu_ll_prime: float = 1.0       # a.u.
    epsilon_z: float = 0.0         # bohr, magnitude
    r_ll: float = float("nan")
    r_lpl_p: float = float("nan")
    grid: Optional[np.ndarray] = field(default=None, repr=False)
    nu_l: Optional[np.ndarray] = field(default=None, repr=False)
    nu_r: Optional[np.ndarray] = field(default=None, repr=False)
    nu_l_prime: Optional[np.ndarray] = field(default=None, repr=False)
    nu_r_prime: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")


def potential(R, spec):
    """V(R) = -(M wb^2/2) R^2 + (M^2 wb^4 / 16 Eb) R^4 in hartree."""
    wb = wavenumber_to_au(spec.barrier_frequency)
    eb = wavenumber_to_au(spec.barrier_height)
    M = spec.mass
    R = np.asarray(R, dtype=float)
    return -0.5 * M * wb**2 * R**2 + (M**2 * wb**4 / (16.0 * eb)) * R**4


def kinetic_matrix(n, dx, mass):
    """Colbert-Miller sinc-DVR kinetic energy on an infinite uniform grid."""
    i = np.arange(n)
    d = (i[:, None] - i[None, :]).astype(float)
    with np.errstate(divide="ignore"):
        T = (-1.0) ** np.abs(d) / (mass * dx**2 * d**2)
    T[i, i] = np.pi**2 / (6.0 * mass * dx**2)
    return T


def build_dvr_hamiltonian(spec, potential_fn: Optional[Callable] = None):
    """Dense sinc-DVR Hamiltonian (hartree).  `potential_fn(R)` overrides the
    double well, e.g. for harmonic cross-checks."""
    R = spec.grid
    dx = spec.spacing
    # the grid must resolve momenta up to ~ sqrt(2 M * 10 Eb) and contain the wells
    p_needed = np.sqrt(2.0 * spec.mass * 10.0 * wavenumber_to_au(spec.barrier_height))
    if np.pi / dx < p_needed:
        warnings.warn(
            f"grid spacing {dx:.4g} bohr resolves momenta up to {np.pi / dx:.4g} a.u., "
            f"below the {p_needed:.4g} a.u. needed near the barrier", GridResolutionWarning)
    if potential_fn is None and spec.grid_max < 1.5 * spec.well_position:
        warnings.warn(
            f"grid edge {spec.grid_max:.4g} bohr is close to the well minimum at "
            f"{spec.well_position:.4g} bohr", GridResolutionWarning)
    V = potential(R, spec) if potential_fn is None else np.asarray(potential_fn(R), dtype=float)
    H = kinetic_matrix(R.size, dx, spec.mass)
    H[np.diag_indices_from(H)] += V
    return H


def eigensolve(H, n_states, grid=None):
    H = np.asarray(H, dtype=float)
    n = H.shape[0]
    if H.shape != (n, n):
        raise ValueError("Hamiltonian must be square")
    if not 1 <= n_states <= n:
        raise ValueError(f"n_states must be in [1, {n}], got {n_states}")
    if not np.allclose(H, H.T, rtol=0, atol=1e-12 * max(1.0, np.abs(H).max())):
        raise ValueError("Hamiltonian is not symmetric")
    try:
        E, C = scipy.linalg.eigh(H, subset_by_index=[0, n_states - 1])
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise EigensolverError(
            f"symmetric eigensolver failed for a {n}x{n} matrix "
            f"(diag range {H.diagonal().min():.3e}..{H.diagonal().max():.3e}): {exc}") from exc
    if grid is None:
        grid = np.arange(n, dtype=float)
    grid = np.asarray(grid, dtype=float)
    dx = grid[1] - grid[0] if n > 1 else 1.0
    # deterministic phase: largest-magnitude component positive
    idx = np.argmax(np.abs(C), axis=0)
    C = C * np.sign(C[idx, np.arange(C.shape[1])])
    return VibrationalSpectrum(energies=E, states=(C / np.sqrt(dx)).T.copy(), grid=grid)


def solve_double_well(spec=None, n_states=4):
    spec = DoubleWellSpec() if spec is None else spec
    return eigensolve(build_dvr_hamiltonian(spec), n_states, grid=spec.grid)


def _rotate_pair(spectrum, i, j):
    a, b = spectrum.states[i], spectrum.states[j]
    R = spectrum.grid
    # <(a+b)/sqrt2|R|(a+b)/sqrt2> = <a|R|b> for a symmetric well; make it negative
    if spectrum.inner(a, b, R) > 0:
        b = -b
    left = (a + b) / np.sqrt(2.0)
    right = (a - b) / np.sqrt(2.0)
    return left, right


def diabatize(spectrum, dipole: Optional[Callable] = None, barrier_margin_cm1=0.0):
    """Rotate {nu0, nu1} and {nu2, nu3} into left/right well states.

    `dipole(R)` defaults to mu(R) = R.
    """
    if len(spectrum.energies) < 4:
        raise ValueError("diabatization needs at least four eigenstates")
    E = spectrum.energies_cm1
    if max(E[2], E[3]) > barrier_margin_cm1:
        warnings.warn(
            f"states 2,3 at {E[2]:.1f}, {E[3]:.1f} cm^-1 lie above the barrier top "
            f"(+{barrier_margin_cm1} cm^-1 margin); the pair is not tunneling-split",
            BarrierProximityWarning)
    R = spectrum.grid
    mu = R if dipole is None else np.asarray(dipole(R), dtype=float)
    nu_l, nu_r = _rotate_pair(spectrum, 0, 1)
    nu_lp, nu_rp = _rotate_pair(spectrum, 2, 3)
    r_ll = spectrum.inner(nu_l, nu_l, R)
    r_lplp = spectrum.inner(nu_lp, nu_lp, R)
    return DiabaticBasis(
        omega0=0.5 * (E[3] + E[2]) - 0.5 * (E[1] + E[0]),
        v0_lr=0.5 * (E[1] - E[0]),
        v_lr=0.5 * (E[3] - E[2]),
        mu_ll_prime=spectrum.inner(nu_lp, nu_l, mu),
        epsilon_z=abs(r_lplp - r_ll),
        r_ll=r_ll,
        r_lpl_p=r_lplp,
        grid=R,
        nu_l=nu_l,
        nu_r=nu_r,
        nu_l_prime=nu_lp,
        nu_r_prime=nu_rp,
    )


def transition_dipole_from_eigenstates(spectrum, dipole: Optional[Callable] = None):
    """mu_LL' assembled from eigenstate matrix elements under the same rotation
    `diabatize` uses; an independent route to the grid quadrature."""
    R = spectrum.grid
    mu = R if dipole is None else np.asarray(dipole(R), dtype=float)
    s = spectrum.states
    m = np.array([[spectrum.inner(s[a], s[b], mu) for b in range(4)] for a in range(4)])
    sign01 = -1.0 if spectrum.inner(s[0], s[1], R) > 0 else 1.0
    sign23 = -1.0 if spectrum.inner(s[2], s[3], R) > 0 else 1.0
    # nu_L = (0 + sign01*1)/sqrt2, nu_L' = (2 + sign23*3)/sqrt2
    return 0.5 * (m[2, 0] + sign01 * m[2, 1] + sign23 * m[3, 0] + sign01 * sign23 * m[3, 1])


def write_spectrum_csv(spectrum, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "energy_cm1"])
        for i, e in enumerate(spectrum.energies_cm1):
            w.writerow([i, f"{e:.11e}"])


def write_eigenvectors_csv(spectrum, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["R_bohr"] + [f"psi_{i}" for i in range(len(spectrum.states))])
        for k, r in enumerate(spectrum.grid):
            w.writerow([f"{r:.11e}"] + [f"{v:.11e}" for v in spectrum.states[:, k]])


__all__ = [
    "BarrierProximityWarning", "DiabaticBasis", "DoubleWellSpec", "EigensolverError",
    "GridResolutionWarning", "HARTREE_TO_WAVENUMBER", "VibrationalSpectrum",
    "build_dvr_hamiltonian", "diabatize", "eigensolve", "kinetic_matrix", "potential",
    "solve_double_well", "transition_dipole_from_eigenstates", "write_eigenvectors_csv",
    "write_spectrum_csv",
]
