"""Golden-rule rate constants for a molecular ensemble coupled to a lossy cavity.

Every frequency argument is a wavenumber.  The `convention` keyword picks how
a wavenumber becomes a rate (see `units.frequency_scale`); Boltzmann factors are
energies and do not depend on it.  Rates come back in fs^-1.

`CouplingSpec.g_c` is stored in (cm^-1)^(1/2), so that 4 N g_c^2 omega_0 is
the squared Rabi splitting in cm^-2.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import integrate, optimize

from . import units
from .spectral import QuadratureError, phonon_sigma

VARIANTS = ("aligned", "isotropic", "convolved", "lossless")


@dataclass(frozen=True)
class CouplingSpec:
    g_c: float                                      # (cm^-1)^(1/2)
    n_molecules: int = 1
    alignment: Union[str, Sequence[float]] = "aligned"   # "aligned" | "isotropic" | angles (rad)

    def __post_init__(self):
        if not self.g_c >= 0:
            raise ValueError(f"g_c must be non-negative, got {self.g_c}")
        if int(self.n_molecules) != self.n_molecules or self.n_molecules < 1:
            raise ValueError(f"n_molecules must be an integer >= 1, got {self.n_molecules}")
        if isinstance(self.alignment, str):
            if self.alignment not in ("aligned", "isotropic"):
                raise ValueError(f"alignment must be 'aligned', 'isotropic' or a list of angles, got {self.alignment!r}")
        else:
            angles = tuple(float(a) for a in self.alignment)
            if len(angles) != self.n_molecules:
                raise ValueError(f"explicit angle list has length {len(angles)}, expected n_molecules={self.n_molecules}")
            object.__setattr__(self, "alignment", angles)

    @classmethod
    def from_rabi(cls, rabi, omega0, n_reference=1, n_molecules=None, alignment="aligned"):
        """Back-solve g_c from a resonant Rabi splitting Omega_R = 2 sqrt(N omega0) g_c.

        `n_reference` is the N at which Omega_R is quoted; the returned spec
        carries `n_molecules` (default: the same N)."""
        if not rabi >= 0 or not omega0 > 0:
            raise ValueError("need rabi >= 0 and omega0 > 0")
        g = rabi / (2.0 * math.sqrt(n_reference * omega0))
        return cls(g_c=g, n_molecules=n_reference if n_molecules is None else n_molecules,
                   alignment=alignment)

    @classmethod
    def from_cavity(cls, basis, cavity, n_molecules=1, alignment="aligned"):
        """g_c = mu_LL' lambda_c / sqrt(2) from the matter dipole and the mode volume."""
        g_au = abs(basis.mu_ll_prime) * cavity.lambda_c / math.sqrt(2.0)
        return cls(g_c=g_au * math.sqrt(units.HARTREE_TO_WAVENUMBER), n_molecules=n_molecules,
                   alignment=alignment)

    def rabi_at_resonance(self, omega0):
        return 2.0 * math.sqrt(self.n_molecules * omega0) * self.g_c

    def coherent_factor(self):
        """|sum_j cos(phi_j)|^2 / N for the alignment field (N/3 averaged for isotropic)."""
        if self.alignment == "aligned":
            return float(self.n_molecules)
        if self.alignment == "isotropic":
            return 1.0 / 3.0
        s = math.fsum(math.cos(a) for a in self.alignment)
        return s * s / self.n_molecules


@dataclass(frozen=True)
class RateResult:
    k_vsc: float                     # fs^-1
    variant: str
    k0: Optional[float] = None       # fs^-1
    temperature: Optional[float] = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.k_vsc < 0:
            raise ValueError(f"negative rate {self.k_vsc}")

    @property
    def k_total(self):
        return self.k_vsc + (self.k0 or 0.0)

    @property
    def k_over_k0(self):
        if not self.k0:
            raise ValueError("k0 not supplied")
        return self.k_total / self.k0

    @property
    def delta_delta_g(self):
        if not self.k0 or self.temperature is None:
            return None
        return delta_delta_g(self.k_total, self.k0, self.temperature)


# ---------------------------------------------------------------- polaritons

def rabi_splitting(spec, omega_k, omega0):
    """sqrt((omega_k - omega0)^2 + 4 N omega_k g_c^2), cm^-1."""
    if not omega_k > 0 or not omega0 > 0:
        raise ValueError("frequencies must be positive")
    return math.sqrt((omega_k - omega0) ** 2 + 4.0 * spec.n_molecules * omega_k * spec.g_c**2)


def polariton_mixing(spec, omega_k, omega0):
    """Mixing angle phi_N and polariton energies (E_minus, E_plus), cm^-1."""
    if not omega_k > 0 or not omega0 > 0:
        raise ValueError("frequencies must be positive")
    phi = 0.5 * math.atan2(2.0 * math.sqrt(spec.n_molecules * omega_k) * spec.g_c, omega_k - omega0)
    mid = 0.5 * (omega_k + omega0)
    half = 0.5 * rabi_splitting(spec, omega_k, omega0)
    return phi, mid - half, mid + half


def thermal_occupation(omega, T, mode="boltzmann"):
    x = np.asarray(omega, dtype=float) / units.kT_wavenumber(T)
    if np.any(x <= 0):
        raise ValueError("omega must be positive")
    if mode == "boltzmann":
        out = np.exp(-x)
    elif mode == "bose":
        with np.errstate(over="ignore"):
            out = 1.0 / np.expm1(x)
    else:
        raise ValueError(f"unknown occupation mode {mode!r}")
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- FGR kernels

def lorentzian(omega, omega_c, tau_c, convention="angular"):
    """tau^-1 omega / ((omega_c^2 - omega^2)^2 + tau^-2 omega^2) in a.u. (time^3)."""
    s = units.frequency_scale(convention)
    w = np.asarray(omega, dtype=float) * s
    wc = omega_c * s
    gam = 1.0 / units.fs_to_au(tau_c)
    return gam * w / ((wc * wc - w * w) ** 2 + (gam * w) ** 2)


def collective_coefficient(spec, cavity, omega, T, occupation="boltzmann", convention="angular",
                           omega_thermal=None):
    """Per-molecule, per-N kernel 4 g_c^2 omega_c^2 L(omega) n(omega), fs^-1.

    Multiplying by N gives the aligned rate; the quadratic term of R(N) is N^2 times this."""
    s = units.frequency_scale(convention)
    g2 = spec.g_c**2 * s
    wc = cavity.omega_c * s
    n = thermal_occupation(omega if omega_thermal is None else omega_thermal, T, occupation)
    k_au = 4.0 * g2 * wc * wc * lorentzian(omega, cavity.omega_c, cavity.tau_c, convention) * n
    return units.rate_au_to_fs(k_au)


def _snapshot(basis, spec, cavity, T, **extra):
    d = {"omega0_cm1": basis.omega0, "g_c": spec.g_c, "n_molecules": spec.n_molecules,
         "omega_c_cm1": cavity.omega_c, "tau_c_fs": cavity.tau_c, "temperature_K": T}
    d.update(extra)
    return d


def k_vsc_fgr(basis, spec, cavity, T, k0=None, occupation="boltzmann", convention="angular"):
    """(1/N) |sum_j cos(phi_j)|^2 4 g_c^2 omega_c^2 L(omega0) n(omega0), coherent sum first."""
    a = collective_coefficient(spec, cavity, basis.omega0, T, occupation, convention)
    k = float(spec.coherent_factor() * a)
    return RateResult(k, "fgr", k0, T, _snapshot(basis, spec, cavity, T, convention=convention,
                                                 occupation=occupation))


def k_vsc_aligned(basis, spec, cavity, T, k0=None, occupation="boltzmann", convention="angular"):
    """4 N g_c^2 omega_c^2 tau^-1 omega0 / ((omega_c^2 - omega0^2)^2 + tau^-2 omega0^2) n(omega0)."""
    a = collective_coefficient(spec, cavity, basis.omega0, T, occupation, convention)
    return RateResult(float(spec.n_molecules * a), "aligned", k0, T,
                      _snapshot(basis, spec, cavity, T, convention=convention, occupation=occupation))


def k_vsc_isotropic(basis, spec, cavity, T, k0=None, occupation="boltzmann", convention="angular"):
    """Orientation average <|sum cos|^2> = N/3: a third of the single-molecule rate."""
    a = collective_coefficient(spec, cavity, basis.omega0, T, occupation, convention)
    return RateResult(float(a / 3.0), "isotropic", k0, T,
                      _snapshot(basis, spec, cavity, T, convention=convention, occupation=occupation))


def isotropic_monte_carlo(basis, spec, cavity, T, n_draws=100_000, seed=0, batch_size=1000,
                          occupation="boltzmann", convention="angular"):
    """Average k_vsc_fgr over random 3D dipole orientations.

    cos(phi) is the polarization component of a uniform unit vector, i.e.
    uniform on [-1, 1].  Batches draw from SeedSequence(seed).spawn(...) so the
    result is reproducible and independent of how batches are scheduled.
    Returns (mean fs^-1, standard error fs^-1, batch spawn keys)."""
    a = collective_coefficient(spec, cavity, basis.omega0, T, occupation, convention)
    N = spec.n_molecules
    n_batches = -(-n_draws // batch_size)
    children = np.random.SeedSequence(seed).spawn(n_batches)
    sums = np.empty(n_draws)
    done = 0
    for child in children:
        m = min(batch_size, n_draws - done)
        rng = np.random.default_rng(child)
        cos = rng.uniform(-1.0, 1.0, size=(m, N))
        sums[done:done + m] = cos.sum(axis=1) ** 2 / N
        done += m
    k = a * sums
    return float(k.mean()), float(k.std(ddof=1) / math.sqrt(n_draws)), [c.spawn_key for c in children]


# ---------------------------------------------------------------- phonon broadening

def gaussian(x, sigma):
    return np.exp(-0.5 * (np.asarray(x, dtype=float) / sigma) ** 2) / (math.sqrt(2.0 * math.pi) * sigma)


def _resolve_sigma(basis, bath, T, sigma):
    if sigma is None:
        if bath is None:
            raise ValueError("need either a phonon bath or an explicit sigma")
        sigma = phonon_sigma(basis, bath, T)
    if not sigma > 0 or not math.isfinite(sigma):
        raise ValueError(f"phonon broadening must be finite and positive, got {sigma}")
    return sigma


def k_vsc_convolved(basis, spec, cavity, bath=None, T=300.0, k0=None, sigma=None, n_sigma=8.0,
                    epsrel=1e-10, occupation="boltzmann", convention="angular"):
    """int d_omega k_aligned(omega) G(omega - omega0): the aligned kernel at transition
    frequency omega, weighted by the Gaussian spread of omega0.

    The Boltzmann factor stays at omega0 (it is the population of the excited
    level, not a property of the transition).  `sigma` overrides the bath."""
    sigma = _resolve_sigma(basis, bath, T, sigma)
    w0 = basis.omega0
    lo = max(w0 - n_sigma * sigma, 0.0)
    hi = w0 + n_sigma * sigma
    N = spec.n_molecules
    gam_cm = cavity.linewidth

    def f(w):
        if w <= 0:
            return 0.0
        return N * collective_coefficient(spec, cavity, w, T, occupation, convention, omega_thermal=w0) \
            * gaussian(w - w0, sigma)

    # the Lorentzian can be far narrower than the Gaussian: cut the range at its core
    cuts = sorted({lo, hi} | {p for p in (cavity.omega_c - 20 * gam_cm, cavity.omega_c,
                                          cavity.omega_c + 20 * gam_cm) if lo < p < hi})
    total, err = 0.0, 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        v, e = integrate.quad(f, a, b, epsrel=epsrel, epsabs=0.0, limit=500)
        total += v
        err += e
    if not math.isfinite(total) or err > 1e-6 * abs(total) + 1e-300:
        raise QuadratureError(f"convolution did not converge ({total:.4e} +- {err:.1e})", residual=err)
    return RateResult(total, "convolved", k0, T,
                      _snapshot(basis, spec, cavity, T, convention=convention, sigma_cm1=sigma,
                                occupation=occupation))


def k_vsc_lossless(basis, spec, cavity, bath=None, T=300.0, k0=None, sigma=None, variant="isotropic",
                   occupation="boltzmann", convention="angular"):
    """tau_c -> infinity: (2 pi / 3) N g_c^2 omega_c G(omega_c - omega0) n(omega0).

    The 1/3 is the orientational average; variant="aligned" drops it, which is
    the limit of `k_vsc_convolved`."""
    sigma = _resolve_sigma(basis, bath, T, sigma)
    s = units.frequency_scale(convention)
    g2 = spec.g_c**2 * s
    wc = cavity.omega_c * s
    G = gaussian((cavity.omega_c - basis.omega0) * s, sigma * s)
    k_au = 2.0 * math.pi * spec.n_molecules * g2 * wc * G * thermal_occupation(basis.omega0, T, occupation)
    if variant == "isotropic":
        k_au /= 3.0
    elif variant != "aligned":
        raise ValueError(f"unknown lossless variant {variant!r}")
    return RateResult(float(units.rate_au_to_fs(k_au)), "lossless", k0, T,
                      _snapshot(basis, spec, cavity, T, convention=convention, sigma_cm1=sigma,
                                lossless_variant=variant, occupation=occupation))


def compute_rate(variant, basis, spec, cavity, T, k0=None, bath=None, sigma=None, **kw):
    if variant == "aligned":
        return k_vsc_aligned(basis, spec, cavity, T, k0, **kw)
    if variant == "isotropic":
        return k_vsc_isotropic(basis, spec, cavity, T, k0, **kw)
    if variant == "fgr":
        return k_vsc_fgr(basis, spec, cavity, T, k0, **kw)
    if variant == "convolved":
        return k_vsc_convolved(basis, spec, cavity, bath, T, k0, sigma=sigma, **kw)
    if variant == "lossless":
        return k_vsc_lossless(basis, spec, cavity, bath, T, k0, sigma=sigma, variant="aligned", **kw)
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


# ---------------------------------------------------------------- observables

def delta_delta_g(k_total, k0, T):
    """-k_B T ln(k/k0) in kcal/mol; negative when the cavity speeds things up."""
    if not k_total > 0 or not k0 > 0:
        raise ValueError("rates must be positive")
    return units.wavenumber_to_kcalmol(-units.kT_wavenumber(T) * math.log(k_total / k0))


def reaction_rate_total(n, k0, coefficient):
    """R(N) = N k0 + N^2 A, with A = 4 g_c^2 omega_c^2 L n(omega0) the per-pair term."""
    n = np.asarray(n, dtype=float)
    if np.any(n < 1):
        raise ValueError("N must be >= 1")
    out = n * k0 + n * n * coefficient
    return float(out) if out.ndim == 0 else out


def loglog_slope(n, k0, coefficient):
    """d ln R / d ln N = (k0 + 2 N A) / (k0 + N A)."""
    n = np.asarray(n, dtype=float)
    if np.any(n < 1):
        raise ValueError("N must be >= 1")
    out = (k0 + 2.0 * n * coefficient) / (k0 + n * coefficient)
    return float(out) if out.ndim == 0 else out


def crossover_n(k0, coefficient):
    """N* where N k0 = N^2 A, by term equality."""
    if not coefficient > 0:
        return math.inf
    return k0 / coefficient


def crossover_n_bisection(k0, coefficient, n_lo=1.0, n_hi=None):
    """N* located where the log-log slope of R(N) crosses 3/2."""
    if not coefficient > 0:
        return math.inf
    if n_hi is None:
        n_hi = max(1e3 * k0 / coefficient, 10.0)
    g = lambda x: loglog_slope(math.exp(x), k0, coefficient) - 1.5
    lo, hi = math.log(n_lo), math.log(n_hi)
    if g(lo) > 0:
        return n_lo
    return math.exp(optimize.brentq(g, lo, hi, xtol=1e-12, rtol=1e-14))


def fit_power_law(x, y):
    """Slope and intercept of log y against log x."""
    slope, icpt = np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)
    return float(slope), float(icpt)


__all__ = [
    "CouplingSpec", "RateResult", "VARIANTS", "collective_coefficient", "compute_rate",
    "crossover_n", "crossover_n_bisection", "delta_delta_g", "fit_power_law", "gaussian",
    "isotropic_monte_carlo", "k_vsc_aligned", "k_vsc_convolved", "k_vsc_fgr", "k_vsc_isotropic",
    "k_vsc_lossless", "loglog_slope", "lorentzian", "polariton_mixing", "rabi_splitting",
    "reaction_rate_total", "thermal_occupation",
]
