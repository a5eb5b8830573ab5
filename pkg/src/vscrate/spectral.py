"""Cavity dispersion, density of states, baths and the effective spectral density.

Three routes to J_eff(omega) are provided:

* ``j_eff_closed``  -- the single-mode Lorentzian-like closed form,
* ``j_eff_angular`` -- the incident-angle integral with the normal-incidence
  singular point split off,
* ``j_eff_oracle``  -- brute force: one cavity mode plus a discretized Ohmic loss
  bath, diagonalized exactly, with the normal-mode couplings binned back into a
  spectral density.

Frequencies enter in cm^-1, lifetimes in fs; spectral densities of the cavity
are returned in atomic units.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from . import units
from .units import au_to_wavenumber, fs_to_au, wavenumber_to_au


class QuadratureError(RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularPointError(ValueError):
    """Raised when a density of states is requested exactly at its singular point."""


class PhononCutoffWarning(UserWarning):
    pass


class UnphysicalBathError(RuntimeError):
    pass


@dataclass(frozen=True)
class CavitySpec:
    omega_c: float = 1190.0                      # cm^-1, normal incidence
    tau_c: float = 100.0                         # fs
    lambda_c: float = 1.0e-3                     # a.u., sqrt(1/(eps0 V))
    refractive_index: float = 1.0
    theta_max: float = math.radians(89.99)

    def __post_init__(self):
        if not self.omega_c > 0:
            raise ValueError(f"omega_c must be positive, got {self.omega_c}")
        if not self.tau_c > 0:
            raise ValueError(f"tau_c must be positive, got {self.tau_c}")
        if self.lambda_c < 0:
            raise ValueError("lambda_c must be non-negative")
        if not self.refractive_index > 0:
            raise ValueError("refractive_index must be positive")
        if not 0 < self.theta_max < math.pi / 2:
            raise ValueError("theta_max must lie in (0, pi/2)")

    @property
    def linewidth(self):
        """Gamma_c = hbar/tau_c in cm^-1."""
        return units.linewidth_wavenumber(self.tau_c)

    @property
    def quality_factor(self):
        """Q = omega_c * tau_c, i.e. omega_c / Gamma_c."""
        return self.omega_c / self.linewidth

    @property
    def k_parallel_max(self):
        """In-plane wavevector cutoff, expressed in frequency units (c k / n_c), cm^-1."""
        return self.omega_c * math.tan(self.theta_max)


@dataclass(frozen=True)
class PhononBathSpec:
    """Drude-Lorentz bath on the reaction coordinate.

    `reorg_lambda` is an energy per bohr^2 quoted in cm^-1 (the bath couples
    linearly to R), so that epsilon_z^2 * reorg_lambda is an energy.
    """

    reorg_lambda: float
    char_gamma: float = 200.0          # cm^-1
    omega_cutoff: Optional[float] = None   # cm^-1; None -> 20 * char_gamma
    quantum_coth: bool = True

    def __post_init__(self):
        if not self.reorg_lambda >= 0:
            raise ValueError("reorg_lambda must be non-negative")
        if not self.char_gamma > 0:
            raise ValueError("char_gamma must be positive")
        if self.omega_cutoff is not None and not self.omega_cutoff > 0:
            raise ValueError("omega_cutoff must be positive")

    @property
    def cutoff(self):
        return 20.0 * self.char_gamma if self.omega_cutoff is None else self.omega_cutoff

    @classmethod
    def from_friction(cls, friction_ratio=0.1, barrier_frequency=1000.0, mass=1.0,
                      char_gamma=200.0, **kw):
        """lambda = eta * gamma / 2 with eta = friction_ratio * M * omega_b, in a.u."""
        lam_au = friction_ratio * mass * wavenumber_to_au(barrier_frequency) * wavenumber_to_au(char_gamma) / 2
        return cls(reorg_lambda=au_to_wavenumber(lam_au), char_gamma=char_gamma, **kw)


@dataclass(frozen=True)
class EffectiveSpectralDensity:
    mode: str                      # "closed" | "angular" | "oracle"
    cavity: CavitySpec
    omega: np.ndarray              # cm^-1
    values: np.ndarray             # a.u.
    normal_mode_frequencies: Optional[np.ndarray] = field(default=None, repr=False)   # cm^-1
    normal_mode_couplings: Optional[np.ndarray] = field(default=None, repr=False)     # a.u.

    @property
    def sum_rule(self):
        """sum_zeta c~_zeta^2 / (lambda_c omega_c)^2, exactly 1 for a complete transformation."""
        if self.normal_mode_couplings is None:
            raise AttributeError("sum rule only available for the normal-mode oracle")
        norm = (self.cavity.lambda_c * wavenumber_to_au(self.cavity.omega_c)) ** 2
        return float(np.sum(self.normal_mode_couplings**2) / norm)


# ---------------------------------------------------------------- dispersion

def dispersion(theta, spec):
    """Mode frequency at incident angle theta, cm^-1."""
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) >= math.pi / 2):
        raise ValueError("incident angle must satisfy |theta| < pi/2")
    out = spec.omega_c * np.sqrt(1.0 + np.tan(theta) ** 2)
    return float(out) if out.ndim == 0 else out


def dos_theta(theta, spec):
    """g(theta) = sqrt(1 + cot^2 theta) / (2 k_perp tan theta_m), k in frequency units."""
    theta = np.asarray(theta, dtype=float)
    if np.any(theta == 0):
        raise SingularPointError(
            "g(theta) diverges at normal incidence; use j_eff_angular's regularized split")
    if np.any(np.abs(theta) > spec.theta_max):
        raise ValueError("theta outside [-theta_max, theta_max]")
    out = np.sqrt(1.0 + 1.0 / np.tan(theta) ** 2) / (2.0 * spec.omega_c * math.tan(spec.theta_max))
    return float(out) if out.ndim == 0 else out


def dos_omega(omega, spec):
    """g(omega) = omega / (k_m sqrt(omega^2 - omega_c^2)) on omega_c < omega <= omega_m.

    Normalized to one over the band when k is measured in frequency units."""
    omega = np.asarray(omega, dtype=float)
    wc = spec.omega_c
    w_max = wc / math.cos(spec.theta_max)
    inside = (omega > wc) & (omega <= w_max)
    if np.any(omega == wc):
        raise SingularPointError("g(omega) has an inverse-square-root singularity at omega_c")
    out = np.zeros_like(omega)
    w = omega[inside]
    out[inside] = w / (spec.k_parallel_max * np.sqrt(w * w - wc * wc))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- baths

def j_loss(omega, tau_c):
    """Ohmic cavity-loss density alpha*omega with alpha = 1/tau_c, a.u."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("omega must be non-negative")
    out = wavenumber_to_au(omega) / fs_to_au(tau_c)
    return float(out) if out.ndim == 0 else out


def j_nu(omega, bath):
    """Drude-Lorentz phonon density 2 lambda gamma omega / (omega^2 + gamma^2)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("omega must be non-negative")
    g = bath.char_gamma
    out = 2.0 * bath.reorg_lambda * g * omega / (omega**2 + g**2)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- J_eff

def _lorentz_factor(w, wk, gamma):
    """gamma*w / ((wk^2 - w^2)^2 + gamma^2 w^2); any consistent frequency unit."""
    return gamma * w / ((wk * wk - w * w) ** 2 + (gamma * w) ** 2)


def j_eff_closed(omega, spec):
    """lambda_c^2 omega_c^2 tau^-1 omega / ((omega_c^2 - omega^2)^2 + tau^-2 omega^2), a.u."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("omega must be non-negative")
    w = wavenumber_to_au(omega)
    wc = wavenumber_to_au(spec.omega_c)
    gamma = 1.0 / fs_to_au(spec.tau_c)
    out = spec.lambda_c**2 * wc**2 * _lorentz_factor(w, wc, gamma)
    return float(out) if out.ndim == 0 else out


def singular_cutoff(theta_max):
    """Inner angle delta with sin(delta) = cot(theta_max); None below 45 degrees."""
    c = 1.0 / math.tan(theta_max)
    return math.asin(c) if c < 1.0 else None


def j_eff_angular(omega, spec, epsrel=1e-10, limit=400, return_parts=False):
    """Incident-angle integral with the theta = 0 point split off.

    J = (wc^2 lc^2 / tan tm) [csc(delta) L(wc) + int_delta^tm csc(t)/cos^4(t) L(w_k(t)) dt]

    with sin(delta) = cot(theta_m), so the boundary weight is exactly one.  The
    remaining integral is done in s = ln tan(t/2), which absorbs csc(t).  For
    theta_m <= 45 degrees the singular cell spans the whole aperture and only the
    boundary term is kept.
    """
    if np.ndim(omega):
        vals = [j_eff_angular(float(w), spec, epsrel, limit, return_parts) for w in np.ravel(omega)]
        if return_parts:
            return tuple(np.array(v) for v in zip(*vals))
        return np.array(vals).reshape(np.shape(omega))
    if omega < 0:
        raise ValueError("omega must be non-negative")
    w = wavenumber_to_au(omega)
    wc = wavenumber_to_au(spec.omega_c)
    gamma = 1.0 / fs_to_au(spec.tau_c)
    pref = spec.lambda_c**2 * wc**2
    tm = spec.theta_max
    delta = singular_cutoff(tm)
    if delta is None:
        boundary = pref * _lorentz_factor(w, wc, gamma)
        return (boundary, 0.0) if return_parts else boundary
    boundary = pref * (1.0 / math.sin(delta)) / math.tan(tm) * _lorentz_factor(w, wc, gamma)
    if w == 0.0:
        return (0.0, 0.0) if return_parts else 0.0

    def integrand(s):
        t = 2.0 * math.atan(math.exp(s))
        c = math.cos(t)
        return _lorentz_factor(w, wc / c, gamma) / c**4

    s_lo = math.log(math.tan(delta / 2))
    s_hi = math.log(math.tan(tm / 2))
    # resonance angle where w_k(theta) = w, if inside the window
    pts = []
    if w > wc:
        t_res = math.acos(wc / w)
        if delta < t_res < tm:
            pts.append(math.log(math.tan(t_res / 2)))
    val, err = integrate.quad(integrand, s_lo, s_hi, points=pts or None, limit=limit,
                              epsrel=epsrel, epsabs=0.0)
    if not np.isfinite(val) or err > max(1e-6 * abs(val), 1e-300):
        raise QuadratureError(f"angular integral did not converge (estimate {val:.3e} +- {err:.1e})",
                              residual=err)
    continuum = pref / math.tan(tm) * val
    return (boundary, continuum) if return_parts else boundary + continuum


# ---------------------------------------------------------------- normal-mode oracle

def _secular_roots(d, w, a, chunk=256, max_iter=80, rtol=1e-13):
    """All eigenvalues z and q-weights of the arrowhead matrix [[a, -c^T], [-c, diag(d)]].

    Roots solve f(z) = z - a + sum_j w_j/(d_j - z) = 0 (w = c^2, d sorted).  The
    interior root between poles d_i, d_{i+1} is found in the shifted variable
    u = z - d_i with a two-pole rational model (value and slope of each side
    matched), safeguarded by bisection.  Returns (z, 1/f'(z))."""
    n = d.size
    z = np.empty(n + 1)
    weight = np.empty(n + 1)

    tiny = np.finfo(float).tiny

    def edge(i, sign, span):
        # root at z = d_i + sign*u, u in (0, span); poles measured from d_i exactly
        D = d - d[i]

        def g(u):
            return d[i] + sign * u - a + np.sum(w / (D - sign * u))

        u = optimize.brentq(g, tiny, span, xtol=tiny, rtol=4 * np.finfo(float).eps, maxiter=500)
        return d[i] + sign * u, 1.0 / (1.0 + np.sum(w / (D - sign * u) ** 2))

    if -a + np.sum(w / d) >= 0:
        raise UnphysicalBathError("oscillator matrix has a non-positive eigenvalue")
    z[0], weight[0] = edge(0, -1.0, d[0])
    upper = max(a, d[-1]) + math.sqrt(np.sum(w)) + 1.0
    z[n], weight[n] = edge(n - 1, 1.0, upper - d[-1])

    idx = np.arange(n)
    for start in range(0, n - 1, chunk):
        I = np.arange(start, min(start + chunk, n - 1))           # left pole index
        rows = np.arange(I.size)
        left = idx[None, :] <= I[:, None]
        gap = d[I + 1] - d[I]
        # measure z from whichever pole the root sits closer to
        Dl = d[None, :] - d[I, None]
        f_mid = d[I] + 0.5 * gap - a + (w[None, :] / (Dl - 0.5 * gap[:, None])).sum(1)
        origin = np.where(f_mid > 0, I, I + 1)
        D = d[None, :] - d[origin, None]                           # exact zero at the origin pole
        p1 = D[rows, I]
        p2 = D[rows, I + 1]
        lo, hi = p1.copy(), p2.copy()
        t = 0.5 * (p1 + p2)
        act = np.arange(I.size)
        for _ in range(max_iter):
            Da, La, P1, P2, T = D[act], left[act], p1[act], p2[act], t[act]
            delta = Da - T[:, None]
            r = w[None, :] / delta
            r2 = r / delta
            psi = np.where(La, r, 0.0).sum(1)
            phi = r.sum(1) - psi
            dpsi = np.where(La, r2, 0.0).sum(1)
            dphi = r2.sum(1) - dpsi
            zz = d[origin[act]] + T
            f = zz - a + psi + phi
            hi[act] = np.where(f > 0, T, hi[act])
            lo[act] = np.where(f <= 0, T, lo[act])
            # two-pole model C + S1/(p1 - y) + S2/(p2 - y) matching value and slopes
            s1 = dpsi * (P1 - T) ** 2
            s2 = dphi * (P2 - T) ** 2
            c0 = (zz - a) + (psi - s1 / (P1 - T)) + (phi - s2 / (P2 - T))
            bq = -(c0 * (P1 + P2) + s1 + s2)
            cq = c0 * P1 * P2 + s1 * P2 + s2 * P1
            disc = np.sqrt(np.maximum(bq * bq - 4.0 * c0 * cq, 0.0))
            q = -0.5 * (bq + np.where(bq >= 0, disc, -disc))
            with np.errstate(divide="ignore", invalid="ignore"):
                ra = q / c0
                rb = cq / q
            # the model root inside (p1, p2)
            t_mod = np.where((rb > P1) & (rb < P2) & np.isfinite(rb), rb, ra)
            # f is only known to roundoff, so ~1e-13 relative in t is the floor
            done = np.abs(t_mod - T) <= rtol * np.abs(T)
            L, H = lo[act], hi[act]
            ok = (t_mod >= L) & (t_mod <= H) & np.isfinite(t_mod)
            t[act] = np.where(done, T, np.where(ok, t_mod, 0.5 * (L + H)))
            done |= (H - L) <= rtol * np.abs(T)
            act = act[~done]
            if act.size == 0:
                break
        else:
            raise UnphysicalBathError("secular equation iteration did not converge")
        delta = D - t[:, None]
        z[I + 1] = d[origin] + t
        weight[I + 1] = 1.0 / (1.0 + (w[None, :] / delta**2).sum(1))
    return z, weight


def ohmic_bath_modes(spec, n_bath, omega_range=(0.01, 6.0), tail=(300.0, 0.1)):
    """Discretize J_loss = omega/tau_c with c^2 = (2/pi) J_loss(omega) omega d_omega.

    A fraction `tail[1]` of the modes is spent on a log-spaced extension from
    omega_range[1] up to tail[0] (all in units of omega_c); the rest sit on a
    uniform midpoint grid over omega_range.  Truncating an Ohmic bath at a few
    omega_c leaves a real self-energy of order omega/tau_c * ln(...) that shifts
    the cavity peak; the sparse tail restores the Markovian limit the closed
    form assumes.  Returns frequencies (a.u.), couplings (a.u.), widths (a.u.).
    """
    wc = wavenumber_to_au(spec.omega_c)
    lo, mid = omega_range[0] * wc, omega_range[1] * wc
    n_tail = int(round(n_bath * tail[1])) if tail and tail[0] > omega_range[1] else 0
    n_fine = n_bath - n_tail
    dw = (mid - lo) / n_fine
    freqs = lo + (np.arange(n_fine) + 0.5) * dw
    widths = np.full(n_fine, dw)
    if n_tail:
        edges = np.geomspace(mid, tail[0] * wc, n_tail + 1)
        freqs = np.concatenate([freqs, np.sqrt(edges[1:] * edges[:-1])])
        widths = np.concatenate([widths, np.diff(edges)])
    alpha = 1.0 / fs_to_au(spec.tau_c)
    c2 = (2.0 / math.pi) * alpha * freqs * freqs * widths
    return freqs, np.sqrt(c2), widths


def normal_modes(spec, n_bath=20000, omega_range=(0.01, 6.0), tail=(300.0, 0.1)):
    """Normal modes of {q_k, x_zeta}.  Returns (frequencies a.u., couplings c~ a.u.)."""
    freqs, c, _ = ohmic_bath_modes(spec, n_bath, omega_range, tail)
    wc = wavenumber_to_au(spec.omega_c)
    d = freqs**2
    w = c**2
    a = wc**2 + np.sum(w / d)
    z, q_weight = _secular_roots(d, w, a)
    if np.any(z <= 0):
        raise UnphysicalBathError("oscillator matrix has a non-positive eigenvalue")
    return np.sqrt(z), spec.lambda_c * wc * np.sqrt(q_weight)


def j_eff_oracle(omega_grid, spec, n_bath=20000, broadening=None, kernel="lorentzian",
                 omega_range=(0.01, 6.0), tail=(300.0, 0.1)):
    """Brute-force J_eff from the exact normal modes of cavity + loss bath.

    `broadening` (cm^-1) is the width (HWHM for the Lorentzian, standard
    deviation for the Gaussian) of the kernel replacing each delta function;
    default is the spacing of the uniform part of the bath grid."""
    if n_bath < 1000:
        raise ValueError("n_bath must be at least 1000")
    omega_grid = np.asarray(omega_grid, dtype=float)
    if broadening is None:
        n_fine = n_bath - (int(round(n_bath * tail[1])) if tail and tail[0] > omega_range[1] else 0)
        broadening = (omega_range[1] - omega_range[0]) * spec.omega_c / n_fine
    if spec.lambda_c == 0:
        values = np.zeros_like(omega_grid)
        return EffectiveSpectralDensity("oracle", spec, omega_grid, values,
                                        np.array([]), np.array([]))
    wt, ct = normal_modes(spec, n_bath, omega_range, tail)
    wt_cm = au_to_wavenumber(wt)
    strength = 0.5 * math.pi * ct**2 / wt                     # a.u.: (pi/2) c~^2 / w~
    b = broadening
    values = np.empty_like(omega_grid)
    for k, x in enumerate(omega_grid):
        dx = x - wt_cm
        if kernel == "lorentzian":
            kern = (b / math.pi) / (dx * dx + b * b)
        elif kernel == "gaussian":
            kern = np.exp(-0.5 * (dx / b) ** 2) / (math.sqrt(2 * math.pi) * b)
        else:
            raise ValueError(f"unknown kernel {kernel!r}")
        # kernel is per cm^-1; delta(omega) in a.u. frequency -> multiply by cm^-1 per hartree
        values[k] = np.sum(strength * kern) * units.HARTREE_TO_WAVENUMBER
    return EffectiveSpectralDensity("oracle", spec, omega_grid, values, wt_cm, ct)


def tabulate(mode, omega_grid, spec, **kw):
    omega_grid = np.asarray(omega_grid, dtype=float)
    if mode == "closed":
        return EffectiveSpectralDensity("closed", spec, omega_grid, np.asarray(j_eff_closed(omega_grid, spec)))
    if mode == "angular":
        return EffectiveSpectralDensity("angular", spec, omega_grid, np.asarray(j_eff_angular(omega_grid, spec, **kw)))
    if mode == "oracle":
        return j_eff_oracle(omega_grid, spec, **kw)
    raise ValueError(f"unknown J_eff mode {mode!r}")


# ---------------------------------------------------------------- phonon broadening

def _sigma2_integrand(omega, bath, kT):
    g = bath.char_gamma
    lam = bath.reorg_lambda
    if bath.quantum_coth:
        x = 0.5 * omega / kT
        # omega * coth(x) -> 2 kT as omega -> 0
        xc = np.where(x < 1e-8, 1.0, x / np.tanh(np.where(x < 1e-8, 1.0, x)))
        return 2.0 * lam * g * (2.0 * kT) * xc / (omega**2 + g**2)
    return 2.0 * lam * g * (2.0 * kT) / (omega**2 + g**2)


def phonon_sigma(basis, bath, T, tail_tolerance=1e-3):
    """Gaussian width sigma (cm^-1) of the omega_0 fluctuation:

    sigma^2 = eps_z^2 (1/pi) int_0^cutoff J_nu(w) coth(w / 2kT) dw

    The quantum integrand decays as 1/omega, so the cutoff matters; the
    contribution of the next decade above the cutoff is checked and reported.
    """
    kT = units.kT_wavenumber(T)
    cut = bath.cutoff
    f = lambda w: float(_sigma2_integrand(np.asarray(w), bath, kT))
    g = bath.char_gamma
    if math.isinf(cut):
        main, err = integrate.quad(f, 0.0, np.inf, limit=400)
        tail = 0.0
    else:
        main, err = integrate.quad(f, 0.0, cut, points=[g, 10 * g] if cut > 10 * g else None, limit=400)
        tail = integrate.quad(f, cut, 10.0 * cut, limit=400)[0]
    if main > 0 and tail / main > tail_tolerance:
        warnings.warn(
            f"sigma integral not converged at cutoff {cut:.4g} cm^-1: the next decade adds "
            f"{tail / main:.2e} of the value (sigma would grow by <= {math.sqrt(1 + tail / main) - 1:.2e} "
            f"relative)", PhononCutoffWarning)
    return basis.epsilon_z * math.sqrt(main / math.pi)


def phonon_sigma_classical_limit(basis, bath, T):
    """Closed form for the classical integrand with infinite cutoff: eps_z sqrt(2 lambda kT)."""
    return basis.epsilon_z * math.sqrt(2.0 * bath.reorg_lambda * units.kT_wavenumber(T))


__all__ = [
    "CavitySpec", "EffectiveSpectralDensity", "PhononBathSpec", "PhononCutoffWarning",
    "QuadratureError", "SingularPointError", "UnphysicalBathError", "dispersion",
    "dos_omega", "dos_theta", "j_eff_angular", "j_eff_closed", "j_eff_oracle", "j_loss",
    "j_nu", "normal_modes", "ohmic_bath_modes", "phonon_sigma",
    "phonon_sigma_classical_limit", "singular_cutoff", "tabulate",
]
