"""Four-state kinetic scheme G -> nu'_L -> nu'_R -> nu_R and its steady-state limit."""

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply

STATE_LABELS = ("P_G", "P_nuL", "P_nuR_ex", "P_nuR")


class KineticsError(RuntimeError):
    pass


@dataclass(frozen=True)
class KineticScheme:
    k1: float                                  # fs^-1
    k2: float
    k3: float
    initial: tuple = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        for name in ("k1", "k2", "k3"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")
        p = np.asarray(self.initial, dtype=float)
        if p.shape != (4,) or np.any(p < 0) or np.any(p > 1) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"initial populations must be a probability 4-vector, got {self.initial}")
        object.__setattr__(self, "initial", tuple(float(x) for x in p))

    @property
    def generator(self):
        """dP/dt = K P; columns sum to zero."""
        k1, k2, k3 = self.k1, self.k2, self.k3
        return np.array([
            [-k1, 0.0, 0.0, 0.0],
            [k1, -k2, 0.0, 0.0],
            [0.0, k2, -k3, 0.0],
            [0.0, 0.0, k3, 0.0],
        ])


@dataclass(frozen=True)
class PopulationTrajectory:
    times: np.ndarray                 # fs
    populations: np.ndarray           # (n_times, 4)
    method: str
    scheme: Optional[KineticScheme] = field(default=None, repr=False)

    def __post_init__(self):
        drift = np.max(np.abs(self.populations.sum(axis=1) - 1.0)) if self.populations.size else 0.0
        if drift > 1e-9:
            raise KineticsError(f"probability not conserved (max drift {drift:.2e})")

    def __getitem__(self, label):
        return self.populations[:, STATE_LABELS.index(label)]


def _step_propagator(K, dt):
    # columns of expm(dt K) from its action on the unit vectors.  Not an
    # eigendecomposition (K is defective when rates coincide), and not
    # scipy.linalg.expm, which loses ~1e-2 when two rates nearly coincide.
    E = expm_multiply(dt * K, np.eye(K.shape[0]))
    return np.clip(E, 0.0, None)


def _expm_populations(scheme, times):
    """Step the exact one-interval propagator along `times`.

    The propagator is a nonnegative matrix, so repeated products carry no
    cancellation and small populations keep their relative accuracy."""
    K = scheme.generator
    P = np.empty((times.size, 4))
    p = np.asarray(scheme.initial, dtype=float)
    if times[0] != 0.0:
        p = _step_propagator(K, times[0]) @ p
    P[0] = p
    E, last_dt = None, None
    for i in range(1, times.size):
        dt = times[i] - times[i - 1]
        if dt < 0:
            raise ValueError("times must be nondecreasing")
        if last_dt is None or not math.isclose(dt, last_dt, rel_tol=1e-12):
            E, last_dt = _step_propagator(K, dt), dt
        p = E @ p
        P[i] = p
    return np.clip(P, 0.0, 1.0)


def _adaptive_populations(scheme, times, rtol=1e-13, atol=1e-16):
    K = scheme.generator
    sol = solve_ivp(lambda t, p: K @ p, (0.0, float(times[-1])), np.asarray(scheme.initial),
                    method="DOP853", t_eval=times, rtol=rtol, atol=atol)
    if not sol.success:
        raise KineticsError(f"adaptive integration failed: {sol.message}")
    return np.clip(sol.y.T, 0.0, 1.0)


def integrate_scheme(scheme, t_max, n_points=2001, method="expm", times=None):
    """Populations on a uniform grid [0, t_max] (or on `times`)."""
    if times is None:
        if not t_max > 0:
            raise ValueError("t_max must be positive")
        times = np.linspace(0.0, t_max, int(n_points))
    times = np.asarray(times, dtype=float)
    if method == "expm":
        P = _expm_populations(scheme, times)
    elif method == "adaptive":
        P = _adaptive_populations(scheme, times)
    else:
        raise ValueError(f"unknown method {method!r}")
    return PopulationTrajectory(times, P, method, scheme)


@dataclass(frozen=True)
class RateFit:
    rate: float           # fs^-1
    residual: float       # rms of the log-linear fit
    window: tuple         # fs
    observable: str


def effective_rate_fit(traj, observable="product", t_start=None, floor=1e-12):
    """Overall rate from a log-linear fit after the transient.

    observable="product" fits the survival 1 - P_nuR (what an experiment sees
    as disappearance of reactant into product); "reactant" fits P_G alone.
    The window starts at 5/min(k2, k3) by default and ends where the survival
    drops below `floor`."""
    t = traj.times
    if observable == "product":
        # 1 - P_nuR, summed directly so the tail keeps its relative accuracy
        surv = traj["P_G"] + traj["P_nuL"] + traj["P_nuR_ex"]
    elif observable == "reactant":
        surv = traj["P_G"]
    else:
        raise ValueError(f"unknown observable {observable!r}")
    s0 = surv[0]
    if not s0 > 0:
        raise KineticsError("nothing to decay: initial survival is zero")
    if surv[-1] > s0 / math.e:
        raise KineticsError(f"survival only fell to {surv[-1] / s0:.3f} of its initial value; increase t_max")
    if t_start is None:
        t_start = 0.0
        if traj.scheme is not None and observable == "product":
            slow = min(traj.scheme.k2, traj.scheme.k3)
            if slow > 0:
                t_start = 5.0 / slow
    mask = (t >= t_start) & (surv > floor * s0)
    if mask.sum() < 3:
        raise KineticsError(f"fewer than 3 points in the fit window starting at {t_start:.4g} fs")
    x, y = t[mask], np.log(surv[mask])
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
    return RateFit(float(-slope), resid, (float(x[0]), float(x[-1])), observable)


@dataclass(frozen=True)
class SteadyStateReport:
    satisfied: bool
    window: Optional[tuple]
    max_violation: float          # max |dP_nuL/dt| / (k1 P_G) over the window
    ratio_error: float            # max |P_nuL / ((k1/k2) P_G) - 1| over the window
    message: str


def steady_state_check(traj, scheme, tolerance=0.05):
    """Is the first intermediate in a quasi-steady state, P_nuL ~ (k1/k2) P_G?"""
    P_G, P_L = traj["P_G"], traj["P_nuL"]
    k1, k2 = scheme.k1, scheme.k2
    if scheme.initial[0] == 0.0 or k1 == 0.0:
        return SteadyStateReport(True, None, 0.0, 0.0, "no reactant flux: trivially stationary")
    if k2 <= k1:
        return SteadyStateReport(
            False, None, math.inf, math.inf,
            f"k2={k2:.3g} <= k1={k1:.3g}: the intermediate accumulates, no plateau")
    t = traj.times
    t_start = 5.0 / (k2 - k1)
    mask = (t >= t_start) & (P_G > 1e-10)
    if mask.sum() < 2:
        return SteadyStateReport(False, None, math.inf, math.inf,
                                 f"trajectory ends before the plateau window opens at {t_start:.4g} fs")
    dPL = k1 * P_G - k2 * P_L
    viol = float(np.max(np.abs(dPL[mask]) / (k1 * P_G[mask])))
    ratio = float(np.max(np.abs(P_L[mask] / ((k1 / k2) * P_G[mask]) - 1.0)))
    ok = viol <= tolerance and ratio <= tolerance
    msg = (f"plateau over [{t[mask][0]:.4g}, {t[mask][-1]:.4g}] fs; max |dP/dt|/(k1 P_G) = {viol:.3e}, "
           f"P_nuL/(k1 P_G/k2) off by {ratio:.3e}")
    return SteadyStateReport(ok, (float(t[mask][0]), float(t[mask][-1])), viol, ratio, msg)


def write_trajectory_csv(traj, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("t_fs",) + STATE_LABELS)
        for t, row in zip(traj.times, traj.populations):
            w.writerow([f"{t:.11e}"] + [f"{v:.11e}" for v in row])


__all__ = [
    "KineticScheme", "KineticsError", "PopulationTrajectory", "RateFit", "STATE_LABELS",
    "SteadyStateReport", "effective_rate_fit", "integrate_scheme", "steady_state_check",
    "write_trajectory_csv",
]
