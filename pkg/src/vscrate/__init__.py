"""Cavity-modified vibrational reaction rates.

Pipeline: double-well eigenstates -> diabatic basis -> effective spectral
density of a lossy Fabry-Perot cavity -> golden-rule rate -> kinetics and
parameter sweeps.
"""

__version__ = "0.1.0"

from .units import (  # noqa: E402
    HARTREE_TO_WAVENUMBER, FS_PER_ATU, frequency_scale, kT_wavenumber,
)
from .vibsolver import DiabaticBasis, DoubleWellSpec, diabatize, solve_double_well  # noqa: E402
from .spectral import (  # noqa: E402
    CavitySpec, PhononBathSpec, j_eff_angular, j_eff_closed, j_eff_oracle, phonon_sigma,
)
from .rates import (  # noqa: E402
    CouplingSpec, RateResult, delta_delta_g, k_vsc_aligned, k_vsc_convolved, k_vsc_fgr,
    k_vsc_isotropic, k_vsc_lossless, rabi_splitting,
)
from .kinetics import KineticScheme, effective_rate_fit, integrate_scheme, steady_state_check  # noqa: E402
