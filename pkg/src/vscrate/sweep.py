"""JSON run configurations, parameter sweeps and deterministic CSV output.

A configuration is a JSON object with unit-suffixed keys::

    {
      "axis": "omega_c",
      "range": {"min": 1000, "max": 1400, "points": 401, "spacing": "linear"},
      "matter": {},
      "cavity": {"omega_c_cm1": 1190, "tau_c_fs": 100},
      "bath": {"friction_ratio": 0.1, "char_gamma_cm1": 200},
      "coupling": {"rabi_cm1": 150, "rabi_reference_n": 1},
      "temperature_K": 300,
      "k0_fs1": 2.3e-6,
      "variant": "aligned",
      "frequency_convention": "cyclic"
    }

Omitted keys take the defaults in the tables below; unknown keys are errors.
"""

import copy
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__, rates, spectral, vibsolver


class ConfigError(ValueError):
    pass


class SweepError(RuntimeError):
    pass


AXES = ("omega_c", "rabi", "tau_c", "n_mol")

MATTER_DEFAULTS = {
    "mass_au": 1.0,
    "barrier_frequency_cm1": 1000.0,
    "barrier_height_cm1": 2250.0,
    "grid_min_bohr": -100.0,
    "grid_max_bohr": 100.0,
    "grid_points": 1001,
    # set both to skip the eigensolve
    "omega0_cm1": None,
    "epsilon_z_bohr": None,
    "mu_au": None,
}

CAVITY_DEFAULTS = {
    "omega_c_cm1": 1190.0,
    "tau_c_fs": 100.0,
    "lambda_c_au": 1.0e-3,
    "refractive_index": 1.0,
    "theta_max_deg": 89.99,
}

BATH_DEFAULTS = {
    "friction_ratio": 0.1,          # eta / (M omega_b)
    "char_gamma_cm1": 200.0,
    "reorg_lambda_cm1": None,       # overrides friction_ratio, in cm^-1 per bohr^2
    "omega_cutoff_cm1": None,       # None -> 20 * char_gamma
    "quantum_coth": True,
    "sigma_cm1": None,              # overrides the whole bath
}

COUPLING_DEFAULTS = {
    "rabi_cm1": None,
    "g_c": None,                    # (cm^-1)^(1/2); give this or rabi_cm1
    "rabi_reference_n": 1,
    "n_molecules": None,            # None -> rabi_reference_n
    "alignment": "aligned",
}

RANGE_DEFAULTS = {"min": None, "max": None, "points": None, "spacing": "linear"}

# sections read only by the single-purpose CLI subcommands
JEFF_DEFAULTS = {
    "omega_min_cm1": None,          # None -> 0.5 omega_c
    "omega_max_cm1": None,          # None -> 1.5 omega_c
    "points": 201,
    "modes": ["closed", "angular"],
    "n_bath": 20000,
    "broadening_cm1": None,
    "kernel": "lorentzian",
}

KINETICS_DEFAULTS = {
    "k1_fs1": None,                 # None -> k0 + k_vsc from the rate section
    "k2_fs1": None,
    "k3_fs1": None,
    "t_max_fs": None,               # None -> 30 / k1
    "points": 2001,
    "method": "expm",
    "initial": [1.0, 0.0, 0.0, 0.0],
}

ORACLE_DEFAULTS = {
    "kind": "isotropic",            # isotropic | jeff
    "n_draws": 100000,
    "batch_size": 1000,
    "n_molecules": 1000,
}

TOP_DEFAULTS = {
    "axis": None,
    "range": None,
    "matter": None,
    "cavity": None,
    "bath": None,
    "coupling": None,
    "temperature_K": 300.0,
    "k0_fs1": None,
    "variant": "aligned",
    "frequency_convention": "angular",
    "occupation": "boltzmann",
    "seed": 0,
    "output": None,
    "jeff": None,
    "kinetics": None,
    "oracle": None,
}

SECTIONS = {"matter": MATTER_DEFAULTS, "cavity": CAVITY_DEFAULTS, "bath": BATH_DEFAULTS,
            "coupling": COUPLING_DEFAULTS, "range": RANGE_DEFAULTS, "jeff": JEFF_DEFAULTS,
            "kinetics": KINETICS_DEFAULTS, "oracle": ORACLE_DEFAULTS}


def _fill(section, given, defaults):
    given = {} if given is None else given
    if not isinstance(given, dict):
        raise ConfigError(f"section '{section}' must be an object")
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown key '{section}.{unknown[0]}'; allowed: {sorted(defaults)}")
    out = dict(defaults)
    out.update(given)
    return out


def _positive(path, v):
    if v is None or not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
        raise ConfigError(f"'{path}' must be a positive number, got {v!r}")


@dataclass(frozen=True, eq=False)
class SweepConfig:
    """Validated configuration.  Sections hold schema values with defaults filled in."""

    data: dict = field(repr=False)

    def __eq__(self, other):
        return isinstance(other, SweepConfig) and self.data == other.data

    def __getattr__(self, name):
        data = object.__getattribute__(self, "data")
        if name in data:
            return copy.deepcopy(data[name])
        raise AttributeError(name)

    @property
    def temperature(self):
        return float(self.data["temperature_K"])

    @property
    def convention(self):
        return self.data["frequency_convention"]

    # -- component specs
    def double_well(self):
        m = self.data["matter"]
        return vibsolver.DoubleWellSpec(
            mass=float(m["mass_au"]), barrier_frequency=float(m["barrier_frequency_cm1"]),
            barrier_height=float(m["barrier_height_cm1"]), grid_min=float(m["grid_min_bohr"]),
            grid_max=float(m["grid_max_bohr"]), grid_points=int(m["grid_points"]))

    def basis(self):
        m = self.data["matter"]
        if m["omega0_cm1"] is not None:
            return vibsolver.DiabaticBasis(
                omega0=float(m["omega0_cm1"]),
                epsilon_z=float(m["epsilon_z_bohr"] or 0.0),
                mu_ll_prime=1.0 if m["mu_au"] is None else float(m["mu_au"]))
        return vibsolver.diabatize(vibsolver.solve_double_well(self.double_well()))

    def cavity(self, **override):
        c = self.data["cavity"]
        kw = dict(omega_c=float(c["omega_c_cm1"]), tau_c=float(c["tau_c_fs"]),
                  lambda_c=float(c["lambda_c_au"]), refractive_index=float(c["refractive_index"]),
                  theta_max=math.radians(float(c["theta_max_deg"])))
        kw.update(override)
        return spectral.CavitySpec(**kw)

    def phonon_bath(self):
        b = self.data["bath"]
        extra = dict(omega_cutoff=b["omega_cutoff_cm1"], quantum_coth=bool(b["quantum_coth"]))
        if b["reorg_lambda_cm1"] is not None:
            return spectral.PhononBathSpec(reorg_lambda=float(b["reorg_lambda_cm1"]),
                                           char_gamma=float(b["char_gamma_cm1"]), **extra)
        m = self.data["matter"]
        return spectral.PhononBathSpec.from_friction(
            float(b["friction_ratio"]), float(m["barrier_frequency_cm1"]), float(m["mass_au"]),
            float(b["char_gamma_cm1"]), **extra)

    def coupling(self, omega0, rabi=None, n_molecules=None):
        c = self.data["coupling"]
        n_ref = int(c["rabi_reference_n"])
        n = int(n_molecules if n_molecules is not None else (c["n_molecules"] or n_ref))
        if rabi is not None or c["rabi_cm1"] is not None:
            return rates.CouplingSpec.from_rabi(float(c["rabi_cm1"] if rabi is None else rabi), omega0,
                                                n_reference=n_ref, n_molecules=n,
                                                alignment=c["alignment"])
        if c["g_c"] is None:
            raise ConfigError("'coupling' needs one of 'rabi_cm1' or 'g_c'")
        return rates.CouplingSpec(g_c=float(c["g_c"]), n_molecules=n, alignment=c["alignment"])

    def axis_values(self):
        r = self.data["range"]
        if r["spacing"] == "log":
            v = np.geomspace(r["min"], r["max"], int(r["points"]))
        else:
            v = np.linspace(r["min"], r["max"], int(r["points"]))
        if self.data["axis"] == "n_mol":
            v = np.unique(np.rint(v))
        return v


def validate(data):
    """Fill defaults, reject unknown keys, then check every invariant."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = sorted(set(data) - set(TOP_DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown key '{unknown[0]}'; allowed: {sorted(TOP_DEFAULTS)}")
    out = dict(TOP_DEFAULTS)
    out.update(data)
    for name, defaults in SECTIONS.items():
        if name == "range" and out["range"] is None:
            continue
        out[name] = _fill(name, out[name], defaults)

    if out["axis"] is not None:
        if out["axis"] not in AXES:
            raise ConfigError(f"'axis' must be one of {AXES}, got {out['axis']!r}")
        r = out["range"]
        if r is None:
            raise ConfigError("'range' is required when 'axis' is set")
        for k in ("min", "max"):
            if not isinstance(r[k], (int, float)) or isinstance(r[k], bool):
                raise ConfigError(f"'range.{k}' must be a number, got {r[k]!r}")
        if not r["min"] < r["max"]:
            raise ConfigError(f"'range.min' must be below 'range.max' ({r['min']} >= {r['max']})")
        if not isinstance(r["points"], int) or isinstance(r["points"], bool) or r["points"] < 2:
            raise ConfigError(f"'range.points' must be an integer >= 2, got {r['points']!r}")
        if r["spacing"] not in ("linear", "log"):
            raise ConfigError(f"'range.spacing' must be 'linear' or 'log', got {r['spacing']!r}")
        if r["spacing"] == "log" or out["axis"] in ("omega_c", "tau_c", "n_mol"):
            if not r["min"] > 0:
                raise ConfigError(f"'range.min' must be positive for axis {out['axis']}")
        if out["axis"] == "n_mol" and r["min"] < 1:
            raise ConfigError("'range.min' must be >= 1 molecule")
    elif out["range"] is not None:
        raise ConfigError("'range' given without 'axis'")

    _positive("temperature_K", out["temperature_K"])
    if out["k0_fs1"] is not None:
        _positive("k0_fs1", out["k0_fs1"])
    if out["variant"] not in rates.VARIANTS:
        raise ConfigError(f"'variant' must be one of {rates.VARIANTS}, got {out['variant']!r}")
    if out["frequency_convention"] not in ("angular", "cyclic"):
        raise ConfigError(f"'frequency_convention' must be 'angular' or 'cyclic', got {out['frequency_convention']!r}")
    if out["occupation"] not in ("boltzmann", "bose"):
        raise ConfigError(f"'occupation' must be 'boltzmann' or 'bose', got {out['occupation']!r}")
    if not isinstance(out["seed"], int) or isinstance(out["seed"], bool) or out["seed"] < 0:
        raise ConfigError(f"'seed' must be a non-negative integer, got {out['seed']!r}")

    m = out["matter"]
    for k in ("mass_au", "barrier_frequency_cm1", "barrier_height_cm1"):
        _positive(f"matter.{k}", m[k])
    if m["omega0_cm1"] is not None:
        _positive("matter.omega0_cm1", m["omega0_cm1"])
    c = out["cavity"]
    for k in ("omega_c_cm1", "tau_c_fs", "refractive_index"):
        _positive(f"cavity.{k}", c[k])
    if not 0 < c["theta_max_deg"] < 90:
        raise ConfigError(f"'cavity.theta_max_deg' must lie in (0, 90), got {c['theta_max_deg']}")
    if c["lambda_c_au"] < 0:
        raise ConfigError("'cavity.lambda_c_au' must be non-negative")
    b = out["bath"]
    _positive("bath.char_gamma_cm1", b["char_gamma_cm1"])
    if b["sigma_cm1"] is not None:
        _positive("bath.sigma_cm1", b["sigma_cm1"])
    if b["omega_cutoff_cm1"] is not None:
        _positive("bath.omega_cutoff_cm1", b["omega_cutoff_cm1"])
    cp = out["coupling"]
    if cp["rabi_cm1"] is not None and cp["g_c"] is not None:
        raise ConfigError("'coupling' takes one of 'rabi_cm1' or 'g_c', not both")
    strength = cp["rabi_cm1"] if cp["g_c"] is None else cp["g_c"]
    if strength is not None and (not isinstance(strength, (int, float)) or strength < 0):
        raise ConfigError(f"coupling strength must be a non-negative number, got {strength!r}")
    if not isinstance(cp["rabi_reference_n"], (int, float)) or cp["rabi_reference_n"] < 1:
        raise ConfigError("'coupling.rabi_reference_n' must be >= 1")
    if cp["n_molecules"] is not None and (not isinstance(cp["n_molecules"], (int, float)) or cp["n_molecules"] < 1):
        raise ConfigError("'coupling.n_molecules' must be >= 1")

    j = out["jeff"]
    bad = sorted(set(j["modes"]) - {"closed", "angular", "oracle"}) if isinstance(j["modes"], list) else ["?"]
    if bad:
        raise ConfigError(f"'jeff.modes' must be a list drawn from closed/angular/oracle, got {j['modes']!r}")
    if not isinstance(j["points"], int) or j["points"] < 1:
        raise ConfigError("'jeff.points' must be a positive integer")
    if not isinstance(j["n_bath"], int) or j["n_bath"] < 1000:
        raise ConfigError("'jeff.n_bath' must be an integer >= 1000")
    if j["kernel"] not in ("lorentzian", "gaussian"):
        raise ConfigError("'jeff.kernel' must be 'lorentzian' or 'gaussian'")
    kn = out["kinetics"]
    for k in ("k1_fs1", "k2_fs1", "k3_fs1"):
        if kn[k] is not None and (not isinstance(kn[k], (int, float)) or kn[k] < 0):
            raise ConfigError(f"'kinetics.{k}' must be a non-negative number")
    if kn["t_max_fs"] is not None:
        _positive("kinetics.t_max_fs", kn["t_max_fs"])
    if kn["method"] not in ("expm", "adaptive"):
        raise ConfigError("'kinetics.method' must be 'expm' or 'adaptive'")
    o = out["oracle"]
    if o["kind"] not in ("isotropic", "jeff"):
        raise ConfigError("'oracle.kind' must be 'isotropic' or 'jeff'")
    for k in ("n_draws", "batch_size", "n_molecules"):
        if not isinstance(o[k], int) or o[k] < 1:
            raise ConfigError(f"'oracle.{k}' must be a positive integer")

    cfg = SweepConfig(out)
    # build every component once so their own invariants fire before any work
    try:
        cfg.double_well()
        cfg.cavity()
        cfg.phonon_bath()
        if strength is not None:
            cfg.coupling(float(m["omega0_cm1"] or 1.0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def parse_config(text):
    """JSON text -> SweepConfig."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc
    return validate(data)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc


def serialize(cfg):
    """Canonical JSON (sorted keys, defaults explicit)."""
    return json.dumps(cfg.data, sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True)
class OutputTable:
    columns: tuple
    rows: tuple = ()
    metadata: tuple = ()             # (key, value) pairs

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(float(v) for v in r) for r in self.rows))
        object.__setattr__(self, "metadata", tuple((str(k), str(v)) for k, v in self.metadata))
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row has {len(r)} values for {len(self.columns)} columns")

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])


def format_value(v):
    """12 significant digits, scientific notation."""
    return f"{v + 0.0:.11e}"          # + 0.0 folds -0.0 into 0.0


def render_csv(table):
    lines = [f"# {k}: {v}" for k, v in table.metadata]
    lines.append(",".join(table.columns))
    lines.extend(",".join(format_value(v) for v in r) for r in table.rows)
    return "\n".join(lines) + "\n"


def emit_csv(table, path):
    """Write `table` as UTF-8 CSV with '#' metadata lines and '\\n' endings."""
    text = render_csv(table)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


SWEEP_COLUMNS = {
    "omega_c": "omega_c_cm1",
    "rabi": "rabi_cm1",
    "tau_c": "tau_c_fs",
    "n_mol": "n_molecules",
}


def resolve_sigma(cfg, basis):
    b = cfg.data["bath"]
    if b["sigma_cm1"] is not None:
        return float(b["sigma_cm1"])
    if basis.epsilon_z == 0:
        raise ConfigError("phonon broadening needs matter.epsilon_z_bohr or bath.sigma_cm1")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", spectral.PhononCutoffWarning)
        sigma = spectral.phonon_sigma(basis, cfg.phonon_bath(), cfg.temperature)
    for w in caught:
        warnings.warn(w.message, w.category, stacklevel=2)
    return sigma


def metadata_for(cfg, extra=()):
    return (("vscrate", __version__), ("variant", cfg.data["variant"]),
            ("frequency_convention", cfg.convention), ("seed", cfg.data["seed"])) + tuple(extra) + (
        ("config", json.dumps(cfg.data, sort_keys=True, separators=(",", ":"))),)


def evaluate_point(cfg, basis, axis, value, sigma=None):
    """Rate at one axis value; returns (RateResult, CouplingSpec, A) with A the per-pair term."""
    T = cfg.temperature
    w0 = basis.omega0
    cav_kw = {}
    rabi = None
    n_mol = None
    if axis == "omega_c":
        cav_kw["omega_c"] = float(value)
    elif axis == "tau_c":
        cav_kw["tau_c"] = float(value)
    elif axis == "rabi":
        rabi = float(value)
    elif axis == "n_mol":
        n_mol = int(value)
    cavity = cfg.cavity(**cav_kw)
    spec = cfg.coupling(w0, rabi=rabi, n_molecules=n_mol)
    kw = dict(occupation=cfg.data["occupation"], convention=cfg.convention)
    variant = cfg.data["variant"]
    res = rates.compute_rate(variant, basis, spec, cavity, T, k0=cfg.data["k0_fs1"], sigma=sigma, **kw)
    coeff = float(rates.collective_coefficient(spec, cavity, w0, T, **kw))
    return res, spec, coeff


def run_sweep(cfg):
    """One row per axis point: axis value, k_vsc, k/k0, Delta Delta G (+ R_total for n_mol)."""
    axis = cfg.data["axis"]
    if axis is None:
        raise ConfigError("configuration has no 'axis'")
    k0 = cfg.data["k0_fs1"]
    if k0 is None:
        raise ConfigError("'k0_fs1' is required for a sweep (k/k0 and Delta Delta G columns)")
    basis = cfg.basis()
    variant = cfg.data["variant"]
    sigma = resolve_sigma(cfg, basis) if variant in ("convolved", "lossless") else None
    columns = [SWEEP_COLUMNS[axis], "k_vsc_fs1", "k_over_k0", "delta_delta_g_kcalmol"]
    if axis == "n_mol":
        columns.append("R_total_fs1")
    rows = []
    T = cfg.temperature
    for v in cfg.axis_values():
        try:
            res, spec, coeff = evaluate_point(cfg, basis, axis, v, sigma)
        except (ValueError, RuntimeError) as exc:
            raise SweepError(f"evaluation failed at {axis} = {v:.11e}: {exc}") from exc
        k_total = k0 + res.k_vsc
        row = [v, res.k_vsc, k_total / k0, rates.delta_delta_g(k_total, k0, T)]
        if axis == "n_mol":
            # every molecule reacts at k0 + N A
            row.append(rates.reaction_rate_total(spec.n_molecules, k0, coeff))
        rows.append(row)
    extra = [("axis", axis), ("omega0_cm1", format_value(basis.omega0))]
    if sigma is not None:
        extra.append(("sigma_cm1", format_value(sigma)))
    return OutputTable(columns, rows, metadata_for(cfg, extra))


__all__ = [
    "AXES", "ConfigError", "OutputTable", "SweepConfig", "SweepError", "emit_csv",
    "evaluate_point", "load_config", "metadata_for", "parse_config", "render_csv",
    "resolve_sigma", "run_sweep", "serialize", "validate",
]
