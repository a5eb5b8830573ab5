"""Command line entry point: ``python -m vscrate <subcommand> --config run.json``.

Exit codes: 0 success, 1 invalid input, 2 the computation itself failed.
"""

import argparse
import sys
import warnings

import numpy as np

from . import kinetics, rates, spectral, vibsolver
from .sweep import (ConfigError, OutputTable, emit_csv, format_value, load_config, metadata_for,
                    render_csv, resolve_sigma, run_sweep, validate)

EXIT_OK, EXIT_INVALID, EXIT_COMPUTE = 0, 1, 2


def _config(args):
    cfg = load_config(args.config) if args.config else validate({})
    data = cfg.data
    changed = False
    if args.seed is not None:
        data = dict(data, seed=args.seed)
        changed = True
    if args.variant is not None:
        data = dict(data, variant=args.variant)
        changed = True
    return validate(data) if changed else cfg


def _write(table, args, cfg):
    out = args.out or cfg.data["output"]
    if out:
        emit_csv(table, out)
    else:
        sys.stdout.write(render_csv(table))


def cmd_eigensolve(cfg, args):
    spec = cfg.double_well()
    spectrum = vibsolver.solve_double_well(spec, n_states=max(4, args.states))
    b = vibsolver.diabatize(spectrum)
    meta = metadata_for(cfg, [
        ("omega0_cm1", format_value(b.omega0)), ("v0_lr_cm1", format_value(b.v0_lr)),
        ("v_lr_cm1", format_value(b.v_lr)), ("mu_ll_prime_au", format_value(b.mu_ll_prime)),
        ("epsilon_z_bohr", format_value(b.epsilon_z)), ("r_ll_bohr", format_value(b.r_ll)),
        ("r_lpl_p_bohr", format_value(b.r_lpl_p))])
    rows = [(i, e) for i, e in enumerate(spectrum.energies_cm1)]
    return OutputTable(("index", "energy_cm1"), rows, meta)


def cmd_jeff(cfg, args):
    j = cfg.data["jeff"]
    cav = cfg.cavity()
    lo = j["omega_min_cm1"] if j["omega_min_cm1"] is not None else 0.5 * cav.omega_c
    hi = j["omega_max_cm1"] if j["omega_max_cm1"] is not None else 1.5 * cav.omega_c
    grid = np.linspace(lo, hi, j["points"])
    columns, cols = ["omega_cm1"], [grid]
    extra = []
    for mode in ("closed", "angular", "oracle"):
        if mode not in j["modes"]:
            continue
        if mode == "oracle":
            o = spectral.j_eff_oracle(grid, cav, n_bath=j["n_bath"], broadening=j["broadening_cm1"],
                                      kernel=j["kernel"])
            vals = o.values
            extra.append(("oracle_sum_rule", format_value(o.sum_rule)))
        elif mode == "angular":
            vals = spectral.j_eff_angular(grid, cav)
        else:
            vals = spectral.j_eff_closed(grid, cav)
        columns.append(f"jeff_{mode}")
        cols.append(np.asarray(vals))
    return OutputTable(columns, np.column_stack(cols), metadata_for(cfg, extra))


def _single_rate(cfg):
    basis = cfg.basis()
    variant = cfg.data["variant"]
    sigma = resolve_sigma(cfg, basis) if variant in ("convolved", "lossless") else None
    cavity = cfg.cavity()
    spec = cfg.coupling(basis.omega0)
    res = rates.compute_rate(variant, basis, spec, cavity, cfg.temperature, k0=cfg.data["k0_fs1"],
                             sigma=sigma, occupation=cfg.data["occupation"], convention=cfg.convention)
    return basis, spec, cavity, res, sigma


def cmd_rate(cfg, args):
    basis, spec, cavity, res, sigma = _single_rate(cfg)
    k0 = cfg.data["k0_fs1"]
    nan = float("nan")
    row = (basis.omega0, cavity.omega_c, cavity.tau_c, rates.rabi_splitting(spec, cavity.omega_c, basis.omega0),
           res.k_vsc, res.k_total / k0 if k0 else nan, res.delta_delta_g if k0 else nan)
    extra = [("quality_factor", format_value(cavity.quality_factor))]
    if sigma is not None:
        extra.append(("sigma_cm1", format_value(sigma)))
    cols = ("omega0_cm1", "omega_c_cm1", "tau_c_fs", "rabi_cm1", "k_vsc_fs1", "k_over_k0",
            "delta_delta_g_kcalmol")
    return OutputTable(cols, [row], metadata_for(cfg, extra))


def cmd_kinetics(cfg, args):
    kn = cfg.data["kinetics"]
    if kn["k2_fs1"] is None or kn["k3_fs1"] is None:
        raise ConfigError("'kinetics.k2_fs1' and 'kinetics.k3_fs1' are required")
    k1 = kn["k1_fs1"]
    if k1 is None:
        if cfg.data["k0_fs1"] is None:
            raise ConfigError("give 'kinetics.k1_fs1' or 'k0_fs1' plus a coupling")
        k1 = cfg.data["k0_fs1"] + _single_rate(cfg)[3].k_vsc
    scheme = kinetics.KineticScheme(float(k1), float(kn["k2_fs1"]), float(kn["k3_fs1"]),
                                    tuple(kn["initial"]))
    t_max = kn["t_max_fs"] or (30.0 / k1 if k1 > 0 else None)
    if t_max is None:
        raise ConfigError("'kinetics.t_max_fs' is required when k1 = 0")
    traj = kinetics.integrate_scheme(scheme, t_max, kn["points"], method=kn["method"])
    extra = [("k1_fs1", format_value(scheme.k1)), ("k2_fs1", format_value(scheme.k2)),
             ("k3_fs1", format_value(scheme.k3)), ("method", kn["method"])]
    try:
        fit = kinetics.effective_rate_fit(traj)
        extra += [("fitted_rate_fs1", format_value(fit.rate)), ("fit_residual", format_value(fit.residual))]
    except kinetics.KineticsError as exc:
        extra.append(("fitted_rate_fs1", f"unavailable ({exc})"))
    report = kinetics.steady_state_check(traj, scheme)
    extra.append(("steady_state", f"{'yes' if report.satisfied else 'no'}; {report.message}"))
    rows = np.column_stack([traj.times, traj.populations])
    return OutputTable(("t_fs",) + kinetics.STATE_LABELS, rows, metadata_for(cfg, extra))


def cmd_oracle(cfg, args):
    o = cfg.data["oracle"]
    if o["kind"] == "jeff":
        j = cfg.data["jeff"]
        cav = cfg.cavity()
        grid = np.linspace(0.5 * cav.omega_c, 1.5 * cav.omega_c, j["points"])
        orc = spectral.j_eff_oracle(grid, cav, n_bath=j["n_bath"], broadening=j["broadening_cm1"],
                                    kernel=j["kernel"])
        ref = spectral.j_eff_closed(grid, cav)
        rows = np.column_stack([grid, ref, orc.values, orc.values / ref - 1.0])
        extra = [("sum_rule", format_value(orc.sum_rule)), ("n_bath", j["n_bath"])]
        return OutputTable(("omega_cm1", "jeff_closed", "jeff_oracle", "relative_error"), rows,
                           metadata_for(cfg, extra))
    basis = cfg.basis()
    cavity = cfg.cavity()
    spec = cfg.coupling(basis.omega0, n_molecules=o["n_molecules"])
    kw = dict(occupation=cfg.data["occupation"], convention=cfg.convention)
    exact = rates.k_vsc_isotropic(basis, spec, cavity, cfg.temperature, **kw).k_vsc
    mean, err, _ = rates.isotropic_monte_carlo(basis, spec, cavity, cfg.temperature, o["n_draws"],
                                               cfg.data["seed"], o["batch_size"], **kw)
    row = (spec.n_molecules, o["n_draws"], exact, mean, err, mean / exact - 1.0)
    return OutputTable(("n_molecules", "n_draws", "k_isotropic_fs1", "k_mc_fs1", "k_mc_stderr_fs1",
                        "relative_difference"), [row], metadata_for(cfg))


def cmd_sweep(cfg, args):
    return run_sweep(cfg)


COMMANDS = {
    "eigensolve": (cmd_eigensolve, "double-well eigenstates and diabatic parameters"),
    "jeff": (cmd_jeff, "tabulate the effective spectral density"),
    "rate": (cmd_rate, "single rate constant for the configured system"),
    "kinetics": (cmd_kinetics, "integrate the four-state kinetic scheme"),
    "sweep": (cmd_sweep, "sweep one parameter axis"),
    "oracle": (cmd_oracle, "brute-force cross-checks (isotropic Monte Carlo, normal-mode J_eff)"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file", default=argparse.SUPPRESS)
    common.add_argument("--out", help="output CSV path (default: stdout)", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, help="seed for Monte Carlo draws", default=argparse.SUPPRESS)
    common.add_argument("--variant", choices=rates.VARIANTS, default=argparse.SUPPRESS,
                        help="rate formula variant")
    p = argparse.ArgumentParser(prog="vscrate", parents=[common],
                                description="Cavity-modified vibrational reaction rates.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_)
        if name == "eigensolve":
            sp.add_argument("--states", type=int, default=4, help="number of eigenstates to report")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("config", "out", "seed", "variant"):
        if not hasattr(args, name):
            setattr(args, name, None)
    if args.seed is not None and args.seed < 0:
        parser.error("--seed must be non-negative")
    try:
        cfg = _config(args)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            table = COMMANDS[args.command][0](cfg, args)
        _write(table, args, cfg)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"vscrate: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"vscrate: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
