"""Command-line front end: resonances, effective, scan, evolve.

Each command resolves a config (file + preset defaults), validates it,
runs the corresponding library workflow, and writes CSV + JSON reports
(and PNG figures unless disabled) into the output directory.  Exit codes:
0 ok, 2 config error, 3 resonant-regime refusal, 4 truncation-limited.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import models, plots, verify
from .config import ConfigError, RunConfig, load_config
from .effective import (
    ResonantRegimeError,
    diamond_first_order,
    diamond_small_parameters,
    dicke_dispersive,
    nonrwa_series,
)
from .operators import OperatorMatrix, Representation
from .report import write_csv, write_json
from .resonances import (
    AtomFieldModel,
    DipoleChannel,
    atom_field_space,
    diamond_model,
    enumerate_conditions,
    excitation_number,
    resonance_defect,
    two_level_model,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESONANT = 3
EXIT_TRUNCATION = 4

LEAKAGE_LIMIT = 1e-3
PEAK_MOVE_LIMIT = 0.01  # relative location change under n_max * 1.5


# -- model construction -------------------------------------------------------


def _parse_channels(raw: str, source: str) -> tuple[DipoleChannel, ...]:
    out = []
    for item in raw.split():
        try:
            pair, coupling = item.split(":")
            lo, hi = pair.split("-")
            out.append(DipoleChannel(int(lo), int(hi), float(coupling)))
        except ValueError as exc:
            raise ConfigError(f"{source}: bad channel entry {item!r}; "
                              "expected i-j:coupling") from exc
    return tuple(out)


def build_atom_field_model(cfg: RunConfig) -> AtomFieldModel:
    preset = cfg.preset
    if preset == "diamond":
        try:
            return diamond_model(
                omega=cfg.model_float("omega"),
                energies=tuple(float(x) for x in cfg.model_str("energies").split()),
                couplings=tuple(
                    ch.coupling for ch in
                    _parse_channels(cfg.model_str("channels"), cfg.source)),
                atoms=cfg.model_int("atoms"),
                n_max=cfg.model_int("n_max"),
            )
        except ValueError as exc:
            raise ConfigError(f"{cfg.source}: {exc}") from exc
    if preset == "dicke-rwa":
        return two_level_model(
            omega=cfg.model_float("omega_field"),
            splitting=cfg.model_float("omega_atom"),
            coupling=cfg.model_float("coupling"),
            atoms=cfg.model_int("atoms"),
            n_max=cfg.model_int("n_max"),
        )
    if preset == "custom":
        try:
            return AtomFieldModel(
                energies=tuple(float(x) for x in cfg.model_str("energies").split()),
                mu=tuple(int(x) for x in cfg.model_str("mu").split()),
                channels=_parse_channels(cfg.model_str("channels"), cfg.source),
                omega=cfg.model_float("omega"),
                n_max=cfg.model_int("n_max"),
                atoms=cfg.model_int("atoms"),
            )
        except ValueError as exc:
            raise ConfigError(f"{cfg.source}: {exc}") from exc
    raise ConfigError(
        f"{cfg.source}: preset {preset!r} is not a number-conserving "
        "atom-field model; use diamond, dicke-rwa, or custom here")


def _parse_dicke_state(raw: str, system, source: str,
                       with_photons: bool = True) -> np.ndarray:
    parts = [p.strip() for p in raw.split(",")]
    atom_rep = system.space.factors[0]
    if parts[0] == "excited":
        atom_idx = atom_rep.dim - 1
    elif parts[0] == "ground":
        atom_idx = 0
    else:
        raise ConfigError(f"{source}: bad state {raw!r}; expected "
                          "excited|ground[,photons]")
    if not with_photons:
        vec = np.zeros(atom_rep.dim, dtype=complex)
        vec[atom_idx] = 1.0
        return vec
    photons = int(parts[1]) if len(parts) > 1 else 0
    if not (0 <= photons < system.space.factors[1].dim):
        raise ConfigError(f"{source}: photon number {photons} beyond n_max")
    return system.space.basis_state(atom_idx, photons)


def _parse_atomfield_state(raw: str, model: AtomFieldModel, space,
                           source: str) -> np.ndarray:
    occ = None
    photons = 0
    for part in raw.split(","):
        key, _, value = part.strip().partition(":")
        if key == "level":
            level = int(value)
            if not (1 <= level <= model.n_levels):
                raise ConfigError(f"{source}: level {level} out of range")
            occ = tuple(model.atoms if j == level else 0
                        for j in range(1, model.n_levels + 1))
        elif key == "occ":
            occ = tuple(int(c) for c in value)
        elif key == "n":
            photons = int(value)
        else:
            raise ConfigError(f"{source}: bad state component {part!r}")
    if occ is None:
        raise ConfigError(f"{source}: state {raw!r} needs level:j or occ:...")
    atom_rep = space.factors[0]
    if occ not in atom_rep.labels:
        raise ConfigError(f"{source}: occupation {occ} not in the "
                          f"{model.atoms}-atom symmetric space")
    if not (0 <= photons < space.factors[1].dim):
        raise ConfigError(f"{source}: photon number {photons} beyond n_max")
    return space.basis_state(atom_rep.labels.index(occ), photons)


# -- commands ------------------------------------------------------------------


def cmd_resonances(cfg: RunConfig, out: Path) -> int:
    model = build_atom_field_model(cfg)
    conditions = enumerate_conditions(model)
    header = ["vector", "photon_exponent", "class", "min_atoms",
              "omega_star", "frequency_independent", "defect",
              "defect_at_omega", "unphysical"]
    rows = []
    for c in conditions:
        rows.append([
            " ".join(str(v) for v in c.vector.k),
            c.photon_exponent,
            c.klass,
            c.min_atoms,
            c.omega_star,
            c.frequency_independent,
            c.energy_defect,
            resonance_defect(c.vector, model, model.omega),
            c.unphysical,
        ])
    write_csv(out / "resonances.csv", header, rows)
    doc = {
        "command": "resonances",
        "preset": cfg.preset,
        "count": len(conditions),
        "rows": [dict(zip(header, row)) for row in rows],
        "config": cfg.resolved(),
    }
    write_json(out / "resonances.json", doc)
    if cfg.output_bool("plots", True):
        plots.resonance_figure(conditions, model.omega, out / "resonances.png")
    return EXIT_OK


def _series_report(cfg: RunConfig, out: Path, series) -> int:
    doc = series.to_dict(samples=cfg.task_int("samples", 8))
    doc_full = {
        "command": "effective",
        "preset": cfg.preset,
        **doc,
        "config": cfg.resolved(),
    }
    write_json(out / "effective.json", doc_full)
    header = ["k", "l", "photon_order", "resonance_ratio", "prefactor",
              "theta_norm", "theta_first"]
    rows = [[t.k, t.l, t.photon_order, t.resonance_ratio, t.prefactor,
             t.theta.norm(), float(t.theta.real_diagonal()[0])]
            for t in series.terms]
    write_csv(out / "effective.csv", header, rows)
    if cfg.output_bool("plots", True):
        plots.series_figure(doc, out / "effective.png")
    return EXIT_OK


def cmd_effective(cfg: RunConfig, out: Path) -> int:
    preset = cfg.preset
    l_max = cfg.task_int("l_max", 2)
    if preset == "dicke-nonrwa":
        omega_atom = cfg.model_float("omega_atom")
        omega_field = cfg.model_float("omega_field")
        g = cfg.model_float("coupling")
        system = models.dicke_system(cfg.model_int("atoms"), cfg.model_int("n_max"))
        series = nonrwa_series(system, omega_atom, omega_field, g, l_max)
        return _series_report(cfg, out, series)
    if preset == "dicke-classical":
        omega_atom = cfg.model_float("omega_atom")
        drive = cfg.model_float("omega_field")
        g = cfg.model_float("coupling")
        system = models.two_ladder_system(
            Representation.spin(cfg.model_int("atoms")),
            Representation.euclid(cfg.model_int("euclid_m")))
        # phase-ladder coupling g/2 represents a cosine drive of amplitude g
        series = nonrwa_series(system, omega_atom, drive, 0.5 * g, l_max)
        return _series_report(cfg, out, series)
    if preset == "dicke-rwa":
        omega_field = cfg.model_float("omega_field")
        omega_atom = cfg.model_float("omega_atom")
        g = cfg.model_float("coupling")
        detuning = omega_atom - omega_field
        if detuning == 0.0:
            raise ResonantRegimeError(
                "dispersive form undefined on resonance: omega_atom equals "
                "omega_field; detune the model")
        system = models.dicke_system(cfg.model_int("atoms"), cfg.model_int("n_max"))
        h_eff = dicke_dispersive(system, detuning, g)
        diag = h_eff.real_diagonal()
        doc = {
            "command": "effective",
            "preset": preset,
            "kind": "dispersive-diagonal",
            "parameters": {"omega_field": omega_field, "omega_atom": omega_atom,
                           "coupling": g, "detuning": detuning,
                           "stark_scale": g * g / detuning},
            "diagonal": [float(v) for v in diag],
            "config": cfg.resolved(),
        }
        write_json(out / "effective.json", doc)
        write_csv(out / "effective.csv", ["index", "energy"],
                  [[i, float(v)] for i, v in enumerate(diag)])
        if cfg.output_bool("plots", True):
            plots.matrix_figure(h_eff.array, out / "effective.png",
                                "dispersive effective Hamiltonian")
        return EXIT_OK
    if preset == "diamond":
        model = build_atom_field_model(cfg)
        h_eff = diamond_first_order(model)
        eps = diamond_small_parameters(model)
        gs = [ch.coupling for ch in model.channels]
        named = [
            ("photon_assisted_23_via_1", gs[1] * eps[0]),
            ("photon_assisted_23_via_4", gs[3] * eps[2]),
            ("two_photon_14", -(gs[2] * eps[0] + gs[3] * eps[1])),
            ("virtual_24_12", gs[2] * eps[0]),
            ("virtual_24_13", gs[2] * eps[1]),
            ("virtual_12_34", gs[3] * eps[0]),
            ("virtual_13_34", gs[3] * eps[1]),
        ]
        doc = {
            "command": "effective",
            "preset": preset,
            "kind": "diamond-first-order",
            "parameters": {"omega": model.omega,
                           "energies": list(model.energies),
                           "couplings": gs,
                           "epsilons": list(eps)},
            "coefficients": {name: val for name, val in named},
            "matrix_norm": h_eff.norm(),
            "config": cfg.resolved(),
        }
        write_json(out / "effective.json", doc)
        write_csv(out / "effective.csv", ["term", "coefficient"], named)
        if cfg.output_bool("plots", True):
            plots.matrix_figure(h_eff.array, out / "effective.png",
                                "diamond effective Hamiltonian")
        return EXIT_OK
    raise ConfigError(f"{cfg.source}: no effective form for preset {preset!r}")


def _grid(cfg: RunConfig) -> np.ndarray:
    start = cfg.task_float("grid_start")
    stop = cfg.task_float("grid_stop")
    points = cfg.task_int("grid_points")
    if points < 3 or not (stop > start):
        raise ConfigError(f"{cfg.source}: scan grid needs grid_start < "
                          "grid_stop and grid_points >= 3")
    return np.linspace(start, stop, points)


def _peak_rows(scan) -> list[list]:
    rows = []
    for p in scan.peaks:
        rows.append([p.predicted, p.measured, p.strength, p.relative_error,
                     p.found])
    return rows


def _emit_scan(cfg: RunConfig, out: Path, scan, value_name: str,
               truncation_limited: bool, logy: bool) -> int:
    header = [scan.parameter, value_name] + list(scan.curves)
    rows = []
    for i, x in enumerate(scan.grid):
        rows.append([float(x), float(scan.values[i])]
                    + [float(scan.curves[c][i]) for c in scan.curves])
    write_csv(out / "scan.csv", header, rows)
    doc = {
        "command": "scan",
        "preset": cfg.preset,
        "value": value_name,
        "truncation_limited": truncation_limited,
        "peaks": [dict(zip(["predicted", "measured", "strength",
                            "relative_error", "found"], row))
                  for row in _peak_rows(scan)],
        "config": cfg.resolved(),
    }
    write_json(out / "peaks.json", doc)
    if cfg.output_bool("plots", True):
        plots.scan_figure(scan.grid, scan.values,
                          [p.predicted for p in scan.peaks], out / "scan.png",
                          value_name, logy)
    return EXIT_TRUNCATION if truncation_limited else EXIT_OK


def cmd_scan(cfg: RunConfig, out: Path) -> int:
    preset = cfg.preset
    grid = _grid(cfg)
    refine = cfg.task_bool("refine", True)
    check_trunc = cfg.task_bool("truncation_check", True)

    if preset in ("dicke-rwa", "dicke-nonrwa"):
        atoms = cfg.model_int("atoms")
        n_max = cfg.model_int("n_max")
        g = cfg.model_float("coupling")
        upper = cfg.task_int("upper_photons", 0)
        lower = cfg.task_int("lower_photons",
                             1 if preset == "dicke-rwa" else 3)

        def make_builder(nm):
            system = models.dicke_system(atoms, nm)
            ra = system.space.basis_state(atoms, upper)
            rb = system.space.basis_state(0, lower)
            if preset == "dicke-rwa":
                omega_atom = cfg.model_float("omega_atom")

                def builder(x):
                    return models.coupled_hamiltonian(system, omega_atom, x, g,
                                                      counter_rotating=False)
            else:
                omega_field = cfg.model_float("omega_field")

                def builder(x):
                    return models.coupled_hamiltonian(system, x, omega_field, g,
                                                      counter_rotating=True)
            return builder, ra, rb, system

        builder, ra, rb, system = make_builder(n_max)
        predictions: list[float] = []
        if preset == "dicke-rwa":
            if lower <= upper:
                raise ConfigError(f"{cfg.source}: gap tracking needs "
                                  "lower_photons > upper_photons")
            # crossing of |e, upper> with |g, lower> in the bare spectrum
            predictions = [cfg.model_float("omega_atom") / (lower - upper)]
        else:
            def eff_builder(x):
                series = nonrwa_series(system, x,
                                       cfg.model_float("omega_field"), g,
                                       cfg.task_int("l_max", 2))
                return series.hamiltonian()

            eff_scan = verify.scan_gap(eff_builder, grid, ra, rb,
                                       refine=refine)
            predictions = [p.measured for p in eff_scan.peaks if p.found]
        scan = verify.scan_gap(builder, grid, ra, rb,
                               predictions=predictions, refine=refine)
        truncation_limited = False
        if check_trunc and scan.peaks:
            big_builder, ra2, rb2, _ = make_builder(math.ceil(1.5 * n_max))
            big = verify.scan_gap(big_builder, grid, ra2, rb2, refine=refine)
            for p, q in zip(scan.peaks, big.peaks):
                if p.found and q.found and p.measured:
                    if abs(q.measured - p.measured) > PEAK_MOVE_LIMIT * abs(p.measured):
                        truncation_limited = True
        return _emit_scan(cfg, out, scan, "gap", truncation_limited, logy=True)

    if preset == "dicke-classical":
        atoms = cfg.model_int("atoms")
        g = cfg.model_float("coupling")
        drive = cfg.model_float("omega_field")
        period = 2.0 * math.pi / drive
        steps = cfg.task_int("steps_per_period", 2000)
        psi0 = np.zeros(atoms + 1, dtype=complex)
        psi0[0] = 1.0
        target = np.zeros(atoms + 1, dtype=complex)
        target[atoms] = 1.0

        def prob(x, steps_n=steps):
            h_t, _ = models.classical_drive(x, drive, g, atoms)
            u = verify.monodromy(h_t, period, steps_n)
            return verify.stroboscopic_max_transition(u, psi0, target)

        odd = [m * drive for m in range(1, 12, 2)
               if grid[0] <= m * drive <= grid[-1]]
        scan = verify.scan_transition(prob, grid, predictions=odd,
                                      refine=refine)
        truncation_limited = False
        if check_trunc and scan.peaks:
            for p in scan.peaks:
                if p.found and p.measured is not None:
                    fine = prob(p.measured, steps_n=2 * steps)
                    if abs(fine - p.strength) > 1e-6 + 0.01 * abs(p.strength):
                        truncation_limited = True
        return _emit_scan(cfg, out, scan, "max_transition_probability",
                          truncation_limited, logy=False)

    # diamond / custom: sweep the field frequency, track two basis states
    model = build_atom_field_model(cfg)
    state_a = cfg.task_str("state_a", "")
    state_b = cfg.task_str("state_b", "")
    if not state_a or not state_b:
        raise ConfigError(f"{cfg.source}: diamond/custom scans need state_a "
                          "and state_b (e.g. level:4,n:0)")

    def make_model(nm, omega):
        return AtomFieldModel(energies=model.energies, mu=model.mu,
                              channels=model.channels, omega=omega,
                              n_max=nm, atoms=model.atoms)

    def scan_with(nm):
        space = atom_field_space(make_model(nm, model.omega))
        ra = _parse_atomfield_state(state_a, model, space, cfg.source)
        rb = _parse_atomfield_state(state_b, model, space, cfg.source)

        def builder(x):
            return models.atom_field_hamiltonian(make_model(nm, x), space)

        conditions = enumerate_conditions(model)
        preds = [c.omega_star for c in conditions
                 if c.omega_star is not None and grid[0] <= c.omega_star <= grid[-1]]
        return verify.scan_gap(builder, grid, ra, rb, predictions=preds,
                               refine=refine)

    scan = scan_with(model.n_max)
    truncation_limited = False
    if check_trunc and scan.peaks:
        big = scan_with(math.ceil(1.5 * model.n_max))
        for p, q in zip(scan.peaks, big.peaks):
            if p.found and q.found and p.measured:
                if abs(q.measured - p.measured) > PEAK_MOVE_LIMIT * abs(p.measured):
                    truncation_limited = True
    return _emit_scan(cfg, out, scan, "gap", truncation_limited, logy=True)


def cmd_evolve(cfg: RunConfig, out: Path) -> int:
    preset = cfg.preset
    steps = cfg.task_int("steps", 600)
    if steps < 2:
        raise ConfigError(f"{cfg.source}: steps must be >= 2")

    if preset in ("dicke-rwa", "dicke-nonrwa"):
        atoms = cfg.model_int("atoms")
        n_max = cfg.model_int("n_max")
        g = cfg.model_float("coupling")
        omega_atom = cfg.model_float("omega_atom")
        omega_field = cfg.model_float("omega_field")
        counter = preset == "dicke-nonrwa"
        system = models.dicke_system(atoms, n_max)
        h = models.coupled_hamiltonian(system, omega_atom, omega_field, g,
                                       counter_rotating=counter)
        default_initial = "excited,0"
        default_target = "ground,1" if preset == "dicke-rwa" else "ground,3"
        psi0 = _parse_dicke_state(cfg.task_str("initial", default_initial),
                                  system, cfg.source)
        target = _parse_dicke_state(cfg.task_str("target", default_target),
                                    system, cfg.source)
        horizon = cfg.task_float("horizon", math.pi / abs(g) if g else 10.0)
        t = np.linspace(0.0, horizon, steps)
        proj = OperatorMatrix(np.outer(target, target.conj()), hermitian=True)
        obs = {"p_target": proj,
               "sz": system.x0,
               "photons": system.y0}
        interior = system.interior(margin_y=2)
        result = verify.evolve(h, psi0, t, obs, interior)
    elif preset == "dicke-classical":
        atoms = cfg.model_int("atoms")
        g = cfg.model_float("coupling")
        omega_atom = cfg.model_float("omega_atom")
        drive = cfg.model_float("omega_field")
        h_t, ladder = models.classical_drive(omega_atom, drive, g, atoms)
        period = 2.0 * math.pi / drive
        psi0 = _parse_dicke_state(cfg.task_str("initial", "ground"),
                                  _BareSpinSystem(ladder), cfg.source,
                                  with_photons=False)
        target = _parse_dicke_state(cfg.task_str("target", "excited"),
                                    _BareSpinSystem(ladder), cfg.source,
                                    with_photons=False)
        horizon = cfg.task_float("horizon", 200.0 * period)
        t = np.linspace(0.0, horizon, steps)
        proj = OperatorMatrix(np.outer(target, target.conj()), hermitian=True)
        obs = {"p_target": proj, "sz": ladder.x0}
        result = verify.evolve_periodic(
            h_t, psi0, t, period,
            steps_per_period=cfg.task_int("steps_per_period", 2000),
            observables=obs)
    else:
        model = build_atom_field_model(cfg)
        space = atom_field_space(model)
        h = models.atom_field_hamiltonian(model, space)
        initial = cfg.task_str("initial", "level:1,n:0")
        target = cfg.task_str("target", "")
        psi0 = _parse_atomfield_state(initial, model, space, cfg.source)
        obs = {"n_excitations": excitation_number(model, space)}
        if target:
            tv = _parse_atomfield_state(target, model, space, cfg.source)
            obs["p_target"] = OperatorMatrix(np.outer(tv, tv.conj()),
                                             hermitian=True)
        g_scale = max((ch.coupling for ch in model.channels), default=0.0)
        horizon = cfg.task_float("horizon",
                                 math.pi / g_scale if g_scale > 0 else 10.0)
        t = np.linspace(0.0, horizon, steps)
        interior = space.interior_projector({0: 0, 1: 2})
        result = verify.evolve(h, psi0, t, obs, interior)

    header = ["time"] + list(result.observables)
    rows = []
    for i, tk in enumerate(result.times):
        rows.append([float(tk)] + [float(result.observables[c][i])
                                   for c in result.observables])
    write_csv(out / "evolution.csv", header, rows)
    truncation_limited = result.leakage > LEAKAGE_LIMIT
    doc = {
        "command": "evolve",
        "preset": preset,
        "horizon": float(result.times[-1]),
        "norm_drift": result.norm_drift,
        "leakage": result.leakage,
        "truncation_limited": truncation_limited,
        "extrema": {name: {"min": float(np.min(vals)),
                           "max": float(np.max(vals))}
                    for name, vals in result.observables.items()},
        "config": cfg.resolved(),
    }
    write_json(out / "evolution.json", doc)
    if cfg.output_bool("plots", True):
        plots.evolution_figure(result.times, result.observables,
                               out / "evolution.png")
    return EXIT_TRUNCATION if truncation_limited else EXIT_OK


class _BareSpinSystem:
    """Adapter so bare-spin states reuse the dicke state syntax."""

    def __init__(self, ladder):
        self.space = _BareSpinSpace(ladder.rep)


class _BareSpinSpace:
    def __init__(self, rep):
        self.factors = (rep,)


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="effres",
        description="Kinematic resonances, effective Hamiltonians, and "
                    "exact-diagonalization verification of atom-field models.",
    )
    parser.add_argument("command",
                        choices=["resonances", "effective", "scan", "evolve"])
    parser.add_argument("--config", metavar="PATH", default=None,
                        help="INI-style run configuration")
    parser.add_argument("--out", metavar="DIR", default=".",
                        help="output directory (created if missing)")
    parser.add_argument("--preset", default=None,
                        choices=["dicke-rwa", "dicke-nonrwa",
                                 "dicke-classical", "diamond"],
                        help="model preset (overrides the config file)")
    parser.add_argument("--seedless", action="store_true",
                        help="accepted for compatibility; every run is "
                             "deterministic by construction")
    parser.add_argument("--no-plots", action="store_true",
                        help="skip PNG figure rendering")
    return parser


DISPATCH = {
    "resonances": cmd_resonances,
    "effective": cmd_effective,
    "scan": cmd_scan,
    "evolve": cmd_evolve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, preset=args.preset)
        if args.no_plots:
            cfg.output["plots"] = "false"
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return DISPATCH[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResonantRegimeError as exc:
        print(f"resonant-regime refusal: {exc}", file=sys.stderr)
        return EXIT_RESONANT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
