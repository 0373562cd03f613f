"""``sawcavity`` command line: simulations, fits and figure data from a YAML config."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import kernels, svg
from .acoustics import emission_rate, qubit_linewidth
from .config import ConfigError, RunConfig, default_config_path, load_config
from .core import ModelError, qubit_frequency
from .dispersive import JCParams, chi_curve, chi_standard, stark_curve
from .fitting import add_noise, fit_bare_modes, fit_flux_map, fit_stark_slope
from .io import atomic_write_text, read_table, write_json, write_table
from .reflection import (FLUX_HEADER, SPECTRUM_HEADER, FluxSweepMap, ReflectionSpectrum, bare_reflection,
                         flux_sweep, flux_to_current)
from .spectral import build_interaction, coupling_strength, diagonalize

EXIT_SCHEMA = 2
EXIT_RUNTIME = 1


class JsonArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        _fail("UsageError", message, EXIT_SCHEMA)


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": str(message), "exit_code": code}) + "\n")
    raise SystemExit(code)


def _rng(cfg: RunConfig):
    return np.random.default_rng(cfg.task.seed)


def _write_svg(path, text):
    atomic_write_text(path, text)
    return path


# --------------------------------------------------------------------------- commands


def cmd_bare_spectrum(cfg: RunConfig, out: Path, threads=None) -> list:
    grid = cfg.task.spectrum.values()
    spec = bare_reflection(grid, cfg.device.modes)
    if cfg.task.noise > 0:
        spec = ReflectionSpectrum(grid, add_noise(spec.s11, cfg.task.noise, _rng(cfg)), spec.metadata)
    csv = spec.to_csv(out / "bare_spectrum.csv")
    plot = _write_svg(out / "bare_spectrum.svg", svg.line_plot(
        [(grid / 1e9, spec.magnitude, "|s11|")], "Bare cavity reflection", "frequency (GHz)", "|s11|"))
    return [csv, plot]


def _flux_axis(task, transmon):
    flux = np.linspace(task.flux_start, task.flux_stop, int(task.points))
    return flux, flux_to_current(flux, transmon)


def cmd_flux_sweep(cfg: RunConfig, out: Path, threads=None) -> list:
    dev = cfg.device
    flux, currents = _flux_axis(cfg.task.flux_sweep, dev.transmon)
    grid = cfg.task.flux_sweep.frequencies.values()
    fmap = flux_sweep(currents, grid, dev, workers=threads)
    if cfg.task.noise > 0:
        fmap = FluxSweepMap(fmap.currents, fmap.frequencies, add_noise(fmap.magnitude, cfg.task.noise, _rng(cfg)))
    csv = fmap.to_csv(out / "flux_sweep.csv")
    plot = _write_svg(out / "flux_sweep.svg", svg.heatmap(
        flux, grid / 1e9, fmap.magnitude.T, "|s11| versus flux", "flux bias (flux quanta)", "frequency (GHz)"))
    return [csv, plot]


def cmd_participation(cfg: RunConfig, out: Path, threads=None) -> list:
    dev = cfg.device
    flux, currents = _flux_axis(cfg.task.participation, dev.transmon)
    names = dev.modes.names + ["qubit"]
    header = ["current", "flux", "qubit_frequency", "eigen_index", "eigen_frequency"] + [f"p_{n}" for n in names]
    cols = [[] for _ in header]
    eig = np.empty((len(flux), len(names)))
    for i, (fl, cur) in enumerate(zip(flux, currents)):
        wq = float(qubit_frequency(cur, dev.transmon))
        es = diagonalize(build_interaction(dev.modes, dev.coupling, wq))
        eig[i] = es.eigenvalues
        part = es.participation
        for k in range(es.dimension):
            row = [cur, fl, wq, k, es.eigenvalues[k], *part[:, k]]
            for c, v in zip(cols, row):
                c.append(v)
    csv = write_table(out / "participation.csv", header, cols)
    plot = _write_svg(out / "participation.svg", svg.line_plot(
        [(flux, eig[:, k] / 1e9, None) for k in range(eig.shape[1])],
        "Hybridized mode frequencies", "flux bias (flux quanta)", "frequency (GHz)"))
    return [csv, plot]


def _jc_params(cfg: RunConfig, task) -> JCParams:
    dev = cfg.device
    mode = dev.modes.modes[dev.modes.index_of(task.mode_label)]
    g = abs(coupling_strength(mode.label, mode.kind, dev.coupling))
    return JCParams(omega_q=mode.frequency, omega_cav=mode.frequency, g=g, alpha=dev.transmon.alpha,
                    levels=task.levels, n_max=task.n_max)


def cmd_dispersive(cfg: RunConfig, out: Path, threads=None) -> list:
    task = cfg.task.dispersive
    p = _jc_params(cfg, task)
    wq = task.omega_q.values()
    chi = chi_curve(wq, p, task.phonon_index)
    std = np.array([chi_standard(p.g, w - p.omega_cav, p.alpha) if w - p.omega_cav not in (0.0, p.alpha)
                    else np.nan for w in wq])
    csv = write_table(out / "dispersive.csv", ["omega_q", "delta", "chi", "chi_standard"],
                      [wq, wq - p.omega_cav, chi, std])
    plot = _write_svg(out / "dispersive.svg", svg.line_plot(
        [(wq / 1e9, chi / 1e6, "multilevel"), (wq / 1e9, np.clip(std, -5e6, 5e6) / 1e6, "three-level")],
        f"Dispersive shift of mode {task.mode_label}", "qubit frequency (GHz)", "chi (MHz)"))
    return [csv, plot]


def cmd_stark(cfg: RunConfig, out: Path, threads=None) -> list:
    task = cfg.task.stark
    p = _jc_params(cfg, task)
    nums = np.arange(task.max_phonons + 1)
    cols = [[], [], []]
    fits = []
    series = []
    for wq in task.omega_q:
        shift = stark_curve(nums, p.with_qubit(float(wq)))
        cols[0].extend([wq] * len(nums))
        cols[1].extend(nums)
        cols[2].extend(shift)
        fit = fit_stark_slope(nums, shift)
        fits.append({"omega_q": float(wq), **fit})
        series.append((nums, shift / 1e6, f"{wq / 1e9:.4f} GHz"))
    csv = write_table(out / "stark.csv", ["omega_q", "phonons", "shift"], cols)
    js = write_json(out / "stark_fit.json", {"fits": fits})
    plot = _write_svg(out / "stark.svg", svg.line_plot(series, "Phonon-number Stark shift", "phonon number",
                                                       "shift (MHz)"))
    return [csv, js, plot]


def cmd_emission(cfg: RunConfig, out: Path, threads=None) -> list:
    dev = cfg.device
    f = cfg.task.emission.values()
    kw = dict(N_q=dev.geometry.N_q, f_c=dev.modes.center_frequency, K2=dev.energies.K2)
    gamma = emission_rate(f, **kw)
    width = qubit_linewidth(f, dev.transmon.gamma_intrinsic, **kw)
    csv = write_table(out / "emission.csv", ["frequency", "emission_rate", "linewidth"], [f, gamma, width])
    plot = _write_svg(out / "emission.svg", svg.line_plot(
        [(f / 1e9, width / 1e6, "linewidth"), (f / 1e9, gamma / 1e6, "emission")],
        "Qubit linewidth", "qubit frequency (GHz)", "rate (MHz)"))
    return [csv, plot]


def cmd_fit(cfg: RunConfig, out: Path, threads=None, data=None) -> list:
    if data is None:
        raise ConfigError("fit needs --data PATH")
    header, _ = read_table(data)
    dev = cfg.device
    if header == FLUX_HEADER:
        fmap = FluxSweepMap.from_csv(data)
        ft = cfg.task.fit
        res = fit_flux_map(fmap, dev.modes, dev.transmon, dev.coupling, g0=ft.g0, phi_q=ft.phi_q, Ib=ft.Ib,
                           max_iter=ft.max_iter, workers=threads)
        kind = "flux_map"
    elif header[:3] == SPECTRUM_HEADER[:3]:
        spec = ReflectionSpectrum.from_csv(data)
        res = fit_bare_modes(spec, N_c=dev.N_c, label_offset=dev.coupling.label_offset,
                             prominence=cfg.task.fit.prominence, max_iter=cfg.task.fit.max_iter)
        kind = "bare_modes"
    else:
        raise ConfigError(f"{data}: unrecognized CSV header {header}")
    d = res.to_dict()
    d["kind"] = kind
    return [write_json(out / "fit.json", d)]


COMMANDS = {
    "bare-spectrum": cmd_bare_spectrum,
    "flux-sweep": cmd_flux_sweep,
    "participation": cmd_participation,
    "dispersive": cmd_dispersive,
    "stark": cmd_stark,
    "emission": cmd_emission,
    "fit": cmd_fit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = JsonArgumentParser(prog="sawcavity", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=JsonArgumentParser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None, help="YAML config (default: shipped defaults)")
        p.add_argument("--out", type=Path, default=None, help="output directory (overrides task.out)")
        p.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
        p.add_argument("--seed", type=int, default=None, help="noise seed (overrides task.seed)")
        if name == "fit":
            p.add_argument("--data", type=Path, required=True, help="CSV written by bare-spectrum or flux-sweep")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config or default_config_path())
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, task=dataclasses.replace(cfg.task, seed=args.seed))
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        out = Path(args.out or cfg.task.out)
        kwargs = {"data": args.data} if args.command == "fit" else {}
        files = COMMANDS[args.command](cfg, out, args.threads, **kwargs)
    except ConfigError as exc:
        _fail("ConfigError", exc, EXIT_SCHEMA)
    except (ModelError, ValueError, OSError) as exc:
        _fail(type(exc).__name__, exc, EXIT_RUNTIME)
    print(json.dumps({"command": args.command, "backend": kernels.BACKEND, "files": [str(f) for f in files]}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
