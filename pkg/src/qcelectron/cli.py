"""Command-line front end: spectra, extinction sweeps, Wigner grids, weak values."""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .classical_dynamics import point_kick_closed, point_kick_ode
from .electron_wavepacket import ElectronParameters, make_wavepacket, momentum_grid
from .errors import InvalidParameterError, NumericDomainError, UndefinedWeakValueError
from .perturbation import (BRIDGE, CoherentRegime, arc_check, classical_coupling,
                           energy_transfer_analytic, energy_transfer_numeric, make_config,
                           scattered_amplitudes)
from .phase_space import decohere, marginal_moments, marginals, wigner_from_scattered
from .photon_state import PhotonMode, expectation_annihilation, make_photon_state, mean_photon_number
from .spectra import (classical_limit_distribution, classify_regime, final_distribution,
                      quantum_limit_distribution)
from .weak_measurement import equivalent_field, pointer_shift

EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO = 2, 3, 4

DEFAULTS = {
    "units": "reduced",
    "electron": {"p0": 1.0e7, "beta": 0.5, "sigma_p0": 1.0, "t_drift": 0.0},
    "photon": {"alpha": 5.0, "nu": 0, "n_max": None},
    "interaction": {"detuning": 0.0, "coupling_q": 0.01, "phi0": 0.0, "length": 100.0},
    "spontaneous_approx": False,
    "grid": {"points": 4096, "span_sigmas": 10.0},
    "sweep": {"gammas": [0.0, 0.25, 0.5, 1.0, 2.0, 3.0]},
    "wigner": {"points": 512, "components": True, "decohered": True},
    "weak": {"post": None, "single_photon_field": 1.0e-7, "samples": 64},
    "regimes": [
        {"sigma_p0": 5.0, "alpha": 3.0, "nu": 0},
        {"sigma_p0": 5.0, "alpha": 0.0, "nu": 1},
        {"sigma_p0": 0.1, "alpha": 3.0, "nu": 0},
        {"sigma_p0": 0.1, "alpha": 0.0, "nu": 1},
        {"sigma_p0": 5.0, "alpha": 1.0, "nu": 1},
    ],
}
SWEEP_GAMMA_FLOOR = 1e-3


class ConfigError(ValueError):
    pass


# -- configuration -----------------------------------------------------------

def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _complex(v, name: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, dict) and set(v) <= {"re", "im"}:
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    raise ConfigError(f"{name} must be a number, [re, im] or {{re, im}}")


def resolve_config(raw: dict, args) -> dict:
    cfg = _merge(DEFAULTS, raw)
    if cfg.get("units") != "reduced":
        raise ConfigError(f"units must be 'reduced', got {cfg.get('units')!r}")
    phys = cfg.pop("physical", None)
    if phys is not None:
        try:
            beta, lam, dz = float(phys["beta"]), float(phys["wavelength"]), float(phys["delta_z"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("physical block needs numeric beta, wavelength and delta_z") from exc
        if not (0 < beta < 1 and lam > 0 and dz > 0):
            raise ConfigError("physical block out of range")
        gamma0 = (2.0 * math.pi / beta) * (dz / lam)
        cfg["electron"]["beta"] = beta
        cfg["electron"]["sigma_p0"] = 0.5 / gamma0
        cfg["physical_converted"] = {"beta": beta, "wavelength": lam, "delta_z": dz, "gamma0": gamma0}
    if args.grid_points is not None:
        cfg["grid"]["points"] = args.grid_points
    if args.grid_span_sigmas is not None:
        cfg["grid"]["span_sigmas"] = args.grid_span_sigmas
    if int(cfg["grid"]["points"]) < 16 or float(cfg["grid"]["span_sigmas"]) <= 0:
        raise ConfigError("grid points must be >= 16 and span_sigmas > 0")
    alpha = _complex(cfg["photon"]["alpha"], "photon.alpha")
    cfg["photon"]["alpha"] = [alpha.real, alpha.imag]
    return cfg


def _wavepacket(cfg: dict, sigma_p0=None):
    e = cfg["electron"]
    params = ElectronParameters(float(e["p0"]), float(e["beta"]))
    return make_wavepacket(params, float(e["sigma_p0"] if sigma_p0 is None else sigma_p0),
                           float(e["t_drift"]))


def _photon(block: dict):
    alpha = _complex(block.get("alpha", 0.0), "alpha")
    return make_photon_state(alpha, int(block.get("nu", 0)), block.get("n_max"))


def _interaction(cfg: dict):
    i = cfg["interaction"]
    return make_config(float(i["detuning"]), float(i["coupling_q"]), float(i["phi0"]),
                       float(i["length"]))


# -- output ------------------------------------------------------------------

def _fmt(x) -> str:
    return "%.17g" % x


def _params_line(cfg: dict) -> str:
    return "# params: " + json.dumps(cfg, sort_keys=True)


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _csv_table(cfg: dict, columns: dict) -> str:
    buf = io.StringIO()
    buf.write(_params_line(cfg) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(columns))
    for row in zip(*columns.values()):
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _csv_matrix(cfg: dict, rows, cols, mat, row_name="p", col_name="z") -> str:
    buf = io.StringIO()
    buf.write(_params_line(cfg) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"{row_name}\\{col_name}"] + [_fmt(c) for c in cols])
    for r, line in zip(rows, mat):
        w.writerow([_fmt(r)] + [_fmt(v) for v in line])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, allow_nan=True) + "\n"


def _cplx(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


# -- subcommands -------------------------------------------------------------

def cmd_spectrum(cfg: dict, out: Path, fmt: str, workers: int) -> int:
    wp = _wavepacket(cfg)
    ph = _photon(cfg["photon"])
    ic = _interaction(cfg)
    k = momentum_grid(wp, int(cfg["grid"]["points"]), float(cfg["grid"]["span_sigmas"]))
    s = scattered_amplitudes(wp, ph, ic, k_grid=k, spontaneous_approx=bool(cfg["spontaneous_approx"]))
    final = final_distribution(s)
    transfer = energy_transfer_numeric(s)
    classical = classical_limit_distribution(
        wp, ic, CoherentRegime(abs(expectation_annihilation(ph)) ** 2), k_grid=k)
    # sideband strength set by the photon intensity, so Fock input also has a PINEM limit
    y_q = BRIDGE * ic.coupling_q * math.sqrt(mean_photon_number(ph))
    quantum = quantum_limit_distribution(wp, ic, y_q, k_grid=k)
    regime = classify_regime(wp, ph)
    summary = {
        "params": cfg,
        "moments": {
            name: {"mean_shift": r.mean_shift, "variance": r.variance, "norm": r.norm,
                   "warnings": list(r.warnings)}
            for name, r in (("final", final), ("classical_limit", classical), ("quantum_limit", quantum))
        },
        "transfer": asdict(transfer),
        "transfer_analytic": asdict(energy_transfer_analytic(
            wp, CoherentRegime(abs(expectation_annihilation(ph)) ** 2), ic)),
        "arc_residual": arc_check(transfer),
        "classical_coupling_Y": classical_coupling(ic, ph),
        "regime": asdict(regime),
    }
    columns = {
        "p": s.p_grid,
        "rho_initial": wp.density(k),
        "rho_final": final.density,
        "rho_classical_limit": classical.density,
        "rho_quantum_limit": quantum.density,
    }
    if fmt == "csv":
        _write(out / "spectrum.csv", _csv_table(cfg, columns))
        _write(out / "spectrum.json", _json(summary))
    else:
        summary["columns"] = {key: [float(v) for v in val] for key, val in columns.items()}
        _write(out / "spectrum.json", _json(summary))
    return 0


def _sweep_point(cfg: dict, gamma: float) -> list:
    g = max(gamma, SWEEP_GAMMA_FLOOR)
    wp = _wavepacket(cfg, sigma_p0=0.5 / g)
    ph = _photon(cfg["photon"])
    ic = _interaction(cfg)
    k = momentum_grid(wp, int(cfg["grid"]["points"]), float(cfg["grid"]["span_sigmas"]))
    s = scattered_amplitudes(wp, ph, ic, k_grid=k, spontaneous_approx=bool(cfg["spontaneous_approx"]))
    num = energy_transfer_numeric(s).dE_interference
    regime = CoherentRegime(abs(expectation_annihilation(ph)) ** 2)
    ana = energy_transfer_analytic(wp, regime, ic).dE_interference
    # v0 * dp_point with eE_cL = 4Y
    point = -4.0 * classical_coupling(ic, ph) * ic.sinc_factor * math.cos(ic.phase)
    ratio = num / point if point != 0 else float("nan")
    return [gamma, num, ana, ratio, math.exp(-0.5 * gamma**2)]


def cmd_sweep_gamma(cfg: dict, out: Path, fmt: str, workers: int) -> int:
    gammas = [float(g) for g in cfg["sweep"]["gammas"]]
    if not gammas or any(g < 0 for g in gammas):
        raise ConfigError("sweep.gammas must be a nonempty list of non-negative values")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(pool.map(lambda g: _sweep_point(cfg, g), gammas))
    names = ["gamma", "dE1_numeric", "dE1_analytic", "ratio_to_point_kick", "exp_minus_gamma_sq_half"]
    columns = {n: [r[i] for r in rows] for i, n in enumerate(names)}
    if fmt == "csv":
        _write(out / "sweep_gamma.csv", _csv_table(cfg, columns))
    else:
        _write(out / "sweep_gamma.json", _json({"params": cfg, "columns": columns,
                                                "gamma_floor": SWEEP_GAMMA_FLOOR}))
    return 0


def cmd_wigner(cfg: dict, out: Path, fmt: str, workers: int) -> int:
    wp = _wavepacket(cfg)
    ph = _photon(cfg["photon"])
    ic = _interaction(cfg)
    wcfg = cfg["wigner"]
    n = int(wcfg["points"])
    k = momentum_grid(wp, n, float(cfg["grid"]["span_sigmas"]))
    s = scattered_amplitudes(wp, ph, ic, k_grid=k, spontaneous_approx=bool(cfg["spontaneous_approx"]))
    w = wigner_from_scattered(s, n_points=n, span_sigmas=float(cfg["grid"]["span_sigmas"]))
    mats = {"total": w.total}
    if wcfg.get("components", True):
        for (m, n_), comp in sorted(w.components.items()):
            mats[f"W_{m}_{n_}_re"] = np.real(comp)
            if m != n_:
                mats[f"W_{m}_{n_}_im"] = np.imag(comp)
    d = None
    if wcfg.get("decohered", True):
        d = decohere(w)
        mats["decohered"] = d.total
    pm, zm = marginals(w)
    summary = {
        "params": cfg,
        "p_grid_offset_from_p0": [float(v) for v in w.k_grid],
        "p0": w.p0,
        "z_grid": [float(v) for v in w.z_grid],
        "norm": float(np.sum(w.total) * w.dk * w.dz),
        "marginal_mean_shift": marginal_moments(w)[0],
        "marginal_variance": marginal_moments(w)[1],
    }
    if d is not None:
        summary["decohered_mean_shift"], summary["decohered_variance"] = marginal_moments(d)
    if fmt == "csv":
        for name, mat in mats.items():
            _write(out / f"wigner_{name}.csv", _csv_matrix(cfg, w.p_grid, w.z_grid, mat))
        _write(out / "wigner.json", _json(summary))
    else:
        summary["matrices"] = {name: np.asarray(mat).tolist() for name, mat in mats.items()}
        summary["momentum_marginal"] = pm.tolist()
        summary["position_marginal"] = zm.tolist()
        _write(out / "wigner.json", _json(summary))
    return 0


def cmd_weak_value(cfg: dict, out: Path, fmt: str, workers: int) -> int:
    wp = _wavepacket(cfg)
    pre = _photon(cfg["photon"])
    wk = cfg["weak"]
    post = pre if wk.get("post") is None else _photon(wk["post"])
    if "eff_volume" in wk:
        mode = PhotonMode(float(wk["eff_volume"]))
    else:
        mode = PhotonMode.from_single_photon_field(float(wk["single_photon_field"]))
    ic = _interaction(cfg)
    try:
        r = pointer_shift(wp, pre, post, mode, ic, n_nodes=int(wk.get("samples", 64)))
    except UndefinedWeakValueError as exc:
        _write(out / "weak_value.json", _json({"params": cfg, "error": {
            "type": "UndefinedWeakValue", "message": str(exc)}}))
        raise
    e_c = equivalent_field(pre, mode) if post is pre else 2.0 * mode.single_photon_field * abs(
        expectation_annihilation(pre))
    closed = point_kick_closed(ic, e_c)
    ode = point_kick_ode(ic, e_c, tol=1e-10, m_eff=wp.params.m_eff)

    def rel(a, b):
        return abs(a - b) / max(abs(b), 1e-15)

    report = {
        "params": cfg,
        "t_samples": r.t_samples.tolist(),
        "a_weak_samples": [_cplx(v) for v in r.a_weak_samples],
        "a_weak_t0": _cplx(r.a_weak),
        "a_weak_time_avg": _cplx(r.a_weak_time_avg),
        "postselection_amplitude": _cplx(r.postselection_prob_amp),
        "postselection_probability": r.postselection_prob,
        "pointer_shift_z": r.pointer_shift_z,
        "pointer_shift_p": r.pointer_shift_p,
        "chain_shift_p": r.chain_shift_p,
        "equivalent_field_E_c": e_c,
        "dp_point_closed": closed,
        "dp_point_ode": ode.dp_ode,
        "rel_discrepancy_closed": rel(r.pointer_shift_p, closed),
        "rel_discrepancy_ode": rel(r.pointer_shift_p, ode.dp_ode),
        "ode_rel_err": ode.rel_err,
    }
    _write(out / "weak_value.json", _json(report))
    return 0


def cmd_regimes(cfg: dict, out: Path, fmt: str, workers: int) -> int:
    rows = []
    for item in cfg["regimes"]:
        wp = _wavepacket(cfg, sigma_p0=float(item["sigma_p0"]))
        ph = _photon(item)
        rows.append(asdict(classify_regime(wp, ph)) | {"sigma_p0": float(item["sigma_p0"]),
                                                        "alpha_abs": abs(ph.alpha),
                                                        "nu": ph.nu_added})
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(_params_line(cfg) + "\n")
        keys = ["sigma_p0", "alpha_abs", "nu", "gamma_decay", "label", "electron", "photon",
                "distance_to_classical_photon", "distance_to_quantum_photon"]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for row in rows:
            w.writerow([_fmt(row[k]) if isinstance(row[k], float) else row[k] for k in keys])
        _write(out / "regimes.csv", buf.getvalue())
    else:
        _write(out / "regimes.json", _json({"params": cfg, "regimes": rows}))
    for row in rows:
        print(f"Gamma={row['gamma_decay']:.4g} |alpha|={row['alpha_abs']:.4g} nu={row['nu']}: {row['label']}")
    return 0


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep-gamma": cmd_sweep_gamma,
    "wigner": cmd_wigner,
    "weak-value": cmd_weak_value,
    "regimes": cmd_regimes,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcelectron", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON configuration file")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--grid-points", type=int)
        p.add_argument("--grid-span-sigmas", type=float)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = {}
        if args.config is not None:
            try:
                raw = json.loads(args.config.read_text())
            except OSError as exc:
                print(f"error: cannot read config: {exc}", file=sys.stderr)
                return EXIT_IO
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
            if not isinstance(raw, dict):
                raise ConfigError("config must be a JSON object")
        cfg = resolve_config(raw, args)
        return COMMANDS[args.command](cfg, args.out, args.format, args.workers)
    except (ConfigError, InvalidParameterError, KeyError, TypeError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericDomainError, UndefinedWeakValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
