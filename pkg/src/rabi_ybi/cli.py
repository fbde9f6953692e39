"""Command-line entry point: ``rabi-ybi <command> [--config FILE] [overrides]``.

Every run resolves a flat JSON config (file values, then command-line flags),
echoes it into the output together with the package version, and exits with
status 0 only if every check in the run passed.
"""

import argparse
import csv
import dataclasses
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from . import __version__
from .models import ModelParams, build_model
from .spectra import (
    default_workers,
    nnsd_histogram,
    reference_ensembles,
    sector_spectrum,
    sweep_stats,
    write_histogram_csv,
    write_sweep_csv,
)
from .yang_baxter import (
    ProbeConfig,
    SpectralParams,
    charge_residuals,
    charge_search_probe,
    check_rtt,
    check_ybe,
    extract_charges,
    integrable_spectral_params,
    monodromy_polynomial,
    transfer_matrix,
)
from .yang_baxter.probe import DEFAULT_ANSATZ

COMMANDS = ("verify-ybe", "verify-rtt", "charges", "spectrum", "level-stats", "sweep", "probe")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = ""
    # model
    model: str = "dicke"
    point: str | None = None
    delta: float | None = None
    omega: float | None = None
    g: float = 0.5
    epsilon: float = 0.0
    n_qubits: int = 1
    rep: str = "collective"
    n_max: int = 24
    # spectral parameters; None means drawn at random (or fixed by the point)
    u: float | None = None
    v: float | None = None
    eta: float | None = None
    samples: int = 100
    seed: int = 0
    buffer: int = 2
    charge_buffer: int = 1
    # thresholds
    ybe_threshold: float = 1e-12
    rtt_threshold: float = 1e-10
    charge_threshold: float = 1e-10
    probe_threshold: float = 1e-10
    # probe
    probe_r: float = 1.0
    probe_g: float = 0.5
    probe_n_max: int = 20
    theta_points: int = 33
    ansatz: list = field(default_factory=lambda: list(DEFAULT_ANSATZ))
    # statistics
    sector: str = "even"
    tol: float = 1e-8
    n_max_step: int = 8
    trim: float = 0.15
    unfolding_degree: int = 7
    bins: int = 40
    min_levels: int = 50
    ensemble: str | None = None
    dimension: int = 500
    draws: int = 50
    grid: list = field(default_factory=list)
    # output
    output: str | None = None
    format: str = "json"

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    def to_dict(self):
        # the output path says where a report goes, not what it contains
        d = dataclasses.asdict(self)
        d.pop("output")
        return d


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = sorted(set(data) - set(RunConfig.keys()))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    return data


def resolve_config(command, file_values, overrides):
    values = dict(file_values)
    values.update({k: v for k, v in overrides.items() if v is not None})
    values["command"] = command
    cfg = RunConfig(**values)
    _resolve_point_defaults(cfg)
    if cfg.format not in ("json", "csv"):
        raise ConfigError(f"format must be json or csv, got {cfg.format!r}")
    return cfg


def _resolve_point_defaults(cfg):
    if cfg.point not in (None, "delta0", "omega0"):
        raise ConfigError(f"point must be delta0 or omega0, got {cfg.point!r}")
    if cfg.point == "delta0":
        cfg.delta = 0.0 if cfg.delta is None else cfg.delta
        cfg.omega = 1.0 if cfg.omega is None else cfg.omega
        if cfg.delta != 0.0:
            raise ConfigError(f"point delta0 requires delta = 0, got delta = {cfg.delta}")
    elif cfg.point == "omega0":
        cfg.omega = 0.0 if cfg.omega is None else cfg.omega
        cfg.delta = 0.5 if cfg.delta is None else cfg.delta
        if cfg.omega != 0.0:
            raise ConfigError(f"point omega0 requires omega = 0, got omega = {cfg.omega}")
    else:
        cfg.delta = 0.5 if cfg.delta is None else cfg.delta
        cfg.omega = 1.0 if cfg.omega is None else cfg.omega


def model_params(cfg, **changes):
    d = dict(
        delta=cfg.delta,
        omega=cfg.omega,
        g=cfg.g,
        epsilon=cfg.epsilon,
        n_qubits=cfg.n_qubits,
        rep=cfg.rep,
        n_max=cfg.n_max,
    )
    d.update(changes)
    try:
        return ModelParams.from_dict(d)
    except (TypeError, KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _draw(rng, fixed, low=-2.0, high=2.0):
    value = rng.uniform(low, high)
    return float(value if fixed is None else fixed)


def _map_ordered(func, items):
    workers = default_workers()
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def cmd_verify_ybe(cfg):
    rng = np.random.default_rng(cfg.seed)
    draws = [
        SpectralParams(u=_draw(rng, cfg.u), v=_draw(rng, cfg.v), eta=_draw(rng, cfg.eta))
        for _ in range(cfg.samples)
    ]
    residuals = [check_ybe(p) for p in draws]
    worst = max(residuals)
    return {"max_residual": worst, "samples": len(residuals), "pass": worst <= cfg.ybe_threshold}


def _require_point(cfg):
    if cfg.point is None:
        raise ConfigError("this command needs point = delta0 or omega0")


def _rtt_spectral(cfg, params, rng):
    u, v = _draw(rng, cfg.u), _draw(rng, cfg.v)
    if cfg.point == "delta0":
        p = integrable_spectral_params("delta0", params, u, v)
    else:
        p = integrable_spectral_params("omega0", params, u, v, eta=_draw(rng, cfg.eta, 0.2, 2.0))
    if cfg.model != "generalized":
        p = dataclasses.replace(p, b=0.0, c=0.0)
    return p


def cmd_verify_rtt(cfg):
    _require_point(cfg)
    params = model_params(cfg)
    factorised = cfg.point == "omega0" and cfg.rep == "full_tensor"
    rng = np.random.default_rng(cfg.seed)
    draws = [_rtt_spectral(cfg, params, rng) for _ in range(cfg.samples)]
    try:
        T = lambda p: monodromy_polynomial(cfg.point, cfg.model, params, p, factorised)
        T(draws[0])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    def one(p):
        poly = T(p)
        return check_rtt(poly, p, cfg.buffer), check_rtt(poly, p, 0)

    results = _map_ordered(one, draws)
    projected = [r[0] for r in results]
    return {
        "point": cfg.point,
        "model": cfg.model,
        "factorised": factorised,
        "buffer": cfg.buffer,
        "n_max": cfg.n_max,
        "max_residual": max(projected),
        "max_unprojected_residual": max(r[1] for r in results),
        "samples": len(results),
        "pass": max(projected) <= cfg.rtt_threshold,
    }


def cmd_charges(cfg):
    _require_point(cfg)
    params = model_params(cfg)
    factorised = cfg.point == "omega0" and cfg.rep == "full_tensor"
    eta = 1.0 if cfg.eta is None else cfg.eta
    try:
        p = integrable_spectral_params(cfg.point, params, eta=eta)
        if cfg.model != "generalized":
            p = dataclasses.replace(p, b=0.0, c=0.0)
        tau = transfer_matrix(monodromy_polynomial(cfg.point, cfg.model, params, p, factorised))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    charges = extract_charges(tau)
    H = build_model("generalized" if cfg.model == "generalized" else "dicke", params)
    pairwise, with_h = charge_residuals(charges, H, cfg.charge_buffer)
    worst = max(pairwise.max(initial=0.0), with_h.max(initial=0.0))
    report = {
        "point": cfg.point,
        "degree": tau.degree,
        "n_charges": len(charges),
        "powers": charges.powers,
        "hamiltonian_power": (
            charges.powers[charges.hamiltonian_index] if charges.hamiltonian_index is not None else None
        ),
        "hermiticity_defects": charges.hermiticity_defects,
        "pairwise_residuals": pairwise.tolist(),
        "hamiltonian_residuals": with_h.tolist(),
        "max_residual": worst,
        "pass": worst <= cfg.charge_threshold,
    }
    if tau.degree == 1:
        report["note"] = "tau(u) is linear in u; its only non-scalar coefficient is proportional to H"
    return report


def cmd_spectrum(cfg):
    params = model_params(cfg)
    sectors = ("even", "odd") if cfg.sector == "both" else (cfg.sector,)
    try:
        spectra = [sector_spectrum(params, cfg.model, s, cfg.tol, cfg.n_max_step) for s in sectors]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = []
    for sector, sp in zip(sectors, spectra):
        for k, (e, c) in enumerate(zip(sp.eigenvalues, sp.converged)):
            rows.append({"sector": sector, "index": k, "eigenvalue": float(e), "converged": bool(c)})
    return {
        "n_levels": len(rows),
        "n_converged_prefix": {s: sp.n_converged_prefix for s, sp in zip(sectors, spectra)},
        "levels": rows,
        "pass": True,
    }


def cmd_level_stats(cfg):
    if cfg.ensemble is not None:
        stats = reference_ensembles(
            cfg.ensemble, cfg.dimension, cfg.draws, cfg.seed, cfg.trim, cfg.unfolding_degree, cfg.bins
        )
    else:
        params = model_params(cfg)
        try:
            sp = sector_spectrum(params, cfg.model, cfg.sector, cfg.tol, cfg.n_max_step)
            stats = nnsd_histogram(
                sp, cfg.unfolding_degree, cfg.bins, trim=cfg.trim, min_levels=cfg.min_levels
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    edges, density = stats.histogram
    return {
        "sector": stats.sector,
        "mean_ratio": stats.mean_ratio,
        "n_ratios": int(stats.gap_ratios.size),
        "n_levels_used": stats.n_levels_used,
        "n_degenerate_removed": stats.n_degenerate_removed,
        "histogram": {
            "bin_left": edges[:-1].tolist(),
            "bin_right": edges[1:].tolist(),
            "density": density.tolist(),
        },
        "pass": True,
        "_stats": stats,
    }


def cmd_sweep(cfg):
    if not cfg.grid:
        raise ConfigError("sweep needs a non-empty 'grid' list of parameter overrides")
    grid = []
    for i, point in enumerate(cfg.grid):
        if not isinstance(point, dict):
            raise ConfigError(f"grid[{i}] must be an object")
        grid.append(model_params(cfg, **point))
    rows = sweep_stats(
        grid,
        cfg.model,
        cfg.sector,
        cfg.trim,
        cfg.tol,
        cfg.n_max_step,
        cfg.min_levels,
    )
    return {"rows": rows, "pass": all(not r["error"] for r in rows)}


def cmd_probe(cfg):
    config = ProbeConfig(
        r=cfg.probe_r,
        g=cfg.probe_g,
        n_max=cfg.probe_n_max,
        theta_grid=list(np.linspace(0.0, np.pi / 2, cfg.theta_points)),
        ansatz=tuple(cfg.ansatz),
    )
    rows = charge_search_probe(config)
    first, last = rows[0], rows[-1]
    ok = (
        first["residual"] <= cfg.probe_threshold
        and last["residual"] <= cfg.probe_threshold
        and first["overlap_sx"] > 0.99
        and last["overlap_x"] > 0.99
    )
    return {"curve": rows, "pass": bool(ok)}


HANDLERS = {
    "verify-ybe": cmd_verify_ybe,
    "verify-rtt": cmd_verify_rtt,
    "charges": cmd_charges,
    "spectrum": cmd_spectrum,
    "level-stats": cmd_level_stats,
    "sweep": cmd_sweep,
    "probe": cmd_probe,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items() if not k.startswith("_")}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def _provenance(cfg):
    return [f"# rabi_ybi {__version__}", "# config: " + json.dumps(cfg.to_dict(), sort_keys=True)]


def render(cfg, report):
    if cfg.format == "json":
        doc = {"version": __version__, "config": cfg.to_dict(), **report}
        return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write("\n".join(_provenance(cfg)) + "\n")
    cmd = cfg.command
    if cmd == "sweep":
        write_sweep_csv(report["rows"], buf)
    elif cmd == "level-stats":
        write_histogram_csv(report["_stats"], buf)
    elif cmd in ("spectrum", "probe"):
        rows = report["levels"] if cmd == "spectrum" else report["curve"]
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    else:
        flat = {k: v for k, v in _jsonable(report).items() if not isinstance(v, (list, dict))}
        writer = csv.DictWriter(buf, fieldnames=sorted(flat), lineterminator="\n")
        writer.writeheader()
        writer.writerow(flat)
    return buf.getvalue()


def _add_override_flags(parser):
    skip = {"command", "grid", "ansatz"}
    for f in fields(RunConfig):
        if f.name in skip:
            continue
        flag = "--" + f.name.replace("_", "-")
        if f.name in ("model", "point", "rep", "sector", "ensemble", "output", "format"):
            kind = str
        elif f.name in (
            "n_qubits", "n_max", "samples", "seed", "buffer", "charge_buffer", "probe_n_max",
            "theta_points", "n_max_step", "unfolding_degree", "bins", "min_levels",
            "dimension", "draws",
        ):
            kind = int
        else:
            kind = float
        parser.add_argument(flag, dest=f.name, type=kind, default=None)
    parser.add_argument(
        "--ansatz", dest="ansatz", default=None, type=lambda s: [t for t in s.split(",") if t]
    )


def build_parser():
    parser = argparse.ArgumentParser(prog="rabi-ybi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config file")
        _add_override_flags(p)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        file_values = load_config(args.config) if args.config else {}
        cfg = resolve_config(args.command, file_values, overrides)
        report = HANDLERS[args.command](cfg)
    except (ConfigError, TypeError) as exc:
        print(f"rabi-ybi {args.command}: error: {exc}", file=sys.stderr)
        return 2
    text = render(cfg, report)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
