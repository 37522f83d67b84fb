"""Command-line front end writing CSV/JSON artifacts plus a metadata sidecar.

Every invocation produces exactly one artifact (deterministic bytes for a
given configuration; timestamps live only in the sidecar) and one
`<output>.meta.json` sidecar recording inputs, versions and wall time.

Exit codes: 0 success, 1 verification failure, 2 validation error,
3 io error, 64 usage error.
"""

from __future__ import annotations

import argparse
import datetime
import math
import os
import platform
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__, kernels
from .basis import build_oscillator_basis
from .deform import make_deformation
from .io import read_json, write_csv, write_json, write_text_atomic
from .numerics import SampledFunction, integrate, lowest_eigenvalues, make_grid
from .states import (
    deformed_coherent_wavefunction,
    physical_uncertainties,
    save_state_csv,
    save_state_json,
    squeezed_coefficients,
    wavefunction_from_coefficients,
)
from .unitary import (
    matrix_elements_closed_form,
    overlap_matrix,
    save_matrix_csv,
    save_matrix_json,
    unitarity_defect,
)
from .verify import (
    DEFAULT_BOUNDS,
    assemble_hamiltonian,
    base_potential,
    full_report,
    report_to_json,
    report_violations,
)

__all__ = ["RunConfig", "parse_and_dispatch", "limit_scan", "main", "entry"]

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_USAGE = 64

COMMANDS = ("deform", "spectrum", "unitary", "coherent", "squeezed", "verify", "limit-scan")

_DEFAULTS = {
    "lam": 1.0,
    "z_re": 1.0,
    "z_im": 0.0,
    "xi_r": 0.0,
    "xi_phi": 0.0,
    "n_max": 48,
    "truncation": 40,
    "x_min": -12.0,
    "x_max": 12.0,
    "n_points": 4001,
    "levels": 8,
    "block": None,
    "route": "overlap",
    "lambdas": "1e2,1e3,1e4",
    "format": None,
    "output": None,
}

_CONFIG_KEYS = {
    "lambda": "lam",
    "z_re": "z_re",
    "z_im": "z_im",
    "xi_r": "xi_r",
    "xi_phi": "xi_phi",
    "n_max": "n_max",
    "truncation": "truncation",
    "x_min": "x_min",
    "x_max": "x_max",
    "n_points": "n_points",
    "levels": "levels",
    "block": "block",
    "route": "route",
    "lambdas": "lambdas",
    "format": "format",
    "output": "output",
}

_MAX_LEVELS = 12


@dataclass
class RunConfig:
    command: str
    lam: float
    z_re: float
    z_im: float
    xi_r: float
    xi_phi: float
    n_max: int
    truncation: int
    x_min: float
    x_max: float
    n_points: int
    levels: int
    block: int | None
    route: str
    lambdas: str
    format: str
    output: str


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # distinct exit code for bad usage
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="isospec", description=__doc__, add_help=True)
    sub = parser.add_subparsers(dest="command")
    sub.required = True

    def common(p):
        p.add_argument("--config", help="JSON file of defaults; explicit flags win")
        p.add_argument("--output", help="artifact path (default: <command>.<ext>)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--lambda", dest="lam", type=float, help="deformation parameter, outside [-1, 0]")
        p.add_argument("--n-max", dest="n_max", type=int, help="highest retained level")
        p.add_argument("--truncation", "-N", dest="truncation", type=int, help="matrix/state truncation")
        p.add_argument("--x-min", dest="x_min", type=float)
        p.add_argument("--x-max", dest="x_max", type=float)
        p.add_argument("--n-points", dest="n_points", type=int, help="grid points (odd)")

    for name in COMMANDS:
        p = sub.add_parser(name)
        common(p)
        if name in ("spectrum", "verify"):
            p.add_argument("--levels", type=int, help="number of eigenvalues to compare (1..12)")
        if name == "unitary":
            p.add_argument("--route", choices=("overlap", "closed-form"))
            p.add_argument("--block", type=int, help="leading block for the unitarity defect")
        if name in ("coherent", "squeezed"):
            p.add_argument("--z-re", dest="z_re", type=float)
            p.add_argument("--z-im", dest="z_im", type=float)
        if name == "squeezed":
            p.add_argument("--xi-r", dest="xi_r", type=float)
            p.add_argument("--xi-phi", dest="xi_phi", type=float)
        if name == "limit-scan":
            p.add_argument("--lambdas", help="comma-separated parameter list (empty allowed)")
    return parser


def _load_config_file(path) -> dict:
    payload = read_json(path)
    if not isinstance(payload, dict):
        raise ValueError(f"config file must hold a JSON object, got {type(payload).__name__}")
    out = {}
    for key, value in payload.items():
        if key == "command":
            continue  # the subcommand comes from the command line
        if key not in _CONFIG_KEYS:
            raise ValueError(f"unknown config key {key!r}")
        out[_CONFIG_KEYS[key]] = value
    return out


def _resolve(args: argparse.Namespace) -> RunConfig:
    merged = dict(_DEFAULTS)
    if getattr(args, "config", None):
        merged.update(_load_config_file(args.config))
    for key in _DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag

    command = args.command
    fmt = merged["format"]
    if fmt is None:
        fmt = "json" if command == "verify" else "csv"
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    if command == "verify" and fmt != "json":
        raise ValueError("the verify report is a JSON document; csv is not supported")
    output = merged["output"] or f"{command}.{fmt}"

    cfg = RunConfig(
        command=command,
        lam=float(merged["lam"]),
        z_re=float(merged["z_re"]),
        z_im=float(merged["z_im"]),
        xi_r=float(merged["xi_r"]),
        xi_phi=float(merged["xi_phi"]),
        n_max=int(merged["n_max"]),
        truncation=int(merged["truncation"]),
        x_min=float(merged["x_min"]),
        x_max=float(merged["x_max"]),
        n_points=int(merged["n_points"]),
        levels=int(merged["levels"]),
        block=None if merged["block"] is None else int(merged["block"]),
        route=str(merged["route"]),
        lambdas=str(merged["lambdas"]),
        format=fmt,
        output=str(output),
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.command != "limit-scan" and (-1.0 <= cfg.lam <= 0.0 or math.isnan(cfg.lam)):
        raise ValueError(
            f"--lambda must lie outside the closed interval [-1, 0]; got {cfg.lam}"
        )
    if cfg.truncation < 1:
        raise ValueError(f"--truncation must be >= 1, got {cfg.truncation}")
    if not 1 <= cfg.levels <= _MAX_LEVELS:
        raise ValueError(f"--levels must be in 1..{_MAX_LEVELS}, got {cfg.levels}")
    if cfg.route not in ("overlap", "closed-form"):
        raise ValueError(f"--route must be overlap or closed-form, got {cfg.route!r}")
    if not 0.0 <= cfg.xi_r <= 1.0:
        raise ValueError(f"--xi-r must be in [0, 1], got {cfg.xi_r}")
    if cfg.block is not None and cfg.block < 1:
        raise ValueError(f"--block must be >= 1, got {cfg.block}")
    _parse_lambda_list(cfg.lambdas)


def _parse_lambda_list(raw: str):
    toks = [t for t in (tok.strip() for tok in str(raw).split(",")) if t]
    values = [float(t) for t in toks]
    for lam in values:
        if -1.0 <= lam <= 0.0 or math.isnan(lam):
            raise ValueError(f"--lambdas entries must lie outside [-1, 0]; got {lam}")
    return values


def _make_basis(cfg: RunConfig):
    grid = make_grid(cfg.x_min, cfg.x_max, cfg.n_points)
    return build_oscillator_basis(grid, cfg.n_max)


def limit_scan(basis, lambdas, N: int = 40, z: complex = 1.0 + 0.0j) -> list:
    """Per-parameter decay diagnostics for the large-parameter limit.

    Each row reports sup|phi|, the deviation of the ground-ground matrix
    element from 1, the L2 distance of the deformed ground state to the
    base one, and the physical uncertainty product of the deformed coherent
    state at the given z.
    """
    rows = []
    w_psi0 = basis.eigenfunctions[0]
    for lam in lambdas:
        d = make_deformation(basis, lam)
        theta0 = d.theta[0]
        diff = theta0.values - w_psi0.values
        u00 = integrate(SampledFunction(basis.grid, w_psi0.values * theta0.values))
        psi_z = deformed_coherent_wavefunction(z, d, N)
        product = physical_uncertainties(psi_z)[2]
        rows.append(
            {
                "lambda": float(lam),
                "sup_phi": float(np.abs(d.phi.values).max()),
                "u00_minus_one": float(abs(u00 - 1.0)),
                "theta0_distance": float(math.sqrt(integrate(SampledFunction(basis.grid, diff * diff)))),
                "uncertainty_product": float(product),
            }
        )
    return rows


_SCAN_COLUMNS = ("lambda", "sup_phi", "u00_minus_one", "theta0_distance", "uncertainty_product")


def _run_deform(cfg: RunConfig) -> int:
    basis = _make_basis(cfg)
    d = make_deformation(basis, cfg.lam)
    columns = {
        "x": basis.grid.x,
        "phi": d.phi.values,
        "W_hat": d.W_hat.values,
        "V_lambda": d.V_lambda.values,
        "theta0": d.theta[0].values,
    }
    if cfg.format == "csv":
        write_csv(cfg.output, list(columns), list(columns.values()))
    else:
        payload = {"lambda": cfg.lam}
        payload.update({k: [float(v) for v in arr] for k, arr in columns.items()})
        write_json(cfg.output, payload)
    return EXIT_OK


def _run_spectrum(cfg: RunConfig) -> int:
    basis = _make_basis(cfg)
    d = make_deformation(basis, cfg.lam)
    base = lowest_eigenvalues(assemble_hamiltonian(base_potential(basis)), cfg.levels)
    deformed = lowest_eigenvalues(assemble_hamiltonian(d.V_lambda), cfg.levels)
    if cfg.format == "csv":
        write_csv(cfg.output, ["n", "base", "deformed"], [np.arange(cfg.levels, dtype=float), base, deformed])
    else:
        write_json(
            cfg.output,
            {
                "lambda": cfg.lam,
                "levels": cfg.levels,
                "base": [float(v) for v in base],
                "deformed": [float(v) for v in deformed],
            },
        )
    return EXIT_OK


def _run_unitary(cfg: RunConfig) -> int:
    basis = _make_basis(cfg)
    d = make_deformation(basis, cfg.lam)
    build = overlap_matrix if cfg.route == "overlap" else matrix_elements_closed_form
    U = build(basis, d, cfg.truncation)
    block = cfg.block if cfg.block is not None else max(1, cfg.truncation // 4)
    left, right = unitarity_defect(U, block)
    print(f"unitarity defect on leading {block}x{block} block: left={left:.3e} right={right:.3e}")
    if cfg.format == "csv":
        save_matrix_csv(U, cfg.output)
    else:
        save_matrix_json(U, cfg.output)
    return EXIT_OK


def _state_metadata(cfg: RunConfig, squeezed: bool) -> dict:
    return {
        "lambda": cfg.lam,
        "z": {"re": cfg.z_re, "im": cfg.z_im},
        "xi": {"r": cfg.xi_r, "phi": cfg.xi_phi} if squeezed else {"r": 0.0, "phi": 0.0},
        "truncation": cfg.truncation,
    }


def _run_state(cfg: RunConfig, squeezed: bool) -> int:
    basis = _make_basis(cfg)
    d = make_deformation(basis, cfg.lam)
    z = complex(cfg.z_re, cfg.z_im)
    if squeezed:
        xi = cfg.xi_r * complex(math.cos(cfg.xi_phi), math.sin(cfg.xi_phi))
        coeff = squeezed_coefficients(xi, z, cfg.truncation, basis_tag="theta-basis")
        psi = wavefunction_from_coefficients(coeff, d)
    else:
        psi = deformed_coherent_wavefunction(z, d, cfg.truncation)
    if cfg.format == "csv":
        save_state_csv(psi, cfg.output)
    else:
        save_state_json(psi, cfg.output, _state_metadata(cfg, squeezed))
    return EXIT_OK


def _run_verify(cfg: RunConfig) -> int:
    basis = _make_basis(cfg)
    report = full_report(basis, cfg.lam, cfg.levels, cfg.truncation)
    violations = report_violations(report)
    write_text_atomic(cfg.output, report_to_json(report))
    spread = float(np.abs(report.base_eigenvalues - report.deformed_eigenvalues).max())
    checks = [
        ("spectral match", spread, DEFAULT_BOUNDS["spectral_match"]),
        ("eigenfunction residual", float(report.eigen_residuals.max()), DEFAULT_BOUNDS["eigen_residual"]),
        ("orthonormality", report.gram_defect, DEFAULT_BOUNDS["gram_defect"]),
        ("factorization identity", report.riccati_residual, DEFAULT_BOUNDS["riccati_residual"]),
        ("unitarity", max(report.unitarity_defect), DEFAULT_BOUNDS["unitarity_defect"]),
    ]
    for name, value, bound in checks:
        status = "ok  " if value <= bound else "FAIL"
        print(f"{status} {name}: {value:.3e} (bound {bound:.1e})")
    return EXIT_VERIFY_FAILED if violations else EXIT_OK


def _run_limit_scan(cfg: RunConfig) -> int:
    lambdas = _parse_lambda_list(cfg.lambdas)
    basis = _make_basis(cfg)
    rows = limit_scan(basis, lambdas, N=cfg.truncation, z=complex(cfg.z_re, cfg.z_im))
    if cfg.format == "csv":
        columns = [np.array([row[name] for row in rows], dtype=np.float64) for name in _SCAN_COLUMNS]
        write_csv(cfg.output, list(_SCAN_COLUMNS), columns)
    else:
        write_json(cfg.output, {"rows": rows})
    return EXIT_OK


_RUNNERS = {
    "deform": _run_deform,
    "spectrum": _run_spectrum,
    "unitary": _run_unitary,
    "coherent": lambda cfg: _run_state(cfg, squeezed=False),
    "squeezed": lambda cfg: _run_state(cfg, squeezed=True),
    "verify": _run_verify,
    "limit-scan": _run_limit_scan,
}


def _write_sidecar(cfg: RunConfig, wall_time: float) -> None:
    try:
        backend = kernels.active_backend()
    except (RuntimeError, ValueError):
        backend = "unresolved"
    versions = {
        "isospec": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }
    if kernels.numba_available():
        import numba

        versions["numba"] = numba.__version__
    meta = {
        "command": cfg.command,
        "config": {key: getattr(cfg, attr) for key, attr in _CONFIG_KEYS.items()},
        "backend": backend,
        "versions": versions,
        "wall_time_s": wall_time,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    write_json(cfg.output + ".meta.json", meta)


def _apply_thread_cap() -> None:
    raw = os.environ.get("ISOSPEC_THREADS", "").strip()
    if not raw:
        return
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"ISOSPEC_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ValueError(f"ISOSPEC_THREADS must be >= 0, got {n}")
    if n > 0 and kernels.numba_available():
        import numba

        try:
            numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
        except ValueError:
            pass


def parse_and_dispatch(argv) -> int:
    """Parse flags (plus optional --config JSON), run one command, write one
    artifact and its metadata sidecar; returns the process exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    start = time.perf_counter()
    try:
        status = _RUNNERS[cfg.command](cfg)
        _write_sidecar(cfg, time.perf_counter() - start)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"wrote {cfg.output}")
    return status


def main(argv=None) -> int:
    try:
        _apply_thread_cap()
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return parse_and_dispatch(sys.argv[1:] if argv is None else list(argv))


def entry() -> None:
    raise SystemExit(main())
