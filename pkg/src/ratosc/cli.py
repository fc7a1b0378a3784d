"""Command-line interface.

Every computation in the library is exposed as a subcommand that writes a
machine-readable CSV or JSON file (17-significant-digit values, metadata
header) and optionally a basic plot.  Exit codes: 0 success, 1 usage or
validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from . import beamsplitter as bs
from . import coherent as co
from . import observables as ob
from . import system as sy
from .specfun import NumericalError, SignedLog, hermite_phi, integrate, log_pochhammer

__all__ = ["main", "run", "RunConfig", "UsageError"]


class UsageError(Exception):
    """Bad flags or invalid parameter combinations; exits with code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract wants 1
        raise UsageError(message)


@dataclass
class RunConfig:
    """Everything a subcommand needs, normalised from argv.

    Round-trips through to_dict/from_dict unchanged, which is what makes
    the output metadata reproducible.
    """

    command: str
    variant: str = "nonlinear"
    m: int = 4
    mu: int = -5
    z_re: float = 0.0
    z_im: float = 0.0
    z_abs_grid: list = field(default_factory=list)   # [min, max, count]
    times: list = field(default_factory=list)
    x_grid: list = field(default_factory=list)
    p_grid: list = field(default_factory=list)
    k: int = 0
    parity: str = "even"
    tail_tol: float = 1e-14
    quad_tol: float = 1e-10
    output: str = ""
    fmt: str = "csv"
    plot: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(data: dict) -> "RunConfig":
        return RunConfig(**data)

    @property
    def z(self) -> complex:
        return complex(self.z_re, self.z_im)


def _parse_grid(text: str, name: str) -> list:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"{name} must look like min:max:count, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"cannot parse {name} {text!r}: {exc}") from None
    if count < 1 or hi < lo:
        raise UsageError(f"{name} needs max >= min and count >= 1")
    return [lo, hi, count]


def _grid_values(grid: list) -> np.ndarray:
    lo, hi, count = grid
    return np.linspace(lo, hi, int(count))


def _format_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _write_rows(config: RunConfig, columns: list[str], rows, meta: dict) -> str:
    path = config.output or f"{config.command}.{config.fmt}"
    if config.fmt == "csv":
        lines = [f"# ratosc {__version__}"]
        for key, value in config.to_dict().items():
            lines.append(f"# {key} = {value}")
        for key, value in meta.items():
            lines.append(f"# {key} = {value}")
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_format_value(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        payload = {
            "config": config.to_dict(),
            "meta": meta,
            "columns": columns,
            "data": [[float(v) for v in row] for row in rows],
        }
        text = json.dumps(payload, indent=1) + "\n"
    with open(path, "w") as handle:
        handle.write(text)
    return path


def _maybe_plot(config: RunConfig, columns, rows):
    if not config.plot:
        return None
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise UsageError("--plot requires matplotlib (install the 'plot' extra)")
    data = np.asarray([[float(v) for v in row] for row in rows])
    fig, ax = plt.subplots()
    if config.command == "wigner":
        nx, np_count = int(config.x_grid[2]), int(config.p_grid[2])
        grid = data[:, 2].reshape(nx, np_count)
        im = ax.imshow(grid.T, origin="lower", aspect="auto",
                       extent=[config.x_grid[0], config.x_grid[1],
                               config.p_grid[0], config.p_grid[1]])
        fig.colorbar(im, ax=ax)
        ax.set_xlabel(columns[0])
        ax.set_ylabel(columns[1])
    elif config.command == "beamsplitter":
        side = int(math.isqrt(len(rows)))
        im = ax.imshow(data[:, 2].reshape(side, side), origin="lower")
        fig.colorbar(im, ax=ax)
    else:
        for j in range(1, data.shape[1]):
            ax.plot(data[:, 0], data[:, j], label=columns[j])
        ax.set_xlabel(columns[0])
        ax.legend()
    out = (config.output or f"{config.command}.{config.fmt}") + ".png"
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _spec(config: RunConfig) -> co.CoherentSpec:
    return co.CoherentSpec(config.variant, config.m, config.mu, config.z)


def _cmd_spectrum(config: RunConfig):
    rows = []
    for mu in sy.lowest_weights(config.m):
        for k in range(config.k + 1):
            label = sy.StateLabel(config.m, mu, k)
            rows.append([mu, k, label.nu, sy.energy(label)])
    rows.sort(key=lambda r: (r[3], r[0]))
    return ["mu", "k", "nu", "energy"], rows, {}


def _cmd_potential(config: RunConfig):
    x = _grid_values(config.x_grid)
    v = sy.potential(config.m, x)
    vh = sy.hamiltonian_potential(config.m, x)
    rows = [[xi, vi, vhi] for xi, vi, vhi in zip(x, v, vh)]
    return ["x", "potential", "hamiltonian_potential"], rows, {}


def _cmd_eigenstate(config: RunConfig):
    label = sy.StateLabel(config.m, config.mu, config.k)
    x = _grid_values(config.x_grid)
    ev = sy.EigenfunctionEvaluator(label)
    rows = [[xi, a, b, c] for xi, a, b, c in
            zip(x, ev(x), ev(x, 1), ev(x, 2))]
    return ["x", "psi", "dpsi", "d2psi"], rows, {"nu": label.nu, "energy": sy.energy(label)}


def _cmd_coeffs(config: RunConfig):
    coeffs = co.coefficients(_spec(config), config.tail_tol)
    rows = [[k, coeffs.entries[k].real, coeffs.entries[k].imag,
             abs(coeffs.entries[k]) ** 2] for k in range(len(coeffs.entries))]
    meta = {"K": coeffs.K, "tail_mass": coeffs.tail_mass}
    return ["k", "re_A", "im_A", "weight"], rows, meta


def _cmd_energy(config: RunConfig):
    rows = []
    for az in _grid_values(config.z_abs_grid):
        spec = co.CoherentSpec(config.variant, config.m, config.mu, complex(az))
        rows.append([az, ob.energy_expectation(spec, "closed_form"),
                     ob.energy_expectation(spec, "direct", config.tail_tol)])
    return ["abs_z", "energy_closed_form", "energy_direct"], rows, {}


def _cmd_density(config: RunConfig):
    spec = _spec(config)
    times = config.times or [0.0]
    x = _grid_values(config.x_grid) if config.x_grid else None
    x, rho = co.density_profile(spec, times, x=x, tail_tol=config.tail_tol)
    coeffs = co.coefficients(spec, config.tail_tol)
    columns = ["x"] + [f"rho_t{i}" for i in range(len(times))]
    rows = [[x[j]] + [rho[i, j] for i in range(len(times))] for j in range(x.size)]
    meta = {"times": list(times), "K": coeffs.K, "tail_mass": coeffs.tail_mass,
            "period": math.pi / (spec.m + 1)}
    return columns, rows, meta


def _cmd_cat(config: RunConfig):
    spec = _spec(config)
    cat = co.cat_coefficients(spec, config.parity, normalize=True,
                              tail_tol=config.tail_tol)
    times = config.times or [0.0]
    x = _grid_values(config.x_grid) if config.x_grid else co.default_grid(spec, config.tail_tol)
    psi = sy.wavefunction_rows(spec.m, spec.mu, range(len(cat.entries)), x)
    ks = np.arange(len(cat.entries))
    columns = ["x"] + [f"rho_t{i}" for i in range(len(times))]
    rho = []
    for t in times:
        phases = np.exp(-1j * (2 * spec.m + 2) * t * ks)
        rho.append(np.abs((cat.entries * phases) @ psi) ** 2)
    rows = [[x[j]] + [r[j] for r in rho] for j in range(x.size)]
    return columns, rows, {"parity": config.parity, "K": cat.K}


def _cmd_overlap(config: RunConfig):
    rows = []
    for az in _grid_values(config.z_abs_grid):
        rows.append([az, co.overlap(config.m, config.mu, az)])
    return ["abs_z", "overlap"], rows, {}


def _cmd_wigner(config: RunConfig):
    spec = _spec(config)
    window = ((config.x_grid[0], config.x_grid[1]),
              (config.p_grid[0], config.p_grid[1]))
    resolution = (int(config.x_grid[2]), int(config.p_grid[2]))
    grid = ob.wigner_grid(spec, window=window, resolution=resolution,
                          tail_tol=config.tail_tol)
    rows = []
    for i in range(grid.x.size):          # row-major: x outer, p inner
        for j in range(grid.p.size):
            rows.append([grid.x[i], grid.p[j], grid.values[i, j]])
    meta = {"K": grid.truncation, "min_value": grid.min_value,
            "negative_volume": grid.negative_volume, "mass": grid.mass}
    return ["x", "p", "wigner"], rows, meta


def _cmd_uncertainty(config: RunConfig):
    re_values = _grid_values(config.x_grid) if config.x_grid else np.linspace(-2, 2, 11)
    im_values = _grid_values(config.p_grid) if config.p_grid else np.linspace(-2, 2, 11)
    t = config.times[0] if config.times else 0.0
    rows = []
    for re_z in re_values:
        for im_z in im_values:
            spec = co.CoherentSpec(config.variant, config.m, config.mu,
                                   complex(re_z, im_z))
            res = ob.uncertainty(spec, t, config.tail_tol, config.quad_tol)
            rows.append([re_z, im_z, res.sigma_x, res.sigma_p, res.product])
    return ["re_z", "im_z", "sigma_x", "sigma_p", "product"], rows, {"t": t}


def _cmd_mandel(config: RunConfig):
    rows = []
    for az in _grid_values(config.z_abs_grid):
        spec = co.CoherentSpec(config.variant, config.m, config.mu, complex(az))
        rows.append([az, ob.mandel_q(spec, "closed_form"),
                     ob.mandel_q(spec, "direct", config.tail_tol)])
    return ["abs_z", "q_closed_form", "q_direct"], rows, {}


def _cmd_beamsplitter(config: RunConfig):
    coeffs = co.coefficients(_spec(config), config.tail_tol)
    out = bs.split(coeffs)
    dist = bs.two_photon_distribution(out)
    rows = []
    for n1 in range(dist.p.shape[0]):     # row-major: n1 outer, n2 inner
        for n2 in range(dist.p.shape[1]):
            rows.append([n1, n2, dist.p[n1, n2]])
    meta = {"K": out.K, "total_mass": dist.total_mass,
            "rank_one_residual": bs.rank_one_residual(dist)}
    return ["n1", "n2", "probability"], rows, meta


def _cmd_entropy(config: RunConfig):
    rows = []
    for az in _grid_values(config.z_abs_grid):
        spec = co.CoherentSpec(config.variant, config.m, config.mu, complex(az))
        coeffs = co.coefficients(spec, config.tail_tol)
        result = bs.linear_entropy(bs.split(coeffs))
        rows.append([az, result.value, result.error_bound])
    return ["abs_z", "linear_entropy", "error_bound"], rows, {}


def _selftest() -> int:
    """Compact oracle-equivalence suite; prints one line per check."""
    checks: list[tuple[str, bool]] = []

    def check(name: str, ok: bool):
        checks.append((name, bool(ok)))
        print(f"{'PASS' if ok else 'FAIL'}  {name}")

    rng = np.random.default_rng(7)
    values = rng.uniform(-50, 50, size=(1000, 2))
    worst = 0.0
    for a, b in values:
        s = (SignedLog.from_float(a) * SignedLog.from_float(b)).to_float()
        t = (SignedLog.from_float(a) + SignedLog.from_float(b)).to_float()
        worst = max(worst, abs(s - a * b) / max(abs(a * b), 1e-300),
                    abs(t - (a + b)) / max(abs(a + b), 1e-12))
    check("signed-log arithmetic matches floats", worst < 1e-12)

    poch = log_pochhammer(-0.2, 3).to_float()
    check("pochhammer product", abs(poch - (-36.0 / 125.0)) < 1e-15)

    check("oscillator function normalisation",
          abs(hermite_phi(0, 0.0) - math.pi ** -0.25) < 1e-15)

    gauss = integrate(lambda u: math.exp(-u * u), -8.0, 8.0, 1e-12)
    check("gaussian quadrature", abs(gauss.value - math.sqrt(math.pi)) < 1e-12)

    indices = [mu + 5 * k for mu in sy.lowest_weights(4) for k in range(4)]
    expected = {-5} | set(range(0, 20)) - {15}  # 15 needs step 4 of the lowest ladder
    check("ladder partition",
          len(indices) == len(set(indices)) and set(indices) == expected)

    spec = co.CoherentSpec("nonlinear", 4, -5, 10.0)
    e_cf = ob.energy_expectation(spec, "closed_form")
    e_d = ob.energy_expectation(spec, "direct")
    check("energy dual route", abs(e_cf - e_d) / abs(e_cf) < 1e-10)

    q_lin = ob.mandel_q(co.CoherentSpec("linearized", 6, -7, 3.0), "closed_form")
    check("linearized statistics are Poissonian", q_lin == 0.0)

    resid = co.eigen_residual(co.CoherentSpec("nonlinear", 6, -7, 1e8))
    check("defining-equation residual at |z|=1e8", resid / 1e8 < 1e-9)

    coeffs = co.coefficients(co.CoherentSpec("linearized", 2, 1, 2.0))
    out = bs.split(coeffs)
    row_norms = np.array([np.sum(np.abs(out.g[k, : k + 1]) ** 2)
                          for k in range(out.K + 1)])
    weights = np.abs(coeffs.entries) ** 2
    check("beamsplitter unitarity", float(np.max(np.abs(row_norms - weights))) < 1e-14)

    d = co.overlap(6, -7, 10.0)
    d_cf = co.overlap_closed_form(6, -7, 10.0)
    check("component-overlap dual route", abs(d - d_cf) < 1e-12)

    return 0 if all(ok for _, ok in checks) else 2


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "potential": _cmd_potential,
    "eigenstate": _cmd_eigenstate,
    "coeffs": _cmd_coeffs,
    "energy": _cmd_energy,
    "density": _cmd_density,
    "cat": _cmd_cat,
    "overlap": _cmd_overlap,
    "wigner": _cmd_wigner,
    "uncertainty": _cmd_uncertainty,
    "mandel": _cmd_mandel,
    "beamsplitter": _cmd_beamsplitter,
    "entropy": _cmd_entropy,
}

_Z_ABS_COMMANDS = {"energy", "overlap", "mandel", "entropy"}
_GRID_DEFAULTS = {
    "potential": ("-8:8:321", None),
    "eigenstate": ("-8:8:321", None),
    "wigner": ("-8:8:161", "-8:8:161"),
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="ratosc",
                     description="Coherent-state diagnostics for rational "
                                 "extensions of the harmonic oscillator")
    parser.add_argument("--version", action="version", version=f"ratosc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--variant", choices=co.VARIANTS, default="nonlinear")
        p.add_argument("--m", type=int, default=4)
        p.add_argument("--mu", type=int, default=-5)
        p.add_argument("--z-re", type=float, default=0.0)
        p.add_argument("--z-im", type=float, default=0.0)
        p.add_argument("--z-abs", type=str, default=None,
                       help="magnitude grid min:max:count (grid commands)")
        p.add_argument("--times", type=str, default=None,
                       help="comma-separated list of times")
        p.add_argument("--x-grid", type=str, default=None, help="min:max:count")
        p.add_argument("--p-grid", type=str, default=None, help="min:max:count")
        p.add_argument("--k", type=int, default=0, help="ladder step (eigenstate, spectrum depth)")
        p.add_argument("--parity", choices=("even", "odd"), default="even")
        p.add_argument("--tail-tol", type=float, default=1e-14)
        p.add_argument("--quad-tol", type=float, default=1e-10)
        p.add_argument("--output", type=str, default="")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        p.add_argument("--plot", action="store_true")

    sub.add_parser("selftest")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    x_default, p_default = _GRID_DEFAULTS.get(args.command, (None, None))
    config = RunConfig(
        command=args.command,
        variant=args.variant,
        m=args.m,
        mu=args.mu,
        z_re=args.z_re,
        z_im=args.z_im,
        z_abs_grid=_parse_grid(args.z_abs, "--z-abs") if args.z_abs else [],
        times=[float(t) for t in args.times.split(",")] if args.times else [],
        x_grid=_parse_grid(args.x_grid or x_default, "--x-grid")
        if (args.x_grid or x_default) else [],
        p_grid=_parse_grid(args.p_grid or p_default, "--p-grid")
        if (args.p_grid or p_default) else [],
        k=args.k,
        parity=args.parity,
        tail_tol=args.tail_tol,
        quad_tol=args.quad_tol,
        output=args.output,
        fmt=args.fmt,
        plot=args.plot,
    )
    if config.m < 0 or config.m % 2 != 0 or config.m > sy.MAX_ORDER:
        raise UsageError(f"--m must be an even integer in [0, {sy.MAX_ORDER}]")
    if config.command in ("spectrum", "potential"):
        config.mu = -config.m - 1  # unused by these commands; normalised
    elif config.mu not in sy.lowest_weights(config.m):
        raise UsageError(
            f"--mu {config.mu} is not a lowest weight for m = {config.m}; "
            f"choose one of {sy.lowest_weights(config.m)}")
    if config.command in _Z_ABS_COMMANDS and not config.z_abs_grid:
        raise UsageError(f"{config.command} requires --z-abs min:max:count")
    if config.command == "cat" and (config.z_im != 0.0 or config.z_re < 0.0):
        raise UsageError("cat states require real z >= 0 (--z-re)")
    return config


def run(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "selftest":
        return _selftest()
    config = _config_from_args(args)
    columns, rows, meta = _COMMANDS[config.command](config)
    path = _write_rows(config, columns, rows, meta)
    plot_path = _maybe_plot(config, columns, rows)
    print(f"wrote {path}" + (f" and {plot_path}" if plot_path else ""))
    return 0


def main(argv=None) -> int:
    try:
        return run(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
