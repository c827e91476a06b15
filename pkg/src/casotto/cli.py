"""Command-line front end.

Every command emits comma-separated text: a ``#``-prefixed header block
(tool version, fully resolved configuration, column descriptions), one
header row, then data rows.  All numerical inputs are dimensionless, in
units of the fundamental frequency (``tau`` means ``tau * omega_1``,
``beta`` means ``beta * omega_1``); internally the cavity length is pi so
that ``omega_1 = 1``.  The exception is ``shortcut-check``, whose geometry
is stated directly through ``--L0`` in natural units.

Value resolution order: command-line flag > ``CASOTTO_<FLAG>`` environment
variable > config file (flat ``key = value`` text, ``#`` comments) >
built-in default.  Unknown keys anywhere are hard errors.  Exit status: 0
success, 2 usage error, 3 numerical failure (partial output is flagged).

Output is deterministic: fixed summation orders inside the library, 17
significant digits, no timestamps.  Identical configurations produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .cycle import (
    BathPair,
    nonadiabatic_engine,
    nonadiabatic_refrigerator,
    sweep,
    write_sweep_csv,
)
from .friction import (
    export_mode_table,
    friction_bound,
    friction_energy,
    partial_spectral_integral,
)
from .fock_oracle import (
    FockConfig,
    export_comparison,
    validate_friction,
    verify_trace_identities,
)
from .quadrature import ConvergenceError, QuadratureSpec
from .spectrum import CavityConfig, ThermalBath
from .trajectory import Trajectory, from_samples, quintic, shortcut

ENV_PREFIX = "CASOTTO_"

COMMANDS = (
    "friction",
    "bound",
    "engine",
    "refrigerator",
    "sweep",
    "shortcut-check",
    "oracle",
)

# flag name -> (type, default, help); shared across commands that use them
_OPTION_SPECS: dict[str, tuple] = {
    "tau": (float, 1.0, "stroke duration in units of 1/omega_1"),
    "beta": (float, 1.0, "inverse bath temperature in units of 1/omega_1 ('inf' for vacuum)"),
    "beta-a": (float, 1.0, "cold-bath inverse temperature (units 1/omega_1)"),
    "beta-ratio": (str, "0.5", "comma list of beta_C/beta_A ratios"),
    "epsilon": (str, "0.01", "compression ratio(s), comma list where a grid is accepted"),
    "modes": (int, 64, "mode cutoff K"),
    "tail-tol": (float, 1e-6, "relative mode-sum tail tolerance"),
    "family": (str, "quintic", "trajectory family: quintic | shortcut | sampled"),
    "trajectory-file": (str, "", "two-column 't, delta' file for --family sampled"),
    "tau-grid": (str, "", "sweep grid lo:hi:N with optional 'log' suffix"),
    "mode": (str, "engine", "machine type for sweep: engine | refrigerator"),
    "nodes-per-period": (int, 16, "quadrature nodes per oscillation period"),
    "panel-order": (int, 10, "Gauss-Legendre nodes per panel"),
    "rel-tol": (float, 1e-10, "quadrature relative tolerance"),
    "max-panels": (int, 10**6, "quadrature panel cap"),
    "output": (str, "-", "output file path, '-' for stdout"),
    "jobs": (int, os.cpu_count() or 1, "parallel workers for sweep"),
    "L0": (float, 1.0, "cavity length for shortcut-check (natural units)"),
    "n": (str, "2,4,10", "comma list of harmonic indices for shortcut-check"),
    "points": (int, 200, "time samples per trace for shortcut-check"),
    "fock-modes": (int, 2, "retained modes in the dense oracle"),
    "n-max": (int, 8, "per-mode occupation cutoff in the dense oracle"),
    "dt": (float, 0.01, "oracle evolution step (units 1/omega_1)"),
    "integrator-order": (int, 4, "oracle integrator order: 2 or 4"),
    "check": (str, "friction", "oracle check: friction | identities"),
    "thermalization-time": (float, 0.0, "bath-contact time charged to the cycle period"),
}

_COMMAND_OPTIONS: dict[str, tuple[str, ...]] = {
    "friction": ("tau", "beta", "epsilon", "modes", "tail-tol", "family",
                 "trajectory-file", "nodes-per-period", "panel-order",
                 "rel-tol", "max-panels", "output"),
    "bound": ("tau", "beta", "epsilon", "modes", "family", "trajectory-file",
              "output"),
    "engine": ("tau", "beta-a", "beta-ratio", "epsilon", "modes", "tail-tol",
               "family", "trajectory-file", "nodes-per-period", "panel-order",
               "rel-tol", "max-panels", "thermalization-time", "output"),
    "refrigerator": ("tau", "beta-a", "beta-ratio", "epsilon", "modes",
                     "tail-tol", "family", "trajectory-file",
                     "nodes-per-period", "panel-order", "rel-tol",
                     "max-panels", "thermalization-time", "output"),
    "sweep": ("tau-grid", "beta-a", "beta-ratio", "epsilon", "modes",
              "tail-tol", "family", "trajectory-file", "mode",
              "nodes-per-period", "panel-order", "rel-tol", "max-panels",
              "thermalization-time", "jobs", "output"),
    "shortcut-check": ("tau", "L0", "n", "points", "nodes-per-period",
                       "panel-order", "rel-tol", "max-panels", "output"),
    "oracle": ("tau", "beta", "epsilon", "modes", "family", "trajectory-file",
               "fock-modes", "n-max", "dt", "integrator-order", "check",
               "nodes-per-period", "panel-order", "rel-tol", "max-panels",
               "output"),
}


class UsageError(Exception):
    """Bad flags, config keys or values; exits with status 2."""


@dataclass
class RunConfig:
    """Fully resolved invocation: one command plus its option values."""

    command: str
    options: dict[str, object] = field(default_factory=dict)

    def __getitem__(self, key: str):
        return self.options[key]


def _coerce(key: str, raw: str):
    typ = _OPTION_SPECS[key][0]
    try:
        if typ is float:
            return float(raw)
        if typ is int:
            return int(raw)
        return str(raw)
    except ValueError as exc:
        raise UsageError(f"invalid value for '{key}': {raw!r}") from exc


def _parse_config_file(path: str, allowed: Sequence[str]) -> dict[str, str]:
    text = Path(path).read_text()
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key == "command":
            continue
        if key not in allowed:
            raise UsageError(f"{path}:{lineno}: unknown key '{key}'")
        values[key] = val.strip()
    return values


def _env_key(flag: str) -> str:
    return ENV_PREFIX + flag.replace("-", "_").upper()


def parse_config(argv: Sequence[str]) -> RunConfig:
    """Resolve a command line into a :class:`RunConfig`.

    Precedence: flag > environment > config file > default.  The resolved
    configuration is echoed into every output header and re-parses to the
    same RunConfig.
    """
    parser = argparse.ArgumentParser(
        prog="casotto",
        description="moving-wall cavity cycle thermodynamics",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default=None, help="flat key = value file")
    known = _pre_scan_command(argv)
    allowed = _COMMAND_OPTIONS[known]
    for flag in allowed:
        typ, default, helptext = _OPTION_SPECS[flag]
        parser.add_argument(f"--{flag}", default=None, help=f"{helptext} (default {default})")
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        raise UsageError("bad command line") from exc

    file_values: dict[str, str] = {}
    if ns.config is not None:
        if not Path(ns.config).exists():
            raise UsageError(f"config file not found: {ns.config}")
        file_values = _parse_config_file(ns.config, allowed)

    env_values: dict[str, str] = {}
    for key, val in os.environ.items():
        if not key.startswith(ENV_PREFIX):
            continue
        flag = key[len(ENV_PREFIX):].lower().replace("_", "-")
        if flag in ("config", "command"):
            continue
        if flag not in _OPTION_SPECS:
            raise UsageError(f"unknown environment variable {key}")
        if flag in allowed:
            env_values[flag] = val

    options: dict[str, object] = {}
    for flag in allowed:
        typ, default, _ = _OPTION_SPECS[flag]
        raw = getattr(ns, flag.replace("-", "_"))
        if raw is not None:
            options[flag] = _coerce(flag, raw)
        elif flag in env_values:
            options[flag] = _coerce(flag, env_values[flag])
        elif flag in file_values:
            options[flag] = _coerce(flag, file_values[flag])
        else:
            options[flag] = default

    cfg = RunConfig(command=known, options=options)
    _validate(cfg)
    return cfg


def _pre_scan_command(argv: Sequence[str]) -> str:
    for tok in argv:
        if not tok.startswith("-"):
            if tok not in COMMANDS:
                raise UsageError(
                    f"unknown command {tok!r}; choose from {', '.join(COMMANDS)}"
                )
            return tok
    raise UsageError(f"missing command; choose from {', '.join(COMMANDS)}")


def _parse_float_list(raw: str, key: str) -> list[float]:
    try:
        return [float(tok) for tok in str(raw).split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"invalid comma list for '{key}': {raw!r}") from exc


def _parse_grid(raw: str) -> list[float]:
    """Grid syntax ``lo:hi:N`` with optional ``log`` suffix on N."""
    parts = str(raw).split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be lo:hi:N[log], got {raw!r}")
    lo, hi = float(parts[0]), float(parts[1])
    count = parts[2]
    logspace = count.endswith("log")
    if logspace:
        count = count[:-3]
    n = int(count)
    if n < 1 or not hi > lo:
        raise UsageError(f"bad grid {raw!r}")
    if n == 1:
        return [lo]
    if logspace:
        if lo <= 0:
            raise UsageError("log grid needs positive endpoints")
        ratio = (hi / lo) ** (1.0 / (n - 1))
        return [lo * ratio**i for i in range(n)]
    step = (hi - lo) / (n - 1)
    return [lo + step * i for i in range(n)]


def _validate(cfg: RunConfig) -> None:
    opts = cfg.options
    if "epsilon" in opts:
        for e in _parse_float_list(str(opts["epsilon"]), "epsilon"):
            if not 0.0 < e < 1.0:
                raise UsageError(f"epsilon must lie in (0, 1), got {e}")
    if "beta" in opts:
        b = float(opts["beta"])
        if not (b > 0 or math.isinf(b)):
            raise UsageError(f"beta must be positive, got {b}")
    if "tau" in opts and not float(opts["tau"]) > 0:
        raise UsageError("tau must be positive")
    if "modes" in opts and int(opts["modes"]) < 1:
        raise UsageError("modes must be >= 1")
    if "mode" in opts and opts["mode"] not in ("engine", "refrigerator"):
        raise UsageError("mode must be engine or refrigerator")
    if "check" in opts and opts["check"] not in ("friction", "identities"):
        raise UsageError("check must be friction or identities")
    if "family" in opts:
        fam = str(opts["family"])
        if fam not in ("quintic", "shortcut", "sampled"):
            raise UsageError(f"unknown trajectory family {fam!r}")
        if fam == "sampled":
            path = str(opts.get("trajectory-file", ""))
            if not path:
                raise UsageError("--family sampled requires --trajectory-file")
            if not Path(path).exists():
                raise UsageError(f"trajectory file not found: {path}")
    if cfg.command == "sweep" and not str(opts.get("tau-grid", "")):
        raise UsageError("sweep requires --tau-grid lo:hi:N[log]")


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------


def _quad_spec(opts) -> QuadratureSpec:
    return QuadratureSpec(
        nodes_per_period=int(opts["nodes-per-period"]),
        panel_order=int(opts["panel-order"]),
        rel_tol=float(opts["rel-tol"]),
        max_panels=int(opts["max-panels"]),
    )


def _trajectory(opts, tau: float, L0: float) -> Trajectory:
    fam = str(opts.get("family", "quintic"))
    if fam == "quintic":
        return quintic(tau)
    if fam == "shortcut":
        return shortcut(quintic(tau), L0)
    return from_samples(str(opts["trajectory-file"]))


def _header(cfg: RunConfig, columns: Sequence[str], descriptions: Sequence[str]) -> str:
    lines = [f"# casotto {__version__}", f"# command = {cfg.command}"]
    for key in sorted(cfg.options):
        lines.append(f"# {key} = {_fmt_opt(cfg.options[key])}")
    for col, desc in zip(columns, descriptions):
        lines.append(f"# column {col}: {desc}")
    return "\n".join(lines) + "\n"


def _fmt_opt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def run(cfg: RunConfig, stream=None) -> int:
    """Execute a resolved configuration; returns the exit status."""
    opts = cfg.options
    out = io.StringIO()
    status = 0
    try:
        if cfg.command == "friction":
            status = _run_friction(cfg, out)
        elif cfg.command == "bound":
            status = _run_bound(cfg, out)
        elif cfg.command in ("engine", "refrigerator"):
            status = _run_single_cycle(cfg, out)
        elif cfg.command == "sweep":
            status = _run_sweep(cfg, out)
        elif cfg.command == "shortcut-check":
            status = _run_shortcut_check(cfg, out)
        elif cfg.command == "oracle":
            status = _run_oracle(cfg, out)
    except ConvergenceError as exc:
        out.write(f"# numerical failure: {exc}\n")
        status = 3

    text = out.getvalue()
    target = str(opts.get("output", "-"))
    if stream is not None:
        stream.write(text)
    elif target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text)
    return status


def _single_epsilon(opts) -> float:
    eps = _parse_float_list(str(opts["epsilon"]), "epsilon")
    if len(eps) != 1:
        raise UsageError("this command takes a single epsilon")
    return eps[0]


def _run_friction(cfg: RunConfig, out) -> int:
    opts = cfg.options
    L0 = math.pi  # omega_1 = 1
    cavity = CavityConfig(
        L0=L0,
        epsilon=_single_epsilon(opts),
        n_modes=int(opts["modes"]),
        tail_tol=float(opts["tail-tol"]),
    )
    traj = _trajectory(opts, float(opts["tau"]), L0)
    bath = ThermalBath(float(opts["beta"]))
    result = friction_energy(cavity, bath, traj, _quad_spec(opts))
    out.write(_header(
        cfg,
        ("k", "diag_term", "create_term", "scatter_term", "cumulative"),
        (
            "mode index",
            "single-mode pair-creation energy",
            "inter-mode pair-creation energy",
            "inter-mode scattering energy",
            "running total of the friction energy",
        ),
    ))
    out.write(f"# E_F = {_fmt(result.value)}\n")
    out.write(f"# quadrature_err = {_fmt(result.err)}\n")
    out.write(f"# tail_estimate = {_fmt(result.tail_estimate)}\n")
    out.write(f"# bound = {_fmt(result.bound) if result.bound is not None else 'none'}\n")
    export_mode_table(result, out)
    return 0


def _run_bound(cfg: RunConfig, out) -> int:
    opts = cfg.options
    L0 = math.pi
    cavity = CavityConfig(L0=L0, epsilon=_single_epsilon(opts), n_modes=int(opts["modes"]))
    traj = _trajectory(opts, float(opts["tau"]), L0)
    bath = ThermalBath(float(opts["beta"]))
    value = friction_bound(cavity, bath, traj)
    out.write(_header(
        cfg,
        ("tau_omega1", "beta_omega1", "epsilon", "bound"),
        ("stroke duration", "inverse temperature", "compression ratio",
         "upper bound on the friction energy"),
    ))
    out.write(
        ",".join(map(_fmt, (float(opts["tau"]), float(opts["beta"]), cavity.epsilon, value))) + "\n"
    )
    return 0


def _run_single_cycle(cfg: RunConfig, out) -> int:
    opts = cfg.options
    L0 = math.pi
    ratios = _parse_float_list(str(opts["beta-ratio"]), "beta-ratio")
    if len(ratios) != 1:
        raise UsageError("this command takes a single beta-ratio")
    beta_a = float(opts["beta-a"])
    baths = BathPair(beta_a, ratios[0] * beta_a)
    cavity = CavityConfig(
        L0=L0,
        epsilon=_single_epsilon(opts),
        n_modes=int(opts["modes"]),
        tail_tol=float(opts["tail-tol"]),
    )
    traj = _trajectory(opts, float(opts["tau"]), L0)
    runner = nonadiabatic_engine if cfg.command == "engine" else nonadiabatic_refrigerator
    report = runner(
        cavity, baths, traj, _quad_spec(opts),
        thermalization_time=float(opts["thermalization-time"]),
    )
    cols = ("tau_omega1", "beta_ratio", "epsilon", "Q", "W", "eta",
            "eta_adiabatic", "power", "mode", "EF_A", "EF_C", "tail_warning")
    out.write(_header(cfg, cols, _CYCLE_COLUMN_DOCS))
    out.write(",".join(cols) + "\n")
    cells = [
        _fmt(float(opts["tau"])), _fmt(ratios[0]), _fmt(cavity.epsilon),
        _fmt(report.Q), _fmt(report.W), _fmt(report.eta),
        _fmt(report.eta_adiabatic), _fmt(report.power), report.mode,
        _fmt(report.E_F_A), _fmt(report.E_F_C),
        "1" if report.tail_warning else "0",
    ]
    out.write(",".join(cells) + "\n")
    return 0


_CYCLE_COLUMN_DOCS = (
    "stroke duration in 1/omega_1",
    "beta_C / beta_A",
    "compression ratio",
    "heat intake (engine) or heat extracted from the cold bath (refrigerator)",
    "work extracted (engine) or consumed (refrigerator)",
    "efficiency (engine) or coefficient of performance (refrigerator)",
    "population-frozen limit of eta",
    "W / (2 tau + thermalization_time)",
    "operating regime classification",
    "friction energy of the compression stroke",
    "friction energy of the expansion stroke",
    "1 when the mode-sum tail exceeded tail_tol",
)


def _run_sweep(cfg: RunConfig, out) -> int:
    opts = cfg.options
    L0 = math.pi
    taus = _parse_grid(str(opts["tau-grid"]))
    ratios = _parse_float_list(str(opts["beta-ratio"]), "beta-ratio")
    epsilons = _parse_float_list(str(opts["epsilon"]), "epsilon")
    beta_a = float(opts["beta-a"])
    baths = [BathPair(beta_a, r * beta_a) for r in ratios]
    cavity = CavityConfig(
        L0=L0,
        epsilon=epsilons[0],
        n_modes=int(opts["modes"]),
        tail_tol=float(opts["tail-tol"]),
    )
    fam = str(opts["family"])
    if fam == "sampled":
        fixed = from_samples(str(opts["trajectory-file"]))
        def family(tau: float) -> Trajectory:
            return fixed
    elif fam == "shortcut":
        def family(tau: float) -> Trajectory:
            return shortcut(quintic(tau), L0)
    else:
        family = quintic
    rows = sweep(
        cavity,
        baths,
        taus,
        family,
        _quad_spec(opts),
        epsilons=epsilons,
        machine=str(opts["mode"]),
        thermalization_time=float(opts["thermalization-time"]),
        jobs=int(opts["jobs"]),
    )
    cols = ("tau_omega1", "beta_ratio", "epsilon", "Q", "W", "eta",
            "eta_adiabatic", "power", "mode", "EF_A", "EF_C", "tail_warning")
    out.write(_header(cfg, cols, _CYCLE_COLUMN_DOCS))
    write_sweep_csv(rows, out)
    return 3 if any(r.report is None for r in rows) else 0


def _run_shortcut_check(cfg: RunConfig, out) -> int:
    opts = cfg.options
    L0 = float(opts["L0"])
    tau = float(opts["tau"])
    harmonics = [int(x) for x in str(opts["n"]).split(",") if x.strip()]
    points = int(opts["points"])
    traj = shortcut(quintic(tau), L0)
    spec = _quad_spec(opts)
    out.write(_header(
        cfg,
        ("n", "t", "I_n", "J_n"),
        (
            "harmonic index of the probe frequency n*pi/L0",
            "upper limit of the running integral",
            "running cosine amplitude of the wall velocity",
            "running sine amplitude of the wall velocity",
        ),
    ))
    out.write("n,t,I_n,J_n\n")
    for n in harmonics:
        for i in range(points + 1):
            t = traj.t_start + traj.duration * i / points
            I, J = partial_spectral_integral(traj, n, L0, t, spec)
            out.write(f"{n},{_fmt(t)},{_fmt(I)},{_fmt(J)}\n")
    return 0


def _run_oracle(cfg: RunConfig, out) -> int:
    opts = cfg.options
    L0 = math.pi
    fock = FockConfig(
        n_modes=int(opts["fock-modes"]),
        n_max=int(opts["n-max"]),
        dt=float(opts["dt"]),
        integrator_order=int(opts["integrator-order"]),
    )
    cavity = CavityConfig(
        L0=L0, epsilon=_single_epsilon(opts), n_modes=int(opts["modes"])
    )
    if str(opts["check"]) == "identities":
        report = verify_trace_identities(float(opts["beta"]), fock, cavity)
        out.write(_header(
            cfg,
            ("identity", "numeric", "closed_form", "deviation"),
            ("operator string", "dense-matrix thermal trace",
             "geometric-moment closed form", "absolute deviation"),
        ))
        out.write(f"# max_abs_deviation = {_fmt(report.max_abs_deviation)}\n")
        out.write("identity,numeric,closed_form,deviation\n")
        for c in report.checks:
            out.write(
                f"{c.label},{_fmt(c.numeric)},{_fmt(c.closed_form)},{_fmt(c.deviation)}\n"
            )
        return 0
    traj = _trajectory(opts, float(opts["tau"]), L0)
    bath = ThermalBath(float(opts["beta"]))
    eps = _single_epsilon(opts)
    comparison = validate_friction(
        cavity, bath, traj, fock, _quad_spec(opts), epsilons=(eps, eps / 2.0)
    )
    out.write(_header(
        cfg,
        ("epsilon", "E_full", "E_adiab", "E_pert", "ratio", "richardson_ratio"),
        (
            "compression ratio",
            "energy after direct evolution",
            "population-preserving adiabatic energy",
            "E_adiab plus the friction formula",
            "(E_full - E_adiab) / E_F",
            "ratio extrapolated to epsilon -> 0",
        ),
    ))
    export_comparison(comparison, out)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"casotto: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except (ValueError, OSError) as exc:
        print(f"casotto: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
