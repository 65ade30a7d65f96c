"""Command-line driver.

Configuration files are INI-style (``configparser``) with the sections and
keys below; every key is optional except ``[run] command``.

    [run]
    command = run | identities | consistency | rates | eoc
    seed = 0
    out = results

    [mesh]
    dim = 2
    n = 16

    [physics]
    a = 1.0
    gamma = 2.0
    mu = 0.1
    lambda = 0.05

    [scheme]
    scheme = fv | mac
    eps = 0.0
    dt = h | h2 | <number>
    T = 0.1
    tol = 1e-10
    max_iter = 50

    [data]
    problem = smooth | manufactured | constant

    [study]
    levels = 16, 32, 64
    sizes = 4, 8, 16
    trials = 20
    gammas = 1.2, 1.5, 2, 2.5, 3
    epsilons = -0.5, 0, 0.5, 1
    frozen = true

``frozen = true`` makes the consistency study test a single time step
(``tau = dt``) on each level; ``false`` marches to ``T``.

Exit codes: 0 success, 2 invalid configuration, 3 solver failure,
4 invariant violation (identity residual, conservation or energy check).
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import io
from .analysis import consistency, eoc, manufactured, rates
from .identities import ibp_identity_suite, projection_bounds_hold, projection_bound_values, random_fields
from .mesh import Mesh
from .physics import GasLaw, ViscosityLaw
from .schemes import FV, MAC, SchemeConfig, SchemeError, StepReport, run
from .smooth import Trig

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_INVARIANT = 0, 2, 3, 4
COMMANDS = ("run", "identities", "consistency", "rates", "eoc")
PROBLEMS = ("smooth", "manufactured", "constant")


class ConfigError(ValueError):
    def __init__(self, key: str, msg: str):
        super().__init__(f"{key}: {msg}")
        self.key = key


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    out: str = "results"
    dim: int = 2
    n: int = 16
    a: float = 1.0
    gamma: float = 2.0
    mu: float = 0.1
    lam: float = 0.05
    scheme: str = FV
    eps: float = 0.0
    dt: str = "h"
    T: float = 0.1
    tol: float = 1e-10
    max_iter: int = 50
    problem: str = "smooth"
    levels: list[int] = field(default_factory=lambda: [16, 32, 64])
    sizes: list[int] = field(default_factory=lambda: [4, 8, 16])
    trials: int = 20
    gammas: list[float] = field(default_factory=lambda: [1.2, 1.5, 2.0, 2.5, 3.0])
    epsilons: list[float] = field(default_factory=lambda: [-0.5, 0.0, 0.5, 1.0])
    frozen: bool = True

    def time_step(self, h: float) -> float:
        if self.dt == "h":
            return h
        if self.dt == "h2":
            return h * h
        return float(self.dt)

    def law(self) -> GasLaw:
        return GasLaw(self.a, self.gamma)

    def visc(self) -> ViscosityLaw:
        return ViscosityLaw(self.mu, self.lam, self.dim)


_KEYS = {
    ("run", "command"): ("command", str), ("run", "seed"): ("seed", int),
    ("run", "out"): ("out", str),
    ("mesh", "dim"): ("dim", int), ("mesh", "n"): ("n", int),
    ("physics", "a"): ("a", float), ("physics", "gamma"): ("gamma", float),
    ("physics", "mu"): ("mu", float), ("physics", "lambda"): ("lam", float),
    ("scheme", "scheme"): ("scheme", str), ("scheme", "eps"): ("eps", float),
    ("scheme", "dt"): ("dt", str), ("scheme", "t"): ("T", float),
    ("scheme", "tol"): ("tol", float), ("scheme", "max_iter"): ("max_iter", int),
    ("data", "problem"): ("problem", str),
    ("study", "levels"): ("levels", "ints"), ("study", "sizes"): ("sizes", "ints"),
    ("study", "trials"): ("trials", int), ("study", "gammas"): ("gammas", "floats"),
    ("study", "epsilons"): ("epsilons", "floats"), ("study", "frozen"): ("frozen", "bool"),
}


def _convert(key, raw, kind):
    try:
        if kind == "ints":
            return [int(v) for v in raw.replace(",", " ").split()]
        if kind == "bool":
            v = raw.strip().lower()
            if v not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError
            return v in ("true", "1", "yes")
        if kind == "floats":
            return [float(v) for v in raw.replace(",", " ").split()]
        return kind(raw.strip())
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r}") from None


def validate(cfg: RunConfig) -> RunConfig:
    if cfg.command not in COMMANDS:
        raise ConfigError("run.command", f"must be one of {', '.join(COMMANDS)}")
    if cfg.dim not in (2, 3):
        raise ConfigError("mesh.dim", "must be 2 or 3")
    if cfg.n < 2:
        raise ConfigError("mesh.n", "need at least 2 cells per axis")
    if not cfg.a > 0:
        raise ConfigError("physics.a", "pressure law p = a rho^gamma needs a > 0")
    if not cfg.gamma > 1:
        raise ConfigError("physics.gamma", "pressure law p = a rho^gamma needs gamma > 1")
    if not cfg.mu > 0:
        raise ConfigError("physics.mu", "shear viscosity must be positive")
    if not cfg.lam >= 0:
        raise ConfigError("physics.lambda", "bulk viscosity must be nonnegative")
    if cfg.scheme not in (FV, MAC):
        raise ConfigError("scheme.scheme", "must be fv or mac")
    if not cfg.eps > -1:
        raise ConfigError("scheme.eps", "diffusive upwind flux needs eps > -1")
    if cfg.dt not in ("h", "h2"):
        try:
            if not float(cfg.dt) > 0:
                raise ConfigError("scheme.dt", "time step must be positive")
        except ValueError:
            raise ConfigError("scheme.dt", "must be h, h2 or a positive number") from None
    if not cfg.T >= 0:
        raise ConfigError("scheme.T", "final time must be nonnegative")
    if not cfg.tol > 0:
        raise ConfigError("scheme.tol", "nonlinear tolerance must be positive")
    if cfg.max_iter < 1:
        raise ConfigError("scheme.max_iter", "must be at least 1")
    if cfg.problem not in PROBLEMS:
        raise ConfigError("data.problem", f"must be one of {', '.join(PROBLEMS)}")
    if cfg.command == "eoc" and len(cfg.levels) < 3:
        raise ConfigError("study.levels", "an EOC ladder needs at least three levels")
    if any(g <= 1 for g in cfg.gammas):
        raise ConfigError("study.gammas", "every gamma must exceed 1")
    if any(e <= -1 for e in cfg.epsilons):
        raise ConfigError("study.epsilons", "every eps must exceed -1")
    if cfg.trials < 1:
        raise ConfigError("study.trials", "must be at least 1")
    return cfg


def parse_config(path) -> RunConfig:
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError("file", str(exc)) from None
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            spec = _KEYS.get((section.lower(), key.lower()))
            if spec is None:
                raise ConfigError(f"{section}.{key}", "unknown key")
            name, kind = spec
            values[name] = _convert(f"{section}.{key}", raw, kind)
    if "command" not in values:
        raise ConfigError("run.command", "missing")
    return validate(RunConfig(**values))


# ---- built-in data --------------------------------------------------------------

def smooth_data(dim: int):
    """Smooth positive density and a trigonometric velocity without sources."""
    ones = [1.0] * dim
    rho0 = Trig.constant(dim, 1.0) + Trig.term(dim, 0.3, ones, [0.4] + [0.0] * (dim - 1))
    u0 = []
    for a in range(dim):
        k = [0.0] * dim
        k[(a + 1) % dim] = 1.0
        u0.append(Trig.term(dim, 0.5 if a % 2 == 0 else -0.4, k, [0.3 * (a + 1)] * dim))
    return rho0, u0


def problem_data(cfg: RunConfig):
    """``(rho0, u0, source_rho, source_m)`` for the configured problem."""
    if cfg.problem == "constant":
        return Trig.constant(cfg.dim, 1.0), [Trig.constant(cfg.dim, 0.0)] * cfg.dim, None, None
    if cfg.problem == "smooth":
        rho0, u0 = smooth_data(cfg.dim)
        return rho0, u0, None, None
    sol = manufactured.default_solution(cfg.dim, cfg.law(), cfg.visc())
    return sol.rho, sol.u, sol.source_rho, sol.source_m


def scheme_config(cfg: RunConfig, h: float) -> SchemeConfig:
    _, _, srho, sm = problem_data(cfg)
    return SchemeConfig(cfg.law(), cfg.visc(), eps=cfg.eps, dt=cfg.time_step(h),
                        scheme=cfg.scheme, tol=cfg.tol, max_iter=cfg.max_iter,
                        source_rho=srho, source_m=sm)


# ---- commands ----------------------------------------------------------------------

def cmd_run(cfg: RunConfig, out: Path) -> int:
    m = Mesh(cfg.dim, cfg.n)
    rho0, u0, srho, _ = problem_data(cfg)
    scfg = scheme_config(cfg, m.h)
    traj, rep = run(rho0, u0, cfg.T, scfg, m, keep_every=max(1, 10**9))
    io.write_csv(out / "steps.csv", StepReport.CSV_COLUMNS, [s.row() for s in rep.steps])
    io.dump_state(out / "final_state.txt", traj[-1])
    if srho is None:
        allowance = 10 * cfg.tol
        if rep.max_mass_drift() > allowance or rep.energy_excess(allowance) > 0:
            return EXIT_INVARIANT
    if rep.steps and rep.min_rho <= 0:
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_identities(cfg: RunConfig, out: Path) -> int:
    rows = []
    ok = True
    for n in cfg.sizes:
        m = Mesh(cfg.dim, n)
        for s in range(cfg.seed, cfg.seed + cfg.trials):
            rep = ibp_identity_suite(m, s)
            for r in rep.results:
                rows.append([cfg.dim, n, s, r.name, r.lhs, r.rhs, r.abs_residual, r.rel_residual,
                             int(r.ok)])
                ok &= r.ok
            _, _, u, v = random_fields(m, np.random.default_rng(s))
            pb = projection_bound_values(m, u, v)
            good = projection_bounds_hold(pb)
            rows.append([cfg.dim, n, s, "projection_bound", pb["PiQ_u_minus_u"],
                         pb["half_h_gradB_u"],
                         pb["avg_v_minus_v"], pb["half_h_gradD_v"], int(good)])
            ok &= good
    io.write_csv(out / "identities.csv",
                 ["d", "N", "seed", "identity", "lhs", "rhs", "abs_residual", "rel_residual", "ok"],
                 rows)
    return EXIT_OK if ok else EXIT_INVARIANT


def consistency_tests(dim: int):
    """Sinusoidal test functions ``phi`` and ``Phi`` (with time dependence)."""
    phi = Trig.term(dim, 1.0, [1.0] + [0.0] * (dim - 1), [0.0] * dim, 1.0, 0.2)
    Phi = []
    for a in range(dim):
        k = [0.0] * dim
        k[a] = 1.0
        k[(a + 1) % dim] = 1.0
        Phi.append(Trig.term(dim, 1.0, k, [0.1 * (a + 1)] * dim, 1.0, 0.5))
    return phi, Phi


def consistency_study(cfg: RunConfig, levels):
    """Consistency residuals on every level of the ladder.

    Frozen studies take one step of the scheme from the smooth data and test
    at ``tau = dt``; otherwise the run goes to ``T`` and ``tau = T``.
    """
    rho0, u0, _, _ = problem_data(replace(cfg, problem="smooth") if cfg.problem == "manufactured"
                                  else cfg)
    phi, Phi = consistency_tests(cfg.dim)
    reports = []
    for n in levels:
        m = Mesh(cfg.dim, n)
        scfg = replace(scheme_config(cfg, m.h), source_rho=None, source_m=None)
        traj, _ = run(rho0, u0, scfg.dt if cfg.frozen else cfg.T, scfg, m)
        reports.append(consistency.consistency_report(traj, phi, Phi, cfg.law(), cfg.visc(),
                                                      test_id=f"sin-N{n}"))
    return reports


def cmd_consistency(cfg: RunConfig, out: Path) -> int:
    reps = consistency_study(cfg, cfg.levels)
    rows = [[r.test_id, r.tau, r.e_rho, r.e_m, r.h, r.dt] for r in reps]
    hs = [r.h for r in reps]
    rows.append(["order", "", eoc.least_squares_order(hs, [abs(r.e_rho) for r in reps]),
                 eoc.least_squares_order(hs, [abs(r.e_m) for r in reps]), "", ""])
    io.write_csv(out / "consistency.csv", ["test_id", "tau", "e_rho", "e_m", "h", "dt"], rows)
    return EXIT_OK


def cmd_rates(cfg: RunConfig, out: Path) -> int:
    rows = []
    for scheme in (FV, MAC):
        for d in (2, 3):
            for g, e, bd, bm, A in rates.rate_table(scheme, d, cfg.gammas, cfg.epsilons):
                rows.append([scheme, d, g, e, bd, bm, A])
    io.write_csv(out / "rates.csv", ["scheme", "d", "gamma", "eps", "beta_D", "beta_M", "A"], rows)
    return EXIT_OK


def cmd_eoc(cfg: RunConfig, out: Path) -> int:
    sol = manufactured.default_solution(cfg.dim, cfg.law(), cfg.visc())
    table, reps = eoc.eoc_study(sol, cfg.scheme, cfg.levels, cfg.time_step, cfg.T, cfg.eps,
                                cfg.tol)
    head, body = table.rows()
    io.write_csv(out / "eoc.csv", head, body)
    diag = list(table.diagnostics)
    io.write_csv(out / "eoc_diagnostics.csv", ["N"] + diag,
                 [[n] + [table.diagnostics[k][i] for k in diag]
                  for i, n in enumerate(table.levels)])
    return EXIT_OK


_DISPATCH = {"run": cmd_run, "identities": cmd_identities, "consistency": cmd_consistency,
             "rates": cmd_rates, "eoc": cmd_eoc}


def execute(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return _DISPATCH[cfg.command](cfg, out)
    except SchemeError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="torusns", description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True, help="INI configuration file")
    ap.add_argument("--out", help="output directory (overrides [run] out)")
    ap.add_argument("--seed", type=int, help="random seed (overrides [run] seed)")
    ap.add_argument("--levels", help="comma-separated ladder, e.g. 16,32,64")
    args = ap.parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if args.out is not None:
            cfg.out = args.out
        if args.seed is not None:
            cfg.seed = args.seed
        if args.levels is not None:
            cfg.levels = _convert("--levels", args.levels, "ints")
        validate(cfg)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return execute(cfg)


if __name__ == "__main__":
    sys.exit(main())
