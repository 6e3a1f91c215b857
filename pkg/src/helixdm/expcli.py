"""Experiment runner: named experiments written as CSV data plus a JSON manifest.

Usage::

    helixdm run fig1_helix --out results/
    helixdm run fig2_fidelity_sweep --lambda-list 0,0.5,1,2 --out results/
    helixdm validate --n-sites 6 --out results/

Exit status: 0 on success, 1 when a built-in assertion fails, 2 on a bad
configuration.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import re
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    SubspaceMatrix,
    TimeGrid,
    TimeSeries,
    crossing_time,
    evolve,
    project_subspace,
)
from .magnon import BandParams, DosCurve, dispersion, dos_analytic, dos_analytic_curve, dos_histogram
from .model import ChainParams, build_h, build_hdrvn, build_hi_local
from .states import HelixSpec, ferro_up, helix_state, tilted_family, tilted_up_state

EXPERIMENTS = (
    "fig1_helix",
    "fig2_fidelity_sweep",
    "fig3_band_dos",
    "fig4_driven_fidelity",
    "fig5_driven_helix",
    "validate",
)

# per-experiment default overrides on top of RunConfig defaults
EXPERIMENT_DEFAULTS = {
    "fig1_helix": {"t_max": 50.0},
    "fig2_fidelity_sweep": {"t_max": 50.0},
    "fig3_band_dos": {"p_n": 2},
    "fig4_driven_fidelity": {"lam": 10.0, "kappa": 0.3, "delta": 0.1, "t_max": 300.0, "dt": 0.5},
    "fig5_driven_helix": {"lam": 10.0, "kappa": 0.3, "delta": 0.1, "t_max": 450.0, "dt": 0.5},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Flat experiment configuration; ``q`` and ``p`` are numerators of ``2 pi n / N``."""

    experiment: str = "fig1_helix"
    n_sites: int = 10
    q_n: int = 3
    p_n: int | None = None
    lam: float = 1.0
    theta: float = math.pi / 3
    kappa: float = 0.0
    delta: float = 0.0
    drive_site: int | None = None
    t_max: float = 50.0
    dt: float = 0.1
    lambda_list: list = field(default_factory=lambda: [0.0, 0.5, 1.0, 2.0, 5.0])
    n_k: int = 100_000
    n_bins: int = 100
    output_dir: str = "results"
    seed: int = 0
    jobs: int = 1
    plot_script: bool = False
    validate_sizes: list = field(default_factory=lambda: [4, 6, 10])

    def chain(self, **over) -> ChainParams:
        kw = dict(lam=self.lam, theta=self.theta, kappa=self.kappa, delta=self.delta, drive_site=self.drive_site)
        kw.update(over)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            params = ChainParams.from_numerators(self.n_sites, self.q_n, self.p_n, **kw)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return params

    def grid(self) -> TimeGrid:
        return TimeGrid(self.t_max, self.dt)


_FIELD_TYPES = {
    "n_sites": int, "q_n": int, "p_n": int, "lam": float, "theta": float, "kappa": float,
    "delta": float, "drive_site": int, "t_max": float, "dt": float, "n_k": int, "n_bins": int,
    "output_dir": str, "seed": int, "jobs": int, "experiment": str,
}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key == "lambda_list":
        return [float(x) for x in raw.replace(" ", "").split(",") if x]
    if key == "plot_script":
        return raw.lower() in ("1", "true", "yes", "on")
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    if key == "theta":
        return _parse_angle(raw)
    return _FIELD_TYPES[key](raw)


_ANGLE = re.compile(r"^\s*([-+]?[\d.]*)\s*\*?\s*pi\s*(?:/\s*([\d.]+))?\s*$")


def _parse_angle(raw: str) -> float:
    """Float, or a multiple of pi such as ``pi/3`` or ``2*pi/5``."""
    m = _ANGLE.match(raw)
    if not m:
        return float(raw)
    num = float(m.group(1)) if m.group(1) not in ("", "+", "-") else float(m.group(1) + "1")
    return num * math.pi / (float(m.group(2)) if m.group(2) else 1.0)


def read_config_file(path) -> dict:
    """Parse a ``key = value`` file (``#`` comments, one key per line)."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        try:
            out[key] = _parse_value(key, val)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    return out


def make_config(experiment: str, file_values=None, overrides=None) -> RunConfig:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    values = dict(EXPERIMENT_DEFAULTS.get(experiment, {}))
    values.update(file_values or {})
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    values["experiment"] = experiment
    cfg = RunConfig(**values)
    if cfg.n_k < 1000:
        raise ConfigError("n_k must be at least 1000")
    if cfg.n_bins < 1 or cfg.jobs < 1:
        raise ConfigError("n_bins and jobs must be positive")
    if experiment == "fig2_fidelity_sweep" and not cfg.lambda_list:
        raise ConfigError("lambda_list is empty")
    if any(n < 2 for n in cfg.validate_sizes):
        raise ConfigError("validate chain lengths must be at least 2")
    try:
        cfg.chain()
        if experiment != "fig3_band_dos":
            cfg.grid()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


# ----------------------------------------------------------------------------- CSV output


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def emit_csv(obj, path) -> Path:
    """Write a TimeSeries, DosCurve or SubspaceMatrix with its fixed column schema."""
    path = Path(path)
    if isinstance(obj, TimeSeries):
        n = obj.n_sites
        header = ["t", "fidelity", "log_norm"]
        for l in range(1, n + 1):
            header += [f"h_x_{l}", f"h_y_{l}", f"h_z_{l}"]
        rows = (
            [t, f, ln, *hv.ravel()]
            for t, f, ln, hv in zip(obj.times, obj.fidelity, obj.log_norm, obj.helix_vectors)
        )
        _write_rows(path, header, rows)
    elif isinstance(obj, DosCurve):
        _write_rows(path, ["E", "dos", "kind"], ([e, d, obj.kind] for e, d in zip(obj.energies, obj.dos)))
    elif isinstance(obj, SubspaceMatrix):
        m = obj.entries
        rows = ([r, c, m[r, c].real, m[r, c].imag] for r in range(m.shape[0]) for c in range(m.shape[1]))
        _write_rows(path, ["row", "col", "re", "im"], rows)
    else:
        raise TypeError(f"cannot emit {type(obj).__name__} as CSV")
    return path


# ----------------------------------------------------------------------------- experiments


class Run:
    """Collects output files and assertion outcomes for one experiment."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = Path(cfg.output_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.files: list[Path] = []
        self.checks: dict[str, dict] = {}

    def emit(self, obj, name: str) -> None:
        self.files.append(emit_csv(obj, self.out / name))

    def table(self, name: str, header, rows) -> None:
        path = self.out / name
        _write_rows(path, header, rows)
        self.files.append(path)

    def check(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks[name] = {"passed": bool(ok), "detail": detail}


def _map(cfg: RunConfig, fn, items):
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def run_fig1(run: Run) -> None:
    cfg = run.cfg
    params = cfg.chain()
    h = build_h(params)
    n = params.n_sites
    l = np.arange(1, n + 1)
    expected = 0.5 * np.stack(
        [np.sin(params.theta) * np.sin(params.q * l), np.sin(params.theta) * np.cos(params.q * l),
         -np.cos(params.theta) * np.ones(n)], axis=1)
    for direction, name in ((1, "helix_phi.csv"), (-1, "helix_phibar.csv")):
        ts = evolve(h, helix_state(HelixSpec(params.theta, params.q, direction), n), cfg.grid())
        run.emit(ts, name)
        if direction == 1:
            dev = float(np.abs(ts.helix_vectors - expected).max())
            run.check("phi_helix_vector_static", dev < 1e-9, f"max deviation {dev:.3e}")
            fdev = float(np.abs(ts.fidelity - 1).max())
            run.check("phi_fidelity_unity", fdev < 1e-9, f"max |F-1| {fdev:.3e}")
        else:
            run.check("phibar_collapses", ts.fidelity.min() < 0.9 or params.lam == 0,
                      f"min F {ts.fidelity.min():.6f}")


def run_fig2(run: Run) -> None:
    cfg = run.cfg
    lams = list(cfg.lambda_list)
    grid = cfg.grid()

    def one(lam):
        params = cfg.chain(lam=lam)
        psi0 = helix_state(HelixSpec(params.theta, params.q, -1), params.n_sites)
        return evolve(build_h(params), psi0, grid).fidelity

    curves = _map(cfg, one, lams)
    header = ["t"] + [f"F_lambda_{_fmt(l)}" for l in lams]
    run.table("fidelity.csv", header, ([t, *(c[i] for c in curves)] for i, t in enumerate(grid.times)))
    onsets = [crossing_time(grid.times, c, 0.9) for c in curves]
    run.table("onset.csv", ["lambda", "onset_time"],
              ([l, o if o is not None else float("nan")] for l, o in zip(lams, onsets)))
    for l, c in zip(lams, curves):
        if l == 0:
            dev = float(np.abs(c - 1).max())
            run.check("lambda0_fidelity_unity", dev < 1e-9, f"max |F-1| {dev:.3e}")
    pos = [(l, o) for l, o in zip(lams, onsets) if l > 0]
    pos.sort()
    ok = all(o is not None for _, o in pos) and all(a[1] >= b[1] for a, b in zip(pos, pos[1:]))
    run.check("onset_decreases_with_lambda", ok, "; ".join(f"lambda={l}: {o}" for l, o in pos))


def run_fig3(run: Run) -> None:
    cfg = run.cfg
    params = cfg.chain()
    k = np.linspace(-math.pi, math.pi, 401)
    for lam in (1.0, 5.0):
        bp = BandParams(params.q, params.p, lam)
        tag = _fmt(lam)
        run.table(f"dispersion_lambda_{tag}.csv", ["k", "energy"], zip(k, dispersion(k, bp)))
        run.emit(dos_analytic_curve(bp), f"dos_analytic_lambda_{tag}.csv")
        hist = dos_histogram(bp, cfg.n_k, cfg.n_bins)
        run.emit(hist, f"dos_histogram_lambda_{tag}.csv")
        integral = float((hist.dos * np.diff(hist.bin_edges)).sum())
        run.check(f"histogram_normalized_lambda_{tag}", abs(integral - 1) < 1e-3, f"integral {integral:.6f}")
    lams = np.round(np.linspace(0.0, 10.0, 101), 10)
    d0 = [dos_analytic(0.0, BandParams(params.q, params.p, lam)) for lam in lams]
    run.table("dos_zero.csv", ["lambda", "dos_at_zero"], zip(lams, d0))
    tail = np.array([d for lam, d in zip(lams, d0) if lam >= 1])
    run.check("dos_zero_decreasing_for_lambda_ge_1", bool(np.all(np.diff(tail) < 0)), "")


def _drive_cases(cfg: RunConfig):
    # (label, lambda, kappa, delta): panels (a) lambda scan, (b) kappa scan, (c) compensation
    return [
        ("a_lambda_0", 0.0, cfg.kappa, 0.0),
        ("a_lambda_1", 1.0, cfg.kappa, 0.0),
        (f"a_lambda_{_fmt(cfg.lam)}", cfg.lam, cfg.kappa, 0.0),
        (f"b_kappa_{_fmt(cfg.kappa / 3)}", cfg.lam, cfg.kappa / 3, 0.0),
        (f"b_kappa_{_fmt(cfg.kappa)}", cfg.lam, cfg.kappa, 0.0),
        (f"c_delta_{_fmt(cfg.delta)}", cfg.lam, cfg.kappa, cfg.delta),
    ]


def run_fig4(run: Run) -> None:
    cfg = run.cfg
    base = cfg.chain()
    spec = HelixSpec(base.theta, base.q)
    fam = tilted_family(spec, base.n_sites)
    target = fam[-1]
    grid = cfg.grid()
    cases = _drive_cases(cfg)

    def one(case):
        _, lam, kappa, delta = case
        params = cfg.chain(lam=lam, kappa=kappa, delta=delta)
        return evolve(build_hdrvn(params), fam[0], grid, hermitian=False, reference=target).fidelity

    curves = _map(cfg, one, cases)
    run.table("driven_fidelity.csv", ["t"] + [f"F_{c[0]}" for c in cases],
              ([t, *(c[i] for c in curves)] for i, t in enumerate(grid.times)))
    local = project_subspace(build_hi_local(base.with_(delta=0.0)), fam)
    run.emit(local, "subspace_matrix_local.csv")
    peak = float(curves[-1].max())
    run.check("compensated_peak_fidelity", peak > 0.99, f"max F {peak:.6f} on t <= {cfg.t_max}")


def run_fig5(run: Run) -> None:
    cfg = run.cfg
    params = cfg.chain()
    spec = HelixSpec(params.theta, params.q)
    target = tilted_up_state(spec, params.n_sites)
    ts = evolve(build_hdrvn(params), ferro_up(params.n_sites), cfg.grid(), hermitian=False, reference=target)
    run.emit(ts, "driven_helix.csv")
    n = params.n_sites
    l = np.arange(1, n + 1)
    th = params.theta
    # helix vector of the tilted "all up" product state
    expected = 0.5 * np.stack([-np.sin(th) * np.sin(params.q * l), -np.sin(th) * np.cos(params.q * l),
                               np.cos(th) * np.ones(n)], axis=1)
    dev = float(np.abs(ts.helix_vectors[-1] - expected).max())
    run.check("final_helix_vector_matches_target", dev < 1e-2, f"max deviation {dev:.3e} at t={cfg.t_max}")


def run_validate(run: Run) -> None:
    from .validation import run_invariants

    results = run_invariants(run.cfg.validate_sizes)
    rows = []
    for name, ok, detail in results:
        run.check(name, ok, detail)
        rows.append([name, "pass" if ok else "fail", detail])
    run.table("validate.csv", ["check", "status", "detail"], rows)


RUNNERS = {
    "fig1_helix": run_fig1,
    "fig2_fidelity_sweep": run_fig2,
    "fig3_band_dos": run_fig3,
    "fig4_driven_fidelity": run_fig4,
    "fig5_driven_helix": run_fig5,
    "validate": run_validate,
}

PLOT_TEMPLATE = '''"""Plot the CSV files written by helixdm (rendering is left to matplotlib)."""
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
for name in {files!r}:
    with open(out / name) as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    cols = [c for c in range(1, len(header)) if header[c] != "kind"]
    x = [float(r[0]) for r in data]
    plt.figure()
    for c in cols[:12]:
        plt.plot(x, [float(r[c]) for r in data], label=header[c])
    plt.xlabel(header[0])
    plt.title(name)
    plt.legend(fontsize="small")
    plt.savefig(out / (Path(name).stem + ".png"))
'''


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run(cfg: RunConfig) -> dict:
    """Execute one experiment, write its data files and ``manifest.json``; return the manifest."""
    start = time.perf_counter()
    r = Run(cfg)
    RUNNERS[cfg.experiment](r)
    if cfg.plot_script:
        path = r.out / "plot.py"
        path.write_text(PLOT_TEMPLATE.format(files=[f.name for f in r.files if f.suffix == ".csv"]))
        r.files.append(path)
    manifest = {
        "config": {k: v for k, v in asdict(cfg).items()},
        "library_version": __version__,
        "wall_time_s": time.perf_counter() - start,
        "assertions": r.checks,
        "passed": all(c["passed"] for c in r.checks.values()),
        "files": [{"path": f.name, "sha256": _digest(f)} for f in r.files],
    }
    with open(r.out / "manifest.json", "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


# ----------------------------------------------------------------------------- argument parsing


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("parameters (override config file and experiment defaults)")
    g.add_argument("--config", help="key = value configuration file")
    g.add_argument("--n-sites", type=int)
    g.add_argument("--q-n", type=int, help="helix wave vector numerator: q = 2 pi q_n / N")
    g.add_argument("--p-n", type=int, help="DMI phase numerator: p = 2 pi p_n / N (default: q_n)")
    g.add_argument("--lam", "--lambda", dest="lam", type=float)
    g.add_argument("--theta", type=_parse_angle, help="radians, or e.g. pi/3")
    g.add_argument("--kappa", type=float)
    g.add_argument("--delta", type=float)
    g.add_argument("--drive-site", type=int)
    g.add_argument("--t-max", type=float)
    g.add_argument("--dt", type=float)
    g.add_argument("--lambda-list", type=lambda s: _parse_value("lambda_list", s))
    g.add_argument("--n-k", type=int)
    g.add_argument("--n-bins", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--jobs", type=int)
    g.add_argument("--plot-script", action="store_true", default=None)
    g.add_argument("--out", dest="output_dir", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="helixdm", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one experiment")
    p_run.add_argument("experiment", choices=EXPERIMENTS)
    _add_param_flags(p_run)
    p_val = sub.add_parser("validate", help="run the invariant suite")
    p_val.add_argument("--n-sites", type=int, help="single chain length (default: 4, 6 and 10)")
    p_val.add_argument("--out", dest="output_dir", default=None)
    return parser


_FLAG_KEYS = ("n_sites", "q_n", "p_n", "lam", "theta", "kappa", "delta", "drive_site", "t_max", "dt",
              "lambda_list", "n_k", "n_bins", "seed", "jobs", "plot_script", "output_dir")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            sizes = [args.n_sites] if args.n_sites else None
            cfg = make_config("validate", overrides={"output_dir": args.output_dir, "validate_sizes": sizes})
        else:
            file_values = read_config_file(args.config) if args.config else {}
            overrides = {k: getattr(args, k, None) for k in _FLAG_KEYS}
            cfg = make_config(args.experiment, file_values, overrides)
    except (ConfigError, OSError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    manifest = run(cfg)
    for name, res in manifest["assertions"].items():
        status = "PASS" if res["passed"] else "FAIL"
        print(f"{status} {name} {res['detail']}".rstrip())
    return 0 if manifest["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
