"""Command-line front end: experiment runs, figure presets, analytic grids.

Subcommands
-----------
mfet      Monte Carlo mean first exit time vs the closed form, one row per x0
escape    Monte Carlo escape probability vs the closed form (1-D, E = [r, inf))
analytic  closed-form values on an x-grid, no simulation
ratio     physical/operational exit-time ratio vs the tempering factor
preset    canned parameter sets fig1..fig7, fig9 (desk-scale ensembles)

Exit codes: 0 pass, 1 comparison failure, 2 configuration error,
3 censoring threshold breached.

Reports are CSV (first line a '#'-prefixed JSON metadata object, then a
header row) or JSON.  Every report embeds the parameters and master seed
needed to reproduce it byte-identically; the worker count is deliberately
not part of the metadata because it never changes the result.  Escape
reports omit the clock parameters: the escape estimator never consults
them, and two runs differing only in the clock must produce identical
bytes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from tempexit import __version__
from tempexit.analytic import (
    escape_prob_interval,
    getoor_u,
    mfet_gaussian_ball,
)
from tempexit.clock import InfiniteMeanError, TemperedStableParams, mean_rate
from tempexit.dynamics import Domain, GaussianDriver, StableDriver, contains
from tempexit.estimator import (
    CensoringError,
    HalfLineRight,
    compare,
    estimate_escape,
    estimate_mfet,
)

EXIT_OK = 0
EXIT_COMPARE = 1
EXIT_CONFIG = 2
EXIT_CENSORING = 3

_MFET_COLUMNS = [
    "x0", "mc_mean", "mc_stderr", "mc_operational_mean", "n_eff",
    "analytic", "z", "rel_err", "pass",
]
_ESCAPE_COLUMNS = ["x0", "beta", "mc_estimate", "mc_stderr", "analytic", "z", "pass"]
_RATIO_COLUMNS = ["alpha", "mu", "ratio_mc", "ratio_stderr", "analytic_factor", "z", "pass"]

# Desk-scale presets mirroring the published parameter sets.  Trajectory
# counts and step sizes are chosen so each preset finishes in minutes; all of
# them can be overridden from the command line.  fig5 and fig6 share one
# parameter set.  fig9 uses a per-beta step size calibrated so the landing
# side distribution is converged well below the Monte Carlo resolution.
_PRESETS: dict[str, dict] = {
    "fig1": dict(kind="mfet", driver="gaussian", dim=1, radius=10.0, ds=1e-2,
                 trajectories=20000, x0=[-5.0, 0.0, 5.0],
                 sweep=[(0.2, 0.1), (0.6, 0.1), (0.9, 0.1)]),
    "fig2": dict(kind="mfet", driver="stable", beta=0.5, dim=1, radius=100.0, ds=1e-2,
                 trajectories=20000, x0=[-50.0, 0.0, 50.0],
                 sweep=[(0.2, 0.1), (0.6, 0.1), (0.9, 0.1)]),
    "fig3": dict(kind="mfet", driver="stable", beta=0.5, dim=1, radius=100.0, ds=1e-2,
                 trajectories=20000, x0=[0.0],
                 sweep=[(0.6, 0.01), (0.6, 0.06), (0.6, 0.1)]),
    "fig4": dict(kind="mfet", driver="stable", beta=0.5, dim=2, radius=100.0, ds=1e-2,
                 trajectories=20000, x0=[0.0, 50.0], sweep=[(0.2, 0.1)]),
    "fig5": dict(kind="mfet", driver="stable", beta=0.5, dim=2, radius=100.0, ds=1e-2,
                 trajectories=20000, x0=[0.0, 50.0], sweep=[(0.2, 0.01)]),
    "fig6": dict(kind="mfet", driver="stable", beta=0.5, dim=2, radius=100.0, ds=1e-2,
                 trajectories=20000, x0=[0.0, 50.0], sweep=[(0.2, 0.01)]),
    "fig7": dict(kind="mfet", driver="stable", beta=1.2, dim=2, radius=100.0, ds=1e-2,
                 trajectories=10000, x0=[0.0, 50.0], sweep=[(0.6, 0.1)]),
    "fig9": dict(kind="escape", dim=1, radius=100.0, trajectories=20000,
                 x0=[-50.0, 0.0, 50.0],
                 betas=[(0.5, 1e-2), (1.2, 5e-2), (1.8, 0.5)]),
}


class ConfigError(ValueError):
    pass


# --- report writing ----------------------------------------------------------


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def _jsonable(value):
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def write_report(out: str | None, meta: dict, columns: list[str], rows: list[dict], fmt: str) -> None:
    meta = {k: _jsonable(v) for k, v in meta.items()}
    rows = [{k: _jsonable(v) for k, v in row.items()} for row in rows]
    if fmt == "csv":
        lines = ["#" + json.dumps(meta, sort_keys=True, separators=(",", ":"))]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_cell(row[c]) for c in columns))
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps({"meta": meta, "rows": rows}, sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, newline="\n")


# --- argument plumbing --------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, with_driver: bool = True) -> None:
    if with_driver:
        p.add_argument("--driver", choices=["gaussian", "stable"])
        p.add_argument("--beta", type=float, help="jump stability index (stable driver)")
        p.add_argument("--eps", type=float, help="noise strength")
    p.add_argument("--alpha", type=float, help="waiting-time stability index in (0, 1]")
    p.add_argument("--mu", type=float, help="tempering rate >= 0")
    p.add_argument("--dim", type=int, help="spatial dimension")
    p.add_argument("--radius", type=float, help="domain radius")
    p.add_argument("--x0", type=float, action="append",
                   help="start coordinate, repeatable; placed on the first axis for dim > 1")
    p.add_argument("--x0-grid", help="lo:hi:count grid of start coordinates")
    p.add_argument("--ds", type=float, help="operational time step")
    p.add_argument("--trajectories", type=int)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--workers", type=int, help="worker processes (never changes results)")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--rel-tol", type=float, help="relative tolerance for pass/fail")
    p.add_argument("--config", help="flat key=value defaults file; flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempexit",
        description="Mean first exit times and escape probabilities for tempered "
                    "anomalous diffusion: Monte Carlo vs closed forms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("mfet", help="mean first exit time vs closed form"))
    _add_common(sub.add_parser("escape", help="escape probability vs closed form"))
    pa = sub.add_parser("analytic", help="closed-form values on a grid, no simulation")
    pa.add_argument("--quantity", choices=["mfet", "escape"])
    _add_common(pa)
    _add_common(sub.add_parser("ratio", help="physical/operational ratio vs tempering factor"))
    pp = sub.add_parser("preset", help="run a canned figure preset")
    pp.add_argument("name", choices=sorted(_PRESETS))
    _add_common(pp)
    return parser


def _load_config_file(path: str) -> dict:
    values: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_CONFIG_PARSERS = {
    "driver": str, "beta": float, "eps": float, "alpha": float, "mu": float,
    "dim": int, "radius": float, "ds": float, "trajectories": int,
    "max_steps": int, "seed": int, "workers": int, "out": str, "format": str,
    "rel_tol": float, "quantity": str,
    "x0": lambda s: [float(v) for v in s.split(",")],
    "x0_grid": str,
}


def _resolve(args: argparse.Namespace) -> dict:
    """Merge flag values over config-file values over built-in defaults."""
    cfg: dict = {}
    if getattr(args, "config", None):
        raw = _load_config_file(args.config)
        for key, text in raw.items():
            if key not in _CONFIG_PARSERS:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                cfg[key] = _CONFIG_PARSERS[key](text)
            except ValueError as exc:
                raise ConfigError(f"bad value for config key {key!r}: {exc}") from exc
    merged = dict(cfg)
    for key, value in vars(args).items():
        if key in ("command", "config", "name"):
            continue
        if value is not None:
            merged[key] = value
    merged.setdefault("driver", "gaussian")
    merged.setdefault("eps", 1.0)
    merged.setdefault("alpha", 0.6)
    merged.setdefault("mu", 0.1)
    merged.setdefault("beta", 0.5)
    merged.setdefault("dim", 1)
    merged.setdefault("radius", 10.0 if merged["driver"] == "gaussian" else 100.0)
    if merged.get("ds") is None:
        # documented defaults: Gaussian steps scale with the domain area
        if merged["driver"] == "gaussian":
            merged["ds"] = 1e-2 * (merged["radius"] / 10.0) ** 2
        else:
            merged["ds"] = 1e-2
    merged.setdefault("trajectories", 20000)
    merged.setdefault("max_steps", 10**8)
    merged.setdefault("seed", 1)
    merged.setdefault("workers", 1)
    merged.setdefault("out", None)
    merged.setdefault("format", "csv")
    merged.setdefault("rel_tol", 0.05)
    merged.setdefault("quantity", "mfet")
    return merged


def _x0_values(cfg: dict, default: list[float]) -> list[float]:
    if cfg.get("x0_grid"):
        parts = cfg["x0_grid"].split(":")
        if len(parts) != 3:
            raise ConfigError(f"--x0-grid expects lo:hi:count, got {cfg['x0_grid']!r}")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ConfigError(f"bad --x0-grid: {exc}") from exc
        if count < 1:
            raise ConfigError("--x0-grid count must be >= 1")
        return [float(v) for v in np.linspace(lo, hi, count)]
    if cfg.get("x0"):
        return [float(v) for v in cfg["x0"]]
    return list(default)


def _x0_vector(x0: float, dim: int) -> np.ndarray:
    v = np.zeros(dim)
    v[0] = x0
    return v


def _make_driver(cfg: dict):
    if cfg["driver"] == "gaussian":
        return GaussianDriver(a=1.0, eps=cfg["eps"])
    return StableDriver(beta=cfg["beta"], eps=cfg["eps"])


def _analytic_mfet(cfg: dict, x0: float) -> float:
    """Closed-form physical MFET for the configured driver at start x0.

    The unit-strength formulas scale exactly: the Gaussian generator carries
    eps*a, the stable generator eps^beta.
    """
    xv = _x0_vector(x0, cfg["dim"])
    if cfg["driver"] == "gaussian":
        return mfet_gaussian_ball(xv, cfg["radius"], cfg["alpha"], cfg["mu"], cfg["dim"]) / cfg["eps"]
    c = mean_rate(TemperedStableParams(cfg["alpha"], cfg["mu"]))
    return c * getoor_u(xv, cfg["radius"], cfg["beta"], cfg["dim"]) / cfg["eps"] ** cfg["beta"]


def _base_meta(cfg: dict, command: str, include_clock: bool = True) -> dict:
    meta = {
        "command": command,
        "version": __version__,
        "driver": cfg["driver"],
        "eps": cfg["eps"],
        "dim": cfg["dim"],
        "radius": cfg["radius"],
        "ds": cfg["ds"],
        "trajectories": cfg["trajectories"],
        "max_steps": cfg["max_steps"],
        "master_seed": cfg["seed"],
        "rel_tol": cfg["rel_tol"],
    }
    if cfg["driver"] == "stable":
        meta["beta"] = cfg["beta"]
    if include_clock:
        meta["alpha"] = cfg["alpha"]
        meta["mu"] = cfg["mu"]
    return meta


# --- commands -----------------------------------------------------------------


def _mfet_rows(cfg: dict, x0_list: list[float], sweep_cols: dict | None = None) -> tuple[list[dict], bool]:
    domain = Domain(cfg["dim"], cfg["radius"])
    driver = _make_driver(cfg)
    clockp = TemperedStableParams(cfg["alpha"], cfg["mu"])
    for x0 in x0_list:
        if not contains(domain, _x0_vector(x0, cfg["dim"])):
            raise ConfigError(f"x0 = {x0} is not strictly inside the domain (radius {cfg['radius']})")
    analytic_values = [_analytic_mfet(cfg, x0) for x0 in x0_list]
    rows = []
    all_pass = True
    for x0, analytic in zip(x0_list, analytic_values):
        est = estimate_mfet(
            _x0_vector(x0, cfg["dim"]), domain, None, driver, clockp,
            cfg["ds"], cfg["trajectories"], cfg["seed"],
            max_steps=cfg["max_steps"], workers=cfg["workers"],
        )
        report = compare(est.physical, analytic, rel_tol=cfg["rel_tol"])
        all_pass &= report.passed
        row = dict(sweep_cols or {})
        row.update({
            "x0": x0,
            "mc_mean": est.physical.mean,
            "mc_stderr": est.physical.stderr,
            "mc_operational_mean": est.operational.mean,
            "n_eff": est.physical.count,
            "analytic": analytic,
            "z": report.z,
            "rel_err": report.rel_err,
            "pass": report.passed,
        })
        rows.append(row)
    return rows, all_pass


def cmd_mfet(cfg: dict) -> int:
    x0_list = _x0_values(cfg, [0.0])
    rows, all_pass = _mfet_rows(cfg, x0_list)
    meta = _base_meta(cfg, "mfet")
    meta["x0"] = x0_list
    write_report(cfg["out"], meta, _MFET_COLUMNS, rows, cfg["format"])
    return EXIT_OK if all_pass else EXIT_COMPARE


def _escape_rows(cfg: dict, x0_list: list[float], beta_ds: list[tuple[float, float]]) -> tuple[list[dict], bool]:
    domain = Domain(1, cfg["radius"])
    target = HalfLineRight(cfg["radius"])
    for x0 in x0_list:
        if not contains(domain, np.array([x0])):
            raise ConfigError(f"x0 = {x0} is not strictly inside the domain (radius {cfg['radius']})")
    rows = []
    all_pass = True
    for beta, ds in beta_ds:
        driver = StableDriver(beta=beta, eps=cfg["eps"])
        for x0 in x0_list:
            est = estimate_escape(
                np.array([x0]), domain, target, driver, ds,
                cfg["trajectories"], cfg["seed"],
                max_steps=cfg["max_steps"], workers=cfg["workers"],
            )
            analytic = escape_prob_interval(x0, cfg["radius"], beta)
            report = compare(est, analytic, rel_tol=cfg["rel_tol"])
            all_pass &= report.passed
            rows.append({
                "x0": x0,
                "beta": beta,
                "mc_estimate": est.mean,
                "mc_stderr": est.stderr,
                "analytic": analytic,
                "z": report.z,
                "pass": report.passed,
            })
    return rows, all_pass


def cmd_escape(cfg: dict) -> int:
    if cfg["dim"] != 1:
        raise ConfigError("the escape command solves the 1-D interval problem; use --dim 1")
    x0_list = _x0_values(cfg, [0.0])
    rows, all_pass = _escape_rows(cfg, x0_list, [(cfg["beta"], cfg["ds"])])
    # no clock parameters here: the estimate never consults them, and runs
    # differing only in the clock must be byte-identical
    meta = _base_meta(cfg, "escape", include_clock=False)
    meta["driver"] = "stable"
    meta["beta"] = cfg["beta"]
    meta["x0"] = x0_list
    meta["target"] = "half_line_right"
    write_report(cfg["out"], meta, _ESCAPE_COLUMNS, rows, cfg["format"])
    return EXIT_OK if all_pass else EXIT_COMPARE


def cmd_analytic(cfg: dict) -> int:
    radius = cfg["radius"]
    x0_list = _x0_values(cfg, [float(v) for v in np.linspace(-0.95 * radius, 0.95 * radius, 21)])
    rows = []
    divergent = False
    for x0 in x0_list:
        if abs(x0) > radius:
            raise ConfigError(f"grid point {x0} lies outside the closed domain")
        if cfg["quantity"] == "escape":
            value = escape_prob_interval(x0, radius, cfg["beta"])
        else:
            try:
                value = _analytic_mfet(cfg, x0)
            except InfiniteMeanError:
                value = "divergent"
                divergent = True
        rows.append({"x": x0, "value": value})
    meta = {"command": "analytic", "version": __version__, "quantity": cfg["quantity"],
            "radius": radius, "x": x0_list}
    if cfg["quantity"] == "escape":
        meta["driver"] = "stable"
        meta["beta"] = cfg["beta"]
    else:
        meta["driver"] = cfg["driver"]
        meta["eps"] = cfg["eps"]
        meta["dim"] = cfg["dim"]
        meta["alpha"] = cfg["alpha"]
        meta["mu"] = cfg["mu"]
        if cfg["driver"] == "stable":
            meta["beta"] = cfg["beta"]
    write_report(cfg["out"], meta, ["x", "value"], rows, cfg["format"])
    return EXIT_CONFIG if divergent else EXIT_OK


def cmd_ratio(cfg: dict) -> int:
    clockp = TemperedStableParams(cfg["alpha"], cfg["mu"])
    try:
        factor = mean_rate(clockp)
    except InfiniteMeanError as exc:
        raise ConfigError(f"tempering factor diverges: {exc}") from exc
    domain = Domain(cfg["dim"], cfg["radius"])
    driver = _make_driver(cfg)
    x0_list = _x0_values(cfg, [0.0])
    x0 = x0_list[0]
    est = estimate_mfet(
        _x0_vector(x0, cfg["dim"]), domain, None, driver, clockp,
        cfg["ds"], cfg["trajectories"], cfg["seed"],
        max_steps=cfg["max_steps"], workers=cfg["workers"],
    )
    if est.ratio_stderr > 0.0:
        z = (est.ratio - factor) / est.ratio_stderr
    else:
        z = 0.0 if est.ratio == factor else math.copysign(math.inf, est.ratio - factor)
    passed = abs(z) <= 3.0
    rows = [{
        "alpha": cfg["alpha"],
        "mu": cfg["mu"],
        "ratio_mc": est.ratio,
        "ratio_stderr": est.ratio_stderr,
        "analytic_factor": factor,
        "z": z,
        "pass": passed,
    }]
    meta = _base_meta(cfg, "ratio")
    meta["x0"] = [x0]
    write_report(cfg["out"], meta, _RATIO_COLUMNS, rows, cfg["format"])
    return EXIT_OK if passed else EXIT_COMPARE


def cmd_preset(name: str, cfg: dict, overrides: argparse.Namespace) -> int:
    spec = _PRESETS[name]
    cfg = dict(cfg)
    cfg["dim"] = spec["dim"]
    cfg["radius"] = spec["radius"]
    if overrides.trajectories is None:
        cfg["trajectories"] = spec["trajectories"]
    if overrides.x0 is None and overrides.x0_grid is None:
        x0_list = list(spec["x0"])
    else:
        x0_list = _x0_values(cfg, spec["x0"])

    if spec["kind"] == "escape":
        beta_ds = spec["betas"]
        if overrides.beta is not None or overrides.ds is not None:
            beta_ds = [(overrides.beta if overrides.beta is not None else b,
                        overrides.ds if overrides.ds is not None else d)
                       for b, d in beta_ds]
        rows, all_pass = _escape_rows(cfg, x0_list, beta_ds)
        meta = _base_meta(cfg, "preset", include_clock=False)
        meta["preset"] = name
        meta["driver"] = "stable"
        meta["x0"] = x0_list
        meta["beta_ds"] = [[b, d] for b, d in beta_ds]
        meta["target"] = "half_line_right"
        meta.pop("ds", None)
        write_report(cfg["out"], meta, _ESCAPE_COLUMNS, rows, cfg["format"])
        return EXIT_OK if all_pass else EXIT_COMPARE

    cfg["driver"] = spec["driver"]
    if spec["driver"] == "stable":
        cfg["beta"] = spec["beta"] if overrides.beta is None else overrides.beta
    if overrides.ds is None:
        cfg["ds"] = spec["ds"]
    sweep = spec["sweep"]
    if overrides.alpha is not None or overrides.mu is not None:
        sweep = [(overrides.alpha if overrides.alpha is not None else a,
                  overrides.mu if overrides.mu is not None else m)
                 for a, m in sweep]
    rows: list[dict] = []
    all_pass = True
    for alpha, mu in sweep:
        sub = dict(cfg)
        sub["alpha"] = alpha
        sub["mu"] = mu
        sweep_rows, ok = _mfet_rows(sub, x0_list, sweep_cols={"alpha": alpha, "mu": mu})
        rows.extend(sweep_rows)
        all_pass &= ok
    meta = _base_meta(cfg, "preset")
    meta["preset"] = name
    meta["x0"] = x0_list
    meta["sweep"] = [[a, m] for a, m in sweep]
    meta.pop("alpha", None)
    meta.pop("mu", None)
    write_report(cfg["out"], meta, ["alpha", "mu"] + _MFET_COLUMNS, rows, cfg["format"])
    return EXIT_OK if all_pass else EXIT_COMPARE


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
        if args.command == "mfet":
            return cmd_mfet(cfg)
        if args.command == "escape":
            return cmd_escape(cfg)
        if args.command == "analytic":
            return cmd_analytic(cfg)
        if args.command == "ratio":
            return cmd_ratio(cfg)
        return cmd_preset(args.name, cfg, args)
    except CensoringError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CENSORING
    except (ConfigError, InfiniteMeanError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
