"""
Command-line runs: ``fig1``, ``probe``, ``end2end`` and ``spectrum``.

Each command reads an optional JSON config (``--config``) whose keys are the
command's field names; command-line flags override file values. Outputs go
to ``--out`` (default: current directory).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .dynamics import ScenarioConfig
from .hilbert import (
    OBSERVABLE_KINDS,
    build_space,
    correlation_operator,
    observable,
    restrict,
    sector_basis,
)
from .measurement import TimeSeries, locate_extremum, parity_scan
from .probe import MeasurementReport, ProbeConfig, end_to_end, run_direct_measurement
from .states import fock_state, sector_state, su2_coherent

log = logging.getLogger("iontrap_parity")


class ConfigError(ValueError):
    pass


SCAN_FIELDS = {
    "g": 1.0,
    "gt_max": 3.0,
    "n_points": 3000,
    "probability_threshold": 1e-6,
    "refine": False,
}
PROBE_FIELDS = {"gamma": 1e4, "c_max": 30.0, "x_max": 0.4, "t": "auto"}

DEFAULTS = {
    "fig1": {"N": [20, 21], "plot": True, **SCAN_FIELDS},
    "probe": {
        "state": "su2",
        "N": 20,
        "n_x": 0,
        "n_y": 0,
        "amplitudes": None,
        "observable": "correlation",
        "mode": None,
        "headroom": 0,
        **PROBE_FIELDS,
    },
    "end2end": {"N": 20, "gt_star": None, **SCAN_FIELDS, **PROBE_FIELDS},
    "spectrum": {"N": 2},
}


def merge_config(command: str, path: Optional[str], overrides: dict) -> dict:
    """Defaults, then the JSON file, then non-``None`` flag overrides."""
    cfg = dict(DEFAULTS[command])
    if path is not None:
        try:
            with open(path) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - set(cfg))
        if unknown:
            raise ConfigError(f"unknown field(s) for {command}: {', '.join(unknown)}")
        cfg.update(loaded)
    cfg.update({k: v for k, v in overrides.items() if v is not None and k in cfg})
    return cfg


def _field(cfg: dict, name: str, convert, check=None, message: str = ""):
    try:
        value = convert(cfg[name])
    except (TypeError, ValueError):
        raise ConfigError(f"field '{name}': cannot interpret {cfg[name]!r}") from None
    if check is not None and not check(value):
        raise ConfigError(f"field '{name}': {message} (got {cfg[name]!r})")
    return value


def _count(cfg, name):
    return _field(cfg, name, _as_int, lambda v: v >= 0, "must be a non-negative integer")


def _as_int(v):
    if isinstance(v, bool) or float(v) != int(float(v)):
        raise ValueError(v)
    return int(float(v))


def _scenario(cfg: dict, N: int) -> ScenarioConfig:
    g = _field(cfg, "g", float, lambda v: v > 0, "must be > 0")
    gt_max = _field(cfg, "gt_max", float, lambda v: v > 0, "must be > 0")
    n_points = _field(cfg, "n_points", _as_int, lambda v: v >= 1, "must be >= 1")
    thr = _field(cfg, "probability_threshold", float, lambda v: 0 <= v < 1, "must lie in [0, 1)")
    return ScenarioConfig(N=N, g=g, gt_max=gt_max, n_points=n_points,
                          probability_threshold=thr, refine=bool(cfg["refine"]))


def _probe_config(cfg: dict) -> ProbeConfig:
    gamma = _field(cfg, "gamma", float, lambda v: v > 0, "must be > 0")
    c_max = _field(cfg, "c_max", float, lambda v: v > 0, "must be > 0")
    x_max = _field(cfg, "x_max", float, lambda v: 0 < v < np.pi / 2, "must lie in (0, pi/2)")
    t = cfg["t"]
    if t != "auto":
        t = _field(cfg, "t", float, lambda v: v > 0, "must be 'auto' or > 0")
    return ProbeConfig(gamma=gamma, c_max=c_max, x_max=x_max, t=t)


def _fmt(x: float) -> str:
    return f"{x + 0.0:.12g}"


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def write_svg(series: list[TimeSeries], path: Path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "iontrap-parity"
    fig, ax = plt.subplots(figsize=(7, 4))
    for s in series:
        ax.plot(s.times, s.expectation, lw=1, label=f"N = {s.N}")
    ax.set_xlabel("g t")
    ax.set_ylabel(r"$\langle C_{xy} \rangle$ (ground outcome)")
    ax.axhline(0, color="0.6", lw=0.5)
    ax.legend()
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def cmd_fig1(cfg: dict, out: Path) -> int:
    Ns = cfg["N"] if isinstance(cfg["N"], (list, tuple)) else [cfg["N"]]
    Ns = [_field({"N": n}, "N", _as_int, lambda v: v >= 0, "must be a non-negative integer")
          for n in Ns]
    series = []
    for N in Ns:
        config = _scenario(cfg, N)
        s = parity_scan(config)
        s.to_csv(out / f"fig1_N{N}.csv")
        series.append(s)
        for kind in ("peak", "valley"):
            ext = locate_extremum(s, config, kind)
            print(f"N={N} {kind}: gt*={_fmt(ext.gt)} value={_fmt(ext.value)} "
                  f"ground_probability={_fmt(ext.ground_probability)}")
    if cfg["plot"]:
        write_svg(series, out / "fig1.svg")
    return 0


def _probe_state(cfg: dict, seed: Optional[int]):
    kind = cfg["state"]
    head = _count(cfg, "headroom")
    if kind == "su2":
        N = _count(cfg, "N")
        space = build_space(N + head, N + head)
        return su2_coherent(space, N)
    if kind == "fock":
        nx, ny = _count(cfg, "n_x"), _count(cfg, "n_y")
        M = nx + ny
        space = build_space(M + head, M + head)
        return fock_state(space, nx, ny)
    if kind in ("sector", "random"):
        N = _count(cfg, "N")
        space = build_space(N + head, N + head)
        if kind == "random":
            rng = np.random.default_rng(seed)
            c = rng.normal(size=N + 1) + 1j * rng.normal(size=N + 1)
        else:
            raw = cfg["amplitudes"]
            if not isinstance(raw, (list, tuple)) or len(raw) != N + 1:
                raise ConfigError(f"field 'amplitudes': need a list of {N + 1} values")
            try:
                c = np.array([complex(*a) if isinstance(a, (list, tuple)) else complex(a)
                              for a in raw])
            except (TypeError, ValueError):
                raise ConfigError("field 'amplitudes': entries must be numbers or [re, im]") from None
            if not np.any(c):
                raise ConfigError("field 'amplitudes': all zero")
        return sector_state(space, N, c)
    raise ConfigError(f"field 'state': must be su2, fock, sector or random (got {kind!r})")


def _report_line(report: MeasurementReport) -> str:
    return (f"estimate={_fmt(report.estimate)} true={_fmt(report.true_mean)} "
            f"bound={_fmt(report.error_bound)} readout={_fmt(report.sigma_z_readout)} "
            f"t={_fmt(report.probe_time)}s cutoff_violated={report.cutoff_violated}")


def _bound_status(report: MeasurementReport) -> int:
    if report.cutoff_violated or report.within_bound:
        return 0
    log.error("estimate error %.3e exceeds bound %.3e", report.error, report.error_bound)
    return 1


def cmd_probe(cfg: dict, out: Path, seed: Optional[int] = None) -> int:
    psi = _probe_state(cfg, seed)
    kind = cfg["observable"]
    if kind not in OBSERVABLE_KINDS:
        raise ConfigError(f"field 'observable': must be one of {', '.join(OBSERVABLE_KINDS)}")
    try:
        obs = observable(psi.space, kind, cfg["mode"])
    except ValueError as exc:
        raise ConfigError(f"field 'mode': {exc}") from None
    report = run_direct_measurement(psi, obs, _probe_config(cfg))
    _write(out / "probe_report.json", report.to_json() + "\n")
    print(_report_line(report))
    return _bound_status(report)


def cmd_end2end(cfg: dict, out: Path) -> int:
    N = _field(cfg, "N", _as_int, lambda v: v >= 0, "must be a non-negative integer")
    probe_cfg = _probe_config(cfg)
    scenario = _scenario(cfg, N)
    if cfg["gt_star"] is None:
        gt_star = locate_extremum(parity_scan(scenario), scenario, "parity").gt
    else:
        gt_star = _field(cfg, "gt_star", float, lambda v: v >= 0, "must be >= 0")
    report, record = end_to_end(N, scenario.g, gt_star, probe_cfg)
    _write(out / "end2end_report.json", report.to_json() + "\n")
    _write(out / "end2end_scenario.json", json.dumps(record, indent=2) + "\n")
    print(f"N={N} gt*={_fmt(gt_star)} ground_probability={_fmt(record['ground_probability'])}")
    print(_report_line(report))
    return _bound_status(report)


def sector_spectra(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Sorted eigenvalues of ``C_xy`` and ``L_z`` on the phonon sector ``N``."""
    space = build_space(N, N)
    idx = sector_basis(space, N)
    c = np.linalg.eigvalsh(restrict(correlation_operator(space), idx))
    lz = np.linalg.eigvalsh(restrict(observable(space, "angular_momentum_z"), idx))
    return c, lz


def _spectrum_row(values: np.ndarray) -> str:
    return ",".join(_fmt(v) for v in np.round(values, 9))


def cmd_spectrum(cfg: dict, out: Path) -> int:
    N = _count(cfg, "N")
    c, lz = sector_spectra(N)
    text = _spectrum_row(c) + "\n" + _spectrum_row(lz) + "\n"
    _write(out / f"spectrum_N{N}.csv", text)
    print(f"C_xy: {_spectrum_row(c)}")
    print(f"L_z:  {_spectrum_row(lz)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iontrap-parity", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="seed for randomized test states")

    def scan_flags(p):
        p.add_argument("--g", type=float)
        p.add_argument("--gt-max", dest="gt_max", type=float)
        p.add_argument("--points", dest="n_points", type=int)
        p.add_argument("--threshold", dest="probability_threshold", type=float)
        p.add_argument("--refine", action=argparse.BooleanOptionalAction, default=None)

    def probe_flags(p):
        p.add_argument("--gamma", type=float, help="probe coupling (rad/s)")
        p.add_argument("--c-max", dest="c_max", type=float)
        p.add_argument("--x-max", dest="x_max", type=float)
        p.add_argument("--probe-time", dest="t", help="seconds, or 'auto'")

    p = sub.add_parser("fig1", help="parity-effect scans")
    common(p)
    scan_flags(p)
    p.add_argument("--N", type=int, nargs="+")
    p.add_argument("--plot", action=argparse.BooleanOptionalAction, default=None)

    p = sub.add_parser("probe", help="direct measurement of a vibrational mean")
    common(p)
    probe_flags(p)
    p.add_argument("--state", choices=["su2", "fock", "sector", "random"])
    p.add_argument("--N", type=int)
    p.add_argument("--nx", dest="n_x", type=int)
    p.add_argument("--ny", dest="n_y", type=int)
    p.add_argument("--amplitudes", type=lambda s: [float(x) for x in s.split(",")],
                   help="comma-separated real sector amplitudes")
    p.add_argument("--observable", choices=OBSERVABLE_KINDS)
    p.add_argument("--mode", choices=["x", "y"])
    p.add_argument("--headroom", type=int)

    p = sub.add_parser("end2end", help="parity preparation followed by the probe")
    common(p)
    scan_flags(p)
    probe_flags(p)
    p.add_argument("--N", type=int)
    p.add_argument("--gt-star", dest="gt_star", type=float)

    p = sub.add_parser("spectrum", help="sector spectra of C_xy and L_z")
    common(p)
    p.add_argument("--N", type=int)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config", "out", "seed")}
    out = Path(args.out)
    try:
        cfg = merge_config(args.command, args.config, overrides)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "fig1":
            return cmd_fig1(cfg, out)
        if args.command == "probe":
            return cmd_probe(cfg, out, args.seed)
        if args.command == "end2end":
            return cmd_end2end(cfg, out)
        return cmd_spectrum(cfg, out)
    except ConfigError as exc:
        log.error("invalid config: %s", exc)
        return 2
    except OSError as exc:
        log.error("%s", exc)
        return 1
    except ValueError as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
