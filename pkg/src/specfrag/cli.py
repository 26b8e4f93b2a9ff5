"""Reproducible experiment driver.

Two subcommands: ``run`` executes a scan and writes one curves CSV per
system (plus an optional strength-function CSV) and a JSON manifest with
the interpolated critical values; ``validate`` is a dry run that reports
basis size, scan-point count and a memory estimate without touching any
output file.

Configuration comes from flags, or from a JSON file via --config with
flags overriding file values. The output directory falls back to the
SPECFRAG_OUTPUT_DIR environment variable when not given explicitly.
Identical config and seed produce byte-identical CSVs on one platform:
floats are written with repr (shortest round-trip) and the timestamp lives
only in the manifest.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure (the
message names the module and the scan point).
"""
from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, henon_heiles, kepler, metrics
from .errors import ConfigurationError, InputError, NumericalError
from .linalg import eigh, projection_onto_subset
from .metrics import StateSelection, critical_parameter, spreading_width, strength_function

KNOWN_METRICS = ("w-pt", "w-exact", "kappa", "strength-function")
EXACT_METRICS = {"w-exact", "kappa", "strength-function"}

HH_COLUMNS = ("shell", "energy", "w_pt", "w_exact", "kappa", "gamma_spr", "energy_exact_mean")
KEPLER_COLUMNS = (
    "gamma",
    "scaled_energy_pt",
    "scaled_energy_exact",
    "w_pt",
    "w_exact",
    "kappa",
    "gamma_spr",
)


@dataclass(frozen=True)
class ExperimentConfig:
    system: str
    metrics: tuple[str, ...]
    selection: StateSelection
    output: Path
    seed: int
    threads: int
    hh: henon_heiles.HHConfig | None = None
    shell_range: tuple[int, int] | None = None
    kepler_cfg: kepler.KeplerConfig | None = None

    def echo(self) -> dict:
        d = {
            "system": self.system,
            "metrics": list(self.metrics),
            "selection": self.selection.value,
            "seed": self.seed,
            "threads": self.threads,
            "output": str(self.output),
        }
        if self.hh is not None:
            d["hbar"] = self.hh.hbar
            d["lambda"] = self.hh.lam
            d["num_shells"] = self.hh.num_shells
            d["shell_min"], d["shell_max"] = self.shell_range
        if self.kepler_cfg is not None:
            d["max_n"] = self.kepler_cfg.max_n
            d["m"] = self.kepler_cfg.m
            d["target_shell"] = self.kepler_cfg.target_shell
            d["gamma_grid"] = list(self.kepler_cfg.gamma_grid)
        return d

    def result_key(self) -> dict:
        # everything that determines the numbers; output dir and worker
        # count are excluded so identical scans hash identically
        d = self.echo()
        del d["output"]
        del d["threads"]
        return d


@dataclass(frozen=True)
class RunManifest:
    version: str
    timestamp: str
    config: dict
    config_sha256: str
    files: tuple[str, ...]
    metric_files: dict
    critical: dict


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="specfrag", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("run", "execute a scan and write CSV curves plus a JSON manifest"),
        ("validate", "dry-run: report basis size and scan shape, write nothing"),
    ):
        q = sub.add_parser(name, help=helptext)
        q.add_argument("--system", choices=("henon-heiles", "kepler"))
        q.add_argument("--config", type=Path, help="JSON config file; flags override it")
        q.add_argument("--output", "-o", type=Path, help="output directory")
        q.add_argument("--seed", type=int)
        q.add_argument("--metrics", help="comma list from: " + ",".join(KNOWN_METRICS))
        q.add_argument("--threads", type=int, help="worker threads (default: cpu count)")
        q.add_argument(
            "--selection",
            choices=[s.value for s in StateSelection],
            help="exact-curve eigenstate selection rule (default projection-window)",
        )
        q.add_argument("--shells", type=int, help="HH: number of shell groups in the basis")
        q.add_argument("--hbar", type=float, help="HH: effective hbar")
        q.add_argument("--lambda", dest="lam", type=float, help="HH: coupling strength")
        q.add_argument("--shell-min", type=int, help="HH: first scanned shell")
        q.add_argument("--shell-max", type=int, help="HH: last scanned shell")
        q.add_argument("--max-n", type=int, help="Kepler: number of shells in the basis")
        q.add_argument("--target-shell", type=int, help="Kepler: shell under study")
        q.add_argument("--gamma-grid", help="Kepler: comma list of field strengths")
    return p


def _merge(args: argparse.Namespace) -> dict:
    """Flags override config-file values; environment only supplies the
    output directory default."""
    raw: dict = {}
    if args.config is not None:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config file {args.config}: {exc}")
        if not isinstance(raw, dict):
            raise ConfigurationError("config file must hold a JSON object")
    flag_map = {
        "system": args.system,
        "output": args.output,
        "seed": args.seed,
        "metrics": args.metrics,
        "threads": args.threads,
        "selection": args.selection,
        "num_shells": args.shells,
        "hbar": args.hbar,
        "lambda": args.lam,
        "shell_min": args.shell_min,
        "shell_max": args.shell_max,
        "max_n": args.max_n,
        "target_shell": args.target_shell,
        "gamma_grid": args.gamma_grid,
    }
    for key, value in flag_map.items():
        if value is not None:
            raw[key] = value
    return raw


def _build_config(raw: dict) -> ExperimentConfig:
    system = raw.get("system")
    if system not in ("henon-heiles", "kepler"):
        raise ConfigurationError("--system must be henon-heiles or kepler")

    m = raw.get("metrics", "w-pt,w-exact,kappa")
    if isinstance(m, str):
        m = [s for s in m.split(",") if s]
    metric_list = tuple(m)
    if not metric_list:
        raise ConfigurationError("metric set must be nonempty")
    unknown = [s for s in metric_list if s not in KNOWN_METRICS]
    if unknown:
        raise ConfigurationError(
            f"unknown metrics {unknown}; choose from {list(KNOWN_METRICS)}"
        )

    try:
        selection = StateSelection(raw.get("selection", "projection-window"))
    except ValueError:
        raise ConfigurationError(
            f"unknown selection {raw.get('selection')!r}; choose from "
            f"{[s.value for s in StateSelection]}"
        )
    output = Path(raw.get("output") or os.environ.get("SPECFRAG_OUTPUT_DIR") or "specfrag-out")
    seed = int(raw.get("seed", 0))
    threads = int(raw.get("threads") or os.cpu_count() or 1)
    if threads < 1:
        raise ConfigurationError(f"threads must be >= 1, got {threads}")

    hh_cfg = None
    shell_range = None
    kep_cfg = None
    if system == "henon-heiles":
        hh_cfg = henon_heiles.HHConfig(
            hbar=float(raw.get("hbar", 0.01)),
            lam=float(raw.get("lambda", 1.0)),
            num_shells=int(raw.get("num_shells", 30)),
        )
        if hh_cfg.num_shells < 4:
            raise ConfigurationError(
                "the cubic coupling reaches 3 shells away; the experiment needs "
                f"num_shells >= 4, got {hh_cfg.num_shells}"
            )
        # the top 3 shells of H are contaminated by the basis edge, so the
        # default scan stops 4 below the cut (and never above shell 26)
        shell_min = int(raw.get("shell_min", 1))
        shell_max = int(raw.get("shell_max", min(hh_cfg.num_shells - 4, 26)))
        if not (0 <= shell_min <= shell_max <= hh_cfg.num_shells - 1):
            raise ConfigurationError(
                f"shell scan [{shell_min}, {shell_max}] must fit in "
                f"[0, {hh_cfg.num_shells - 1}]"
            )
        shell_range = (shell_min, shell_max)
    else:
        grid = raw.get("gamma_grid")
        if isinstance(grid, str):
            grid = [float(s) for s in grid.split(",") if s]
        kwargs = {}
        if grid is not None:
            kwargs["gamma_grid"] = tuple(grid)
        kep_cfg = kepler.KeplerConfig(
            max_n=int(raw.get("max_n", 20)),
            m=int(raw.get("m", 0)),
            target_shell=int(raw.get("target_shell", 10)),
            **kwargs,
        )

    return ExperimentConfig(
        system=system,
        metrics=metric_list,
        selection=selection,
        output=output,
        seed=seed,
        threads=threads,
        hh=hh_cfg,
        shell_range=shell_range,
        kepler_cfg=kep_cfg,
    )


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _write_csv(path: Path, columns, rows, meta: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}: {value}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(c)) for c in columns) + "\n")


def _crossing_entry(curve, threshold: float, axis: str) -> tuple:
    res = critical_parameter(curve, threshold=threshold, axis=axis)
    bracket = list(res.bracket) if res.bracket is not None else None
    return res.critical, bracket


def _run_henon_heiles(config: ExperimentConfig):
    cfg = config.hh
    states, partition = henon_heiles.enumerate_basis(cfg)
    v = henon_heiles.build_v(cfg)
    want = set(config.metrics)
    decomp = None
    if want & EXACT_METRICS:
        try:
            decomp = eigh(henon_heiles.build_h(cfg))
        except NumericalError as exc:
            raise NumericalError(f"henon-heiles-model eigendecomposition: {exc}") from exc

    lo, hi = config.shell_range
    scan = list(range(lo, hi + 1))

    def point(n: int) -> dict:
        group = partition.group(n)
        row: dict = {"shell": n, "energy": group.energy}
        if "w-pt" in want:
            row["w_pt"] = metrics.w_perturbative(v, partition, n, cfg.lam)
        if "w-exact" in want:
            picked = metrics.select_eigenstates(
                decomp, group.indices, config.selection, shell_energy=group.energy
            )
            proj = projection_onto_subset(decomp, group.indices)
            row["w_exact"] = float(1.0 - proj[picked].mean())
            row["energy_exact_mean"] = float(decomp.eigenvalues[picked].mean())
        if "kappa" in want:
            sf = strength_function(decomp, group.indices, label=n)
            width = spreading_width(sf)
            row["kappa"] = width / cfg.hbar  # D0 = hbar, uniform shell spacing
            row["gamma_spr"] = width
        if "strength-function" in want:
            sf = strength_function(decomp, group.indices, label=n)
            row["_sf"] = list(zip(sf.eigen_energies.tolist(), sf.weights.tolist()))
        return row

    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        rows = list(pool.map(point, scan))

    critical: dict = {}
    if "w-pt" in want:
        value, bracket = _crossing_entry(
            [(r["energy"], r["w_pt"]) for r in rows], 0.5, "energy"
        )
        critical["pt_critical_energy"] = value
        critical["pt_critical_energy_bracket"] = bracket
    if "w-exact" in want:
        value, bracket = _crossing_entry(
            [(r["energy"], r["w_exact"]) for r in rows], 0.5, "energy"
        )
        critical["exact_critical_energy"] = value
        critical["exact_critical_energy_bracket"] = bracket
    if "kappa" in want:
        value, bracket = _crossing_entry(
            [(r["energy"], r["kappa"]) for r in rows], 1.0, "energy"
        )
        critical["kappa_critical_energy"] = value
        critical["kappa_critical_energy_bracket"] = bracket
    return rows, critical, HH_COLUMNS, "hh_curves.csv", "shell"


def _run_kepler(config: ExperimentConfig):
    cfg = config.kepler_cfg
    states, partition = kepler.enumerate_parabolic_basis(cfg)
    want = set(config.metrics)
    try:
        rho2 = kepler.build_rho2(cfg)
    except NumericalError as exc:
        raise NumericalError(f"kepler-model rho^2 build: {exc}") from exc
    target = partition.group(cfg.target_shell)

    # nearest unperturbed neighbor gap for kappa
    energies = {g.label: g.energy for g in partition.groups}
    gaps = []
    if cfg.target_shell + 1 in energies:
        gaps.append(energies[cfg.target_shell + 1] - target.energy)
    if cfg.target_shell - 1 in energies:
        gaps.append(target.energy - energies[cfg.target_shell - 1])
    d0 = min(gaps) if gaps else None

    # W is exactly quadratic in the coupling, so one unit-coupling
    # evaluation serves the whole grid
    w_pt_base = (
        metrics.w_perturbative(rho2, partition, cfg.target_shell, 1.0)
        if "w-pt" in want
        else None
    )

    def point(gamma: float) -> dict:
        row: dict = {
            "gamma": gamma,
            "scaled_energy_pt": kepler.scaled_energy(target.energy, gamma),
        }
        try:
            if "w-pt" in want:
                coupling = gamma * gamma / 8.0
                row["w_pt"] = w_pt_base * coupling * coupling
            if want & EXACT_METRICS:
                decomp = eigh(kepler.build_h(cfg, gamma, rho2))
                if "w-exact" in want:
                    picked = metrics.select_eigenstates(
                        decomp, target.indices, config.selection, shell_energy=target.energy
                    )
                    proj = projection_onto_subset(decomp, target.indices)
                    row["w_exact"] = float(1.0 - proj[picked].mean())
                    row["scaled_energy_exact"] = kepler.scaled_energy(
                        float(decomp.eigenvalues[picked].mean()), gamma
                    )
                if "kappa" in want:
                    sf = strength_function(decomp, target.indices, label=cfg.target_shell)
                    width = spreading_width(sf)
                    row["gamma_spr"] = width
                    if d0 is not None:
                        row["kappa"] = width / d0
                if "strength-function" in want:
                    sf = strength_function(decomp, target.indices, label=cfg.target_shell)
                    row["_sf"] = list(zip(sf.eigen_energies.tolist(), sf.weights.tolist()))
        except NumericalError as exc:
            raise NumericalError(f"kepler-model at scan point gamma={gamma!r}: {exc}") from exc
        return row

    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        rows = list(pool.map(point, cfg.gamma_grid))

    critical: dict = {}
    if "w-pt" in want:
        value, bracket = _crossing_entry(
            [(r["scaled_energy_pt"], r["w_pt"]) for r in rows], 0.5, "scaled-energy"
        )
        critical["pt_critical_scaled_energy"] = value
        critical["pt_critical_scaled_energy_bracket"] = bracket
    if "w-exact" in want:
        # headline axis: zeroth-order scaled energy of the target shell
        value, bracket = _crossing_entry(
            [(r["scaled_energy_pt"], r["w_exact"]) for r in rows], 0.5, "scaled-energy"
        )
        critical["exact_critical_scaled_energy"] = value
        critical["exact_critical_scaled_energy_bracket"] = bracket
        # alternative reading: selected states' mean exact energy as axis;
        # that axis can fold back once mixing is strong, in which case the
        # alternative is reported as undefined rather than guessed
        try:
            value, bracket = _crossing_entry(
                [(r["scaled_energy_exact"], r["w_exact"]) for r in rows],
                0.5,
                "scaled-energy-exact-mean",
            )
        except InputError:
            value, bracket = None, None
        critical["exact_critical_scaled_energy_mean_axis"] = value
        critical["exact_critical_scaled_energy_mean_axis_bracket"] = bracket
    if "kappa" in want and d0 is not None:
        value, bracket = _crossing_entry(
            [(r["scaled_energy_pt"], r["kappa"]) for r in rows], 1.0, "scaled-energy"
        )
        critical["kappa_critical_scaled_energy"] = value
        critical["kappa_critical_scaled_energy_bracket"] = bracket
    return rows, critical, KEPLER_COLUMNS, "kepler_curves.csv", "gamma"


def run(config: ExperimentConfig) -> RunManifest:
    if config.system == "henon-heiles":
        rows, critical, columns, curve_name, axis_col = _run_henon_heiles(config)
    else:
        rows, critical, columns, curve_name, axis_col = _run_kepler(config)

    config.output.mkdir(parents=True, exist_ok=True)
    echo = config.echo()
    sha = hashlib.sha256(
        json.dumps(config.result_key(), sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
    meta = {
        "tool": f"specfrag {__version__}",
        "system": config.system,
        "config-sha256": sha,
    }

    files: list[str] = []
    metric_files: dict = {}
    curve_path = config.output / curve_name
    _write_csv(curve_path, columns, rows, meta)
    files.append(curve_name)
    for name in config.metrics:
        if name != "strength-function":
            metric_files[name] = curve_name

    if "strength-function" in config.metrics:
        sf_name = "strength_function.csv"
        sf_rows = []
        for row in rows:
            for energy, weight in row.get("_sf", ()):
                sf_rows.append({axis_col: row[axis_col], "eigen_energy": energy, "weight": weight})
        _write_csv(config.output / sf_name, (axis_col, "eigen_energy", "weight"), sf_rows, meta)
        files.append(sf_name)
        metric_files["strength-function"] = sf_name

    manifest = RunManifest(
        version=__version__,
        timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        config=echo,
        config_sha256=sha,
        files=tuple(files),
        metric_files=metric_files,
        critical=critical,
    )
    manifest_path = config.output / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "version": manifest.version,
                "timestamp": manifest.timestamp,
                "config": manifest.config,
                "config_sha256": manifest.config_sha256,
                "files": list(manifest.files),
                "metric_files": manifest.metric_files,
                "critical": manifest.critical,
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    return manifest


def validate(config: ExperimentConfig) -> list[str]:
    if config.system == "henon-heiles":
        cfg = config.hh
        dim = cfg.num_shells * (cfg.num_shells + 1) // 2
        lo, hi = config.shell_range
        points = hi - lo + 1
        lines = [
            "system: henon-heiles",
            f"{dim} states, {cfg.num_shells} shells",
            f"scan points: {points} (shells {lo}..{hi})",
        ]
    else:
        cfg = config.kepler_cfg
        dim = cfg.max_n * (cfg.max_n + 1) // 2
        points = len(cfg.gamma_grid)
        lines = [
            "system: kepler",
            f"{dim} states, {cfg.max_n} shells",
            f"scan points: {points} (gamma {cfg.gamma_grid[0]:.6g}..{cfg.gamma_grid[-1]:.6g})",
        ]
    # dense H, eigenvectors and a workspace copy dominate
    mem_mb = 3 * dim * dim * 8 / 1e6
    lines.append(f"estimated peak memory: {mem_mb:.1f} MB")
    lines.append(f"metrics: {','.join(config.metrics)}")
    lines.append(f"selection: {config.selection.value}")
    return lines


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = _build_config(_merge(args))
        if args.command == "validate":
            for line in validate(config):
                print(line)
            return 0
        manifest = run(config)
        print(f"wrote {', '.join(manifest.files)} and manifest.json to {config.output}")
        for key, value in sorted(manifest.critical.items()):
            if not key.endswith("_bracket"):
                print(f"{key}: {value}")
        return 0
    except (ConfigurationError, InputError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
