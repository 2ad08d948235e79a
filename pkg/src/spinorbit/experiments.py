"""Sweeps behind the command-line tool: discord curves, simulated
tomography runs and fidelity-model fits."""

from __future__ import annotations

import csv
import functools
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .discord import DiscordResult, MinimizerConfig, MinimizerFailure, discord
from .optics import NoiseConfig, prepare_family_circuit, run_circuit, simulate_tomography
from .qstate import density_to_json, fidelity
from .states import Family, family, mean_fidelity, perturb
from .tomography import (
    IntensityRecord,
    TomographyReport,
    reconstruct,
    records_from_json,
    records_to_json,
)

DEFAULT_ALPHAS = (0.0, 0.1, 0.2, 0.3)
CURVE_COLUMNS = ("family", "c", "alpha", "discord", "classical_correlation",
                 "mutual_information", "fidelity", "mean_fidelity", "error")
TOMO_COLUMNS = ("family", "c", "fidelity", "negative_eigenvalue_mass", "discord",
                "classical_correlation", "mutual_information", "discord_ideal")
FIT_COLUMNS = ("c", "discord_measured", "discord_model", "alpha_hat", "mean_fidelity",
               "residual_sse")

# alpha scan for fits
FIT_STEP = 0.002
_SCAN_MINIMIZER = MinimizerConfig(n_theta=16, n_phi=32)


class FitFailure(RuntimeError):
    """The points carry no information about the admixture weight."""


@dataclass
class ExperimentConfig:
    family: Family = Family.RHO1
    c_grid: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
    alpha_list: tuple[float, ...] = DEFAULT_ALPHAS
    noise: NoiseConfig | None = None
    minimizer: MinimizerConfig = field(default_factory=MinimizerConfig)
    output_path: str | None = None
    format: str = "csv"
    total_intensity: float = 1.0
    workers: int = 1
    experiments: tuple[dict, ...] = ()
    points: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        self.family = Family.parse(self.family)
        self.c_grid = tuple(float(c) for c in self.c_grid)
        self.alpha_list = tuple(float(a) for a in self.alpha_list)
        if not self.c_grid:
            raise ValueError("c_grid must not be empty")
        if list(self.c_grid) != sorted(self.c_grid):
            raise ValueError("c_grid must be sorted")
        for name, vals in (("c_grid", self.c_grid), ("alpha_list", self.alpha_list)):
            if any(not 0.0 <= v <= 1.0 for v in vals):
                raise ValueError(f"{name} values must lie in [0, 1]")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be 'csv' or 'json', got {self.format!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known - {"seed", "points_csv"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        noise = d.pop("noise", None)
        if isinstance(noise, dict):
            noise = NoiseConfig.from_json({**noise, **({"seed": d["seed"]} if "seed" in d else {})})
        elif noise == "calibrated":
            from .optics import CALIBRATED_NOISE
            noise = CALIBRATED_NOISE
        mini = d.pop("minimizer", None)
        if isinstance(mini, dict):
            mini = MinimizerConfig(**mini)
        d.pop("seed", None)
        points_csv = d.pop("points_csv", None)
        if points_csv is not None:
            d["points"] = read_points_csv(points_csv)
        if "points" in d:
            d["points"] = tuple((float(c), float(q)) for c, q in d["points"])
        if "experiments" in d:
            d["experiments"] = tuple(d["experiments"])
        return cls(noise=noise, minimizer=mini or MinimizerConfig(), **d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


# ---------------------------------------------------------------- curve

def _curve_point(fam: Family, c: float, alpha: float, cfg: MinimizerConfig) -> dict:
    rho = family(fam, c)
    rho_p = perturb(rho, alpha)
    row = {"family": fam.value, "c": c, "alpha": alpha, "fidelity": fidelity(rho, rho_p),
           "discord": math.nan, "classical_correlation": math.nan,
           "mutual_information": math.nan, "error": ""}
    try:
        res = discord(rho_p, cfg)
    except MinimizerFailure as exc:
        row["error"] = str(exc)
    else:
        row.update(discord=res.discord, classical_correlation=res.classical_correlation,
                   mutual_information=res.mutual_information)
    return row


def cmd_curve(cfg: ExperimentConfig) -> list[dict]:
    """Discord of the perturbed family over every ``(c, alpha)``, c-major order."""
    jobs = [(c, a) for c in cfg.c_grid for a in cfg.alpha_list]
    run = functools.partial(_curve_point, cfg.family, cfg=cfg.minimizer)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            rows = list(pool.map(lambda job: run(*job), jobs))
    else:
        rows = [run(c, a) for c, a in jobs]
    means = {a: mean_fidelity(cfg.family, a, cfg.c_grid) for a in cfg.alpha_list}
    for row in rows:
        row["mean_fidelity"] = means[row["alpha"]]
    return rows


# ----------------------------------------------------------------- tomo

@dataclass
class TomoPoint:
    c: float | None
    report: TomographyReport
    discord: DiscordResult
    records: list[IntensityRecord]
    discord_ideal: float | None = None

    def summary(self, fam: Family) -> dict:
        return {"family": fam.value, "c": self.c,
                "fidelity": self.report.fidelity_vs_target,
                "negative_eigenvalue_mass": self.report.negative_eigenvalue_mass,
                "discord": self.discord.discord,
                "classical_correlation": self.discord.classical_correlation,
                "mutual_information": self.discord.mutual_information,
                "discord_ideal": self.discord_ideal}

    def to_json(self, fam: Family) -> dict:
        out = self.summary(fam)
        out["report"] = self.report.to_json()
        out["records"] = records_to_json(self.records)
        return out


def tomo_from_records(records: Sequence[IntensityRecord], target=None,
                      minimizer: MinimizerConfig | None = None, c: float | None = None,
                      discord_ideal: float | None = None) -> TomoPoint:
    """Reconstruct and evaluate discord; shared by simulated and measured data."""
    report = reconstruct(records, target=target)
    res = discord(report.rho_physical, minimizer)
    return TomoPoint(c, report, res, list(records), discord_ideal)


def cmd_tomo(cfg: ExperimentConfig) -> list[TomoPoint]:
    """Simulate preparation and tomography for each ``c``, or ingest records.

    With ``cfg.experiments`` set, each entry ``{"c": ..., "records": ...}``
    supplies measured records (inline list or JSON file path) and no
    simulation happens.
    """
    fam = cfg.family
    points = []
    if cfg.experiments:
        for exp in cfg.experiments:
            recs = exp["records"]
            if isinstance(recs, str):
                recs = json.loads(Path(recs).read_text())
            c = exp.get("c")
            target = family(fam, c) if c is not None else None
            ideal = discord(target, cfg.minimizer).discord if target is not None else None
            points.append(tomo_from_records(records_from_json(recs), target, cfg.minimizer,
                                            c, ideal))
        return points

    rng = cfg.noise.rng() if cfg.noise is not None else None
    for c in cfg.c_grid:
        rho = run_circuit(prepare_family_circuit(fam, c), cfg.noise, rng)
        records = simulate_tomography(rho, cfg.noise, cfg.total_intensity, rng)
        target = family(fam, c)
        ideal = discord(target, cfg.minimizer).discord
        points.append(tomo_from_records(records, target, cfg.minimizer, c, ideal))
    return points


# ------------------------------------------------------------------ fit

@dataclass
class FitResult:
    alpha_hat: float
    mean_fidelity: float
    residual_sse: float
    points: list[tuple[float, float, float]]

    def to_json(self) -> dict:
        return {"alpha_hat": self.alpha_hat, "mean_fidelity": self.mean_fidelity,
                "residual_sse": self.residual_sse,
                "points": [{"c": c, "discord_measured": m, "discord_model": d}
                           for c, m, d in self.points]}


@functools.lru_cache(maxsize=200_000)
def model_discord(fam: Family, c: float, alpha: float,
                  cfg: MinimizerConfig = MinimizerConfig()) -> float:
    """Discord of ``perturb(family(fam, c), alpha)``, memoized."""
    return discord(perturb(family(fam, c), alpha), cfg).discord


def cmd_fit(points: Sequence[tuple[float, float]], fam, minimizer: MinimizerConfig | None = None
            ) -> FitResult:
    """Least-squares admixture weight for measured ``(c, discord)`` points."""
    fam = Family.parse(fam)
    minimizer = minimizer or MinimizerConfig()
    pts = [(float(c), float(q)) for c, q in points]
    if len(pts) < 3:
        raise FitFailure("need at least 3 points to fit")
    cs = np.array([c for c, _ in pts])
    qs = np.array([q for _, q in pts])
    if np.any((cs < 0) | (cs > 1)):
        raise FitFailure("c values must lie in [0, 1]")
    if not np.all(np.isfinite(qs)):
        raise FitFailure("discord values must be finite")
    if np.ptp(qs) < 1e-9:
        raise FitFailure("all discord values are equal; the fit is degenerate")

    def sse(alpha, cfg):
        return float(sum((q - model_discord(fam, c, round(alpha, 12), cfg)) ** 2
                         for c, q in pts))

    grid = np.round(np.arange(0, 1 + FIT_STEP / 2, FIT_STEP), 12)
    costs = np.array([sse(a, _SCAN_MINIMIZER) for a in grid])
    k = int(np.argmin(costs))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    res = minimize_scalar(lambda a: sse(a, minimizer), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-6})
    alpha_hat, cost = float(res.x), float(res.fun)
    grid_cost = sse(float(grid[k]), minimizer)
    if grid_cost <= cost:
        alpha_hat, cost = float(grid[k]), grid_cost
    model = [model_discord(fam, c, round(alpha_hat, 12), minimizer) for c in cs]
    return FitResult(alpha_hat=alpha_hat,
                     mean_fidelity=mean_fidelity(fam, alpha_hat, tuple(cs)),
                     residual_sse=cost,
                     points=[(float(c), float(q), float(m)) for c, q, m in zip(cs, qs, model)])


# ------------------------------------------------------------------- io

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(col)) for col in columns])
    return buf.getvalue()


def parse_csv(text: str) -> list[dict]:
    """Read a CSV written by :func:`rows_to_csv`, converting numeric fields."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        parsed = {}
        for k, v in row.items():
            if k in ("family", "error"):
                parsed[k] = v
            elif v == "":
                parsed[k] = None
            else:
                parsed[k] = float(v)
        out.append(parsed)
    return out


def read_points_csv(path) -> tuple[tuple[float, float], ...]:
    """``(c, discord)`` pairs from any CSV with those two columns."""
    rows = parse_csv(Path(path).read_text())
    return tuple((r["c"], r["discord"]) for r in rows)


def density_table(fam, c: float) -> dict:
    fam = Family.parse(fam)
    return {"family": fam.value, "c": float(c), "rho": density_to_json(family(fam, c))}
