"""``spinorbit`` command-line entry point.

Subcommands ``curve``, ``tomo``, ``fit`` and ``state`` read a JSON config
(``--config``) and write CSV or JSON (``--out``, stdout by default).  On
failure the exit code is nonzero and stderr carries a JSON error object.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .experiments import (
    CURVE_COLUMNS,
    FIT_COLUMNS,
    TOMO_COLUMNS,
    ExperimentConfig,
    cmd_curve,
    cmd_fit,
    cmd_tomo,
    density_table,
    rows_to_csv,
)


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.format:
        cfg.format = args.format
    if args.family:
        cfg = dataclasses.replace(cfg, family=args.family)
    if args.seed is not None and cfg.noise is not None:
        cfg.noise = dataclasses.replace(cfg.noise, seed=args.seed)
    return cfg


def _run(args) -> tuple[str, str | None]:
    """Return the rendered output and the path it should go to."""
    cfg = _config(args)
    out = args.out or cfg.output_path
    text = _render(args, cfg, out)
    return text, out


def _render(args, cfg: ExperimentConfig, out: str | None) -> str:
    fam = cfg.family
    if args.command == "curve":
        rows = cmd_curve(cfg)
        if cfg.format == "csv":
            return rows_to_csv(rows, CURVE_COLUMNS)
        return json.dumps(rows, indent=2)
    if args.command == "tomo":
        points = cmd_tomo(cfg)
        if cfg.format == "csv":
            if out:
                # full reports sit next to the summary table
                with open(out + ".reports.json", "w") as fh:
                    json.dump([p.to_json(fam) for p in points], fh, indent=2)
            return rows_to_csv([p.summary(fam) for p in points], TOMO_COLUMNS)
        return json.dumps([p.to_json(fam) for p in points], indent=2)
    if args.command == "fit":
        if not cfg.points:
            raise ValueError("fit needs 'points' or 'points_csv' in the config")
        res = cmd_fit(cfg.points, fam, cfg.minimizer)
        if cfg.format == "csv":
            rows = [{"c": c, "discord_measured": m, "discord_model": d,
                     "alpha_hat": res.alpha_hat, "mean_fidelity": res.mean_fidelity,
                     "residual_sse": res.residual_sse} for c, m, d in res.points]
            return rows_to_csv(rows, FIT_COLUMNS)
        return json.dumps(res.to_json(), indent=2)
    # state
    c = args.c if args.c is not None else cfg.c_grid[0]
    return json.dumps(density_table(fam, c), indent=2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinorbit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("curve", "discord versus c for each identity weight"),
                       ("tomo", "simulated (or ingested) tomography runs"),
                       ("fit", "fit the identity weight to (c, discord) points"),
                       ("state", "print a family density matrix")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--seed", type=int, help="override the noise seed")
        p.add_argument("--family", choices=("rho1", "rho2", "rho3", "werner"))
        if name == "state":
            p.add_argument("-c", type=float, help="family weight (default: first of c_grid)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, out = _run(args)
        if out:
            with open(out, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text if text.endswith("\n") else text + "\n")
    except Exception as exc:  # noqa: BLE001 - reported as JSON
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
