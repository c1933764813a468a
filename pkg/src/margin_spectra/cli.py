"""Batch front end: JSON experiment configs, one subcommand per analysis,
CSV emission, and a one-shot reproduction of the stock example experiments.

Exit codes: 0 ok, 2 config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .dist import DistributionSpec, paper_example
from .learner import (
    empirical_sample_complexity,
    learning_curve,
    write_curve_csv,
)
from .randmat import (
    edge_mc_compare,
    estimate_shatter_prob,
    m_underline,
    write_prob_curve_csv,
)
from .shatter import fat_shattering_search, read_points_csv, shatter_at_origin
from .spectral import k_gamma, read_spectrum_csv, set_limit_certificate

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Config fails schema validation."""


@dataclass
class ExperimentConfig:
    command: str
    params: dict

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, **self.params}


# allowed (required, optional) fields per subcommand
_SCHEMAS = {
    "kgamma": ({"spectrum_csv", "gamma"}, set()),
    "limit-cert": ({"points_csv", "k"}, set()),
    "shatter-check": ({"points_csv", "gamma"}, set()),
    "fat-dim": ({"points_csv", "gamma", "max_subset"}, set()),
    "eigen-prob": ({"dist", "gamma", "m", "trials", "seed"}, {"workers"}),
    "m-underline": ({"dist", "gamma", "m_max", "trials", "seed"}, {"workers"}),
    "edge-check": ({"dist", "beta", "d", "trials", "seed"}, {"workers"}),
    "learn-curve": ({"dist", "gamma", "m_grid", "trials", "learner", "seed"}, {"workers"}),
    "sample-complexity": ({"curve_csv", "lstar", "epsilon"}, set()),
    "reproduce-examples": (set(), {"seed", "workers", "budget_seconds"}),
}


def validate_config(command: str, raw: dict) -> ExperimentConfig:
    if command not in _SCHEMAS:
        raise ConfigError(f"unknown subcommand {command!r}")
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"config must carry schema_version = {SCHEMA_VERSION}")
    required, optional = _SCHEMAS[command]
    fields = set(raw) - {"schema_version", "out"}
    missing = required - fields
    unknown = fields - required - optional
    if missing:
        raise ConfigError(f"missing config fields: {sorted(missing)}")
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    params = {k: v for k, v in raw.items() if k != "schema_version"}
    return ExperimentConfig(command=command, params=params)


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


def _dist_from_config(obj: dict) -> DistributionSpec:
    if "example" in obj:
        return paper_example(obj["example"], d=int(obj["d"]), v=obj.get("v"))
    return DistributionSpec.from_json(obj)


def run(config: ExperimentConfig, out_dir: Path) -> dict:
    """Dispatch one validated config; returns the experiment report."""
    t0 = time.time()
    out_dir.mkdir(parents=True, exist_ok=True)
    p = config.params
    outputs: list[str] = []
    summary: dict = {}
    workers = int(p.get("workers", 1))

    if config.command == "kgamma":
        spectrum = read_spectrum_csv(p["spectrum_csv"])
        res = k_gamma(spectrum, float(p["gamma"]))
        summary = {"k": res.k, "gamma": res.gamma, "tail_sum": res.tail_sum}
    elif config.command == "limit-cert":
        pts = read_points_csv(p["points_csv"])
        cert = set_limit_certificate(pts.rows, int(p["k"]))
        path = out_dir / "limit_cert.json"
        path.write_text(json.dumps({
            "b": cert.b, "k": cert.k,
            "subspace_basis": [[float(v) for v in row] for row in cert.subspace_basis],
        }, indent=2))
        outputs.append(str(path))
        summary = {"b": cert.b, "k": cert.k}
    elif config.command == "shatter-check":
        pts = read_points_csv(p["points_csv"])
        cert = shatter_at_origin(pts, float(p["gamma"]))
        path = out_dir / "shatter_certificate.json"
        path.write_text(json.dumps(cert.to_dict(), indent=2))
        outputs.append(str(path))
        summary = {"shattered": cert.shattered, "worst_value": cert.worst_value}
    elif config.command == "fat-dim":
        pts = read_points_csv(p["points_csv"])
        est = fat_shattering_search(pts, float(p["gamma"]), int(p["max_subset"]))
        summary = {"lower": est.lower, "upper": est.upper,
                   "witness_subset": list(est.witness_subset)}
    elif config.command == "eigen-prob":
        spec = _dist_from_config(p["dist"])
        est = estimate_shatter_prob(spec, float(p["gamma"]), int(p["m"]),
                                    int(p["trials"]), int(p["seed"]), workers)
        path = out_dir / "eigen_prob.csv"
        write_prob_curve_csv(path, [est])
        outputs.append(str(path))
        summary = {"prob": est.prob, "ci_low": est.ci_low, "ci_high": est.ci_high}
    elif config.command == "m-underline":
        spec = _dist_from_config(p["dist"])
        res = m_underline(spec, float(p["gamma"]), int(p["m_max"]),
                          int(p["trials"]), int(p["seed"]), workers)
        path = out_dir / "m_underline_curve.csv"
        write_prob_curve_csv(path, res.estimates)
        outputs.append(str(path))
        summary = {"m_underline": res.m_underline, "first_failing_m": res.first_failing_m}
    elif config.command == "edge-check":
        spec = _dist_from_config(p["dist"])
        rep = edge_mc_compare(spec, float(p["beta"]), int(p["d"]),
                              int(p["trials"]), int(p["seed"]), workers)
        summary = {"empirical_mean": rep.empirical_mean, "predicted": rep.predicted,
                   "rel_error": rep.rel_error}
    elif config.command == "learn-curve":
        spec = _dist_from_config(p["dist"])
        curve = learning_curve(spec, float(p["gamma"]), [int(m) for m in p["m_grid"]],
                               int(p["trials"]), p["learner"], int(p["seed"]), workers)
        path = out_dir / "learning_curve.csv"
        write_curve_csv(path, curve)
        outputs.append(str(path))
        summary = {"lstar": curve.lstar,
                   "entries": [{"m": e.m, "mean_test_error": e.mean_test_error}
                               for e in curve.entries]}
    elif config.command == "sample-complexity":
        rows = _read_curve_csv(p["curve_csv"])
        eps, lstar = float(p["epsilon"]), float(p["lstar"])
        found = next((m for m, err in rows if err - lstar <= eps), None)
        summary = {"epsilon": eps, "lstar": lstar,
                   "m": found, "reached": found is not None}
    elif config.command == "reproduce-examples":
        summary, outputs = reproduce_examples(
            out_dir, seed=int(p.get("seed", 20260825)), workers=workers,
            budget_seconds=float(p.get("budget_seconds", 600.0)))
    else:
        raise ConfigError(f"unknown subcommand {config.command!r}")

    report = {
        "command": config.command,
        "inputs_digest": _digest(config.to_json()),
        "outputs": outputs,
        "summary": summary,
        "wall_clock_seconds": round(time.time() - t0, 3),
        "library_version": __version__,
        "seed": p.get("seed"),
    }
    report_path = out_dir / "report.json"
    report_path.write_text(json.dumps(report, indent=2))
    return report


def _read_curve_csv(path):
    import csv as _csv
    with open(path, newline="") as f:
        rows = list(_csv.DictReader(f))
    return [(int(r["m"]), float(r["mean_test_error"])) for r in rows]


def reproduce_examples(out_dir: Path, seed: int, workers: int = 1,
                       budget_seconds: float = 600.0):
    """Fixed-seed pipeline over the three stock example families."""
    t0 = time.time()
    outputs: list[str] = []
    table: list[dict] = []
    incomplete = False

    def over_budget() -> bool:
        return time.time() - t0 > budget_seconds

    # (a) spiky spectrum: tiny adapted dimension despite huge trace
    spec = paper_example("spiky", d=1001)
    k1 = k_gamma(spec.spectrum(), 1.0).k
    curve = learning_curve(spec, 1.0, [4, 8, 16, 24, 32, 40], trials=10,
                           learner_kind="erm_heuristic", seed=seed, workers=workers)
    path = out_dir / "spiky_curve.csv"
    write_curve_csv(path, curve)
    outputs.append(str(path))
    table.append({"example": "spiky", "d": 1001, "gamma": 1.0, "k_gamma": k1,
                  "sample_complexity_eps_0.15": empirical_sample_complexity(curve, 0.15)})

    # (b) sign-vector coordinates: complexity linear in dimension
    complexities = {}
    for d in (20, 40):
        if over_budget():
            incomplete = True
            break
        spec = paper_example("bernoulli", d=d)
        k1 = k_gamma(spec.spectrum(), 1.0).k
        grid = [4, 6, 8, 10, 12, 16, 20, 24, 28, 32, 40, 48, 56, 64]
        curve = learning_curve(spec, 1.0, grid, trials=20,
                               learner_kind="erm_heuristic", seed=seed, workers=workers)
        path = out_dir / f"bernoulli_d{d}_curve.csv"
        write_curve_csv(path, curve)
        outputs.append(str(path))
        mc = empirical_sample_complexity(curve, 0.15)
        complexities[d] = mc
        table.append({"example": "bernoulli", "d": d, "gamma": 1.0, "k_gamma": k1,
                      "sample_complexity_eps_0.15": mc})
    if 20 in complexities and 40 in complexities and complexities[20]:
        table.append({"example": "bernoulli_scaling",
                      "complexity_ratio_d40_over_d20":
                      complexities[40] / complexities[20] if complexities[40] else None})

    # (c) two-Gaussian mixture: generative vs discriminative
    gen_reach = {}
    for v in (4.0, 8.0):
        if over_budget():
            incomplete = True
            break
        d = 256
        gamma = v / 2.0
        spec = paper_example("gaussian_mixture", d=d, v=v)
        kg = k_gamma(spec.spectrum(), gamma).k
        grid = [4, 8, 16, 32, 64]
        row = {"example": "gaussian_mixture", "d": d, "v": v, "gamma": gamma,
               "k_gamma": kg}
        for kind in ("erm_heuristic", "generative"):
            curve = learning_curve(spec, gamma, grid, trials=5,
                                   learner_kind=kind, seed=seed, workers=workers)
            path = out_dir / f"mixture_v{int(v)}_{kind}_curve.csv"
            write_curve_csv(path, curve)
            outputs.append(str(path))
            reach = next((e.m for e in curve.entries if e.mean_test_error <= 0.05), None)
            row[f"{kind}_m_to_error_0.05"] = reach
            if kind == "generative":
                gen_reach[v] = reach
        table.append(row)

    table_path = out_dir / "examples_table.json"
    table_path.write_text(json.dumps(table, indent=2))
    outputs.append(str(table_path))
    summary = {"table": table, "incomplete": incomplete}
    if 4.0 in gen_reach and 8.0 in gen_reach and gen_reach[8.0] is not None:
        summary["generative_faster_at_v8"] = (
            gen_reach[4.0] is None or gen_reach[8.0] <= gen_reach[4.0])
    return summary, outputs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="margin-spectra",
        description="Spectral sample-complexity analyses for large-margin classification")
    parser.add_argument("command", choices=sorted(_SCHEMAS))
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="override config seed")
    parser.add_argument("--workers", type=int, help="override worker count")
    parser.add_argument("--out", help="output directory (default: .)")
    args = parser.parse_args(argv)

    try:
        raw = {"schema_version": SCHEMA_VERSION}
        if args.config:
            with open(args.config) as f:
                raw = json.load(f)
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.workers is not None:
            raw["workers"] = args.workers
        if args.out is not None:
            raw["out"] = args.out
        config = validate_config(args.command, raw)
    except (ConfigError, OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2

    try:
        report = run(config, Path(config.params.get("out", ".")))
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"runtime error ({type(e).__name__}): {e}", file=sys.stderr)
        return 3
    print(json.dumps(report["summary"], indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
