"""Config-driven entry point: verifier suites, Stein diagnostics, semigroup
checks and CLT benchmarks, with CSV/JSON artifacts and full seed provenance.

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import importlib.resources
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .clt import ExperimentConfig, ExperimentError, known_poincare_upper, run_clt_experiment
from .inequalities import ConfigError, InequalityReport, stable_lp_poincare
from .functions import SmoothBump
from .measures import MeasureError, spec_from_json
from .suites import SEMIGROUP_BUNDLES, STEIN_BUNDLES, VERIFY_BUNDLES


def _load_config(path_or_name: str) -> tuple[dict, bytes]:
    p = Path(path_or_name)
    if not p.exists():
        builtin = importlib.resources.files("steinlab").joinpath(
            "configs", f"{path_or_name}.json")
        if builtin.is_file():
            raw = builtin.read_bytes()
            return json.loads(raw), raw
        raise ConfigError(f"config not found: {path_or_name}")
    raw = p.read_bytes()
    return json.loads(raw), raw


def _manifest(command: str, raw: bytes, seed: int, out_dir: Path,
              outputs: list[str], started: float) -> None:
    doc = {
        "command": command,
        "config_digest": hashlib.sha256(raw).hexdigest(),
        "seed": seed,
        "version": __version__,
        "started_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(started)),
        "finished_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "outputs": outputs,
    }
    (out_dir / "manifest.json").write_text(json.dumps(doc, indent=2) + "\n")


def _write_reports_csv(path: Path, reports: list[InequalityReport]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "lhs", "rhs", "margin", "std_error", "pass"])
        for r in reports:
            w.writerow([r.name, repr(r.lhs), repr(r.rhs), repr(r.margin),
                        repr(r.std_error), r.passed])


def _run_bundle_command(command: str, bundles: dict, args) -> int:
    try:
        cfg, raw = _load_config(args.config)
        suite = cfg.get("suite")
        if not isinstance(suite, list) or not suite:
            raise ConfigError("config needs a non-empty 'suite' array")
        scale = args.budget_scale

        def run_entry(entry) -> list[InequalityReport]:
            if isinstance(entry, str):
                if entry not in bundles:
                    raise ConfigError(f"unknown bundle {entry!r}")
                kwargs = {}
                if entry == "asym_cov_default" and "jacobi_kappa" in cfg:
                    kwargs["jacobi_kappa"] = float(cfg["jacobi_kappa"])
                return bundles[entry](args.seed, scale, **kwargs)
            if isinstance(entry, dict) and entry.get("check") == "stable_lp_poincare":
                prm = entry.get("params", {})
                from .measures import StableRotInv
                return [stable_lp_poincare(
                    SmoothBump(np.zeros(1), 2.0), float(prm["p"]), float(prm["p1"]),
                    float(prm["alpha"]), StableRotInv(float(prm["alpha"]), 1),
                    seed=args.seed)]
            raise ConfigError(f"cannot interpret suite entry {entry!r}")

        # each bundle is a pure job keyed by (config, seed); run concurrently
        # and aggregate in the config's suite order
        reports: list[InequalityReport] = []
        if args.jobs > 1:
            from concurrent.futures import ThreadPoolExecutor
            with ThreadPoolExecutor(max_workers=args.jobs) as ex:
                for chunk in ex.map(run_entry, suite):
                    reports.extend(chunk)
        else:
            for entry in suite:
                reports.extend(run_entry(entry))
    except (ConfigError, MeasureError, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    started = time.time()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_reports_csv(out_dir / "suite.csv", reports)
    all_pass = all(r.passed for r in reports)
    summary = {
        "command": command,
        "seed": args.seed,
        "budget_scale": args.budget_scale,
        "n_checks": len(reports),
        "n_failed": sum(not r.passed for r in reports),
        "all_pass": all_pass,
        "results": [r.row() for r in reports],
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    _manifest(command, raw, args.seed, out_dir, ["suite.csv", "summary.json"], started)
    for r in reports:
        status = "pass" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: lhs={r.lhs:.6g} rhs={r.rhs:.6g} "
              f"margin={r.margin:.3g} se={r.std_error:.3g}")
    return 0 if all_pass else 1


def cmd_verify(args) -> int:
    return _run_bundle_command("verify", VERIFY_BUNDLES, args)


def cmd_stein(args) -> int:
    return _run_bundle_command("stein", STEIN_BUNDLES, args)


def cmd_semigroup(args) -> int:
    return _run_bundle_command("semigroup", SEMIGROUP_BUNDLES, args)


def cmd_clt(args) -> int:
    try:
        cfg, raw = _load_config(args.config)
        spec = spec_from_json(json.dumps(cfg["spec"]))
        d = spec.d
        sig_cfg = cfg.get("Sigma", "I")
        Sigma = np.eye(d) if sig_cfg == "I" else np.array(sig_cfg, dtype=float).reshape(d, d)
        if "U" in cfg:
            U = float(cfg["U"])
        else:
            U = known_poincare_upper(spec)
            if U is None:
                raise ConfigError(
                    "no Poincare constant: supply 'U' in the config (run the "
                    "poincare_rayleigh estimator first for an empirical lower bound)")
        m = int(cfg.get("m", 2048))
        scale = args.budget_scale
        m = max(64, int(m * min(scale, 1.0)))
        exp_cfg = ExperimentConfig(
            spec=spec, Sigma=Sigma, U=U,
            n_grid=tuple(cfg.get("n_grid", (1, 4, 16, 64, 256))),
            m=m, reps=int(cfg.get("reps", 8)),
            estimator=cfg.get("estimator", "assignment"), seed=args.seed)
    except (ConfigError, MeasureError, ExperimentError, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    started = time.time()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = run_clt_experiment(exp_cfg, jobs=args.jobs)
    report.to_csv(out_dir / "suite.csv")
    (out_dir / "summary.json").write_text(report.to_json() + "\n")
    _manifest("clt", raw, args.seed, out_dir, ["suite.csv", "summary.json"], started)
    ok = report.bound_respected()
    for r in report.rows:
        print(f"n={r.n:5d} w1_hat={r.w1_hat:.5f} floor={r.w1_floor:.5f} "
              f"bound={r.bound:.5f} informative={r.informative}")
    print(f"slope={report.slope} ci={report.slope_ci} "
          f"bound_respected={ok} uninformative={report.uninformative}")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="steinlab")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("verify", cmd_verify), ("clt", cmd_clt),
                     ("stein", cmd_stein), ("semigroup", cmd_semigroup)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True,
                       help="path to a JSON config, or a builtin name")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--budget-scale", type=float, default=1.0, dest="budget_scale")
        p.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
