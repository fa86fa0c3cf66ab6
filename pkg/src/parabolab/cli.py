"""
Experiment runner.

Subcommands: ``validate-bumps``, ``opnorm``, ``decay-scan``, ``vdc-scan``,
``uniformity``, ``probe-unbounded``, ``reconstruct``, ``list-ops``.

Each experiment reads a JSON config (``--config``), applies any flag
overrides, and writes three deterministic artifacts into the output
directory (``--out`` flag, else the config's ``out`` field, else
``$PARABOLAB_OUT``, else ``./reports``):

* ``<name>_summary.json``   resolved config + results (sorted keys);
* ``<name>_trials.csv``     per-trial rows where the experiment has trials;
* ``<name>_curve.dat``      gnuplot-ready columns where there is a curve;
* ``witness.csv``           the best test function, in the grid-function
                            CSV format, for norm estimates.

Identical config + seed produce byte-identical files: no timestamps, one
float formatting (shortest round-trip repr), single-threaded assembly.

Exit codes: 0 success; 2 malformed config or arguments; 3 numerical
failure (unresolved band, window overflow, ...).  Failures emit a one-line
machine-readable JSON record on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, experiments, opnorm, registry
from .grid import GridError, load_gridfunction, make_grid, save_gridfunction

DEFAULT_OUT_ENV = "PARABOLAB_OUT"


class ConfigError(ValueError):
    pass


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _out_dir(args, cfg) -> Path:
    out = args.out or cfg.get("out") or os.environ.get(DEFAULT_OUT_ENV) or "reports"
    p = Path(out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _grid_from(cfg):
    g = cfg.get("grid", {})
    try:
        return make_grid(g.get("extent_x", 8.0), g.get("extent_y", 8.0),
                         g.get("nx", 64), g.get("ny", 64))
    except (GridError, TypeError) as e:
        raise ConfigError(f"bad grid block: {e}") from e


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(x) if isinstance(x, float) else str(x)
                              for x in row) + "\n")


def _write_dat(path: Path, comment: str, columns) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {comment}\n")
        for row in columns:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def _summary(cfg: dict, results: dict) -> dict:
    return {"artifact_version": __version__, "config": cfg, "results": results}


# ---------------------------------------------------------------------------
# experiment drivers
# ---------------------------------------------------------------------------

def run_validate_bumps(cfg: dict, out: Path) -> int:
    res = experiments.validate_bumps(points=int(cfg.get("points", 1000)),
                                     l_window=int(cfg.get("l_window", 12)))
    _write_json(out / "validate-bumps_summary.json", _summary(cfg, res))
    return 0


def run_opnorm(cfg: dict, out: Path) -> int:
    grid = _grid_from(cfg)
    op = cfg.get("op", {})
    op_id = op.get("id")
    if not op_id:
        raise ConfigError("opnorm needs op.id")
    if "seed" not in cfg:
        raise ConfigError("opnorm needs a seed")
    p = float("inf") if cfg.get("p") == "inf" else float(cfg.get("p", 2))
    rep = opnorm.estimate_opnorm(op_id, op.get("params", {}), p,
                                 cfg.get("sampler", "random_bandlimited"),
                                 int(cfg.get("trials", 10)), int(cfg["seed"]), grid)
    for path in cfg.get("input_functions", []):
        # user-supplied test functions in the grid-function CSV format,
        # appended as extra trials
        F = load_gridfunction(path)
        if F.grid != grid:
            raise ConfigError(f"input function {path} lives on a different grid")
        apply_op = registry.build_operator(op_id, op.get("params", {}), grid)
        from .grid import lp_norm

        denom = lp_norm(F, p)
        ratio = lp_norm(apply_op(F), p) / denom if denom > 0 else 0.0
        rep.ratios.append(float(ratio))
        rep.trials = len(rep.ratios)
        if ratio > rep.norm_estimate:
            rep.norm_estimate = float(ratio)
            rep.witness = F
            rep.witness_trial = rep.trials - 1
    _write_json(out / "opnorm_summary.json", _summary(cfg, rep.summary()))
    _write_csv(out / "opnorm_trials.csv", "trial,seed,ratio",
               [(i, cfg["seed"], float(r)) for i, r in enumerate(rep.ratios)])
    _write_dat(out / "opnorm_curve.dat", "trial ratio",
               [(i, r) for i, r in enumerate(rep.ratios)])
    if rep.witness is not None:
        save_gridfunction(rep.witness, out / "witness.csv")
    return 0


def run_decay_scan(cfg: dict, out: Path) -> int:
    grid = _grid_from(cfg) if "grid" in cfg else None
    if "seed" not in cfg:
        raise ConfigError("decay-scan needs a seed")
    lr = cfg.get("l_range", [0, 8])
    fit, extra = opnorm.decay_scan_pieces(
        grid, cfg.get("u", 1.0), range(int(lr[0]), int(lr[1]) + 1),
        float(cfg.get("p", 2)), cfg.get("sampler", "random_bandlimited"),
        int(cfg.get("trials", 20)), int(cfg["seed"]),
        kernel=cfg.get("kernel", "abs"), n_boot=int(cfg.get("n_boot", 200)))
    res = {**fit.summary(), **extra}
    _write_json(out / "decay-scan_summary.json", _summary(cfg, res))
    _write_dat(out / "decay-scan_curve.dat", "l norm",
               list(zip(fit.l_values, fit.norms)))
    rows = []
    for l_str, ratios in sorted(extra["per_l_ratios"].items(),
                                key=lambda kv: float(kv[0])):
        rows.extend((int(l_str), i, float(r)) for i, r in enumerate(ratios))
    _write_csv(out / "decay-scan_trials.csv", "l,trial,ratio", rows)
    return 0


def run_vdc_scan(cfg: dict, out: Path) -> int:
    fit, extra = opnorm.vdc_scan(
        cfg.get("u_vals", [1.0]), cfg.get("k_vals", [0]),
        cfg.get("eta_vals", [100.0, 1000.0, 10000.0, 100000.0]),
        xi_points=int(cfg.get("xi_points", 48)))
    res = {**fit.summary(), "rows": extra["rows"]}
    _write_json(out / "vdc-scan_summary.json", _summary(cfg, res))
    _write_dat(out / "vdc-scan_curve.dat", "lambda sup_multiplier", extra["rows"])
    return 0


def run_uniformity(cfg: dict, out: Path) -> int:
    if "seed" not in cfg:
        raise ConfigError("uniformity needs a seed")
    kr = cfg.get("k_range", [-3, 3])
    res = opnorm.uniformity_sweep(
        range(int(kr[0]), int(kr[1]) + 1), float(cfg.get("p", 2)),
        int(cfg.get("trials", 5)), int(cfg["seed"]),
        nx=int(cfg.get("nx", 128)), ny=int(cfg.get("ny", 64)),
        extent_x=float(cfg.get("extent_x", 16.0)),
        base_extent_y=float(cfg.get("base_extent_y", 8.0)),
        u_spec=cfg.get("u"),
        avg_kmin=int(cfg.get("avg_kmin", -4)), avg_kmax=int(cfg.get("avg_kmax", 0)))
    _write_json(out / "uniformity_summary.json", _summary(cfg, res))
    _write_dat(out / "uniformity_curve.dat", "k norm_estimate",
               sorted((float(k), v) for k, v in res["per_k"].items()))
    return 0


def run_probe_unbounded(cfg: dict, out: Path) -> int:
    res = {}
    for name, adversarial in (("adversarial", True), ("constant", False)):
        if cfg.get("field", "both") in ("both", name):
            res[name] = opnorm.unboundedness_probe(
                int(cfg.get("levels", 4)), float(cfg.get("p", 2)),
                base_extent=float(cfg.get("base_extent", 16.0)),
                cells_per_unit=int(cfg.get("cells_per_unit", 4)),
                adversarial=adversarial, nodes=int(cfg.get("nodes", 192)))
    _write_json(out / "probe-unbounded_summary.json", _summary(cfg, res))
    rows = []
    for name, r in res.items():
        for lev, ratio in enumerate(r["ratios"]):
            rows.append((lev, ratio, 1.0 if name == "adversarial" else 0.0))
    _write_dat(out / "probe-unbounded_curve.dat", "level ratio adversarial", rows)
    return 0


def run_reconstruct(cfg: dict, out: Path) -> int:
    res = experiments.reconstruction_check(
        nx=int(cfg.get("nx", 256)), ny=int(cfg.get("ny", 256)),
        extent=float(cfg.get("extent", 8.0)),
        u_val=float(cfg.get("u", float(2**20))),
        l_max=int(cfg.get("l_max", 10)), trials=int(cfg.get("trials", 5)),
        seed=int(cfg.get("seed", 11)),
        eps_scaled=float(cfg.get("eps_scaled", 1e-7)))
    _write_json(out / "reconstruct_summary.json", _summary(cfg, res))
    _write_dat(out / "reconstruct_curve.dat", "trial identity_error",
               list(enumerate(res["rel_errors"])))
    return 0


def run_list_ops(args) -> int:
    if args.json:
        payload = {op: {"kind": e["kind"], "schema": e["schema"], "doc": e["doc"]}
                   for op, e in registry.CATALOG.items()}
        print(json.dumps(payload, sort_keys=True, indent=1))
        return 0
    for op, e in registry.CATALOG.items():
        print(f"{op:16s} {e['doc']}")
        for key, desc in e["schema"].items():
            print(f"    {key}: {desc}")
    return 0


_RUNNERS = {
    "validate-bumps": run_validate_bumps,
    "opnorm": run_opnorm,
    "decay-scan": run_decay_scan,
    "vdc-scan": run_vdc_scan,
    "uniformity": run_uniformity,
    "probe-unbounded": run_probe_unbounded,
    "reconstruct": run_reconstruct,
}


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--seed", type=int, help="override config seed")
    sub.add_argument("--trials", type=int, help="override config trials")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="parabolab",
        description="experiments on averages along variable parabolas")
    ap.add_argument("--version", action="version", version=__version__)
    sp = ap.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        _add_common(sp.add_parser(name))
    lo = sp.add_parser("list-ops")
    lo.add_argument("--json", action="store_true", help="machine-readable catalog")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-ops":
        return run_list_ops(args)
    try:
        cfg = _load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.trials is not None:
            cfg["trials"] = args.trials
        out = _out_dir(args, cfg)
    except ConfigError as e:
        print(json.dumps({"error": "config", "detail": str(e)}), file=sys.stderr)
        return 2
    try:
        return _RUNNERS[args.command](cfg, out)
    except ConfigError as e:
        print(json.dumps({"error": "config", "detail": str(e)}), file=sys.stderr)
        return 2
    except (GridError, ValueError, KeyError, np.linalg.LinAlgError) as e:
        print(json.dumps({"error": "numerical", "detail": str(e)}), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
