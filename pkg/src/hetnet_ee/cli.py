"""Experiment runner: seed-swept scheme comparisons and convergence traces.

Configuration is a YAML document with four optional sections (topology,
power, solver, experiment); an empty file runs the reference scenario.
Outputs are plain artifacts: one JSON line per (scheme, xi, seed) record,
a mean-efficiency CSV with one row per backhaul coefficient and one column
per scheme, and an (iteration, q) trace CSV.  Runs are bit-reproducible:
seeds are independent work items and output order never depends on
completion time.
"""

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, is_dataclass
from pathlib import Path

import yaml

from . import baselines, channel, dinkelbach, model


class ConfigError(ValueError):
    """Malformed or semantically invalid experiment configuration."""


DEFAULT_XI_SWEEP = (8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0)


@dataclass
class ExperimentConfig:
    topology: channel.TopologyParams = field(default_factory=channel.TopologyParams)
    power: channel.PowerParams = field(default_factory=channel.PowerParams)
    solver: dinkelbach.SolverConfig = field(default_factory=dinkelbach.SolverConfig)
    schemes: list = field(default_factory=lambda: list(baselines.ALL_SCHEMES))
    xi_sweep: list = field(default_factory=lambda: list(DEFAULT_XI_SWEEP))
    num_seeds: int = 50
    output_dir: str = "results"

    def validate(self):
        try:
            self.topology.validate()
            self.power.validate()
            self.solver.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.num_seeds < 1:
            raise ConfigError("experiment.num_seeds must be >= 1")
        if not self.xi_sweep:
            raise ConfigError("experiment.xi_sweep must be non-empty")
        if any(x < 0 for x in self.xi_sweep):
            raise ConfigError("experiment.xi_sweep values must be >= 0")
        if not self.schemes:
            raise ConfigError("experiment.schemes must be non-empty")
        for s in self.schemes:
            if s not in baselines.ALL_SCHEMES:
                raise ConfigError(
                    f"unknown scheme {s!r}; expected one of {list(baselines.ALL_SCHEMES)}"
                )


@dataclass
class ResultRecord:
    scheme: str
    xi: float
    seed: int
    metrics: dict
    q_trace: list
    counters: dict
    converged: bool

    def to_json_dict(self):
        return {
            "scheme": self.scheme,
            "xi_w_per_mbps": self.xi,
            "seed": self.seed,
            "metrics": self.metrics,
            "q_trace": self.q_trace,
            "counters": self.counters,
            "converged": self.converged,
        }


def _build_dataclass(cls, data, path):
    """Populate a (possibly nested) config dataclass from a YAML mapping,
    rejecting unknown keys and coercing scalar types."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'} must be a mapping")
    known = {f.name: f for f in fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} under '{path or 'root'}'")
    kwargs = {}
    obj = cls()
    for name, f in known.items():
        if name not in data:
            kwargs[name] = getattr(obj, name)
            continue
        raw = data[name]
        here = f"{path}.{name}" if path else name
        default = getattr(obj, name)
        if is_dataclass(default):
            kwargs[name] = _build_dataclass(type(default), raw, here)
        elif isinstance(default, bool):
            if not isinstance(raw, bool):
                raise ConfigError(f"{here} must be a boolean")
            kwargs[name] = raw
        elif isinstance(default, int) and not isinstance(default, bool):
            if not isinstance(raw, int):
                raise ConfigError(f"{here} must be an integer")
            kwargs[name] = raw
        elif isinstance(default, float):
            if not isinstance(raw, (int, float)):
                raise ConfigError(f"{here} must be a number")
            kwargs[name] = float(raw)
        elif isinstance(default, str):
            if not isinstance(raw, str):
                raise ConfigError(f"{here} must be a string")
            kwargs[name] = raw
        elif isinstance(default, list):
            if not isinstance(raw, list):
                raise ConfigError(f"{here} must be a list")
            kwargs[name] = list(raw)
        else:
            kwargs[name] = raw
    return cls(**kwargs)


def _config_from_mapping(doc):
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping")
    unknown = set(doc) - {"topology", "power", "solver", "experiment"}
    if unknown:
        raise ConfigError(f"unknown section(s) {sorted(unknown)}")
    topology = _build_dataclass(channel.TopologyParams, doc.get("topology"), "topology")
    power = _build_dataclass(channel.PowerParams, doc.get("power"), "power")
    solver = _build_dataclass(dinkelbach.SolverConfig, doc.get("solver"), "solver")
    exp = doc.get("experiment") or {}
    if not isinstance(exp, dict):
        raise ConfigError("experiment must be a mapping")
    unknown = set(exp) - {"schemes", "xi_sweep", "num_seeds", "output_dir"}
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} under 'experiment'")
    base = ExperimentConfig(topology=topology, power=power, solver=solver)
    cfg = ExperimentConfig(
        topology=topology,
        power=power,
        solver=solver,
        schemes=list(exp.get("schemes", base.schemes)),
        xi_sweep=[float(x) for x in exp.get("xi_sweep", base.xi_sweep)],
        num_seeds=exp.get("num_seeds", base.num_seeds),
        output_dir=exp.get("output_dir", base.output_dir),
    )
    cfg.validate()
    return cfg


def validate_config(path) -> ExperimentConfig:
    """Parse and validate a YAML experiment config; missing fields take the
    reference-scenario defaults."""
    try:
        with open(path) as f:
            doc = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config parse error: {exc}")
    return _config_from_mapping(doc)


def dump_config(cfg: ExperimentConfig) -> str:
    """Canonical YAML form of a config; re-parsing reproduces it exactly."""

    def plain(dc):
        return {f.name: getattr(dc, f.name) for f in fields(dc)}

    solver = plain(cfg.solver)
    solver["ua"] = plain(cfg.solver.ua)
    solver["pc"] = plain(cfg.solver.pc)
    doc = {
        "topology": plain(cfg.topology),
        "power": plain(cfg.power),
        "solver": solver,
        "experiment": {
            "schemes": list(cfg.schemes),
            "xi_sweep": list(cfg.xi_sweep),
            "num_seeds": cfg.num_seeds,
            "output_dir": cfg.output_dir,
        },
    }
    return yaml.safe_dump(doc, sort_keys=False)


def _record_from_solution(scheme, xi, seed, sol) -> ResultRecord:
    return ResultRecord(
        scheme=scheme,
        xi=xi,
        seed=seed,
        metrics=sol.metrics.to_dict(),
        q_trace=list(sol.q_trace),
        counters=sol.counters(),
        converged=sol.converged,
    )


def _run_seed(payload):
    """Work item: one topology seed, all sweep points, all schemes."""
    cfg, seed = payload
    params = channel.TopologyParams(**{
        f.name: getattr(cfg.topology, f.name) for f in fields(channel.TopologyParams)
    })
    params.rng_seed = seed
    try:
        base_inst = channel.generate_topology(params, cfg.power)
    except channel.PlacementError as exc:
        return seed, None, str(exc)
    records = []
    for xi in cfg.xi_sweep:
        inst = base_inst.with_xi(xi)
        for scheme in cfg.schemes:
            sol = baselines.solve_scheme(scheme, inst, cfg.solver)
            model.check_feasible(sol.assoc, sol.power, inst)
            records.append(_record_from_solution(scheme, xi, seed, sol))
    return seed, records, None


def run_sweep(cfg: ExperimentConfig, jobs=1, out_dir=None):
    """Execute the sweep and write results.jsonl + summary.csv.

    Returns the ordered record list.  Seeds whose topology cannot be
    placed are skipped with a log line on stderr.
    """
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = [cfg.topology.rng_seed + i for i in range(cfg.num_seeds)]
    payloads = [(cfg, s) for s in seeds]

    results = {}
    if jobs <= 1:
        for payload in payloads:
            seed, records, err = _run_seed(payload)
            results[seed] = (records, err)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for seed, records, err in pool.map(_run_seed, payloads):
                results[seed] = (records, err)

    records = []
    for seed in seeds:
        recs, err = results[seed]
        if recs is None:
            print(f"warning: seed {seed} skipped: {err}", file=sys.stderr)
            continue
        records.extend(recs)

    scheme_order = {s: i for i, s in enumerate(cfg.schemes)}
    xi_order = {x: i for i, x in enumerate(cfg.xi_sweep)}
    records.sort(key=lambda r: (scheme_order[r.scheme], xi_order[r.xi], r.seed))

    with open(out / "results.jsonl", "w") as f:
        for rec in records:
            f.write(json.dumps(rec.to_json_dict(), sort_keys=True) + "\n")

    _write_summary(out / "summary.csv", cfg, records)
    return records


def _write_summary(path, cfg, records):
    """Mean energy efficiency per (xi, scheme), 4 decimals."""
    sums = {}
    counts = {}
    for rec in records:
        key = (rec.xi, rec.scheme)
        sums[key] = sums.get(key, 0.0) + rec.metrics["energy_efficiency"]
        counts[key] = counts.get(key, 0) + 1
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["xi_w_per_mbps"] + list(cfg.schemes))
        for xi in cfg.xi_sweep:
            row = [f"{xi:g}"]
            for scheme in cfg.schemes:
                key = (xi, scheme)
                if counts.get(key):
                    row.append(f"{sums[key] / counts[key]:.4f}")
                else:
                    row.append("nan")
            writer.writerow(row)


def run_convergence(cfg: ExperimentConfig, out_dir=None):
    """Solve the proposed scheme on one seed and write the q trace CSV."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    inst = channel.generate_topology(cfg.topology, cfg.power)
    sol = dinkelbach.solve(inst, cfg.solver)
    with open(out / "trace.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["iteration", "q"])
        for i, q in enumerate(sol.q_trace):
            writer.writerow([i, repr(q)])
    return sol


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="hetnet-ee",
        description="Energy-efficiency experiments for a two-tier heterogeneous network",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run the scheme comparison sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--out", default=None)

    p_conv = sub.add_parser("converge", help="emit the q convergence trace")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--out", default=None)

    p_val = sub.add_parser("validate", help="check a config file and print it")
    p_val.add_argument("--config", required=True)

    args = parser.parse_args(argv)

    try:
        cfg = validate_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    if args.command == "validate":
        print(dump_config(cfg), end="")
        return 0

    if args.command == "sweep":
        records = run_sweep(cfg, jobs=args.jobs, out_dir=args.out)
        if not records:
            print("error: no usable seeds", file=sys.stderr)
            return 2
        if any(not rec.converged for rec in records):
            return 2
        return 0

    if args.command == "converge":
        sol = run_convergence(cfg, out_dir=args.out)
        return 0 if sol.converged else 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
