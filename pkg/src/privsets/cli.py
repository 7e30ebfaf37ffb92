"""Command line front end: ``privsets generate | evaluate | bench | plot``.

Exit codes: 0 success, 2 configuration or input error, 3 the grid admits a
maximal design smaller than ``N``, 4 rejection sampling budget exhausted,
5 the evaluated design breaks its privacy sets or the region. Every error is
reported as one line ``ERROR <reason>: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, load_config, parse_criterion
from .criteria import (ard_mean_reciprocal, cube_vertices, eval_D, evaluate,
                       nearest_distance_stats, uniform_probes)
from .designio import (MalformedInput, read_coordinates, read_design_csv, read_trace_csv, stem,
                       write_design_csv, write_rows)
from .errors import (AvailabilityExhausted, ConfigurationError, DegenerateProjection,
                     MaximalityViolation, RejectionBudgetExceeded)
from .grid import coords, region_mask
from .privacy import Design, violations
from .psa import psa_bench, psa_run
from . import svg

log = logging.getLogger("privsets")

EXIT_OK, EXIT_CONFIG, EXIT_MAXIMAL, EXIT_REJECT, EXIT_PERMISSIBLE = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code, reason, message):
        super().__init__(message)
        self.code, self.reason = code, reason


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    cfg = cfg.with_overrides(seed=getattr(args, "seed", None),
                             time_budget=getattr(args, "time_budget", None),
                             restarts=getattr(args, "restarts", None),
                             out_dir=getattr(args, "out_dir", None))
    return cfg.validate()


def _out(cfg: ExperimentConfig, name: str) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


def _say(args, text):
    if not getattr(args, "quiet", False):
        print(text)


def _summary(cfg, design, value, elapsed, counters, extra=None):
    space = cfg.space()
    crit = cfg.criterion_spec()
    out = {
        "criterion": crit.label(),
        "value": evaluate(crit, design, space),
        "objective": value,
        "N": cfg.N, "d": cfg.d, "L": space.L,
        "privacy": cfg.privacy, "steps": cfg.privacy_spec(space).steps,
        "seed": cfg.seed,
        "elapsed_seconds": elapsed,
        "counters": vars(counters),
    }
    if crit.kind == "ARD":
        out["ard_mean_reciprocal"] = ard_mean_reciprocal(crit, design, space)
    out.update(extra or {})
    return out


def cmd_generate(args) -> int:
    cfg = _config(args)
    pcfg = cfg.psa_config()
    t0 = time.perf_counter()
    design, trace = psa_run(pcfg)
    elapsed = time.perf_counter() - t0
    write_design_csv(_out(cfg, cfg.design_csv), design, pcfg.space)
    rows = []
    restarts = set()
    for t, v, r in trace.samples:
        rows.append((t, v, int(r not in restarts and r > 0)))
        restarts.add(r)
    write_rows(_out(cfg, cfg.trace_csv), ["elapsed", "best_value", "restart"], rows)
    summary = _summary(cfg, design, trace.value, elapsed, trace.counters,
                       {"converged": trace.converged, "best_restart": trace.best_restart})
    _out(cfg, cfg.summary).write_text(json.dumps(summary, indent=2) + "\n")
    _say(args, f"{summary['criterion']} = {summary['value']:.10g}  "
               f"({len(design)} runs, {elapsed:.2f} s) -> {_out(cfg, cfg.design_csv)}")
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = _config(args)
    total = cfg.time_budget if cfg.time_budget is not None else cfg.bench_total
    if total is None:
        raise ConfigurationError("time_budget: bench needs a total time")
    pcfg = cfg.psa_config()
    t0 = time.perf_counter()
    bench = psa_bench(pcfg, total, cfg.bench_interval)
    elapsed = time.perf_counter() - t0
    write_rows(_out(cfg, cfg.trace_csv), ["elapsed", "best_value", "restart"], bench.rows)
    write_design_csv(_out(cfg, cfg.design_csv), bench.design, pcfg.space)
    summary = _summary(cfg, bench.design, bench.value, elapsed, bench.counters,
                       {"restarts": len(bench.restart_times), "restart_times": bench.restart_times})
    _out(cfg, cfg.summary).write_text(json.dumps(summary, indent=2) + "\n")
    _say(args, f"{len(bench.rows)} trace rows, {len(bench.restart_times)} restarts, "
               f"best {summary['criterion']} = {summary['value']:.10g}")
    return EXIT_OK


def _load_design(path, cfg):
    space = cfg.space()
    X, warns = read_design_csv(path, space)
    for w in warns:
        print(f"warning: {w}", file=sys.stderr)
    if len(X) > cfg.N:
        raise MalformedInput(f"{path}: {len(X)} rows exceed N={cfg.N}")
    if len({tuple(r) for r in X.tolist()}) < len(X):
        raise CliError(EXIT_PERMISSIBLE, "permissibility", f"{path}: repeated design point")
    return Design.from_array(X, cfg.N), space


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    design, space = _load_design(args.design, cfg)
    spec = cfg.privacy_spec(space)
    bad = violations(design, spec)
    outside = [p for p, ok in zip(design.points, region_mask(space, design.as_array(space.d))) if not ok]
    if bad or outside:
        parts = [f"{coords(space, p).tolist()}~{coords(space, q).tolist()}" for p, q in bad]
        parts += [f"{coords(space, p).tolist()} outside region" for p in outside]
        raise CliError(EXIT_PERMISSIBLE, "permissibility",
                       f"{len(bad)} offending pairs, {len(outside)} points outside region: " + "; ".join(parts))
    texts = args.criterion or list(cfg.evaluate) or [None]
    results = []
    for text in texts:
        crit = parse_criterion(text, cfg) if text else cfg.criterion_spec()
        row = {"criterion": crit.label()}
        try:
            row["value"] = evaluate(crit, design, space)
            if crit.kind == "ARD":
                row["ard_mean_reciprocal"] = ard_mean_reciprocal(crit, design, space)
        except (DegenerateProjection, ValueError) as exc:
            row["value"] = None
            row["error"] = str(exc)
        results.append(row)
    report = {"design": str(args.design), "points": len(design), "criteria": results}
    if args.distances:
        rng = np.random.default_rng(cfg.seed)
        probes = [cube_vertices(space.d)] if cfg.probe_vertices else []
        probes.append(uniform_probes(space.d, args.probes if args.probes is not None else cfg.probe_uniform, rng))
        s = nearest_distance_stats(design, space, np.vstack(probes))
        report["distances"] = {"min": s.min, "q1": s.q1, "median": s.median, "q3": s.q3, "max": s.max,
                               "probes": int(len(s.distances))}
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        for row in results:
            extra = f"\tmean_reciprocal={row['ard_mean_reciprocal']:.10g}" if "ard_mean_reciprocal" in row else ""
            val = "degenerate" if row["value"] is None else f"{row['value']:.12g}"
            print(f"{row['criterion']}\t{val}{extra}")
        if "distances" in report:
            dd = report["distances"]
            print("distances\t" + "\t".join(f"{k}={dd[k]:.6g}" for k in ("min", "q1", "median", "q3", "max")))
    return EXIT_OK


def _write_svg(args, text, default):
    path = Path(args.output or default)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    _say(args, f"wrote {path}")


def cmd_plot(args) -> int:
    if args.kind == "design":
        C = read_coordinates(args.inputs[0])
        if C.shape[1] == 2:
            text = svg.design_svg(C, bins=args.bins, title=stem(args.inputs[0]))
        elif C.shape[1] > 2:
            text = svg.pairs_svg(C, title=stem(args.inputs[0]))
        else:
            raise MalformedInput(f"{args.inputs[0]}: design plots need at least two factors")
        _write_svg(args, text, Path(args.inputs[0]).with_suffix(".svg"))
    elif args.kind == "pairs":
        C = read_coordinates(args.inputs[0])
        if C.shape[1] < 2:
            raise MalformedInput(f"{args.inputs[0]}: pair plots need at least two factors")
        _write_svg(args, svg.pairs_svg(C, title=stem(args.inputs[0])),
                   Path(args.inputs[0]).with_suffix(".svg"))
    elif args.kind == "trace":
        traces = [read_trace_csv(p) for p in args.inputs]
        _write_svg(args, svg.trace_svg(traces, [stem(p) for p in args.inputs]), "trace.svg")
    elif args.kind == "box":
        if not args.config:
            raise ConfigurationError("config: box plots need --config for the grid and model")
        cfg = _config(args)
        rng = np.random.default_rng(cfg.seed)
        space = cfg.space()
        probes = [cube_vertices(space.d)] if cfg.probe_vertices else []
        probes.append(uniform_probes(space.d, cfg.probe_uniform, rng))
        probes = np.vstack(probes)
        dists, dvals = [], []
        for p in args.inputs:
            design, space = _load_design(p, cfg)
            dists.append(nearest_distance_stats(design, space, probes).distances)
            dvals.append(eval_D(cfg.model_spec(), design, space))
        _write_svg(args, svg.boxplot_svg([stem(p) for p in args.inputs], dists, dvals), "distances.svg")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--time-budget", type=float, default=argparse.SUPPRESS)
    common.add_argument("--restarts", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out-dir", default=argparse.SUPPRESS)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="privsets", parents=[common],
                                     description="Constrained space-filling designs via privacy sets.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="construct a design")
    p.add_argument("config")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", parents=[common], help="evaluate a design CSV")
    p.add_argument("design")
    p.add_argument("config")
    p.add_argument("--criterion", action="append",
                   help="criterion to report, e.g. 'ARD:J=1+2' or 'D:linear'; repeatable")
    p.add_argument("--distances", action="store_true", help="nearest design point distance summary")
    p.add_argument("--probes", type=int, help="number of uniform probes (default from config)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", parents=[common], help="timed restarts with a sampled trace")
    p.add_argument("config")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("plot", parents=[common], help="write an SVG figure")
    p.add_argument("kind", choices=["design", "pairs", "trace", "box"])
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output")
    p.add_argument("--config")
    p.add_argument("--bins", type=int, default=20)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.ERROR if getattr(args, "quiet", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        code, reason, msg = exc.code, exc.reason, str(exc)
    except ConfigurationError as exc:
        code, reason, msg = EXIT_CONFIG, "config", str(exc)
    except MalformedInput as exc:
        code, reason, msg = EXIT_CONFIG, "input", str(exc)
    except (MaximalityViolation, AvailabilityExhausted) as exc:
        code, reason, msg = EXIT_MAXIMAL, "maximality", f"{exc}; the grid needs more levels (raise L or grid_k)"
    except RejectionBudgetExceeded as exc:
        code, reason, msg = EXIT_REJECT, "rejection", str(exc)
    print(f"ERROR {reason}: {' '.join(msg.split())}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
