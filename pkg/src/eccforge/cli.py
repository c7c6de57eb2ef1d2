"""Command line entry point: ``eccforge <subcommand> ...``.

Exit codes: 0 success, 1 domain failure, 2 usage or parse failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import random
import sys
import time
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

from .fitness import HASSE_LOWER_MODES, ProbeConfig, validate_curve
from .ga import GaConfig, run_ga
from .population import write_history_csv, write_history_dat
from .pso import PsoConfig, run_pso
from .simnet.params import MissingKey, ParseError, load_params, resolve_source, write_params_file

logger = logging.getLogger("eccforge")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SMALL_BUDGET = {"bits": 16, "size": 20, "steps": 10}


class UsageError(Exception):
    pass


def out_dir(args) -> Path:
    path = Path(args.out or os.environ.get("ECCFORGE_OUT") or "out")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def write_manifest(directory: Path, subcommand: str, config: dict, seed, started: str,
                   outputs: list, deterministic: bool = False) -> Path:
    """One manifest per run. Deterministic runs omit timestamps so reruns match byte for byte."""
    manifest = {
        "subcommand": subcommand,
        "config": config,
        "seed": seed,
        "outputs": [Path(p).name if Path(p).parent == directory else str(p) for p in outputs],
    }
    if not deterministic:
        manifest["started"] = started
        manifest["finished"] = _now()
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, default=str) + "\n", encoding="utf-8")
    return path


def probe_from_args(args) -> ProbeConfig:
    return ProbeConfig(trials=args.trials, max_iterations=args.probe_iterations,
                       distinguished_bits=args.distinguished_bits,
                       deterministic_timing=args.deterministic_timing,
                       random_starts=args.random_starts, hasse_lower=args.hasse_lower)


def _generator_budget(args):
    # The wall-clock cap on generator search would make runs timing dependent;
    # deterministic runs rely on the scan limit alone.
    return None if args.deterministic_timing else 5.0


def ga_config_from_args(args) -> GaConfig:
    small = args.budget_small
    return GaConfig(
        pop_size=args.pop_size or (SMALL_BUDGET["size"] if small else 500),
        ngen=args.generations if args.generations is not None else (SMALL_BUDGET["steps"] if small else 40),
        cxpb=args.cxpb, mutpb=args.mutpb, multiparent_cxpb=args.multiparent_cxpb,
        elitism_rate=args.elitism_rate, indpb=args.indpb, tournament_size=args.tournament_size,
        bits=args.bits or (SMALL_BUDGET["bits"] if small else 256), seed=args.seed,
        workers=args.workers, generator_budget=_generator_budget(args),
    )


def pso_config_from_args(args) -> PsoConfig:
    small = args.budget_small
    return PsoConfig(
        swarm_size=args.swarm_size or args.pop_size or (SMALL_BUDGET["size"] if small else 500),
        max_iterations=args.iterations or args.generations or (SMALL_BUDGET["steps"] if small else 40),
        c1=args.c1, c2=args.c2, stall_limit=args.stall_limit,
        bits=args.bits or (SMALL_BUDGET["bits"] if small else 256), seed=args.seed,
        workers=args.workers, generator_budget=_generator_budget(args),
    )


def summarize(history, best) -> dict:
    last = history[-1]
    report = best.report
    return {
        "attack": 0 if report is None or report.attack_resistance_score == 1 else 1,
        "min": last.min, "max": last.max, "avg": last.avg, "std": last.std,
        "best_fitness": best.fitness,
    }


def format_result_table(title: str, history, best) -> str:
    s = summarize(history, best)
    params = best.to_params()
    rows = [title, f"Attack {s['attack']}", f"Min {s['min']!r}", f"Max {s['max']!r}",
            f"Avg {s['avg']!r}", f"Std {s['std']!r}",
            f"Parameter a {params.a}", f"Parameter b {params.b}", f"Parameter p {params.p}",
            f"Parameter G {params.G.x}, {params.G.y}", f"Parameter n {params.n}",
            f"Parameter h {params.h}"]
    return "\n".join(rows)


def run_optimizer(algorithm: str, args, directory: Path):
    """Run one optimizer and write its params file and history; returns (best, history, wall, outputs)."""
    probe = probe_from_args(args)
    if algorithm == "ga":
        cfg = ga_config_from_args(args)
        started = time.monotonic()
        best, history = run_ga(cfg, probe, random.Random(cfg.seed))
        index_name = "generation"
    else:
        cfg = pso_config_from_args(args)
        started = time.monotonic()
        best, history = run_pso(cfg, probe, random.Random(cfg.seed))
        index_name = "iteration"
    wall = time.monotonic() - started
    outputs = []
    if best.fitness and best.fitness > 0:
        outputs.append(write_params_file(best, directory / f"{algorithm}_ecc_params.txt"))
    csv_path = directory / "fitness_history.csv"
    write_history_csv(history, csv_path, index_name)
    dat_path = directory / "fitness_history.dat"
    write_history_dat(history, dat_path)
    outputs += [csv_path, dat_path]
    config = {"algorithm": algorithm, **asdict(cfg), "probe": asdict(probe)}
    return best, history, wall, outputs, config


def cmd_optimize(args) -> int:
    directory = out_dir(args)
    started = _now()
    best, history, wall, outputs, config = run_optimizer(args.algorithm, args, directory)
    write_manifest(directory, f"optimize {args.algorithm}", config, args.seed, started, outputs,
                   args.deterministic_timing)
    print(format_result_table(f"{args.algorithm.upper()} Results", history, best))
    print(f"wall time {wall:.2f}s")
    if not best.fitness:
        print("no valid curve found", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        params = load_params(args.params_file, args.params_dir)
    except (MissingKey, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    ok, reason = validate_curve(params)
    if ok:
        print("valid")
        return EXIT_OK
    print(f"invalid: {reason}")
    return EXIT_FAIL


def _parse_bind(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    try:
        return host or "127.0.0.1", int(port)
    except ValueError as exc:
        raise UsageError(f"--bind expects host:port, got {text!r}") from exc


def cmd_serve(args) -> int:
    from .simnet.server import ServerConfig, StartupError, serve_entity_b

    params_dir = args.params_dir or out_dir(args)
    path = resolve_source(args.curve, params_dir)
    if not path.exists():
        print(f"error: parameter file {path} does not exist", file=sys.stderr)
        return EXIT_USAGE
    config = ServerConfig(seed=args.seed, private_key=args.private_key, params_dir=params_dir,
                          order_log_csv=args.order_log)
    try:
        server = serve_entity_b(args.curve, _parse_bind(args.bind), config)
    except StartupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"Entity B serving {path.name} at {server.url}", flush=True)
    try:
        if args.duration is not None:
            time.sleep(args.duration)
        else:
            while True:
                time.sleep(3600)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    print(f"orders received={len(server.orders)} rejected={server.rejected}")
    return EXIT_OK


def cmd_replay(args) -> int:
    from .simnet.client import ServerUnavailable, run_entity_a

    override = None
    if args.curve is not None:
        try:
            override = load_params(args.curve, args.params_dir or ".")
        except (MissingKey, ParseError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    try:
        summary = run_entity_a(args.server, args.orders, args.duration, args.interval,
                               random.Random(args.seed), max_orders=args.max_orders,
                               params_override=override)
    except ServerUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    s = summary.as_dict()
    print(" ".join(f"{k}={v}" for k, v in s.items()))
    ok = summary.rejected == 0 and summary.connection_failures == 0
    return EXIT_OK if ok else EXIT_FAIL


def cmd_attack(args) -> int:
    from .rho_attack import attack_entity_b
    from .simnet.client import ServerUnavailable

    try:
        report = attack_entity_b(args.server, args.workers, args.step_budget,
                                 random.Random(args.seed))
    except ServerUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(report.render())
    return EXIT_OK if report.verified else EXIT_FAIL


def cmd_compare(args) -> int:
    root = out_dir(args) / "compare"
    rows = {}
    started = _now()
    outputs = []
    for algorithm in ("ga", "pso"):
        directory = root / algorithm
        directory.mkdir(parents=True, exist_ok=True)
        best, history, wall, outs, config = run_optimizer(algorithm, args, directory)
        write_manifest(directory, f"compare {algorithm}", config, args.seed, started, outs,
                       args.deterministic_timing)
        outputs += outs
        final = history[-1]
        rows[algorithm] = {
            "wall_time_s": wall,
            "best_fitness": best.fitness,
            "final_avg": final.avg,
            "final_std": final.std,
            "final_max": final.max,
            "best_valid": validate_curve(best.to_params())[0],
            "validity_rate": final.valid_fraction,
            "probe_successes": 0 if best.report is None else 1 - best.report.attack_resistance_score,
            "iterations": len(history) - 1,
        }
    csv_path = root / "compare.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["criterion", "ga", "pso"])
        for key in rows["ga"]:
            writer.writerow([key, rows["ga"][key], rows["pso"][key]])
    bits = pso_config_from_args(args).bits
    report = render_comparison(rows, bits)
    report_path = root / "compare_report.txt"
    report_path.write_text(report + "\n", encoding="utf-8")
    outputs += [csv_path, report_path]
    write_manifest(root, "compare", {"bits": bits, "seed": args.seed}, args.seed, started, outputs,
                   args.deterministic_timing)
    print(report)
    return EXIT_OK if rows["ga"]["best_valid"] and rows["pso"]["best_valid"] else EXIT_FAIL


def render_comparison(rows: dict, bits: int) -> str:
    ga, pso = rows["ga"], rows["pso"]
    lines = [f"{'criterion':<18}{'GA':>26}{'PSO':>26}"]
    for key in ga:
        lines.append(f"{key:<18}{_fmt(ga[key]):>26}{_fmt(pso[key]):>26}")
    winner = lambda better_ga: "GA" if better_ga else "PSO"  # noqa: E731
    lines.append("")
    lines.append(f"Performance (wall time): {winner(ga['wall_time_s'] <= pso['wall_time_s'])}")
    lines.append(f"Optimality (best fitness): {winner(ga['best_fitness'] >= pso['best_fitness'])}")
    # A collapsed, all-invalid population has zero spread; rank validity first.
    robust_ga = (ga["validity_rate"], -ga["final_std"]) >= (pso["validity_rate"], -pso["final_std"])
    lines.append(f"Robustness (final validity, then std): {winner(robust_ga)}")
    lines.append(f"Validity: GA={'ok' if ga['best_valid'] else 'FAIL'} PSO={'ok' if pso['best_valid'] else 'FAIL'}")
    if bits >= 64:
        status = "OK" if ga["wall_time_s"] < pso["wall_time_s"] else "WARN"
        lines.append(f"[{status}] GA wall time below PSO at {bits} bits")
    return "\n".join(lines)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eccforge", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_optimizer_flags(p):
        p.add_argument("--bits", type=int)
        p.add_argument("--pop-size", type=int)
        p.add_argument("--swarm-size", type=int)
        p.add_argument("--generations", type=int)
        p.add_argument("--iterations", type=int)
        p.add_argument("--cxpb", type=float, default=0.5)
        p.add_argument("--mutpb", type=float, default=0.2)
        p.add_argument("--multiparent-cxpb", type=float, default=0.1)
        p.add_argument("--elitism-rate", type=float, default=0.1)
        p.add_argument("--indpb", type=float, default=0.2)
        p.add_argument("--tournament-size", type=int, default=3)
        p.add_argument("--c1", type=float, default=1.0)
        p.add_argument("--c2", type=float, default=2.5)
        p.add_argument("--stall-limit", type=int, default=20)
        p.add_argument("--trials", type=int, default=20)
        p.add_argument("--probe-iterations", type=int, default=100)
        p.add_argument("--distinguished-bits", type=int, default=10)
        p.add_argument("--hasse-lower", choices=HASSE_LOWER_MODES, default="expected")
        p.add_argument("--random-starts", action="store_true")
        p.add_argument("--deterministic-timing", action="store_true")
        p.add_argument("--budget-small", action="store_true",
                       help="bits 16, population 20, 10 generations/iterations")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")

    p = sub.add_parser("optimize", help="evolve curve parameters with GA or PSO")
    p.add_argument("algorithm", choices=("ga", "pso"))
    add_optimizer_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("compare", help="run GA and PSO at matched budgets")
    add_optimizer_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="validate a parameter file")
    p.add_argument("params_file")
    p.add_argument("--params-dir", default=".")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", help="run Entity B")
    p.add_argument("--curve", default="secp256k1",
                   help="ga, pso, secp256k1, brainpoolP256r1 or a file path")
    p.add_argument("--bind", default="127.0.0.1:8080")
    p.add_argument("--params-dir")
    p.add_argument("--private-key", type=int)
    p.add_argument("--order-log")
    p.add_argument("--duration", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("replay", help="run Entity A against a server")
    p.add_argument("--server", default="http://127.0.0.1:8080")
    p.add_argument("--orders")
    p.add_argument("--duration", type=float, default=10.0)
    p.add_argument("--interval", type=float, default=0.5)
    p.add_argument("--max-orders", type=int)
    p.add_argument("--curve", help="use this curve instead of the server's")
    p.add_argument("--params-dir")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("attack", help="Pollard's rho against Entity B's public key")
    p.add_argument("--server", default="http://127.0.0.1:8080")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--step-budget", type=int, default=10 ** 6)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_attack)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
