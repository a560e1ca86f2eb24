"""Command line interface: instance generation, single runs, sweeps, and
the verification battery.

    bsppa gen    --n 500 --d 100 --mode interpolation --seed 1 --out inst.json
    bsppa run    --instance inst.json --variant saga --kernel burg \
                 --alpha 0.01 --iters 50000 --seed 1 --out trace.csv
    bsppa sweep  --grid grid.json --out sweep_dir
    bsppa verify --seed 0 --samples 1000 --out report.json

Exit codes: 0 success, 1 failed verification, 2 invalid configuration,
3 run terminated by divergence or domain exit (partial trace flushed).
"""

import argparse
import json
import sys
import time
from pathlib import Path

from . import backend
from .errors import BsppaError, InvalidConfig
from .problems import load_instance, make_poisson_instance
from .reference import attach_reference_fstar
from .runner import RunConfig, run_unified
from .sweep import run_sweep
from .theory import RateConstants, stepsize_cap
from .traceio import file_sha256, read_manifest, write_manifest, write_trace
from .verify import run_verification


def _add_gen(sub):
    p = sub.add_parser("gen", help="generate a Poisson instance file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mode", choices=("interpolation", "noisy", "diagonal"), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--noise-sigma", type=float, default=0.2)
    p.add_argument("--no-reference", action="store_true",
                   help="skip the reference F* solve for noisy instances")
    p.add_argument("--out", required=True)
    return p


RUN_FLAGS = {
    "variant": str,
    "update_mode": str,
    "kernel": str,
    "schedule": str,
    "alpha0": float,
    "iterations": int,
    "seed": int,
    "lsvrg_p": float,
    "svrp_m": int,
    "svrp_outer": str,
    "inner_tolerance": float,
    "inner_max_iterations": int,
    "record_cadence": int,
}

FLAG_ALIASES = {
    "alpha0": "--alpha",
    "iterations": "--iters",
    "inner_tolerance": "--inner-tol",
    "inner_max_iterations": "--inner-max-iters",
    "record_cadence": "--cadence",
}


def _add_run(sub):
    p = sub.add_parser("run", help="run one configuration and write a trace")
    p.add_argument("--instance", help="path to an instance file")
    p.add_argument("--generate", help="inline generator spec, e.g. n=50,d=20,mode=interpolation,seed=1")
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--from-manifest", help="re-run the configuration captured in a manifest")
    for field, typ in RUN_FLAGS.items():
        flag = FLAG_ALIASES.get(field, "--" + field.replace("_", "-"))
        p.add_argument(flag, dest=field, type=typ, default=None)
    p.add_argument("--enforce-cap", action="store_true",
                   help="reject stepsizes at or above the theoretical cap")
    p.add_argument("--g0", type=float, default=1.0, help="gain constant for --enforce-cap")
    p.add_argument("--timing", action="store_true", help="include the wallclock column")
    p.add_argument("--out", help="trace CSV path")
    return p


def _add_sweep(sub):
    p = sub.add_parser("sweep", help="run a variants x stepsizes x seeds grid")
    p.add_argument("--grid", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=None)
    return p


def _add_verify(sub):
    p = sub.add_parser("verify", help="run the property battery")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--out", help="write the JSON report here")
    return p


def _parse_generate(spec):
    fields = {}
    for part in spec.split(","):
        key, _, value = part.partition("=")
        if not value:
            raise InvalidConfig(f"bad generator spec fragment {part!r}")
        fields[key.strip()] = value.strip()
    try:
        return {
            "n": int(fields["n"]),
            "d": int(fields["d"]),
            "mode": fields["mode"],
            "seed": int(fields["seed"]),
        }
    except KeyError as exc:
        raise InvalidConfig(f"generator spec is missing {exc}") from None


def cmd_gen(args):
    problem = make_poisson_instance(args.n, args.d, args.mode, args.seed,
                                    noise_sigma=args.noise_sigma)
    if args.mode == "noisy" and not args.no_reference:
        info = attach_reference_fstar(problem)
        print(f"reference solve: {info['steps']} steps, "
              f"grad sup-norm {info['grad_sup_norm']:.3e}")
    problem.save(args.out)
    print(f"wrote {args.out} (n={args.n}, d={args.d}, mode={args.mode}, seed={args.seed})")
    return 0


def _manifest_path(trace_path):
    trace_path = Path(trace_path)
    return trace_path.with_suffix(".manifest.json") if trace_path.suffix == ".csv" \
        else Path(str(trace_path) + ".manifest.json")


def cmd_run(args):
    config_fields = {}
    instance_path = args.instance
    generator = None
    if args.from_manifest:
        doc = read_manifest(args.from_manifest)
        config_fields.update(doc["config"])
        instance_path = instance_path or doc["instance"]["path"]
        generator = doc["instance"].get("generator")
        if instance_path and doc["instance"].get("sha256"):
            if file_sha256(instance_path) != doc["instance"]["sha256"]:
                raise InvalidConfig(f"instance file {instance_path} does not match the manifest hash")
    if args.config:
        with open(args.config, encoding="utf-8") as f:
            file_cfg = json.load(f)
        instance_path = instance_path or file_cfg.pop("instance", None)
        config_fields.update(file_cfg)
    for field in RUN_FLAGS:
        value = getattr(args, field)
        if value is not None:
            config_fields[field] = value
    if args.generate:
        generator = _parse_generate(args.generate)
    if generator and not instance_path:
        problem = make_poisson_instance(**generator)
        if generator["mode"] == "noisy":
            attach_reference_fstar(problem)
    elif instance_path:
        problem = load_instance(instance_path)
    else:
        raise InvalidConfig("provide --instance, --generate, or --from-manifest")
    config = RunConfig(**config_fields)
    if args.enforce_cap:
        constants = RateConstants(
            L=problem.rel_smoothness_L, n=problem.n, G0=args.g0,
            p=config.lsvrg_p or 1.0 / problem.n,
            m=config.svrp_m or problem.n,
        )
        cap = stepsize_cap(config.variant, constants)
        if config.alpha0 >= cap:
            raise InvalidConfig(
                f"stepsize {config.alpha0} is not below the {config.variant} cap {cap:.6g}"
            )
    if not args.out:
        raise InvalidConfig("--out is required")
    started = time.perf_counter()
    trace = run_unified(config, problem)
    write_trace(trace, args.out, include_wallclock=args.timing)
    gaps = [r.objective_gap for r in trace.records]
    write_manifest(
        _manifest_path(args.out),
        config=trace.config,
        status=trace.status,
        trace_path=str(args.out),
        backend=backend.backend_name(),
        instance_path=instance_path,
        instance_sha256=file_sha256(instance_path) if instance_path else None,
        generator=generator,
        final_gap=gaps[-1],
        duration_seconds=time.perf_counter() - started,
        record_count=len(trace.records),
    )
    print(f"{trace.status}: {len(trace.records)} records, final gap {gaps[-1]:.6e}")
    return 0 if trace.status == "completed" else 3


def cmd_sweep(args):
    with open(args.grid, encoding="utf-8") as f:
        grid = json.load(f)
    rows, summary_path = run_sweep(grid, args.out, threads=args.threads)
    failed = sum(1 for r in rows if r["status"] not in ("completed",))
    print(f"{len(rows)} cells -> {summary_path} ({failed} not completed)")
    return 0


def cmd_verify(args):
    report = run_verification(seed=args.seed, samples=args.samples)
    for prop in report["properties"]:
        mark = "PASS" if prop["passed"] else "FAIL"
        print(f"{mark} {prop['name']} (max violation {prop['max_violation']:.3e}, "
              f"tol {prop['tolerance']:.0e}, {prop['seconds']}s)")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2)
            f.write("\n")
    print("all passed" if report["all_passed"] else "FAILURES present")
    return 0 if report["all_passed"] else 1


def main(argv=None):
    parser = argparse.ArgumentParser(prog="bsppa", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_gen(sub)
    _add_run(sub)
    _add_sweep(sub)
    _add_verify(sub)
    args = parser.parse_args(argv)
    handler = {"gen": cmd_gen, "run": cmd_run, "sweep": cmd_sweep, "verify": cmd_verify}[args.command]
    try:
        return handler(args)
    except BsppaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
