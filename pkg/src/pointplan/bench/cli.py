"""Command-line interface.

Subcommands: train, eval, plan, demos, bench, field. Each takes one
experiment config file plus optional --seed / --out overrides. Exit codes:
0 success, 2 configuration error, 3 training divergence.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config, method_documents, planner_of
from . import runner

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def _add_common(p):
    p.add_argument("config", help="experiment config JSON")
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.add_argument("--out", default=None, help="override output directory")


def _prepare(args, default_subdir="runs"):
    doc = load_config(args.config)
    if args.seed is not None:
        doc["seed"] = args.seed
    out = args.out or doc.get("out_dir") or f"{default_subdir}/{doc['name']}"
    return doc, Path(out)


def _log_row(row):
    print(json.dumps({k: (round(v, 4) if isinstance(v, float) else v)
                      for k, v in row.items()}), flush=True)


def cmd_train(args):
    doc, out = _prepare(args, "runs")
    if doc.get("learner") not in ("rl", "bc"):
        raise ConfigError("train needs learner set to 'rl' or 'bc'")
    outcomes = runner.run_experiment(doc, out, log=_log_row)
    for oc in outcomes:
        print(f"{oc.name}: success {oc.success_rate:.3f} "
              f"over {len(oc.records)} problems -> {out}")
    return EXIT_OK


def cmd_eval(args):
    doc, out = _prepare(args, "runs")
    out.mkdir(parents=True, exist_ok=True)
    policy, ckpt_cfg = runner.load_policy(args.checkpoint)
    env = runner.build_env(doc)
    problems = runner.make_problems(env, doc.get("eval_problems", 400),
                                    runner.problem_seed_of(doc))
    records = runner.evaluate_policy_on_problems(env, policy, problems)
    oc = runner.MethodOutcome(name=doc.get("name", "policy"),
                              records=records, wall_clock=0.0)
    runner.write_report(out, [oc])
    print(f"success {oc.success_rate:.3f} over {len(records)} problems -> {out}")
    return EXIT_OK


def cmd_plan(args):
    doc, out = _prepare(args, "runs")
    out.mkdir(parents=True, exist_ok=True)
    env = runner.build_env(doc)
    problems = runner.make_problems(env, doc.get("eval_problems", 400),
                                    runner.problem_seed_of(doc))
    records = runner.evaluate_planner_on_problems(env, problems,
                                                  planner_of(doc))
    oc = runner.MethodOutcome(name="birrt", records=records, wall_clock=0.0)
    runner.write_report(out, [oc])
    print(f"birrt success {oc.success_rate:.3f} over {len(records)} "
          f"problems -> {out}")
    return EXIT_OK


def cmd_demos(args):
    from ..il import collect_demos
    doc, out = _prepare(args, "runs")
    out.mkdir(parents=True, exist_ok=True)
    env = runner.build_env(doc)
    bc = doc.get("bc", {})
    rng = np.random.default_rng(doc["seed"])
    demos = collect_demos(env, bc.get("demo_steps", 10_000), rng,
                          budget=bc.get("planner_budget", 50_000))
    path = out / "demos.jsonl"
    demos.save_jsonl(path)
    print(f"{len(demos)} demo pairs -> {path}")
    return EXIT_OK


def cmd_bench(args):
    doc, out = _prepare(args, "runs")
    if "methods" not in doc:
        raise ConfigError("bench needs a 'methods' list")
    outcomes = runner.run_experiment(doc, out, log=_log_row)
    width = max(len(oc.name) for oc in outcomes)
    print(f"{'method'.ljust(width)}  success  nodes  path_length")
    for oc in outcomes:
        row = oc.report_row()
        print(f"{oc.name.ljust(width)}  {oc.success_rate:7.3f}  "
              f"{float(row['mean_nodes']):5.1f}  "
              f"{float(row['mean_path_length']):.3f}")
    print(f"-> {out}")
    return EXIT_OK


def cmd_field(args):
    doc, out = _prepare(args, "runs")
    out.mkdir(parents=True, exist_ok=True)
    env = runner.build_env(doc)
    rng = np.random.default_rng(runner.problem_seed_of(doc))
    problem = env.sample_problem(rng)
    ws = env.workspace_at(problem.workspace, 0)
    out_path = out / "field.csv"
    runner.export_policy_field(args.checkpoint, env, ws, problem.goal,
                               args.resolution, out_path)
    with open(out / "field_workspace.json", "w") as fh:
        json.dump({"workspace": ws.to_dict(),
                   "goal": np.asarray(problem.goal).tolist()}, fh, indent=2)
    print(f"{args.resolution}x{args.resolution} action field -> {out_path}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pointplan",
        description="Motion-planning workbench: train policies, run the "
                    "planner baseline, benchmark methods.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a policy (rl or bc) and evaluate")
    _add_common(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on fresh problems")
    _add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("plan", help="run the Bi-RRT baseline")
    _add_common(p)
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("demos", help="collect planner demonstrations")
    _add_common(p)
    p.set_defaults(fn=cmd_demos)

    p = sub.add_parser("bench", help="compare methods on one problem set")
    _add_common(p)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("field", help="export a policy action field (2D)")
    _add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--resolution", type=int, default=32)
    p.set_defaults(fn=cmd_field)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except FloatingPointError as e:
        print(f"training diverged: {e}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
