"""Command-line front end for the verification campaigns."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import PlanInvalid
from .qcore import TruncationPolicy
from .verifier import CampaignPlan, eval_single, identity_descriptions, run_campaign


def _parse_param(text: str):
    """k=v with v an int, float, or comma-separated int vector."""
    key, _, raw = text.partition("=")
    if not _:
        raise PlanInvalid(f"--param needs key=value, got {text!r}")
    if "," in raw:
        return key, [int(v) for v in raw.split(",")]
    for cast in (int, float):
        try:
            return key, cast(raw)
        except ValueError:
            continue
    return key, raw


def _policy_from_args(args) -> TruncationPolicy:
    kwargs = {}
    if args.max_terms is not None:
        kwargs["max_terms"] = args.max_terms
    if args.window is not None:
        lo, _, hi = args.window.partition(":")
        kwargs["bilateral_window"] = (int(lo), int(hi))
        kwargs["adaptive"] = False
    return TruncationPolicy(**kwargs)


def _emit(results, summary, out_path):
    lines = [r.to_json() for r in results]
    lines.append(json.dumps({"summary": summary}, sort_keys=True))
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qcoupling",
                                     description="q-special-function identity verifier")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a JSON campaign plan")
    p_verify.add_argument("plan", help="path to the plan file")
    p_verify.add_argument("--jobs", type=int, default=1)
    p_verify.add_argument("--out", default=None)

    p_eval = sub.add_parser("eval", help="evaluate one identity instance")
    p_eval.add_argument("identity")
    p_eval.add_argument("--param", action="append", default=[],
                        help="k=v, repeatable; vectors as comma-separated ints")
    p_eval.add_argument("--q", type=float, default=0.5)
    p_eval.add_argument("--tol", type=float, default=1e-8)
    p_eval.add_argument("--precision", type=int, default=30)
    p_eval.add_argument("--max-terms", type=int, default=None)
    p_eval.add_argument("--window", default=None, help="lo:hi fixed bilateral window")
    p_eval.add_argument("--out", default=None)

    p_list = sub.add_parser("list", help="enumerate identity ids")

    args = parser.parse_args(argv)

    if args.command == "list":
        for name, desc in identity_descriptions():
            print(f"{name:24s} {desc}")
        return 0

    if args.command == "eval":
        try:
            params = dict(_parse_param(t) for t in args.param)
            result = eval_single(args.identity, params, args.q, args.tol,
                                 args.precision, _policy_from_args(args))
        except PlanInvalid as exc:
            print(f"plan invalid: {exc}", file=sys.stderr)
            return 2
        text = result.to_json() + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0 if result.passed else 1

    # verify
    try:
        with open(args.plan, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"plan invalid: {exc}", file=sys.stderr)
        return 2
    entries = doc if isinstance(doc, list) else doc.get("plans", [doc])
    try:
        plans = [CampaignPlan.from_dict(e) for e in entries]
        for plan in plans:
            plan.expand()  # validate grids up front
        results, summary = run_campaign(plans, jobs=args.jobs)
    except PlanInvalid as exc:
        print(f"plan invalid: {exc}", file=sys.stderr)
        return 2
    _emit(results, summary, args.out)
    return 0 if summary["failed"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
