"""Command-line entry point.

Exit codes: 0 success or pass, 1 failed check or infeasible query, 2 search
budget exhausted, 64 bad usage, bad input, or an algorithm applied outside its
setting.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

from .errors import InvalidArgumentError, ResourceLimitError
from .fairness import OVERALL, PER_DAY, UP_TO_EACH_DAY, FairnessReport, Predicate, Scope, check, check_temporal
from .general import allocate_general, allocate_identical_days
from .generate import GeneratorConfig, generate_instance
from .identical import allocate_identical_orderings
from .laminar import allocate_laminar, complete_family
from .model import Allocation, TemporalInstance, prefix_goods
from .oracle import NODE_BUDGET, PLAIN_BUDGET, PropertyQuery, exists_allocation, verify_counterexamples
from .serialize import (
    allocation_document,
    dump_allocation,
    dump_instance,
    parse_allocation,
    parse_instance,
    render_report,
    report_document,
)
from .two_agents import allocate_two_agents, allocate_two_agents_identical_days

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_BUDGET = 2
EXIT_USAGE = 64

logger = logging.getLogger("tempfair")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


Guarantee = tuple[str, Callable[[TemporalInstance, Allocation, list], FairnessReport]]


def _temporal(p: Predicate, scope: Scope) -> Guarantee:
    return f"{p.name}@{scope}", lambda inst, alloc, fam: check_temporal(inst, alloc, p, scope)


def _even_prefixes_sd_ef(inst: TemporalInstance, alloc: Allocation, fam) -> FairnessReport:
    return FairnessReport.combine(check(inst, alloc, prefix_goods(inst, t), Predicate.SD_EF)
                                  for t in range(2, inst.k + 1, 2))


def _laminar_ef1(inst: TemporalInstance, alloc: Allocation, fam) -> FairnessReport:
    completed = complete_family(fam, inst.goods)
    return check_temporal(inst, alloc, Predicate.EF1, Scope.laminar(completed.sets))


ALGORITHMS: dict[str, tuple[Callable, list[Guarantee]]] = {
    "general": (allocate_general, [_temporal(Predicate.SD_EF1, PER_DAY), _temporal(Predicate.PROP1, OVERALL)]),
    "two-agents": (allocate_two_agents,
                   [_temporal(Predicate.SD_EF1, PER_DAY), _temporal(Predicate.EF1, UP_TO_EACH_DAY)]),
    "identical-orderings": (allocate_identical_orderings,
                            [_temporal(Predicate.SD_EF1, PER_DAY), _temporal(Predicate.SD_EF1, OVERALL)]),
    "identical-days": (allocate_identical_days,
                       [_temporal(Predicate.SD_EF1, PER_DAY), _temporal(Predicate.SD_PROP1, OVERALL)]),
    "two-agents-identical-days": (allocate_two_agents_identical_days,
                                  [_temporal(Predicate.SD_EF1, PER_DAY),
                                   _temporal(Predicate.SD_EF1, UP_TO_EACH_DAY),
                                   ("SD_EF@even-prefixes", _even_prefixes_sd_ef)]),
    "laminar": (None, [("EF1@laminar(completed)", _laminar_ef1)]),
}


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read {path}: {exc.strerror}") from None


def _allocate_one(args) -> dict:
    algorithm, path = args
    instance, family = parse_instance(_read(path))
    run, guarantees = ALGORITHMS[algorithm]
    if algorithm == "laminar":
        if family is None:
            raise InvalidArgumentError(f"{path}: the laminar algorithm needs a 'laminar' block in the instance")
        allocation = allocate_laminar(instance, family)
    else:
        allocation = run(instance)
    reports = [(label, fn(instance, allocation, family)) for label, fn in guarantees]
    return {
        "instance": path,
        "allocation": allocation_document(instance, allocation),
        "checks": [report_document(instance, label, rep) for label, rep in reports],
        "text": [render_report(instance, label, rep) for label, rep in reports],
        "passed": all(rep.passed for _, rep in reports),
        "_dump": dump_allocation(instance, allocation),
    }


def _map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def cmd_allocate(ns) -> int:
    if ns.out and len(ns.instance) > 1:
        raise InvalidArgumentError("--out takes a single --instance")
    results = _map(_allocate_one, [(ns.algorithm, p) for p in ns.instance], ns.jobs)
    if ns.out:
        Path(ns.out).write_text(results[0]["_dump"])
    if ns.format == "json":
        payload = [{k: v for k, v in r.items() if k not in ("text", "_dump")} for r in results]
        print(json.dumps(payload[0] if len(payload) == 1 else payload, indent=2))
    else:
        for r in results:
            if len(results) > 1:
                print(f"== {r['instance']}")
            if not ns.out:
                sys.stdout.write(r["_dump"])
            for line in r["text"]:
                print(line)
    return EXIT_OK if all(r["passed"] for r in results) else EXIT_FAIL


def cmd_check(ns) -> int:
    instance, family = parse_instance(_read(ns.instance))
    allocation = parse_allocation(_read(ns.allocation), instance)
    predicate = Predicate.parse(ns.predicate)
    scope = Scope.parse(ns.scope, family)
    report = check_temporal(instance, allocation, predicate, scope)
    label = f"{predicate.name}@{scope}"
    if ns.format == "json":
        print(json.dumps(report_document(instance, label, report), indent=2))
    else:
        print(render_report(instance, label, report))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_oracle(ns) -> int:
    instance, family = parse_instance(_read(ns.instance))
    query = PropertyQuery.parse(ns.query, family)
    stats: dict = {}
    try:
        found = exists_allocation(instance, query, method=ns.method, plain_budget=ns.plain_budget,
                                  node_budget=ns.node_budget, symmetry=not ns.no_symmetry, jobs=ns.jobs,
                                  stats=stats)
    except ResourceLimitError as exc:
        if ns.format == "json":
            print(json.dumps({"query": str(query), "result": "budget", "message": str(exc)}, indent=2))
        else:
            print(f"budget exhausted: {exc}")
        return EXIT_BUDGET
    if ns.format == "json":
        print(json.dumps({
            "query": str(query),
            "result": "infeasible" if found is None else "found",
            "allocation": None if found is None else allocation_document(instance, found),
            "method": stats.get("method"),
            "nodes": stats.get("nodes"),
        }, indent=2))
    elif found is None:
        print("infeasible")
    else:
        sys.stdout.write(dump_allocation(instance, found))
    return EXIT_FAIL if found is None else EXIT_OK


def cmd_verify(ns) -> int:
    results = verify_counterexamples(node_budget=ns.node_budget)
    if ns.format == "json":
        print(json.dumps([{"fixture": r.name, "infeasible": r.confirmed, "method": r.method,
                           "nodes": r.nodes, "seconds": round(r.seconds, 6)} for r in results], indent=2))
    else:
        for r in results:
            verdict = "infeasible" if r.confirmed else "FEASIBLE"
            print(f"{r.name}: {verdict} ({r.method}, {r.nodes} nodes, {r.seconds * 1000:.2f} ms)")
    return EXIT_OK if all(r.confirmed for r in results) else EXIT_FAIL


def cmd_generate(ns) -> int:
    raw = json.loads(_read(ns.config)) if ns.config else {}
    if not isinstance(raw, dict):
        raise InvalidArgumentError("the generator config must be a JSON object")
    if ns.seed is not None:
        raw["seed"] = ns.seed
    instance = generate_instance(GeneratorConfig.from_mapping(raw))
    sys.stdout.write(dump_instance(instance))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tempfair", description="Temporal fair division: allocate, check and search.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, jobs=False):
        p.add_argument("--format", choices=("text", "json"), default="text")
        if jobs:
            p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("allocate", help="run an algorithm and re-check its guarantees")
    p.add_argument("--algorithm", required=True, choices=sorted(ALGORITHMS))
    p.add_argument("--instance", required=True, nargs="+")
    p.add_argument("--out")
    common(p, jobs=True)
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("check", help="evaluate a predicate on an allocation")
    p.add_argument("--instance", required=True)
    p.add_argument("--allocation", required=True)
    p.add_argument("--predicate", required=True)
    p.add_argument("--scope", required=True, choices=Scope.KINDS)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("oracle", help="search for an allocation satisfying a query")
    p.add_argument("--instance", required=True)
    p.add_argument("--query", required=True, help='e.g. "SD_EF1@up-to-each-day,EF1@per-day"')
    p.add_argument("--method", choices=("auto", "plain", "backtrack"), default="auto")
    p.add_argument("--plain-budget", type=int, default=PLAIN_BUDGET)
    p.add_argument("--node-budget", type=int, default=NODE_BUDGET)
    p.add_argument("--no-symmetry", action="store_true")
    common(p, jobs=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify-counterexamples", help="confirm the built-in impossibility instances")
    p.add_argument("--node-budget", type=int, default=NODE_BUDGET)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="print a random instance document")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"tempfair: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return ns.func(ns)
    except InvalidArgumentError as exc:
        print(f"tempfair: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"tempfair: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
