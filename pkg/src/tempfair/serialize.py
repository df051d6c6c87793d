"""JSON documents for instances, allocations and fairness reports.

Values travel as strings (``"7"`` or ``"7/2"``) so no float ever touches them.
Agents are 1-based in documents. An instance document::

    {"schema": "tempfair/instance@1", "n": 2,
     "days": [[{"id": "g1", "values": ["4", "4"]}, ...], ...],
     "laminar": [["g1", "g4"], ...]}          # optional

An allocation document maps every good id to its agent::

    {"schema": "tempfair/allocation@1", "owner": {"g1": 1, "g4": 2}}
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InvalidArgumentError
from .fairness import FairnessReport
from .model import Allocation, GoodId, TemporalInstance, as_fraction

__all__ = [
    "INSTANCE_SCHEMA",
    "ALLOCATION_SCHEMA",
    "format_rational",
    "parse_instance",
    "instance_document",
    "dump_instance",
    "parse_allocation",
    "allocation_document",
    "dump_allocation",
    "family_ids",
    "report_document",
    "render_report",
]

INSTANCE_SCHEMA = "tempfair/instance@1"
ALLOCATION_SCHEMA = "tempfair/allocation@1"


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _load(data) -> dict:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InvalidArgumentError("$: expected a JSON object")
    return data


def _value(raw, path: str) -> Fraction:
    if isinstance(raw, float) or isinstance(raw, bool):
        raise InvalidArgumentError(f"{path}: write values as strings such as \"7/2\", not {raw!r}")
    if not isinstance(raw, (str, int)):
        raise InvalidArgumentError(f"{path}: expected a rational string, got {type(raw).__name__}")
    try:
        v = as_fraction(raw)
    except InvalidArgumentError as exc:
        raise InvalidArgumentError(f"{path}: {exc}") from None
    if v < 0:
        raise InvalidArgumentError(f"{path}: negative value {raw!r}")
    return v


def parse_instance(data) -> tuple[TemporalInstance, list[frozenset[GoodId]] | None]:
    """Parse an instance document; returns the instance and its laminar family if present.

    >>> inst, fam = parse_instance('{"schema": "tempfair/instance@1", "n": 1, '
    ...                            '"days": [[{"id": "a", "values": ["7/2"]}]]}')
    >>> inst.value(0, GoodId(1, 0)), fam
    (Fraction(7, 2), None)
    """
    doc = _load(data)
    if doc.get("schema") != INSTANCE_SCHEMA:
        raise InvalidArgumentError(f"$.schema: expected {INSTANCE_SCHEMA!r}, got {doc.get('schema')!r}")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidArgumentError(f"$.n: expected a positive integer, got {n!r}")
    days = doc.get("days")
    if not isinstance(days, list) or not days:
        raise InvalidArgumentError("$.days: expected a nonempty list of days")
    table, names, seen = [], [], set()
    for t, day in enumerate(days):
        if not isinstance(day, list) or not day:
            raise InvalidArgumentError(f"$.days[{t}]: expected a nonempty list of goods")
        row, row_names = [], []
        for j, rec in enumerate(day):
            path = f"$.days[{t}][{j}]"
            if not isinstance(rec, dict):
                raise InvalidArgumentError(f"{path}: expected an object with id and values")
            gid = rec.get("id")
            if not isinstance(gid, str) or not gid:
                raise InvalidArgumentError(f"{path}.id: expected a nonempty string")
            if gid in seen:
                raise InvalidArgumentError(f"{path}.id: duplicate good id {gid!r}")
            seen.add(gid)
            vals = rec.get("values")
            if not isinstance(vals, list):
                raise InvalidArgumentError(f"{path}.values: expected a list for good {gid!r}")
            if len(vals) != n:
                raise InvalidArgumentError(f"{path}.values: good {gid!r} has {len(vals)} values, expected {n}")
            row.append([_value(v, f"{path}.values[{i}]") for i, v in enumerate(vals)])
            row_names.append(gid)
        table.append(row)
        names.append(row_names)
    instance = TemporalInstance.from_table(table, names)
    family = None
    if "laminar" in doc:
        family = _parse_family(doc["laminar"], instance.by_name(), "$.laminar")
        from .laminar import validate_laminar

        validate_laminar(family, instance.goods)
    unknown = set(doc) - {"schema", "n", "days", "laminar"}
    if unknown:
        raise InvalidArgumentError(f"$: unknown keys {sorted(unknown)!r}")
    return instance, family


def _parse_family(raw, ids: Mapping[str, GoodId], path: str) -> list[frozenset[GoodId]]:
    if not isinstance(raw, list):
        raise InvalidArgumentError(f"{path}: expected a list of good-id lists")
    out = []
    for s, members in enumerate(raw):
        if not isinstance(members, list):
            raise InvalidArgumentError(f"{path}[{s}]: expected a list of good ids")
        goods = set()
        for q, gid in enumerate(members):
            if gid not in ids:
                raise InvalidArgumentError(f"{path}[{s}][{q}]: unknown good id {gid!r}")
            goods.add(ids[gid])
        out.append(frozenset(goods))
    return out


def family_ids(instance: TemporalInstance, family: Iterable[Iterable[GoodId]]) -> list[list[str]]:
    return [[instance.name(g) for g in sorted(s)] for s in family]


def instance_document(instance: TemporalInstance, family: Iterable[Iterable[GoodId]] | None = None) -> dict:
    doc = {
        "schema": INSTANCE_SCHEMA,
        "n": instance.n,
        "days": [
            [{"id": instance.name(g), "values": [format_rational(v) for v in instance.vector(g)]} for g in day]
            for day in instance.days
        ],
    }
    if family is not None:
        doc["laminar"] = family_ids(instance, family)
    return doc


def dump_instance(instance: TemporalInstance, family: Iterable[Iterable[GoodId]] | None = None) -> str:
    return json.dumps(instance_document(instance, family), indent=2) + "\n"


def parse_allocation(data, instance: TemporalInstance) -> Allocation:
    doc = _load(data)
    if doc.get("schema") != ALLOCATION_SCHEMA:
        raise InvalidArgumentError(f"$.schema: expected {ALLOCATION_SCHEMA!r}, got {doc.get('schema')!r}")
    raw = doc.get("owner")
    if not isinstance(raw, dict):
        raise InvalidArgumentError("$.owner: expected an object mapping good ids to agents")
    ids = instance.by_name()
    owner = {}
    for gid, agent in raw.items():
        if gid not in ids:
            raise InvalidArgumentError(f"$.owner.{gid}: unknown good id")
        if not isinstance(agent, int) or isinstance(agent, bool) or not 1 <= agent <= instance.n:
            raise InvalidArgumentError(f"$.owner.{gid}: agent must be an integer in 1..{instance.n}, got {agent!r}")
        owner[ids[gid]] = agent - 1
    missing = [instance.name(g) for g in instance.goods if g not in owner]
    if missing:
        raise InvalidArgumentError(f"$.owner: goods without an owner: {missing[:5]!r}")
    return Allocation(owner)


def allocation_document(instance: TemporalInstance, allocation: Allocation) -> dict:
    return {
        "schema": ALLOCATION_SCHEMA,
        "owner": {instance.name(g): allocation[g] + 1 for g in sorted(allocation.goods)},
    }


def dump_allocation(instance: TemporalInstance, allocation: Allocation) -> str:
    return json.dumps(allocation_document(instance, allocation), indent=2) + "\n"


def report_document(instance: TemporalInstance, label: str, report: FairnessReport) -> dict:
    return {
        "property": label,
        "passed": report.passed,
        "violations": [
            {
                "set": [instance.name(g) for g in sorted(v.goods)],
                "predicate": v.predicate.name,
                "agent": v.agent + 1,
                "other": None if v.other is None else v.other + 1,
                "detail": v.detail,
            }
            for v in report.violations
        ],
    }


def render_report(instance: TemporalInstance, label: str, report: FairnessReport, limit: int = 5) -> str:
    if report.passed:
        return f"PASS  {label}"
    lines = [f"FAIL  {label}  ({len(report.violations)} violations)"]
    for v in report.violations[:limit]:
        names = ",".join(instance.name(g) for g in sorted(v.goods))
        who = f"agent {v.agent + 1}" + ("" if v.other is None else f" vs agent {v.other + 1}")
        lines.append(f"      on {{{names}}}: {who}: {v.detail}")
    return "\n".join(lines)
