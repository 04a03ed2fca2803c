"""JSON documents for instances and results.

Every document carries ``schemaVersion`` and a ``kind``. Keys are written in
a fixed order with one matrix row per line, so ``serialize(parse(text))`` is
byte-identical to ``text`` for any canonical document. Rationals travel as
``"p/q"`` strings.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import ParseError
from .model import Allocation, Instance, fraction_str, validate_instance

SCHEMA_VERSION = 1
_RATIONAL = re.compile(r"^-?\d+/\d+$")
_META_KEYS = ("name", "seed", "family")
_STAT_KEYS = ("transfers", "priceRises", "wallTime")


def _dump(x: Any) -> str:
    return json.dumps(x, separators=(", ", ": "))


def _render(doc: dict) -> str:
    lines = ["{"]
    items = list(doc.items())
    for idx, (k, v) in enumerate(items):
        comma = "," if idx < len(items) - 1 else ""
        if isinstance(v, list) and v and all(isinstance(r, list) for r in v):
            rows = [f"    {_dump(r)}" for r in v]
            body = ",\n".join(rows)
            lines.append(f'  "{k}": [\n{body}\n  ]{comma}')
        else:
            lines.append(f'  "{k}": {_dump(v)}{comma}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _load(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "document")
    version = doc.get("schemaVersion")
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schemaVersion {version!r}", "schemaVersion")
    return doc


def _int_field(doc: dict, key: str) -> int:
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError("expected an integer", key)
    return v


def _kind(doc: dict, expected: str) -> None:
    if doc.get("kind") != expected:
        raise ParseError(f"expected kind {expected!r}, got {doc.get('kind')!r}", "kind")


# -- instances ---------------------------------------------------------------

@dataclass(frozen=True)
class InstanceFile:
    instance: Instance
    metadata: dict = field(default_factory=dict)


def parse_instance_file(text: str) -> InstanceFile:
    doc = _load(text)
    _kind(doc, "instance")
    n = _int_field(doc, "agents")
    m = _int_field(doc, "goods")
    rows = doc.get("valuations")
    if not isinstance(rows, list):
        raise ParseError("expected a list of rows", "valuations")
    if len(rows) != n:
        raise ParseError(f"{len(rows)} rows for {n} agents", "valuations")
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise ParseError("expected a list", f"valuations[{i}]")
        if len(row) != m:
            raise ParseError(f"{len(row)} entries for {m} goods", f"valuations[{i}]")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, int):
                raise ParseError(f"non-integer value {v!r}", f"valuations[{i}][{j}]")
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict) or set(meta) - set(_META_KEYS):
        raise ParseError(f"metadata keys must be among {list(_META_KEYS)}", "metadata")
    unknown = set(doc) - {"schemaVersion", "kind", "agents", "goods", "valuations", "metadata"}
    if unknown:
        raise ParseError(f"unknown fields {sorted(unknown)}", "document")
    return InstanceFile(validate_instance(rows, n, m), dict(meta))


def parse_instance(text: str) -> Instance:
    return parse_instance_file(text).instance


def serialize_instance(instance: Instance, metadata: dict | None = None) -> str:
    doc: dict[str, Any] = {
        "schemaVersion": SCHEMA_VERSION,
        "kind": "instance",
        "agents": instance.n,
        "goods": instance.m,
        "valuations": [list(r) for r in instance.values],
    }
    meta = {k: metadata[k] for k in _META_KEYS if metadata and k in metadata}
    if meta:
        doc["metadata"] = meta
    return _render(doc)


def canonicalize_instance(text: str) -> str:
    f = parse_instance_file(text)
    return serialize_instance(f.instance, f.metadata)


# -- results -----------------------------------------------------------------

@dataclass
class ResultFile:
    """Solver output: bundles, optional price certificate, oracle verdicts, stats."""
    bundles: list[list[int]]
    prices: tuple[Fraction, ...] | None = None
    checks: dict[str, dict] = field(default_factory=dict)
    stats: dict[str, Any] = field(default_factory=dict)
    method: str | None = None
    fairness: str | None = None
    name: str | None = None

    @property
    def allocation(self) -> Allocation:
        return Allocation.from_bundles(self.bundles)


def witness_json(w: Any) -> Any:
    """Make an oracle witness JSON-safe without losing exactness."""
    if w is None or isinstance(w, (bool, int, str)):
        return w
    if isinstance(w, Fraction):
        return fraction_str(w)
    if isinstance(w, Allocation):
        return w.as_lists()
    if isinstance(w, (list, tuple)):
        return [witness_json(x) for x in w]
    if isinstance(w, dict):
        return {str(k): witness_json(v) for k, v in w.items()}
    return str(w)


def serialize_result(res: ResultFile) -> str:
    doc: dict[str, Any] = {"schemaVersion": SCHEMA_VERSION, "kind": "result"}
    for key, val in (("name", res.name), ("fairness", res.fairness), ("method", res.method)):
        if val is not None:
            doc[key] = val
    doc["bundles"] = [sorted(b) for b in res.bundles]
    if res.prices is not None:
        doc["prices"] = [fraction_str(p) for p in res.prices]
    doc["checks"] = {
        k: {"holds": res.checks[k]["holds"], "witness": witness_json(res.checks[k].get("witness"))}
        for k in sorted(res.checks)
    }
    stats = {k: res.stats[k] for k in _STAT_KEYS if k in res.stats}
    stats.update({k: res.stats[k] for k in sorted(res.stats) if k not in _STAT_KEYS})
    doc["stats"] = stats
    return _render(doc)


def parse_result(text: str) -> ResultFile:
    doc = _load(text)
    _kind(doc, "result")
    bundles = doc.get("bundles")
    if not isinstance(bundles, list) or not all(
        isinstance(b, list) and all(isinstance(j, int) and not isinstance(j, bool) for j in b) for b in bundles
    ):
        raise ParseError("expected lists of good indices", "bundles")
    prices = None
    if "prices" in doc:
        raw = doc["prices"]
        if not isinstance(raw, list):
            raise ParseError("expected a list of rationals", "prices")
        out = []
        for j, p in enumerate(raw):
            if not isinstance(p, str) or not _RATIONAL.match(p):
                raise ParseError(f"expected a 'p/q' string, got {p!r}", f"prices[{j}]")
            num, den = p.split("/")
            if int(den) == 0:
                raise ParseError("zero denominator", f"prices[{j}]")
            out.append(Fraction(int(num), int(den)))
        prices = tuple(out)
    checks = doc.get("checks", {})
    if not isinstance(checks, dict):
        raise ParseError("expected an object", "checks")
    for k, v in checks.items():
        if not isinstance(v, dict) or not isinstance(v.get("holds"), bool):
            raise ParseError("expected {holds, witness}", f"checks.{k}")
    stats = doc.get("stats", {})
    if not isinstance(stats, dict):
        raise ParseError("expected an object", "stats")
    return ResultFile(
        bundles=bundles, prices=prices, checks=checks, stats=stats,
        method=doc.get("method"), fairness=doc.get("fairness"), name=doc.get("name"),
    )
