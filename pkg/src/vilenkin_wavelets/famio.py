"""Family files, verdict reports, and their serialization.

A family file is UTF-8 JSON:

    {"p": 3,
     "family": [
       {"name": "omega1", "cylinders": [{"resolution": 0, "digits": {"0": 1}}]},
       {"name": "omega2", "cylinders": [{"resolution": 0, "digits": {"0": 2}}]}]}

Digit keys are decimal-string positions; all digits must be below p and
the cylinders of one set must be pairwise disjoint.  Reports are emitted
with deterministic field order and exact measure strings, so identical
inputs always produce identical bytes.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import FamilyArityError, OverlapError, SchemaError, VilenkinError
from .setalg import Cylinder, Measure, PSet
from .verifier import ConditionRecord, VerdictReport, WaveletFamily

TOOL_NAME = "vilenkin-wavelets"


def measure_json(m: Measure) -> dict:
    return {"exact": m.exact_string(), "approx": float(m)}


# -- family files ------------------------------------------------------------------


def load_family_document(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: top level must be a JSON object")
    return doc


def family_from_document(doc: dict, *, where: str = "family file") -> WaveletFamily:
    if "p" not in doc:
        raise SchemaError(f"{where}: missing field 'p'")
    p = doc["p"]
    if not isinstance(p, int) or p < 2:
        raise SchemaError(f"{where}: 'p' must be an integer >= 2, got {p!r}")
    entries = doc.get("family")
    if not isinstance(entries, list) or not entries:
        raise SchemaError(f"{where}: 'family' must be a nonempty list")

    names = []
    sets = []
    for i, entry in enumerate(entries):
        loc = f"{where}: family[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{loc} must be an object")
        name = entry.get("name", f"omega{i + 1}")
        if not isinstance(name, str) or not name:
            raise SchemaError(f"{loc}.name must be a nonempty string")
        cylinders_json = entry.get("cylinders")
        if not isinstance(cylinders_json, list) or not cylinders_json:
            raise SchemaError(f"{loc}.cylinders must be a nonempty list")
        cylinders = []
        for k, cyl_json in enumerate(cylinders_json):
            cloc = f"{loc}.cylinders[{k}]"
            if not isinstance(cyl_json, dict) or "resolution" not in cyl_json:
                raise SchemaError(f"{cloc} must be an object with 'resolution'")
            digits = cyl_json.get("digits", {})
            if not isinstance(digits, dict):
                raise SchemaError(f"{cloc}.digits must be an object")
            try:
                pairs = tuple(
                    sorted((int(pos), int(d)) for pos, d in digits.items())
                )
                cylinders.append(Cylinder(p, int(cyl_json["resolution"]), pairs))
            except (ValueError, VilenkinError) as exc:
                raise SchemaError(f"{cloc}: {exc}") from exc
        try:
            sets.append(PSet(p, cylinders))
        except OverlapError as exc:
            raise SchemaError(f"{loc}: {exc}") from exc
        names.append(name)

    try:
        return WaveletFamily(p, tuple(names), tuple(sets))
    except FamilyArityError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def parse_family_file(path: str) -> WaveletFamily:
    return family_from_document(load_family_document(path), where=path)


def family_to_document(family: WaveletFamily) -> dict:
    return {
        "p": family.p,
        "family": [
            {"name": name, "cylinders": s.to_json()}
            for name, s in zip(family.names, family.sets)
        ],
    }


def save_family_file(family: WaveletFamily, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(family_to_document(family), handle, indent=2)
        handle.write("\n")


# -- reports -----------------------------------------------------------------------


def condition_json(record: ConditionRecord, *, exact: bool = True) -> dict:
    return {
        "name": record.name,
        "passed": record.passed,
        "exact": exact,
        "witnesses": record.witnesses,
        "measures": record.details,
    }


def verdict_conditions(report: VerdictReport) -> list[dict]:
    return [condition_json(record) for record in report.conditions]


def build_report(
    *,
    version: str,
    command: str,
    parameters: dict,
    verdict: str,
    conditions: list[dict],
    extra: dict | None = None,
    timing: float | None = None,
) -> dict:
    report: dict[str, Any] = {
        "tool": TOOL_NAME,
        "version": version,
        "command": command,
        "parameters": parameters,
        "verdict": verdict,
        "conditions": conditions,
    }
    if extra:
        report.update(extra)
    report["timing"] = timing
    return report


def emit_report(report: dict, fmt: str = "json") -> bytes:
    """Byte-stable rendering; field order follows construction order."""
    if fmt == "json":
        return (json.dumps(report, indent=2) + "\n").encode("utf-8")
    if fmt == "text":
        lines = [
            f"{report['tool']} {report['version']} :: {report['command']}",
            f"verdict: {report['verdict']}",
        ]
        for key, value in sorted(report.get("parameters", {}).items()):
            lines.append(f"  param {key} = {value}")
        for cond in report.get("conditions", []):
            status = "pass" if cond["passed"] else "FAIL"
            lines.append(f"  [{status}] {cond['name']}")
            for witness in cond.get("witnesses", [])[:8]:
                lines.append(f"    witness: {json.dumps(witness, sort_keys=True)}")
        if report.get("timing") is not None:
            lines.append(f"timing: {report['timing']:.3f}s")
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise SchemaError(f"unknown report format {fmt!r}")
