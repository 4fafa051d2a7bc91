#!/usr/bin/env python3
"""Validate shipped data and CLI output against the JSON schemas in schemas/."""

import json
import pathlib
import subprocess
import sys
import tempfile

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

root = pathlib.Path(__file__).resolve().parent.parent
schemas = {p.name: json.loads(p.read_text()) for p in (root / "schemas").glob("*.schema.json")}
registry = Registry().with_resources(
    (name, Resource.from_contents(doc)) for name, doc in schemas.items())
failures = 0


def check(schema_name, instance, where):
    global failures
    validator = Draft202012Validator(schemas[schema_name], registry=registry)
    errors = list(validator.iter_errors(instance))
    if errors:
        failures += 1
        print(f"FAIL {where}: {errors[0].message}")


def lines(path):
    return [json.loads(line) for line in path.read_text().splitlines() if line]


for name, doc in schemas.items():
    Draft202012Validator.check_schema(doc)
for p in (root / "data" / "regs").glob("*.json"):
    check("regulations.schema.json", json.loads(p.read_text()), p.name)
for p in (root / "data" / "scenes").glob("*.json"):
    check("scene.schema.json", json.loads(p.read_text()), p.name)
check("calibration.schema.json", json.loads((root / "data" / "calibration" / "default.json").read_text()),
      "default.json")
for p in (root / "data" / "golden").glob("*.trace"):
    for i, line in enumerate(lines(p)):
        check("session_trace.schema.json", line, f"{p.name}:{i + 1}")
for p in (root / "data" / "golden").glob("*.log"):
    for i, line in enumerate(lines(p)):
        check("catch_log.schema.json", line, f"{p.name}:{i + 1}")

if len(sys.argv) > 1:
    cli = sys.argv[1]
    scene = root / "data" / "scenes" / "undersize_fish.json"
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        subprocess.run([cli, "engine", "simulate", "--regs", str(root / "data" / "regs" / "lake_fixture.json"),
                        "--scene", str(scene), "--depth", f"scene:{scene}", "--duration", "25",
                        "--operator", "keep", "--operator-delay", "1", "--decision-timeout", "3",
                        "--log", str(tmp / "log.jsonl"), "--trace", str(tmp / "s.trace"),
                        "--ui-dump", str(tmp / "ui.jsonl")], check=True, stdout=subprocess.DEVNULL)
        seen = set()
        for i, m in enumerate(lines(tmp / "ui.jsonl")):
            seen.add(m["type"])
            check("ui_bridge.schema.json", m, f"ui message {i + 1}")
        for t in ("frame", "verdict", "refusal", "state"):
            if t not in seen:
                failures += 1
                print(f"FAIL no '{t}' message was produced")
        for i, line in enumerate(lines(tmp / "s.trace")):
            check("session_trace.schema.json", line, f"recorded trace:{i + 1}")
        for i, line in enumerate(lines(tmp / "log.jsonl")):
            check("catch_log.schema.json", line, f"recorded log:{i + 1}")
        for sample in ({"type": "decision", "value": "keep"}, {"type": "decision", "value": "release", "frame_id": 3}):
            check("ui_bridge.schema.json", sample, "inbound decision")

print("schemas: " + ("ok" if failures == 0 else f"{failures} failure(s)"))
sys.exit(1 if failures else 0)
