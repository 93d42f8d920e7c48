"""Runs a small simulation through the CLI and validates the report against the shipped schema."""

import json
import subprocess
import sys

import jsonschema


def main() -> int:
    cli, schema_path = sys.argv[1], sys.argv[2]
    with open(schema_path) as f:
        schema = json.load(f)
    runs = [
        ["simulate", "--reps", "3", "--ns", "200,500"],
        ["simulate", "--reps", "2", "--ns", "200", "--exact", "--settings", "2,4", "--algorithms", "alg3,alg4"],
        ["simulate", "--reps", "1", "--ns", "200", "--test", "permutation", "--permutations", "99", "--settings", "1"],
    ]
    for args in runs:
        out = subprocess.run([cli, *args], check=True, capture_output=True, text=True).stdout
        report = json.loads(out)
        jsonschema.validate(report, schema)
        cfg = report["config"]
        expected = len(cfg["settings"]) * len(cfg["sample_sizes"]) * len(cfg["algorithms"])
        if len(report["cells"]) != expected:
            print(f"cell count {len(report['cells'])} != {expected} for {args}")
            return 1
        print(f"ok: {' '.join(args)} ({len(report['cells'])} cells)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
