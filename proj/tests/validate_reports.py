"""Run the CLI with --json over a set of invocations and validate each report."""
import json
import subprocess
import sys
from pathlib import Path

import jsonschema


def invocations(data: Path):
    cos = str(data / "cos_shift.json")
    return [
        ["check", "--corpus", "z3_sum2", "--p", "3", "--from", "1", "--to", "600"],
        ["check", "--corpus", "z3_sum2", "--p", "1", "--from", "1", "--to", "600"],
        ["check", "--corpus", "ln2", "--p", "1", "--to", "300", "--convexity", "--slow-decay"],
        ["check", "--series", str(data / "signed_table.json"), "--p", "1", "--sign-pattern", "2"],
        ["check", "--series", str(data / "z3_pieces.json"), "--to", "600"],
        ["sum", "--corpus", "z3_sum2", "--tol", "1e-2", "--method", "improved", "--assume-limit-zero"],
        ["sum", "--corpus", "rd2", "--tol", "1e-8", "--assume-limit-zero", "--max-index", "2000"],
        ["bounds", "--corpus", "z3_sum2", "--omega", "2", "--m", "6..20"],
        ["bounds", "--corpus", "rd2", "--m", "20"],
        ["bounds", "--corpus", "ln2", "--m", "10..12", "--method", "delta", "--slow-decay"],
        ["zv", "--corpus", "cos_shift"],
        ["zv", "--series", cos, "--envelope", "1", "--grid-to", "200"],
        ["zv", "--series", str(data / "infeasible_envelopes.json"), "--grid-to", "50"],
        ["corpus", "list"],
    ]


def main() -> int:
    exe, schema_path, data = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for args in invocations(data):
        proc = subprocess.run([exe, *args, "--json"], capture_output=True, text=True, timeout=600)
        label = " ".join(args)
        try:
            report = json.loads(proc.stdout)
        except json.JSONDecodeError as e:
            print(f"FAIL {label}: not JSON ({e}); stderr: {proc.stderr.strip()}")
            failures += 1
            continue
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        if errors:
            failures += 1
            print(f"FAIL {label}: {errors[0].message} at {list(errors[0].path)}")
            continue
        if "exit_code" in report and report["exit_code"] != proc.returncode:
            failures += 1
            print(f"FAIL {label}: report exit_code {report['exit_code']} != process {proc.returncode}")
            continue
        print(f"ok   {label} (exit {proc.returncode})")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
