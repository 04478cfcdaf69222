"""Validate metrics.json files against schemas/metrics.schema.json."""
import json
import pathlib
import sys

import jsonschema


def main(argv):
    if len(argv) < 3:
        print("usage: validate_metrics.py SCHEMA METRICS...", file=sys.stderr)
        return 2
    schema = json.loads(pathlib.Path(argv[1]).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    failed = False
    for path in argv[2:]:
        errors = sorted(validator.iter_errors(json.loads(pathlib.Path(path).read_text())), key=str)
        for e in errors:
            print(f"{path}: {'/'.join(map(str, e.path))}: {e.message}", file=sys.stderr)
        failed |= bool(errors)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
