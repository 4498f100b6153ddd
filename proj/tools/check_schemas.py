"""Validate JSON documents against the schemas in schemas/.

usage: check_schemas.py SCHEMA_DIR SCHEMA_NAME FILE [SCHEMA_NAME FILE ...]
"""

import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource


def main(argv):
    schema_dir = pathlib.Path(argv[1])
    resources = []
    for path in schema_dir.glob("*.json"):
        doc = json.loads(path.read_text())
        resources.append((doc["$id"], Resource.from_contents(doc)))
    registry = Registry().with_resources(resources)
    failures = 0
    pairs = argv[2:]
    for name, target in zip(pairs[::2], pairs[1::2]):
        schema = json.loads((schema_dir / name).read_text())
        validator = jsonschema.Draft202012Validator(schema, registry=registry)
        errors = sorted(validator.iter_errors(json.loads(pathlib.Path(target).read_text())), key=str)
        for e in errors[:5]:
            print(f"{target}: {name}: {e.message} at {list(e.absolute_path)}")
        failures += bool(errors)
        print(f"{target}: {'ok' if not errors else 'INVALID'} against {name}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
