# Copyright 2026 The wsol-eval Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Validates reports written by the CLI tests against the shipped schemas."""

import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource


def main(schema_dir, report_dir):
    schema_dir = pathlib.Path(schema_dir)
    report_dir = pathlib.Path(report_dir)
    schemas = {}
    registry = Registry()
    for path in sorted(schema_dir.glob("*.schema.json")):
        schema = json.loads(path.read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        schemas[path.name] = schema
        resource = Resource.from_contents(schema)
        registry = registry.with_resource(schema["$id"], resource)

    expected = {
        "metric_boxes.json": "metric_report.schema.json",
        "metric_masks.json": "metric_report.schema.json",
        "search_ok.json": "search_report.schema.json",
        "search_failed.json": "search_report.schema.json",
    }
    failures = 0
    for report_name, schema_name in expected.items():
        path = report_dir / report_name
        if not path.exists():
            print(f"FAIL {report_name}: missing")
            failures += 1
            continue
        validator = jsonschema.Draft202012Validator(schemas[schema_name], registry=registry)
        errors = sorted(validator.iter_errors(json.loads(path.read_text())), key=str)
        for err in errors:
            print(f"FAIL {report_name}: {'/'.join(map(str, err.absolute_path))}: {err.message}")
        failures += len(errors)
        if not errors:
            print(f"ok   {report_name}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
