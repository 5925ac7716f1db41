#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Validate KML documents against the OGC KML 2.2 schema.

Usage: validate_kml.py SCHEMA_DIR FILE [FILE ...]
Exits 0 when every file validates, 1 otherwise.
"""
import sys
from pathlib import Path

from lxml import etree


def main(argv):
    if len(argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    schema_path = Path(argv[1]) / "ogckml22.xsd"
    schema = etree.XMLSchema(etree.parse(str(schema_path)))
    failed = False
    for name in argv[2:]:
        doc = etree.parse(name)
        if schema.validate(doc):
            print(f"{name}: valid")
        else:
            failed = True
            for err in schema.error_log:
                print(f"{name}:{err.line}: {err.message}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
