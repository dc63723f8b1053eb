#!/usr/bin/env python3
"""Convert a categorical CSV (UCI/KEEL style) into FIMI transaction format.

Every (column, value) pair becomes one item. Ids are assigned column by
column, values in order of first appearance, starting at 1. Lines starting
with '@' (KEEL headers) and blank lines are skipped. Missing values ('?')
are kept as ordinary values, matching the FIMI repository encodings.
"""
import argparse
import sys


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("input")
    ap.add_argument("output")
    args = ap.parse_args()

    rows = []
    with open(args.input, encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("@"):
                continue
            rows.append([field.strip() for field in line.split(",")])
    if not rows:
        print("no data rows", file=sys.stderr)
        return 1
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        print("ragged rows", file=sys.stderr)
        return 1

    ids = {}
    next_id = 1
    for col in range(width):
        for r in rows:
            key = (col, r[col])
            if key not in ids:
                ids[key] = next_id
                next_id += 1

    with open(args.output, "w", encoding="ascii", newline="\n") as out:
        for r in rows:
            out.write(" ".join(str(ids[(c, v)]) for c, v in enumerate(r)) + "\n")
    print(f"{len(rows)} transactions, {next_id - 1} items", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
