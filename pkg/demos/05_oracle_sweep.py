"""
Comparing matching numbers with the codegree bounds
===================================================

A sweep runs the exact oracle over a grid of instances and records, for each
one, the codegree profile, the matching number and how it compares with
``min(n - 1, Q)``. Small ``n`` can fall below that bound; those rows are
marked ``below_threshold`` rather than failed. The ``min(n - k + 2, Q)``
bound is a hard check.
"""

import collections
import json
import pathlib
import tempfile

from hypermatch.cli import main

spec = {
    "grid": [
        {"generator": "exhaustive", "k": 3, "n": 2},
        {"generator": "divisibility", "k": 3, "n": [2, 4]},
        {"generator": "space", "k": 3, "n": [3, 4], "profiles": "all"},
    ],
    "driver": True,
}

with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    (tmp / "spec.json").write_text(json.dumps(spec))
    code = main(["sweep", "--spec", str(tmp / "spec.json"), "--workers", "2", "--out", str(tmp / "out")])
    rows = [json.loads(line) for line in (tmp / "out" / "reports.jsonl").read_text().splitlines()]
    print("exit code", code, "rows", len(rows))
    print(collections.Counter(r["status"] for r in rows))
    print((tmp / "out" / "summary.csv").read_text().splitlines()[0])
    for r in rows:
        if "divisibility" in r["instance_id"] and r["n"] == 4:
            print(r["instance_id"], "nu", r["nu"], "bound", r["bound"], r["status"])
            break
