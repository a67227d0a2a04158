"""
Command-line runs and their artifacts
=====================================

The ``fpsearch`` command writes CSV (with ``# key=value`` metadata) or JSON.
Here it is driven through ``main`` so the example runs without a shell.
"""

import tempfile
from pathlib import Path

from fpsearch import cli
from fpsearch.io import parse_csv, parse_json

out = Path(tempfile.mkdtemp())

cli.main(["schedule", "--q", "2", "--delta", "0.1", "-o", str(out / "schedule.csv")])
print((out / "schedule.csv").read_text())

cli.main(["search", "--problem", "alpine02", "-o", str(out / "alpine.json")])
print(parse_json((out / "alpine.json").read_text())["result"])

# a custom problem declared in a config file
(out / "run.ini").write_text("[problem:bowl]\nobjective = x1^2 + x2^2\nbox = -1,1; -1,1\nepsilon = 0.2\n")
cli.main(["search", "--config", str(out / "run.ini"), "--problem", "bowl", "-o", str(out / "bowl.json")])
print(parse_json((out / "bowl.json").read_text())["result"]["minimal_q"])

cli.main(["noise", "--lambda", "0.004", "--depol", "0.01", "--q-max", "20", "-o", str(out / "noise.csv")])
meta, columns, rows = parse_csv((out / "noise.csv").read_text())
print(meta["version"], columns, rows[16])
