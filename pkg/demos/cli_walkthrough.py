"""
The command-line tool
=====================

Writes a problem file to a temporary directory and runs a few subcommands
through ``reflectode.cli.main``, the same entry point as the ``reflectode``
console script.
"""

import tempfile
from pathlib import Path

from reflectode.cli import main

PROBLEM = """\
# x'(t) + x(-t) = sin(t), x(-1) = x(1)
[operator]
equation = x' + x(-t)

[forcing]
gamma = sin(t)
delta = 0

[boundary]
C = 1
K = -1
T = 1

[output]
points = 5
"""

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "periodic.ini"
    path.write_text(PROBLEM)
    for argv in (
        ["reduce", "--input", str(path)],
        ["basis", "--equation", "x' + 2 x(-t) = 0"],
        ["solve-bvp", "--input", str(path)],
        ["verify", "--input", str(path)],
    ):
        print("$ reflectode", " ".join(argv))
        code = main(argv)
        print(f"[exit {code}]\n")
