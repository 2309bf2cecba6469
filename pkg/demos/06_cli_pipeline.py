"""The full artifact workflow through the command-line interface.

Everything downstream of `train` works off the result JSON: simplify replays
the hierarchy, the matrix commands recompute against the original table, and
the browser viewer (frontend/) reads the same document.
"""

import json
import os
import tempfile

from gridclust.cli import main

work = tempfile.mkdtemp(prefix="gridclust_demo_")
table = os.path.join(work, "calls.tsv")
result = os.path.join(work, "calls.result.json")

steps = [
    ["gen-synthetic",
     "--var", "antenna:categorical:3:4", "--var", "hour:numerical:3",
     "--n", "8000", "--seed", "31", "--noise", "0.08", "--out", table],
    ["train", table,
     "--var", "antenna:categorical", "--var", "hour:numerical",
     "--seed", "7", "--vns-rounds", "6",
     "--embed-matrices", "--embed-typicality", "--out", result],
    ["simplify", result, "--info-ratio", "0.6",
     "--out", os.path.join(work, "simplified.json"),
     "--pareto-out", os.path.join(work, "pareto.csv")],
    ["typicality", result, table, "--variable", "antenna", "--cluster", "0",
     "--top", "5", "--out", os.path.join(work, "typicality.csv")],
    ["freq", result, table, "--row", "antenna", "--col", "hour",
     "--out", os.path.join(work, "freq")],
    ["cmi", result, table, "--row", "antenna", "--col", "hour",
     "--out", os.path.join(work, "cmi")],
]

for argv in steps:
    print("$ gridclust " + " ".join(argv))
    code = main(argv)
    assert code == 0, f"command failed: {argv}"
    print()

doc = json.load(open(result))
print(f"result document: shape={doc['model']['shape']}, "
      f"{len(doc['hierarchy']['records'])} hierarchy records, "
      f"{len(doc.get('matrices', []))} embedded matrices")
print(f"\nartifacts under {work}:")
for name in sorted(os.listdir(work)):
    print(f"  {name}")
print("\nopen frontend/index.html in a browser and load the result JSON "
      "to explore it interactively.")
