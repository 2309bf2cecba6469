"""Regenerate the committed toy artifacts and the viewer golden fixtures.

Run from the repository root:  python docs/examples/generate.py
"""

import json
import os

from gridclust import result_doc
from gridclust.cli import main
from gridclust.insights import frequency_matrix

HERE = os.path.dirname(os.path.abspath(__file__))
TABLE = os.path.join(HERE, "toy_table.tsv")
RESULT = os.path.join(HERE, "toy_result.json")
EXPECTED = os.path.join(HERE, "..", "..", "frontend", "testdata",
                        "expected_replay.json")


def run() -> None:
    assert main(["gen-synthetic",
                 "--var", "group:categorical:3:3",
                 "--var", "score:numerical:3:4",
                 "--n", "400", "--seed", "12", "--noise", "0.1",
                 "--out", TABLE]) == 0
    assert main(["train", TABLE,
                 "--var", "group:categorical", "--var", "score:numerical",
                 "--seed", "2", "--vns-rounds", "6",
                 "--embed-matrices", "--embed-typicality",
                 "--out", RESULT]) == 0

    doc = result_doc.load_document(RESULT)
    dataset = result_doc.dataset_from_document(doc, TABLE)
    steps = []
    n_records = doc["hierarchy"]["records"]
    for step in range(len(n_records) + 1):
        memberships = result_doc.replay_memberships(doc, step)
        model = result_doc.model_from_document(doc, dataset, step=step)
        freq = frequency_matrix(model, "group", "score")
        entry = {
            "step": step,
            "info_ratio": result_doc.info_ratio_at(doc, step),
            "memberships": [
                [
                    ({"id": p.id, "count": p.count,
                      "values": sorted(p.values)} if p.values is not None
                     else {"id": p.id, "count": p.count,
                           "lo_rank": p.lo_rank, "hi_rank": p.hi_rank})
                    for p in parts
                ]
                for parts in memberships
            ],
            "frequency": {
                "row": "group", "col": "score",
                "values": [[int(x) for x in row] for row in freq.values],
            },
        }
        steps.append(entry)
    os.makedirs(os.path.dirname(EXPECTED), exist_ok=True)
    with open(EXPECTED, "w", encoding="utf-8", newline="") as fh:
        json.dump({"steps": steps}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {TABLE}\nwrote {RESULT}\nwrote {EXPECTED}")


if __name__ == "__main__":
    run()
