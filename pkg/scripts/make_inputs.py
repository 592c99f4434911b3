"""Writes the sample JSON inputs used in the README and CLI tests into data/."""
import json
from pathlib import Path

import numpy as np

from nchinf.io import matrix_to_json

OUT = Path(__file__).resolve().parent.parent / "data"


def write(name, obj):
    (OUT / name).write_text(json.dumps(obj, indent=1) + "\n")


def main():
    OUT.mkdir(exist_ok=True)
    write("nest22.json", {"n": 4, "kind": "nest", "blocks": [2, 2]})
    write("nest11.json", {"n": 2, "kind": "nest", "blocks": [1, 1]})
    write("diag2.json", {"n": 2, "kind": "span", "generators": [matrix_to_json(np.diag([1.0, 0.0]))]})
    write("span_e12.json", {"n": 2, "kind": "span", "generators": [matrix_to_json(np.array([[0, 1], [0, 0]]))]})
    write("id4.json", matrix_to_json(np.eye(4)))
    write("h.json", matrix_to_json(np.array([[1.0, 0.5], [0.5, 1.0]])))
    write("b.json", matrix_to_json(np.array([[2.0, 1.0], [1.0, 1.0]])))
    write("right_ideal.json", {"basis": [matrix_to_json(np.array([[1, 0], [0, 0]])),
                                          matrix_to_json(np.array([[0, 1], [0, 0]]))]})
    write("algebra_as_subspace.json", {"basis": [matrix_to_json(np.array([[1, 0], [0, 0]])),
                                                  matrix_to_json(np.array([[0, 1], [0, 0]])),
                                                  matrix_to_json(np.array([[0, 0], [0, 1]]))]})


if __name__ == "__main__":
    main()
