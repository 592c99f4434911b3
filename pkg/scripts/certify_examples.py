"""Condition reports for a fixed set of positive and negative examples."""
import numpy as np

from nchinf.algebra_core import MatrixAlgebra
from nchinf.certifier import condition_report, random_algebra
from nchinf.subalgebra import diagonal_algebra, make_nest, make_span


def examples():
    m2, m4 = MatrixAlgebra(2), MatrixAlgebra(4)
    yield "upper triangular M2", make_nest(m2, [1, 1])
    yield "nest [1,1,2] in M4", make_nest(m4, [1, 1, 2])
    yield "nest [2,2] in M4", make_nest(m4, [2, 2])
    yield "conjugated nest in M3", random_algebra("span_perturbed_nest", 3, 4)
    yield "full matrix algebra M3", make_nest(MatrixAlgebra(3), [3])
    for n in (2, 3, 4):
        yield f"diagonal M{n}", diagonal_algebra(MatrixAlgebra(n))
    yield "span{1, E12}", make_span(m2, [m2.unit(0, 1)])


def main(seed: int = 0):
    header = f"{'algebra':<24}" + "".join(f"{k:>14}" for k in "abcdef") + "  consistent"
    print(header)
    print("-" * len(header))
    for name, S in examples():
        rep = condition_report(S, seed=seed)
        row = "".join(f"{str(v).lower():>14}" for v in rep.conditions.values())
        print(f"{name:<24}{row}  {rep.consistency}")
        gaps = [s["gap"] for s in rep.evidence["d"]["samples"] if s["gap"] is not None]
        if gaps:
            print(f"{'':<24}largest Szego gap {np.max(gaps):.4g}")


if __name__ == "__main__":
    main()
