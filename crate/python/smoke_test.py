"""Smoke test for the compiled `phin` extension module."""

import json
import pathlib

import phin

DATA = pathlib.Path(__file__).resolve().parent.parent / "crates" / "cli" / "tests" / "data"


def main():
    tate = phin.PhiNModule(json.loads((DATA / "tate_curve.json").read_text()))
    assert tate.dim == 2
    assert tate.t_numbers() == ("1", "1")
    assert tate.is_weakly_admissible()["verdict"] == "admissible"
    assert tate.monodromy_weight_check()["holds"]

    bad = phin.PhiNModule((DATA / "kernel_fil.json").read_text())
    assert bad.is_weakly_admissible()["verdict"] == "not_admissible"

    even = phin.PhiNModule((DATA / "even_synthetic.json").read_text())
    assert even.gamma_quotient_check()["dim_c"] == 1

    assert phin.monodromy_filtration_dims([[0, 1, 0], [0, 0, 1], [0, 0, 0]], 2) == {-2: 1, 0: 1, 2: 1}
    assert phin.kernel_image_check([[0, 1], [0, 0]], 1)["conclusion"] is True
    assert phin.char_poly([[1, 2], [3, "1/2"]]) == ["-11/2", "-3/2", "1"]

    cx = phin.FilteredComplex.from_nerve((DATA / "triangle.json").read_text())
    assert cx.cohomology() == {0: 1, 1: 1, 2: 0}
    pages = phin.FilteredComplex((DATA / "late_differential.json").read_text())
    assert pages.degeneration_page() == 3

    h1 = phin.steenbrink(cycle=4)["degrees"][1]
    assert h1["monodromy_rank"] == 1 and h1["monodromy_is_weight"]

    assert phin.gaussian_binomial(3, 1, 2) == 7
    assert phin.ball_layers(1, 2, 2) == [1, 3, 6]
    assert phin.arrangement_poincare(2, 2) == [1, 6, 8]
    assert phin.blowup_poincare(2, 3) == [1, 0, 14, 0, 1]
    assert phin.point_count("blowup", 2, 2, 1) == 21

    try:
        phin.PhiNModule({"schema": 1})
    except ValueError:
        pass
    else:
        raise AssertionError("malformed input accepted")

    print("phin smoke test: ok")


if __name__ == "__main__":
    main()
