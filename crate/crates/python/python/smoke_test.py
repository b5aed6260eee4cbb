"""Smoke test for the wfc_terrain_py extension.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`
or `maturin build` followed by `pip install` of the wheel.
"""

import json
import sys

import wfc_terrain_py as wt


def check(cond, what):
    if not cond:
        print(f"FAIL {what}")
        sys.exit(1)
    print(f"ok   {what}")


def main():
    hm = wt.HeightMap([[1, 2, 4], [2, 4, 7], [4, 7, 11]])
    gf = hm.gradients()
    check(gf.gx() == [[1, 2], [2, 3]] and gf.gy() == [[1, 2], [2, 3]], "forward differences")
    check(gf.curl_residual() == (0, 0), "curl-free gradients")
    back = gf.integrate(1).to_list()
    check(back[:2] == [[1, 2, 4], [2, 4, 7]] and back[2][:2] == [4, 7], "integration")

    hgt = bytes([0, 1, 0, 2, 0, 3, 0, 4])
    check(wt.HeightMap.from_hgt(hgt, "N26E057").to_list() == [[1, 2], [3, 4]], "hgt decoding")

    sine = wt.HeightMap.synthetic("sine", 40, 40, seed=1)
    check(wt.HeightMap.from_ascii(sine.to_ascii()) == sine, "ascii round trip")
    check(sine.to_pgm().startswith(b"P5\n40 40\n65535\n"), "pgm header")
    check(sine.downsample(2).rows == 20, "downsampling")
    check(sine.window(5, 5, 10, 12).cols == 12, "windowing")

    model = wt.Model.train([sine])
    check(model.pattern_count > 0 and model.rule_count > 0, repr(model))
    check(wt.Model.from_text(model.to_text()).to_text() == model.to_text(), "model text round trip")

    field, attempt = model.generate(16, 16, seed=3)
    again, attempt_again = model.generate(16, 16, seed=3, parallel_attempts=4)
    check((field.rows, field.cols) == (17, 17), "output shape")
    check(field == again and attempt == attempt_again, "deterministic generation")
    check(field.curl_residual()[0] == 0, "generated field is integrable")

    report = wt.compare(sine.gradients(), field)
    check(0.0 <= report["intersection_score"] <= 1.0, "comparison report")
    json.dumps(report)

    try:
        wt.GradientField([[0, 0], [0, 0]], [[0, 1], [0, 0]]).integrate()
    except wt.TerrainError as e:
        check("curl" in str(e) or "integr" in str(e), "non-integrable field raises")
    else:
        check(False, "non-integrable field raises")

    print("all smoke checks passed")


if __name__ == "__main__":
    main()
